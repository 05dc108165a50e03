from __future__ import annotations

from osmec.nf._asf import ActiveApp, Asf
from osmec.nf._cpcf import (
    LEGACY_TAGS,
    MANO_REQUESTS_PATH,
    Cpcf,
    convert,
    decode_legacy,
    encode_legacy,
    identify_protocol,
)
from osmec.nf._descriptor import BUILTIN_DESCRIPTORS, NfDescriptor, descriptor
from osmec.nf._nrf import Nrf
from osmec.nf._srf import RegistrationRecord, Srf
from osmec.nf._udm import DataTable, Row, Udm, UdmClient
from osmec.nf._upf import CLOUD_PATH, RouteDecision, Upf

__all__ = [
    "BUILTIN_DESCRIPTORS",
    "CLOUD_PATH",
    "LEGACY_TAGS",
    "MANO_REQUESTS_PATH",
    "ActiveApp",
    "Asf",
    "Cpcf",
    "DataTable",
    "NfDescriptor",
    "Nrf",
    "RegistrationRecord",
    "RouteDecision",
    "Row",
    "Srf",
    "Udm",
    "UdmClient",
    "Upf",
    "convert",
    "decode_legacy",
    "descriptor",
    "encode_legacy",
    "identify_protocol",
]
