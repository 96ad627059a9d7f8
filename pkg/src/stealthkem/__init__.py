"""Stealth addresses from a lattice KEM plus secp256k1.

The shared secret comes from ML-KEM encapsulation against the recipient's
viewing key; the one-time Ethereum address comes from ordinary elliptic
curve arithmetic on the spending key. Registries, comparator scan kernels,
and a benchmark harness round out the package.
"""

from .errors import (
    BadInputError,
    ConflictError,
    IntegrityError,
    NotFoundError,
    StealthKemError,
)
from .kem import DEFAULT_KEM, KemEngine, KemSecretKey, get_engine
from .protocol import (
    Announcement,
    RecipientKeys,
    ScanMatch,
    ScanReport,
    SendOutcome,
    StealthMetaAddress,
    compute_view_tag,
    decode_meta,
    encode_meta,
    recipient_setup,
    scan,
    send,
)
from .registry import AnnouncementLog, MetaRegistry

__version__ = "0.1.0"

__all__ = [
    "Announcement",
    "AnnouncementLog",
    "BadInputError",
    "ConflictError",
    "DEFAULT_KEM",
    "IntegrityError",
    "KemEngine",
    "KemSecretKey",
    "MetaRegistry",
    "NotFoundError",
    "RecipientKeys",
    "ScanMatch",
    "ScanReport",
    "SendOutcome",
    "StealthKemError",
    "StealthMetaAddress",
    "compute_view_tag",
    "decode_meta",
    "encode_meta",
    "get_engine",
    "recipient_setup",
    "scan",
    "send",
]
