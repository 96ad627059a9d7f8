"""Stealth address protocol core: key bundles, announcements, scanning.

Flow between the two parties:

* recipient publishes a meta-address M = (K, V): EC spending public key
  plus KEM viewing public key;
* sender encapsulates against V to get (R, S), derives the one-time key
  P = K + XOF(S)*g and its Ethereum address, and publishes the
  announcement (R, view tag) where the tag is a prefix of keccak256(S);
* recipient decapsulates each announcement, discards ~255/256 of foreign
  traffic on the one-byte tag compare alone, and only derives EC keys for
  tag passes. The stealth private key is p = k + XOF(S), and p*g = P.

Scanning never errors on foreign or garbage announcements: decapsulation
is implicit-rejection, malformed records are counted and skipped.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from random import Random
from typing import Callable, Iterable, Sequence

from . import curve
from .curve import CurvePoint
from .errors import BadInputError, InvalidPointError
from .hashes import keccak256
from .kem import DEFAULT_KEM, KemSecretKey, get_engine

META_PREFIX = "st:eth:0x"

_KEM_BY_PK_SIZE = {1184: "ml_kem_768", 1568: "ml_kem_1024"}


@dataclass(frozen=True)
class StealthMetaAddress:
    """Published pair M = (K, V)."""

    spend_pub: CurvePoint
    view_pub: bytes

    @property
    def kem(self) -> str:
        try:
            return _KEM_BY_PK_SIZE[len(self.view_pub)]
        except KeyError:
            raise BadInputError(
                f"viewing key length {len(self.view_pub)} matches no parameter set"
            ) from None


@dataclass(frozen=True)
class RecipientKeys:
    """Private bundle: spending scalar and KEM viewing keypair."""

    spend_priv: int
    spend_pub: CurvePoint
    view_pub: bytes
    view_priv: KemSecretKey

    @property
    def meta(self) -> StealthMetaAddress:
        return StealthMetaAddress(self.spend_pub, self.view_pub)


@dataclass(frozen=True)
class Announcement:
    """Registry record: ephemeral KEM ciphertext R plus view tag."""

    ephemeral_ct: bytes
    view_tag: bytes
    sequence_no: int | None = None

    def __post_init__(self):
        if not 1 <= len(self.view_tag) <= 32:
            raise BadInputError(f"view tag length {len(self.view_tag)} outside [1, 32]")


@dataclass(frozen=True)
class SendOutcome:
    announcement: Announcement
    stealth_pub: CurvePoint
    stealth_address: bytes


@dataclass(frozen=True)
class ScanMatch:
    sequence_no: int | None
    stealth_address: bytes
    stealth_priv: int | None


@dataclass(frozen=True)
class ScanReport:
    matches: tuple[ScanMatch, ...]
    announcements_scanned: int
    view_tag_passes: int
    malformed: int
    elapsed_ns: int


def recipient_setup(
    rng: Random | None = None, kem: str = DEFAULT_KEM
) -> tuple[RecipientKeys, StealthMetaAddress]:
    """Generate the spending and viewing keypairs and the meta-address.

    A seeded Random reproduces the bundle exactly (test fixtures only).
    """
    engine = get_engine(kem)
    spend_priv, spend_pub = curve.spend_keygen(rng)
    view_pub, view_priv = engine.keygen(rng)
    keys = RecipientKeys(spend_priv, spend_pub, view_pub, view_priv)
    return keys, keys.meta


def compute_view_tag(shared_secret: bytes, tag_len: int = 1) -> bytes:
    """First tag_len bytes of keccak256(S)."""
    if not 1 <= tag_len <= 32:
        raise BadInputError(f"tag_len {tag_len} outside [1, 32]")
    return keccak256(shared_secret)[:tag_len]


def send(meta: StealthMetaAddress, tag_len: int = 1) -> SendOutcome:
    """Sender side: encapsulate, derive the one-time address, build the
    announcement. Asset transfer itself is out of scope; the outcome
    carries the address a wallet would pay."""
    engine = get_engine(meta.kem)
    ciphertext, shared = engine.encaps(meta.view_pub)
    stealth_pub = curve.derive_stealth_pub(meta.spend_pub, shared)
    return SendOutcome(
        announcement=Announcement(ciphertext, compute_view_tag(shared, tag_len)),
        stealth_pub=stealth_pub,
        stealth_address=curve.eth_address(stealth_pub),
    )


def _scan_chunk(
    keys: RecipientKeys,
    engine,
    chunk: Sequence[tuple[int, Announcement]],
    tag_len: int,
    address_filter: Callable[[bytes], bool] | None,
) -> tuple[list[ScanMatch], int, int]:
    matches: list[ScanMatch] = []
    passes = 0
    malformed = 0
    ct_size = engine.ciphertext_size
    for seq, ann in chunk:
        if len(ann.ephemeral_ct) != ct_size or len(ann.view_tag) != tag_len:
            malformed += 1
            continue
        shared = engine.decaps(keys.view_priv, ann.ephemeral_ct)
        if keccak256(shared)[:tag_len] != ann.view_tag:
            continue
        passes += 1
        stealth_pub = curve.derive_stealth_pub(keys.spend_pub, shared)
        address = curve.eth_address(stealth_pub)
        if address_filter is not None and not address_filter(address):
            continue
        matches.append(
            ScanMatch(seq, address, curve.derive_stealth_priv(keys.spend_priv, shared))
        )
    return matches, passes, malformed


def scan(
    keys: RecipientKeys,
    announcements: Iterable[Announcement],
    tag_len: int = 1,
    address_filter: Callable[[bytes], bool] | None = None,
    workers: int | None = None,
) -> ScanReport:
    """Recipient side: decapsulate every announcement, filter on the view
    tag, derive keys for passes.

    address_filter stands in for the on-chain balance check that tells a
    real wallet whether a derived address actually received assets; tag
    collisions from foreign announcements are filtered by it. With the
    default None every tag pass is reported as a match.

    workers > 1 partitions the scan across threads; the merged report is
    identical to the sequential one (decapsulation is a pure function).
    """
    if not 1 <= tag_len <= 32:
        raise BadInputError(f"tag_len {tag_len} outside [1, 32]")
    engine = get_engine(keys.view_priv.kem)
    indexed = [
        (ann.sequence_no if ann.sequence_no is not None else i, ann)
        for i, ann in enumerate(announcements)
    ]
    start = time.perf_counter_ns()
    if workers and workers > 1 and len(indexed) > 1:
        step = (len(indexed) + workers - 1) // workers
        chunks = [indexed[i : i + step] for i in range(0, len(indexed), step)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(
                pool.map(
                    lambda c: _scan_chunk(keys, engine, c, tag_len, address_filter),
                    chunks,
                )
            )
        matches = [m for part in parts for m in part[0]]
        passes = sum(part[1] for part in parts)
        malformed = sum(part[2] for part in parts)
    else:
        matches, passes, malformed = _scan_chunk(
            keys, engine, indexed, tag_len, address_filter
        )
    elapsed = time.perf_counter_ns() - start
    return ScanReport(
        matches=tuple(matches),
        announcements_scanned=len(indexed),
        view_tag_passes=passes,
        malformed=malformed,
        elapsed_ns=elapsed,
    )


def encode_meta(meta: StealthMetaAddress) -> str:
    """Canonical text form: st:eth:0x + hex(compressed K || V)."""
    return META_PREFIX + (curve.encode_point(meta.spend_pub) + meta.view_pub).hex()


def decode_meta(text: str) -> StealthMetaAddress:
    """Parse and validate the canonical text form; the KEM parameter set
    is inferred from the viewing-key length."""
    if not text.startswith(META_PREFIX):
        raise BadInputError(f"meta-address must start with {META_PREFIX!r}")
    try:
        blob = bytes.fromhex(text[len(META_PREFIX):])
    except ValueError:
        raise BadInputError("meta-address payload is not valid hex") from None
    sizes = {33 + pk_size: kem for pk_size, kem in _KEM_BY_PK_SIZE.items()}
    if len(blob) not in sizes:
        raise BadInputError(
            f"meta-address payload length {len(blob)} matches no parameter set"
        )
    spend_pub = curve.decode_point(blob[:33])
    meta = StealthMetaAddress(spend_pub, blob[33:])
    return meta


def keys_to_json(keys: RecipientKeys) -> str:
    """Private key bundle as a JSON document (for permission-restricted files)."""
    return json.dumps(
        {
            "version": 1,
            "kem": keys.view_priv.kem,
            "spend_priv": f"{keys.spend_priv:064x}",
            "kem_seed": keys.view_priv.seed.hex(),
        },
        indent=2,
    )


def keys_from_json(text: str) -> RecipientKeys:
    try:
        doc = json.loads(text)
        kem = doc["kem"]
        spend_priv = int(doc["spend_priv"], 16)
        seed = bytes.fromhex(doc["kem_seed"])
    except (json.JSONDecodeError, KeyError, ValueError, TypeError) as exc:
        raise BadInputError(f"unreadable key bundle: {exc}") from None
    if not 1 <= spend_priv < curve.ORDER:
        raise BadInputError("spending key outside [1, order)")
    engine = get_engine(kem)
    view_priv = engine.secret_key_from_seed(seed)
    return RecipientKeys(
        spend_priv=spend_priv,
        spend_pub=curve.scalar_base_mult(spend_priv),
        view_pub=engine.public_key_of(view_priv),
        view_priv=view_priv,
    )
