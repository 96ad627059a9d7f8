"""secp256k1 arithmetic and stealth key derivation.

Spending keys are scalars mod the group order; the stealth keypair comes
from the homomorphism p*g = (k + t)*g = K + t*g where t is the XOF of the
KEM shared secret. Addresses follow the Ethereum convention: last 20 bytes
of Keccak-256 over the 64-byte uncompressed point.

Internals use Jacobian coordinates with a windowed fixed-base table for
k*g. A naive affine double-and-add is kept as an independent oracle for the
property tests.
"""

from __future__ import annotations

import hashlib
import secrets
from dataclasses import dataclass
from random import Random

from .errors import BadInputError, InvalidPointError, StealthKemError
from .hashes import keccak256

# field prime, curve y^2 = x^3 + 7, standard generator, prime group order
FIELD_P = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEFFFFFC2F
CURVE_B = 7
GX = 0x79BE667EF9DCBBAC55A06295CE870B07029BFCDB2DCE28D959F2815B16F81798
GY = 0x483ADA7726A3C4655DA4FBFC0E1108A8FD17B448A68554199C47D08FFB10D4B8
ORDER = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141


class ResampleRequiredError(StealthKemError):
    """A derived private key degenerated to zero; caller must resample."""


@dataclass(frozen=True)
class CurvePoint:
    """Affine point or the group identity (x = y = None)."""

    x: int | None
    y: int | None

    def __post_init__(self):
        if (self.x is None) != (self.y is None):
            raise InvalidPointError("half-identity coordinates")
        if self.x is not None:
            if not (0 <= self.x < FIELD_P and 0 <= self.y < FIELD_P):
                raise InvalidPointError("coordinate outside the field")
            if (self.y * self.y - self.x * self.x * self.x - CURVE_B) % FIELD_P:
                raise InvalidPointError("point not on curve")

    @property
    def is_identity(self) -> bool:
        return self.x is None


IDENTITY = CurvePoint(None, None)
GENERATOR = CurvePoint(GX, GY)

# Jacobian triples (X, Y, Z); Z == 0 marks the identity.
_JAC_IDENTITY = (1, 1, 0)


def _jac_double(pt):
    x1, y1, z1 = pt
    p = FIELD_P
    if z1 == 0 or y1 == 0:
        return _JAC_IDENTITY
    a = x1 * x1 % p
    b = y1 * y1 % p
    c = b * b % p
    d = 2 * ((x1 + b) * (x1 + b) - a - c) % p
    e = 3 * a % p
    f = e * e % p
    x3 = (f - 2 * d) % p
    y3 = (e * (d - x3) - 8 * c) % p
    z3 = 2 * y1 * z1 % p
    return (x3, y3, z3)


def _jac_add(p1, p2):
    x1, y1, z1 = p1
    x2, y2, z2 = p2
    p = FIELD_P
    if z1 == 0:
        return p2
    if z2 == 0:
        return p1
    z1z1 = z1 * z1 % p
    z2z2 = z2 * z2 % p
    u1 = x1 * z2z2 % p
    u2 = x2 * z1z1 % p
    s1 = y1 * z2 % p * z2z2 % p
    s2 = y2 * z1 % p * z1z1 % p
    h = (u2 - u1) % p
    r = (s2 - s1) % p
    if h == 0:
        return _jac_double(p1) if r == 0 else _JAC_IDENTITY
    hh = h * h % p
    hhh = h * hh % p
    v = u1 * hh % p
    x3 = (r * r - hhh - 2 * v) % p
    y3 = (r * (v - x3) - s1 * hhh) % p
    z3 = z1 * z2 % p * h % p
    return (x3, y3, z3)


def _jac_add_affine(p1, x2, y2):
    # mixed addition with an affine second operand (Z2 = 1)
    x1, y1, z1 = p1
    p = FIELD_P
    if z1 == 0:
        return (x2, y2, 1)
    z1z1 = z1 * z1 % p
    u2 = x2 * z1z1 % p
    s2 = y2 * z1 % p * z1z1 % p
    h = (u2 - x1) % p
    r = (s2 - y1) % p
    if h == 0:
        return _jac_double(p1) if r == 0 else _JAC_IDENTITY
    hh = h * h % p
    hhh = h * hh % p
    v = x1 * hh % p
    x3 = (r * r - hhh - 2 * v) % p
    y3 = (r * (v - x3) - y1 * hhh) % p
    z3 = z1 * h % p
    return (x3, y3, z3)


def _to_jac(pt: CurvePoint):
    return _JAC_IDENTITY if pt.is_identity else (pt.x, pt.y, 1)


def _to_affine(pt) -> CurvePoint:
    x, y, z = pt
    if z == 0:
        return IDENTITY
    p = FIELD_P
    zinv = pow(z, -1, p)
    zinv2 = zinv * zinv % p
    return CurvePoint(x * zinv2 % p, y * zinv2 % p * zinv % p)


_WINDOW = 6
_base_tables: list[list[tuple[int, int]]] | None = None


def _build_base_tables() -> list[list[tuple[int, int]]]:
    # tables[i][j-1] = (j << (6*i)) * G in affine form, j in 1..63
    tables = []
    block = _to_jac(GENERATOR)
    for _ in range((256 + _WINDOW - 1) // _WINDOW):
        row_jac = []
        acc = _JAC_IDENTITY
        for _j in range(1, 1 << _WINDOW):
            acc = _jac_add(acc, block)
            row_jac.append(acc)
        tables.append([(p.x, p.y) for p in map(_to_affine, row_jac)])
        for _ in range(_WINDOW):
            block = _jac_double(block)
    return tables


def _jac_base_mult(k: int):
    global _base_tables
    if _base_tables is None:
        _base_tables = _build_base_tables()
    k %= ORDER
    acc = _JAC_IDENTITY
    i = 0
    while k:
        window = k & ((1 << _WINDOW) - 1)
        if window:
            x2, y2 = _base_tables[i][window - 1]
            acc = _jac_add_affine(acc, x2, y2)
        k >>= _WINDOW
        i += 1
    return acc


def scalar_base_mult(k: int) -> CurvePoint:
    """k*g via the fixed-base window table."""
    return _to_affine(_jac_base_mult(k))


def scalar_mult(k: int, pt: CurvePoint) -> CurvePoint:
    """k*pt for an arbitrary point, double-and-add over Jacobian coords."""
    k %= ORDER
    if k == 0 or pt.is_identity:
        return IDENTITY
    acc = _JAC_IDENTITY
    for bit in bin(k)[2:]:
        acc = _jac_double(acc)
        if bit == "1":
            acc = _jac_add_affine(acc, pt.x, pt.y)
    return _to_affine(acc)


def scalar_mult_naive(k: int, pt: CurvePoint) -> CurvePoint:
    """Independent affine double-and-add oracle; slow, test use only."""
    k %= ORDER
    result = IDENTITY
    addend = pt
    while k:
        if k & 1:
            result = add(result, addend)
        addend = add(addend, addend)
        k >>= 1
    return result


def add(p1: CurvePoint, p2: CurvePoint) -> CurvePoint:
    """Affine group law, including doubling and identity cases."""
    if p1.is_identity:
        return p2
    if p2.is_identity:
        return p1
    p = FIELD_P
    if p1.x == p2.x:
        if (p1.y + p2.y) % p == 0:
            return IDENTITY
        slope = 3 * p1.x * p1.x % p * pow(2 * p1.y % p, -1, p) % p
    else:
        slope = (p2.y - p1.y) % p * pow((p2.x - p1.x) % p, -1, p) % p
    x3 = (slope * slope - p1.x - p2.x) % p
    y3 = (slope * (p1.x - x3) - p1.y) % p
    return CurvePoint(x3, y3)


def negate(pt: CurvePoint) -> CurvePoint:
    if pt.is_identity:
        return pt
    return CurvePoint(pt.x, (-pt.y) % FIELD_P)


def spend_keygen(rng: Random | None = None) -> tuple[int, CurvePoint]:
    """Fresh spending keypair (k, K = k*g), k uniform in [1, order).

    Pass a seeded Random only for reproducible test fixtures; the default
    draws from the OS entropy pool.
    """
    if rng is None:
        k = 1 + secrets.randbelow(ORDER - 1)
    else:
        k = 1 + rng.randrange(ORDER - 1)
    return k, scalar_base_mult(k)


def xof_to_scalar(shared_secret: bytes) -> int:
    """Map a 32-byte shared secret to a scalar: SHAKE-256 with 48-byte
    output reduced mod the order, keeping reduction bias below 2^-128."""
    if len(shared_secret) != 32:
        raise BadInputError(f"shared secret must be 32 bytes, got {len(shared_secret)}")
    wide = hashlib.shake_256(shared_secret).digest(48)
    return int.from_bytes(wide, "big") % ORDER


def derive_stealth_pub(spend_pub: CurvePoint, shared_secret: bytes) -> CurvePoint:
    """Stealth public key P = K + XOF(S)*g, sender side."""
    if spend_pub.is_identity:
        raise InvalidPointError("spending public key cannot be the identity")
    t = xof_to_scalar(shared_secret)
    acc = _jac_base_mult(t)
    acc = _jac_add_affine(acc, spend_pub.x, spend_pub.y)
    return _to_affine(acc)


def derive_stealth_priv(spend_priv: int, shared_secret: bytes) -> int:
    """Stealth private key p = k + XOF(S) mod order, recipient side."""
    if not 1 <= spend_priv < ORDER:
        raise BadInputError("spending key outside [1, order)")
    p = (spend_priv + xof_to_scalar(shared_secret)) % ORDER
    if p == 0:
        raise ResampleRequiredError("derived stealth key is zero; resample")
    return p


def uncompressed64(pt: CurvePoint) -> bytes:
    """64-byte x||y encoding used for address hashing."""
    if pt.is_identity:
        raise InvalidPointError("identity has no uncompressed encoding")
    return pt.x.to_bytes(32, "big") + pt.y.to_bytes(32, "big")


def eth_address(pt: CurvePoint) -> bytes:
    """Last 20 bytes of Keccak-256 over the uncompressed point."""
    return keccak256(uncompressed64(pt))[-20:]


def checksum_address(addr: bytes) -> str:
    """EIP-55 mixed-case hex string for a 20-byte address."""
    if len(addr) != 20:
        raise BadInputError(f"address must be 20 bytes, got {len(addr)}")
    hexaddr = addr.hex()
    digest = keccak256(hexaddr.encode("ascii")).hex()
    out = []
    for ch, d in zip(hexaddr, digest):
        out.append(ch.upper() if ch.isalpha() and int(d, 16) >= 8 else ch)
    return "0x" + "".join(out)


def encode_point(pt: CurvePoint) -> bytes:
    """33-byte SEC1 compressed encoding."""
    if pt.is_identity:
        raise InvalidPointError("identity has no compressed encoding")
    return bytes([2 + (pt.y & 1)]) + pt.x.to_bytes(32, "big")


def decode_point(data: bytes) -> CurvePoint:
    """Parse a 33-byte SEC1 compressed point, validating curve membership."""
    if len(data) != 33 or data[0] not in (2, 3):
        raise InvalidPointError("expected a 33-byte compressed point")
    x = int.from_bytes(data[1:], "big")
    if x >= FIELD_P:
        raise InvalidPointError("x coordinate outside the field")
    y_sq = (x * x * x + CURVE_B) % FIELD_P
    y = pow(y_sq, (FIELD_P + 1) // 4, FIELD_P)
    if y * y % FIELD_P != y_sq:
        raise InvalidPointError("x has no square root on the curve")
    if (y & 1) != (data[0] & 1):
        y = FIELD_P - y
    return CurvePoint(x, y)
