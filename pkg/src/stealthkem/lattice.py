"""Modular reduction, infinity norms, centered binomial sampling, and the
compress/decompress pair over Z_q.

Self-contained integer math used by the KEM conformance suite and the
property tests; defaults follow the Kyber-768 parameter regime (q=3329,
n=256, k=3) but every operation takes explicit parameters.

Rounding convention: nearest integer with ties rounded down, uniformly in
compress, decompress, and the error bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import (
    BadInputError,
    InsufficientEntropyError,
    InvalidModulusError,
    InvalidParameterError,
)

KYBER_Q = 3329
KYBER_N = 256
KYBER_K = 3


@dataclass(frozen=True)
class ZqElement:
    """Residue in [0, q)."""

    value: int
    q: int

    def __post_init__(self):
        if self.q < 1:
            raise InvalidModulusError(f"modulus must be >= 1, got {self.q}")
        if not 0 <= self.value < self.q:
            raise BadInputError(f"value {self.value} outside [0, {self.q})")


@dataclass(frozen=True)
class RqPolynomial:
    """Polynomial with n coefficients in Z_q, n a power of two."""

    coefficients: tuple[ZqElement, ...]

    def __post_init__(self):
        n = len(self.coefficients)
        if n == 0 or n & (n - 1):
            raise InvalidParameterError(f"coefficient count {n} is not a power of 2")
        q = self.coefficients[0].q
        if any(c.q != q for c in self.coefficients):
            raise InvalidParameterError("coefficients mix different moduli")

    @property
    def n(self) -> int:
        return len(self.coefficients)

    @property
    def q(self) -> int:
        return self.coefficients[0].q

    def __add__(self, other: "RqPolynomial") -> "RqPolynomial":
        if self.n != other.n or self.q != other.q:
            raise InvalidParameterError("polynomial parameter mismatch")
        return RqPolynomial(
            tuple(
                ZqElement((a.value + b.value) % self.q, self.q)
                for a, b in zip(self.coefficients, other.coefficients)
            )
        )


@dataclass(frozen=True)
class RqVector:
    """Rank-k vector of polynomials sharing one (n, q)."""

    entries: tuple[RqPolynomial, ...]

    def __post_init__(self):
        if not self.entries:
            raise InvalidParameterError("vector needs at least one entry")
        n, q = self.entries[0].n, self.entries[0].q
        if any(e.n != n or e.q != q for e in self.entries):
            raise InvalidParameterError("entries mix different (n, q)")

    @property
    def k(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class CbdParams:
    """Width parameter eta of the centered binomial distribution."""

    eta: int

    def __post_init__(self):
        if self.eta < 1:
            raise InvalidParameterError(f"eta must be >= 1, got {self.eta}")


def poly_from_ints(values: Iterable[int], q: int = KYBER_Q) -> RqPolynomial:
    return RqPolynomial(tuple(mod_reduce(v, q) for v in values))


def vector_from_ints(rows: Iterable[Iterable[int]], q: int = KYBER_Q) -> RqVector:
    return RqVector(tuple(poly_from_ints(row, q) for row in rows))


def mod_reduce(r: int, q: int) -> ZqElement:
    """Unique representative r' == r (mod q) with 0 <= r' < q."""
    if q < 1:
        raise InvalidModulusError(f"modulus must be >= 1, got {q}")
    return ZqElement(r % q, q)


def mod_reduce_symmetric(r: int, q: int) -> int:
    """Signed representative of r mod q with magnitude <= q/2.

    The representative is r' when r' <= q/2 and r' - q otherwise, where r'
    is the plain reduction; for odd q this lands in (-q/2, q/2].
    """
    if q < 2:
        raise InvalidModulusError(f"modulus must be >= 2, got {q}")
    r0 = r % q
    return r0 if r0 <= q // 2 else r0 - q


def inf_norm(x: ZqElement | RqPolynomial | RqVector) -> int:
    """Infinity norm: |symmetric representative|, maximized over
    coefficients for polynomials and over entries for vectors."""
    if isinstance(x, ZqElement):
        return abs(mod_reduce_symmetric(x.value, x.q))
    if isinstance(x, RqPolynomial):
        return max(abs(mod_reduce_symmetric(c.value, c.q)) for c in x.coefficients)
    if isinstance(x, RqVector):
        return max(inf_norm(e) for e in x.entries)
    raise BadInputError(f"unsupported operand type {type(x).__name__}")


def bits_from_bytes(data: bytes) -> Iterator[int]:
    """Bit stream over data, least-significant bit of each byte first."""
    for byte in data:
        for i in range(8):
            yield (byte >> i) & 1


def sample_cbd(params: CbdParams, bit_stream: Iterator[int]) -> int:
    """One centered-binomial sample: sum(a_i) - sum(b_i) over the next
    2*eta bits of the stream. Output lies in [-eta, eta]."""
    eta = params.eta
    try:
        a = sum(next(bit_stream) for _ in range(eta))
        b = sum(next(bit_stream) for _ in range(eta))
    except (StopIteration, RuntimeError):
        # a drained iterator surfaces as RuntimeError out of the generator
        # expression (PEP 479), StopIteration if next() is called bare
        raise InsufficientEntropyError(
            f"bit stream exhausted before {2 * eta} bits were read"
        ) from None
    return a - b


def div_round_half_down(a: int, b: int) -> int:
    """Nearest integer to a/b with ties rounded down; a >= 0, b >= 1."""
    return -((b - 2 * a) // (2 * b))


def compress(x: ZqElement, d: int) -> int:
    """Map x to the d-bit value nearest to (2^d / q) * x, ties down."""
    if d < 1 or (1 << d) >= x.q:
        raise InvalidParameterError(f"need 1 <= d with 2^d < q, got d={d}, q={x.q}")
    return div_round_half_down(x.value << d, x.q) % (1 << d)


def decompress(y: int, d: int, q: int = KYBER_Q) -> ZqElement:
    """Approximate inverse of compress: nearest integer to (q / 2^d) * y."""
    if d < 1 or (1 << d) >= q:
        raise InvalidParameterError(f"need 1 <= d with 2^d < q, got d={d}, q={q}")
    if not 0 <= y < (1 << d):
        raise BadInputError(f"value {y} outside [0, 2^{d})")
    return ZqElement(div_round_half_down(q * y, 1 << d) % q, q)


def compress_error_bound(q: int, d: int) -> int:
    """Worst-case |decompress(compress(x)) - x| over Z_q, as the nearest
    integer to q / 2^(d+1) with ties down."""
    return div_round_half_down(q, 1 << (d + 1))
