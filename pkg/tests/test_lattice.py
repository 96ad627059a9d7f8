"""Modular reduction, norms, CBD sampling, and the compress/decompress pair."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stealthkem.errors import (
    BadInputError,
    InsufficientEntropyError,
    InvalidModulusError,
    InvalidParameterError,
)
from stealthkem.lattice import (
    KYBER_Q,
    CbdParams,
    RqPolynomial,
    RqVector,
    ZqElement,
    bits_from_bytes,
    compress,
    compress_error_bound,
    decompress,
    div_round_half_down,
    inf_norm,
    mod_reduce,
    mod_reduce_symmetric,
    poly_from_ints,
    sample_cbd,
    vector_from_ints,
)


class TestModReduce:
    def test_wraps_above_q(self):
        assert mod_reduce(3330, 3329).value == 1

    def test_zero(self):
        assert mod_reduce(0, 3329).value == 0

    def test_negative_wraps(self):
        assert mod_reduce(-1, 3329).value == 3328

    def test_zero_modulus_rejected(self):
        with pytest.raises(InvalidModulusError):
            mod_reduce(5, 0)

    @given(st.integers(-(10**9), 10**9), st.integers(1, 10**6))
    def test_congruence_and_range(self, r, q):
        out = mod_reduce(r, q)
        assert 0 <= out.value < q
        assert (out.value - r) % q == 0


class TestModReduceSymmetric:
    def test_above_half_goes_negative(self):
        assert mod_reduce_symmetric(3, 4) == -1

    def test_boundary_half_kept(self):
        assert mod_reduce_symmetric(2, 4) == 2

    def test_kyber_q_minus_one(self):
        assert mod_reduce_symmetric(3328, 3329) == -1

    def test_small_modulus_rejected(self):
        with pytest.raises(InvalidModulusError):
            mod_reduce_symmetric(5, 1)

    def test_brute_force_small_q(self):
        # verify the case split against the definition for every residue class
        for q in (2, 3, 4, 5, 17, 3329):
            for r in range(2 * q):
                out = mod_reduce_symmetric(r, q)
                r0 = r % q
                assert out == (r0 if r0 <= q // 2 else r0 - q)

    @given(st.integers(-(10**9), 10**9), st.integers(2, 10**6))
    def test_congruence_and_magnitude(self, r, q):
        out = mod_reduce_symmetric(r, q)
        assert (out - r) % q == 0
        assert abs(out) <= q / 2

    @given(st.integers(-(10**6), 10**6), st.integers(1, 1000))
    def test_odd_q_range(self, r, k):
        # odd modulus: representative lies in (-q/2, q/2]
        q = 2 * k + 1
        out = mod_reduce_symmetric(r, q)
        assert -q / 2 < out <= q / 2


class TestInfNorm:
    def test_zero_polynomial(self):
        assert inf_norm(poly_from_ints([0] * 256)) == 0

    def test_scalar_near_q(self):
        assert inf_norm(ZqElement(3328, 3329)) == 1

    def test_vector_max_coefficient(self):
        vec = vector_from_ints([[0] * 256, [1664] + [0] * 255, [0] * 256])
        assert inf_norm(vec) == 1664

    def test_vector_matches_direct_max(self):
        import random

        rng = random.Random(42)
        rows = [[rng.randrange(KYBER_Q) for _ in range(16)] for _ in range(3)]
        vec = vector_from_ints(rows)
        direct = max(
            abs(mod_reduce_symmetric(c, KYBER_Q)) for row in rows for c in row
        )
        assert inf_norm(vec) == direct

    def test_unsupported_type(self):
        with pytest.raises(BadInputError):
            inf_norm("not a lattice object")

    @given(st.integers(0, KYBER_Q - 1))
    def test_nonneg_zero_iff_zero(self, v):
        n = inf_norm(ZqElement(v, KYBER_Q))
        assert n >= 0
        assert (n == 0) == (v == 0)
        assert n <= KYBER_Q // 2

    @given(
        st.lists(st.integers(0, KYBER_Q - 1), min_size=8, max_size=8),
        st.lists(st.integers(0, KYBER_Q - 1), min_size=8, max_size=8),
    )
    def test_triangle_inequality(self, xs, ys):
        a, b = poly_from_ints(xs), poly_from_ints(ys)
        assert inf_norm(a + b) <= inf_norm(a) + inf_norm(b)


class TestDomainTypes:
    def test_zq_range_enforced(self):
        with pytest.raises(BadInputError):
            ZqElement(3329, 3329)
        with pytest.raises(BadInputError):
            ZqElement(-1, 3329)

    def test_poly_count_power_of_two(self):
        with pytest.raises(InvalidParameterError):
            poly_from_ints([1, 2, 3])
        with pytest.raises(InvalidParameterError):
            RqPolynomial(())

    def test_poly_mixed_moduli(self):
        with pytest.raises(InvalidParameterError):
            RqPolynomial((ZqElement(1, 17), ZqElement(1, 19)))

    def test_vector_mixed_shapes(self):
        with pytest.raises(InvalidParameterError):
            RqVector((poly_from_ints([1, 2]), poly_from_ints([1, 2, 3, 4])))
        with pytest.raises(InvalidParameterError):
            RqVector(())

    def test_poly_add_mismatch(self):
        with pytest.raises(InvalidParameterError):
            poly_from_ints([1, 2]) + poly_from_ints([1, 2, 3, 4])


class TestCbd:
    def test_equal_bits_cancel(self):
        assert sample_cbd(CbdParams(2), iter([1, 1, 1, 1])) == 0

    def test_max_value(self):
        assert sample_cbd(CbdParams(2), iter([1, 1, 0, 0])) == 2

    def test_min_value(self):
        assert sample_cbd(CbdParams(2), iter([0, 0, 1, 1])) == -2

    def test_exhausted_stream(self):
        with pytest.raises(InsufficientEntropyError):
            sample_cbd(CbdParams(3), iter([1, 0, 1]))

    def test_eta_validated(self):
        with pytest.raises(InvalidParameterError):
            CbdParams(0)

    @pytest.mark.parametrize("eta", [1, 2, 3, 4])
    def test_exhaustive_distribution(self, eta):
        # all 2^(2*eta) patterns must reproduce the binomial-difference law
        counts = {}
        for pattern in range(1 << (2 * eta)):
            bits = iter((pattern >> i) & 1 for i in range(2 * eta))
            x = sample_cbd(CbdParams(eta), bits)
            assert -eta <= x <= eta
            counts[x] = counts.get(x, 0) + 1
        for x in range(-eta, eta + 1):
            assert counts.get(x, 0) == math.comb(2 * eta, eta + x)
        total = 1 << (2 * eta)
        variance = Fraction(sum(x * x * c for x, c in counts.items()), total)
        assert variance == Fraction(eta, 2)

    def test_bits_from_bytes_lsb_first(self):
        assert list(bits_from_bytes(b"\x01")) == [1, 0, 0, 0, 0, 0, 0, 0]
        assert list(bits_from_bytes(b"\x80"))[-1] == 1

    def test_byte_stream_source(self):
        # the documented byte-source usage: CBD over a keyed stream
        stream = bits_from_bytes(bytes([0b0011, 0b1100]))
        assert sample_cbd(CbdParams(2), stream) == 2  # a=(1,1), b=(0,0)


class TestCompress:
    def test_zero(self):
        assert compress(ZqElement(0, 3329), 10) == 0

    def test_near_q_wraps_to_zero(self):
        # round(2*3328/3329) = 2, reduced mod 2^1 -> 0
        assert compress(ZqElement(3328, 3329), 1) == 0

    def test_d_too_large(self):
        with pytest.raises(InvalidParameterError):
            compress(ZqElement(1, 3329), 12)
        with pytest.raises(InvalidParameterError):
            compress(ZqElement(1, 3329), 0)

    def test_decompress_zero(self):
        assert decompress(0, 10, 3329).value == 0

    def test_decompress_range_checked(self):
        with pytest.raises(BadInputError):
            decompress(1024, 10, 3329)
        with pytest.raises(BadInputError):
            decompress(-1, 10, 3329)
        with pytest.raises(InvalidParameterError):
            decompress(0, 12, 3329)

    def test_error_bound_value_d10(self):
        # nearest integer to 3329/2048 with ties down
        assert compress_error_bound(3329, 10) == 2

    def test_error_bound_value_d4(self):
        assert compress_error_bound(3329, 4) == 104

    @given(st.integers(0, 10**6), st.integers(1, 10**6))
    def test_rounding_oracle(self, a, b):
        # nearest integer, ties down, against an exact Fraction computation
        frac = Fraction(a, b)
        lo = math.floor(frac)
        expect = lo if frac - lo <= Fraction(1, 2) else lo + 1
        assert div_round_half_down(a, b) == expect

    @given(st.integers(0, KYBER_Q - 1), st.integers(1, 11))
    def test_round_trip_bound_sampled(self, x, d):
        err = decompress(compress(ZqElement(x, KYBER_Q), d), d, KYBER_Q).value - x
        assert abs(mod_reduce_symmetric(err, KYBER_Q)) <= compress_error_bound(KYBER_Q, d)

    @settings(max_examples=30)
    @given(st.integers(2, 12))
    def test_compress_output_range(self, d):
        q = (1 << d) + 7  # smallest-ish odd q above 2^d
        for x in (0, 1, q // 2, q - 1):
            y = compress(ZqElement(x, q), d)
            assert 0 <= y < (1 << d)
