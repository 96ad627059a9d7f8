"""secp256k1 arithmetic, stealth key derivation, address computation."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stealthkem import curve
from stealthkem.curve import (
    GENERATOR,
    IDENTITY,
    ORDER,
    CurvePoint,
    ResampleRequiredError,
    add,
    checksum_address,
    decode_point,
    derive_stealth_priv,
    derive_stealth_pub,
    encode_point,
    eth_address,
    negate,
    scalar_base_mult,
    scalar_mult,
    scalar_mult_naive,
    spend_keygen,
    uncompressed64,
    xof_to_scalar,
)
from stealthkem.errors import BadInputError, InvalidPointError

scalars = st.integers(1, ORDER - 1)


class TestGroupLaw:
    def test_k1_is_generator(self):
        assert scalar_base_mult(1) == GENERATOR

    def test_k2_is_doubling(self):
        assert scalar_base_mult(2) == add(GENERATOR, GENERATOR)

    def test_order_annihilates(self):
        assert scalar_base_mult(ORDER).is_identity
        assert scalar_mult(ORDER, GENERATOR).is_identity

    def test_identity_cases(self):
        assert add(IDENTITY, GENERATOR) == GENERATOR
        assert add(GENERATOR, IDENTITY) == GENERATOR
        assert add(GENERATOR, negate(GENERATOR)).is_identity
        assert scalar_mult(5, IDENTITY).is_identity

    @settings(max_examples=30, deadline=None)
    @given(scalars)
    def test_base_mult_against_naive_oracle(self, k):
        assert scalar_base_mult(k) == scalar_mult_naive(k, GENERATOR)

    @settings(max_examples=15, deadline=None)
    @given(scalars, st.integers(1, 2**64))
    def test_var_mult_against_naive_oracle(self, k, m):
        pt = scalar_base_mult(k)
        assert scalar_mult(m, pt) == scalar_mult_naive(m, pt)

    @settings(max_examples=20, deadline=None)
    @given(scalars, scalars)
    def test_mult_distributes_over_add(self, a, b):
        lhs = scalar_base_mult((a + b) % ORDER)
        rhs = add(scalar_base_mult(a), scalar_base_mult(b))
        assert lhs == rhs

    def test_point_validation(self):
        with pytest.raises(InvalidPointError):
            CurvePoint(1, 1)  # not on curve
        with pytest.raises(InvalidPointError):
            CurvePoint(GENERATOR.x, None)  # half identity
        with pytest.raises(InvalidPointError):
            CurvePoint(curve.FIELD_P, 0)  # coordinate out of field


class TestXof:
    # frozen regression anchor: SHAKE-256(0^32), 48 bytes, reduced mod order
    ZERO_SECRET_SCALAR = 0x49F26E04797931FFAC56C22D31A65C4AE52BCBA18B4CFF74BC75D0E9ACAA01B5

    def test_fixed_vector_stable(self):
        assert xof_to_scalar(b"\x00" * 32) == self.ZERO_SECRET_SCALAR

    def test_distinct_secrets_distinct_scalars(self):
        assert xof_to_scalar(b"\x01" * 32) != xof_to_scalar(b"\x02" * 32)

    def test_output_below_order(self):
        rng = random.Random(7)
        for _ in range(10_000):
            assert xof_to_scalar(rng.randbytes(32)) < ORDER

    def test_length_enforced(self):
        with pytest.raises(BadInputError):
            xof_to_scalar(b"\x00" * 31)
        with pytest.raises(BadInputError):
            xof_to_scalar(b"\x00" * 33)

    def test_deterministic(self):
        s = random.Random(9).randbytes(32)
        assert xof_to_scalar(s) == xof_to_scalar(s)


class TestStealthDerivation:
    def test_injected_xof_zero_gives_spend_key(self, monkeypatch):
        k, big_k = spend_keygen(random.Random(1))
        monkeypatch.setattr(curve, "xof_to_scalar", lambda s: 0)
        assert derive_stealth_pub(big_k, b"\x00" * 32) == big_k
        assert derive_stealth_priv(k, b"\x00" * 32) == k

    def test_injected_xof_one_adds_generator(self, monkeypatch):
        k, big_k = spend_keygen(random.Random(2))
        monkeypatch.setattr(curve, "xof_to_scalar", lambda s: 1)
        assert derive_stealth_pub(big_k, b"\x00" * 32) == add(big_k, GENERATOR)
        assert derive_stealth_priv(k, b"\x00" * 32) == (k + 1) % ORDER

    def test_homomorphism_quantified(self):
        # p*g = K + XOF(S)*g over randomized (k, S) pairs
        rng = random.Random(0xABCD)
        for _ in range(1000):
            k = 1 + rng.randrange(ORDER - 1)
            s = rng.randbytes(32)
            p = derive_stealth_priv(k, s)
            assert 0 < p < ORDER
            assert scalar_base_mult(p) == derive_stealth_pub(scalar_base_mult(k), s)

    def test_wrap_around_order(self):
        s = b"\x5a" * 32
        t = xof_to_scalar(s)
        k = ORDER - t + 5  # forces k + t >= ORDER
        p = derive_stealth_priv(k, s)
        assert p == 5
        assert scalar_base_mult(p) == derive_stealth_pub(scalar_base_mult(k), s)

    def test_degenerate_zero_rejected(self):
        s = b"\x5a" * 32
        k = ORDER - xof_to_scalar(s)  # k + t == 0 mod order
        with pytest.raises(ResampleRequiredError):
            derive_stealth_priv(k, s)

    def test_identity_spend_pub_rejected(self):
        with pytest.raises(InvalidPointError):
            derive_stealth_pub(IDENTITY, b"\x00" * 32)

    def test_spend_priv_range_checked(self):
        with pytest.raises(BadInputError):
            derive_stealth_priv(0, b"\x00" * 32)
        with pytest.raises(BadInputError):
            derive_stealth_priv(ORDER, b"\x00" * 32)


class TestKeygen:
    def test_seeded_reproducible(self):
        a = spend_keygen(random.Random(99))
        b = spend_keygen(random.Random(99))
        assert a == b

    def test_keys_in_range_and_consistent(self):
        for seed in range(20):
            k, big_k = spend_keygen(random.Random(seed))
            assert 1 <= k < ORDER
            assert big_k == scalar_base_mult(k)

    def test_fresh_keygens_differ(self):
        assert spend_keygen()[0] != spend_keygen()[0]


class TestAddresses:
    # address of secp256k1 private key 1 -- the best-known test vector there is
    GENERATOR_ADDRESS = "7e5f4552091a69125d5dfcb7b8c2659029395bdf"

    def test_generator_address_pinned(self):
        assert eth_address(GENERATOR).hex() == self.GENERATOR_ADDRESS

    def test_length_always_20(self):
        for seed in range(10):
            _, pt = spend_keygen(random.Random(seed))
            assert len(eth_address(pt)) == 20

    def test_distinct_points_distinct_addresses(self):
        assert eth_address(GENERATOR) != eth_address(scalar_base_mult(2))

    def test_identity_rejected(self):
        with pytest.raises(InvalidPointError):
            eth_address(IDENTITY)
        with pytest.raises(InvalidPointError):
            uncompressed64(IDENTITY)

    def test_checksum_known_vectors(self):
        # EIP-55 reference addresses
        for want in (
            "0x5aAeb6053F3E94C9b9A09f33669435E7Ef1BeAed",
            "0xfB6916095ca1df60bB79Ce92cE3Ea74c37c5d359",
            "0xdbF03B407c01E7cD3CBea99509d93f8DDDC8C6FB",
            "0xD1220A0cf47c7B9Be7A2E6BA89F429762e7b9aDb",
        ):
            assert checksum_address(bytes.fromhex(want[2:])) == want

    def test_checksum_length_enforced(self):
        with pytest.raises(BadInputError):
            checksum_address(b"\x00" * 19)


class TestPointCodec:
    @settings(max_examples=25, deadline=None)
    @given(scalars)
    def test_round_trip(self, k):
        pt = scalar_base_mult(k)
        assert decode_point(encode_point(pt)) == pt

    def test_identity_not_encodable(self):
        with pytest.raises(InvalidPointError):
            encode_point(IDENTITY)

    def test_bad_encodings_rejected(self):
        good = encode_point(GENERATOR)
        with pytest.raises(InvalidPointError):
            decode_point(good[:-1])
        with pytest.raises(InvalidPointError):
            decode_point(b"\x05" + good[1:])
        with pytest.raises(InvalidPointError):
            decode_point(b"\x02" + curve.FIELD_P.to_bytes(32, "big"))
        # x with no curve point: x=5 has no square root for y^2 = x^3+7
        with pytest.raises(InvalidPointError):
            decode_point(b"\x02" + (5).to_bytes(32, "big"))

    def test_parity_bit_selects_y(self):
        pt = scalar_base_mult(3)
        flipped = bytes([encode_point(pt)[0] ^ 1]) + encode_point(pt)[1:]
        assert decode_point(flipped) == negate(pt)
