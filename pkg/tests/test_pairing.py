"""BLS12-381 pairing: frozen vectors, algebraic laws, native parity.

Two independent implementations back each other: the pure-Python affine
Miller loop here and the compiled projective one. Both are checked against
the definitional final exponentiation (a direct power by (p^4-p^2+1)/r) and
the bilinearity/order laws that pin the pairing up to implementation error.
"""

import json
import random
from pathlib import Path

import pytest

from stealthkem import pairing as pr
from stealthkem.errors import BadInputError, InvalidPointError

KAT = json.loads((Path(__file__).parent / "data" / "pairing_kat.json").read_text())


class TestGroupOps:
    def test_generators_on_curve(self):
        assert pr.g1_on_curve(pr.G1_GEN)
        assert pr.g2_on_curve(pr.G2_GEN)

    def test_group_order_annihilates(self):
        assert pr.g1_scalar_mult(pr.R_ORDER, pr.G1_GEN) is None
        assert pr.g2_scalar_mult(pr.R_ORDER, pr.G2_GEN) is None

    def test_add_against_scalar_mult(self):
        three = pr.g1_add(pr.g1_add(pr.G1_GEN, pr.G1_GEN), pr.G1_GEN)
        assert three == pr.g1_scalar_mult(3, pr.G1_GEN)
        three2 = pr.g2_add(pr.g2_add(pr.G2_GEN, pr.G2_GEN), pr.G2_GEN)
        assert three2 == pr.g2_scalar_mult(3, pr.G2_GEN)

    def test_identity_handling(self):
        assert pr.g1_add(None, pr.G1_GEN) == pr.G1_GEN
        assert pr.g1_add(pr.G1_GEN, None) == pr.G1_GEN
        assert pr.g1_scalar_mult(0, pr.G1_GEN) is None

    def test_encodings(self):
        assert len(pr.g1_to_bytes(pr.G1_GEN)) == 96
        assert len(pr.g2_to_bytes(pr.G2_GEN)) == 192

    def test_frozen_points(self):
        assert pr.g1_to_bytes(pr.g1_scalar_mult(KAT["scalar_a"], pr.G1_GEN)).hex() == KAT["g1_a"]
        assert pr.g2_to_bytes(pr.g2_scalar_mult(KAT["scalar_b"], pr.G2_GEN)).hex() == KAT["g2_b"]


class TestPairingValues:
    def test_generator_pairing_frozen(self):
        e = pr.pairing(pr.G1_GEN, pr.G2_GEN)
        assert pr.fp12_to_bytes(e).hex() == KAT["generator_pairing"]

    def test_scaled_pairing_frozen(self):
        p1 = pr.g1_scalar_mult(KAT["scalar_a"], pr.G1_GEN)
        q2 = pr.g2_scalar_mult(KAT["scalar_b"], pr.G2_GEN)
        assert pr.fp12_to_bytes(pr.pairing(p1, q2)).hex() == KAT["scaled_pairing"]

    def test_fast_final_exp_equals_naive(self):
        f = pr.miller_loop(pr.G1_GEN, pr.G2_GEN)
        fast = pr.final_exponentiation(f, fast=True)
        naive = pr.final_exponentiation(f, fast=False)
        assert pr.fp12_to_bytes(fast) == pr.fp12_to_bytes(naive)

    def test_bilinearity(self):
        rng = random.Random(71)
        a, b = rng.randrange(2, 2**32), rng.randrange(2, 2**32)
        e_base = pr.pairing(pr.G1_GEN, pr.G2_GEN)
        e_scaled = pr.pairing(
            pr.g1_scalar_mult(a, pr.G1_GEN), pr.g2_scalar_mult(b, pr.G2_GEN)
        )
        assert pr.fp12_to_bytes(e_scaled) == pr.fp12_to_bytes(
            pr.fp12_pow(e_base, a * b)
        )

    def test_left_right_scaling_agree(self):
        k = 12345
        left = pr.pairing(pr.g1_scalar_mult(k, pr.G1_GEN), pr.G2_GEN)
        right = pr.pairing(pr.G1_GEN, pr.g2_scalar_mult(k, pr.G2_GEN))
        assert pr.fp12_to_bytes(left) == pr.fp12_to_bytes(right)

    def test_non_degenerate_and_order_r(self):
        e = pr.pairing(pr.G1_GEN, pr.G2_GEN)
        assert e != pr.FP12_ONE
        assert pr.fp12_pow(e, pr.R_ORDER) == pr.FP12_ONE


class TestNativeParity:
    pytestmark = pytest.mark.skipif(
        not pr.native_available(), reason="compiled pairing unavailable"
    )

    def test_generator_parity(self):
        assert pr.pairing_bytes(pr.G1_GEN, pr.G2_GEN).hex() == KAT["generator_pairing"]

    def test_random_point_parity(self):
        rng = random.Random(72)
        for _ in range(3):
            a = rng.randrange(2, pr.R_ORDER)
            b = rng.randrange(2, pr.R_ORDER)
            p1 = pr.g1_scalar_mult(a, pr.G1_GEN)
            q2 = pr.g2_scalar_mult(b, pr.G2_GEN)
            want = pr.fp12_to_bytes(pr.pairing(p1, q2))
            assert pr._native_pairing(pr.g1_to_bytes(p1), pr.g2_to_bytes(q2)) == want

    def test_native_rejects_bad_points(self):
        off_curve = (1).to_bytes(48, "big") + (1).to_bytes(48, "big")
        with pytest.raises(ValueError):
            pr._native_pairing(off_curve, pr.g2_to_bytes(pr.G2_GEN))
        non_canonical = pr.P_MOD.to_bytes(48, "big") + (0).to_bytes(48, "big")
        with pytest.raises(ValueError):
            pr._native_pairing(non_canonical, pr.g2_to_bytes(pr.G2_GEN))
        bad_g2 = (1).to_bytes(48, "big") * 4
        with pytest.raises(ValueError):
            pr._native_pairing(pr.g1_to_bytes(pr.G1_GEN), bad_g2)

    def test_native_input_length_checked(self):
        with pytest.raises(ValueError):
            pr._native_pairing(b"\x00" * 95, pr.g2_to_bytes(pr.G2_GEN))


class TestValidation:
    def test_off_curve_g1_rejected(self):
        with pytest.raises(InvalidPointError):
            pr.pairing((1, 1), pr.G2_GEN)

    def test_off_twist_g2_rejected(self):
        with pytest.raises(InvalidPointError):
            pr.pairing(pr.G1_GEN, ((1, 1), (1, 1)))

    def test_identity_rejected(self):
        with pytest.raises(BadInputError):
            pr.pairing(None, pr.G2_GEN)
        with pytest.raises(BadInputError):
            pr.pairing(pr.G1_GEN, None)


class TestFieldTower:
    def test_fp2_inverse(self):
        rng = random.Random(73)
        for _ in range(5):
            a = (rng.randrange(1, pr.P_MOD), rng.randrange(pr.P_MOD))
            assert pr.fp2_mul(a, pr.fp2_inv(a)) == pr.FP2_ONE

    def test_fp6_inverse(self):
        rng = random.Random(74)
        a = tuple(
            (rng.randrange(1, pr.P_MOD), rng.randrange(pr.P_MOD)) for _ in range(3)
        )
        assert pr.fp6_mul(a, pr.fp6_inv(a)) == pr.FP6_ONE

    def test_fp12_inverse_and_conj(self):
        e = pr.pairing(pr.G1_GEN, pr.G2_GEN)
        assert pr.fp12_mul(e, pr.fp12_inv(e)) == pr.FP12_ONE
        # in the cyclotomic subgroup (image of final exp), conj == inverse
        assert pr.fp12_conj(e) == pr.fp12_inv(e)

    def test_frobenius_is_p_power(self):
        e = pr.pairing(pr.G1_GEN, pr.G2_GEN)
        assert pr.fp12_to_bytes(pr.fp12_frobenius(e, 1)) == pr.fp12_to_bytes(
            pr.fp12_pow(e, pr.P_MOD)
        )

    def test_fp12_serialization_shape(self):
        blob = pr.fp12_to_bytes(pr.FP12_ONE)
        assert len(blob) == 576
        # the constant 1: first coefficient 1, everything else 0
        assert blob[47] == 1 and blob.count(0) == 575
