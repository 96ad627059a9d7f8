"""BLS12-381 optimal-ate pairing.

This backs the pairing-based scan comparator in the benchmark: one pairing
evaluation per announcement is the dominant per-scan cost being modeled.
The code here is the pure-Python reference; the compiled helper library
provides the same computation at benchmark speed, and the two are
cross-checked byte for byte.

Tower: Fp2 = Fp[u]/(u^2+1), Fp6 = Fp2[v]/(v^3 - xi) with xi = 1+u,
Fp12 = Fp6[w]/(w^2 - v). G2 lives on the twist y^2 = x^3 + 4(1+u); line
functions are evaluated with the base-field point mapped through the twist
(coefficients land on w^0, w^2, w^3), which keeps all curve arithmetic in
Fp2. The final exponentiation's hard part uses the exponent decomposition
d = l0 + l1*p + l2*p^2 + l3*p^3 with l3 = c*(1-x), l2 = x*l3,
l1 = x*l2 - l3, l0 = x*l1 + 1, c = (1-x)/3, verified against the naive
power (p^4 - p^2 + 1)/r in the tests.

Elements are plain ints and tuples, not classes: this module is also the
correctness oracle for the native path, so it favors transparency.
"""

from __future__ import annotations

from .errors import BadInputError, InvalidPointError

P_MOD = 0x1A0111EA397FE69A4B1BA7B6434BACD764774B84F38512BF6730D2A0F6B0F6241EABFFFEB153FFFFB9FEFFFFFFFFAAAB
R_ORDER = 0x73EDA753299D7D483339D80809A1D80553BDA402FFFE5BFEFFFFFFFF00000001
BLS_X_ABS = 0xD201000000010000  # the curve parameter is -BLS_X_ABS

G1_GEN = (
    0x17F1D3A73197D7942695638C4FA9AC0FC3688C4F9774B905A14E3A3F171BAC586C55E83FF97A1AEFFB3AF00ADB22C6BB,
    0x08B3F481E3AAA0F1A09E30ED741D8AE4FCF5E095D5D00AF600DB18CB2C04B3EDD03CC744A2888AE40CAA232946C5E7E1,
)
G2_GEN = (
    (
        0x024AA2B2F08F0A91260805272DC51051C6E47AD4FA403B02B4510B647AE3D1770BAC0326A805BBEFD48056C8C121BDB8,
        0x13E02B6052719F607DACD3A088274F65596BD0D09920B61AB5DA61BBDC7F5049334CF11213945D57E5AC7D055D042B7E,
    ),
    (
        0x0CE5D527727D6E118CC9CDC6DA2E351AADFD9BAA8CBDD3A76D429A695160D12C923AC9CC3BACA289E193548608B82801,
        0x0606C4A02EA734CC32ACD2B02BC28B99CB3E287E85A763AF267492AB572E99AB3F370D275CEC1DA1AAA9075FF05F79BE,
    ),
)

_P = P_MOD

# ---------------------------------------------------------------- Fp2

FP2_ZERO = (0, 0)
FP2_ONE = (1, 0)


def fp2_add(a, b):
    return ((a[0] + b[0]) % _P, (a[1] + b[1]) % _P)


def fp2_sub(a, b):
    return ((a[0] - b[0]) % _P, (a[1] - b[1]) % _P)


def fp2_neg(a):
    return ((-a[0]) % _P, (-a[1]) % _P)


def fp2_conj(a):
    return (a[0], (-a[1]) % _P)


def fp2_mul(a, b):
    t0 = a[0] * b[0]
    t1 = a[1] * b[1]
    # u^2 = -1
    return ((t0 - t1) % _P, ((a[0] + a[1]) * (b[0] + b[1]) - t0 - t1) % _P)


def fp2_sq(a):
    # (a0 + a1 u)^2 = (a0+a1)(a0-a1) + 2 a0 a1 u
    return ((a[0] + a[1]) * (a[0] - a[1]) % _P, 2 * a[0] * a[1] % _P)


def fp2_scale(a, k: int):
    return (a[0] * k % _P, a[1] * k % _P)


def fp2_inv(a):
    norm_inv = pow(a[0] * a[0] + a[1] * a[1], -1, _P)
    return (a[0] * norm_inv % _P, -a[1] * norm_inv % _P)


def fp2_mul_xi(a):
    # multiply by xi = 1 + u
    return ((a[0] - a[1]) % _P, (a[0] + a[1]) % _P)


def fp2_pow(a, e: int):
    result = FP2_ONE
    base = a
    while e:
        if e & 1:
            result = fp2_mul(result, base)
        base = fp2_sq(base)
        e >>= 1
    return result


# ---------------------------------------------------------------- Fp6

FP6_ZERO = (FP2_ZERO, FP2_ZERO, FP2_ZERO)
FP6_ONE = (FP2_ONE, FP2_ZERO, FP2_ZERO)


def fp6_add(a, b):
    return (fp2_add(a[0], b[0]), fp2_add(a[1], b[1]), fp2_add(a[2], b[2]))


def fp6_sub(a, b):
    return (fp2_sub(a[0], b[0]), fp2_sub(a[1], b[1]), fp2_sub(a[2], b[2]))


def fp6_neg(a):
    return (fp2_neg(a[0]), fp2_neg(a[1]), fp2_neg(a[2]))


def fp6_mul(a, b):
    a0, a1, a2 = a
    b0, b1, b2 = b
    # schoolbook with v^3 = xi
    c0 = fp2_add(fp2_mul(a0, b0), fp2_mul_xi(fp2_add(fp2_mul(a1, b2), fp2_mul(a2, b1))))
    c1 = fp2_add(fp2_add(fp2_mul(a0, b1), fp2_mul(a1, b0)), fp2_mul_xi(fp2_mul(a2, b2)))
    c2 = fp2_add(fp2_add(fp2_mul(a0, b2), fp2_mul(a2, b0)), fp2_mul(a1, b1))
    return (c0, c1, c2)


def fp6_mul_v(a):
    # multiply by v: (a0, a1, a2) -> (xi*a2, a0, a1)
    return (fp2_mul_xi(a[2]), a[0], a[1])


def fp6_inv(a):
    a0, a1, a2 = a
    t0 = fp2_sub(fp2_sq(a0), fp2_mul_xi(fp2_mul(a1, a2)))
    t1 = fp2_sub(fp2_mul_xi(fp2_sq(a2)), fp2_mul(a0, a1))
    t2 = fp2_sub(fp2_sq(a1), fp2_mul(a0, a2))
    denom = fp2_add(
        fp2_mul(a0, t0),
        fp2_mul_xi(fp2_add(fp2_mul(a2, t1), fp2_mul(a1, t2))),
    )
    dinv = fp2_inv(denom)
    return (fp2_mul(t0, dinv), fp2_mul(t1, dinv), fp2_mul(t2, dinv))


# ---------------------------------------------------------------- Fp12

FP12_ONE = (FP6_ONE, FP6_ZERO)


def fp12_mul(a, b):
    a0, a1 = a
    b0, b1 = b
    t0 = fp6_mul(a0, b0)
    t1 = fp6_mul(a1, b1)
    # w^2 = v
    c0 = fp6_add(t0, fp6_mul_v(t1))
    c1 = fp6_sub(
        fp6_mul(fp6_add(a0, a1), fp6_add(b0, b1)),
        fp6_add(t0, t1),
    )
    return (c0, c1)


def fp12_sq(a):
    return fp12_mul(a, a)


def fp12_conj(a):
    return (a[0], fp6_neg(a[1]))


def fp12_inv(a):
    a0, a1 = a
    denom = fp6_sub(fp6_mul(a0, a0), fp6_mul_v(fp6_mul(a1, a1)))
    dinv = fp6_inv(denom)
    return (fp6_mul(a0, dinv), fp6_neg(fp6_mul(a1, dinv)))


def fp12_pow(a, e: int):
    result = FP12_ONE
    base = a
    while e:
        if e & 1:
            result = fp12_mul(result, base)
        base = fp12_sq(base)
        e >>= 1
    return result


# Frobenius constants: xi^((p-1)/3), xi^(2(p-1)/3), xi^((p-1)/6)
_XI = (1, 1)
_FROB6_C1 = fp2_pow(_XI, (_P - 1) // 3)
_FROB6_C2 = fp2_pow(_XI, 2 * (_P - 1) // 3)
_FROB12_C1 = fp2_pow(_XI, (_P - 1) // 6)


def _fp6_frob(a):
    return (
        fp2_conj(a[0]),
        fp2_mul(fp2_conj(a[1]), _FROB6_C1),
        fp2_mul(fp2_conj(a[2]), _FROB6_C2),
    )


def fp12_frobenius(a, power: int = 1):
    result = a
    for _ in range(power):
        c0 = _fp6_frob(result[0])
        c1 = _fp6_frob(result[1])
        c1 = tuple(fp2_mul(coeff, _FROB12_C1) for coeff in c1)
        result = (c0, c1)
    return result


def fp12_to_bytes(a) -> bytes:
    """Canonical 576-byte encoding: coefficients of w^0..w^5, each an Fp2
    as (real, imaginary) 48-byte big-endian pairs."""
    c0, c1 = a
    flat = (c0[0], c1[0], c0[1], c1[1], c0[2], c1[2])
    out = bytearray()
    for real, imag in flat:
        out += real.to_bytes(48, "big") + imag.to_bytes(48, "big")
    return bytes(out)


# ---------------------------------------------------------------- curves

G1_B = 4
G2_B = fp2_scale(fp2_mul_xi(FP2_ONE), 4)  # 4*(1+u)


def g1_on_curve(pt) -> bool:
    if pt is None:
        return True
    x, y = pt
    return (y * y - x * x * x - G1_B) % _P == 0


def g2_on_curve(pt) -> bool:
    if pt is None:
        return True
    x, y = pt
    lhs = fp2_sq(y)
    rhs = fp2_add(fp2_mul(fp2_sq(x), x), G2_B)
    return lhs == rhs


def g1_add(p1, p2):
    if p1 is None:
        return p2
    if p2 is None:
        return p1
    x1, y1 = p1
    x2, y2 = p2
    if x1 == x2:
        if (y1 + y2) % _P == 0:
            return None
        lam = 3 * x1 * x1 % _P * pow(2 * y1 % _P, -1, _P) % _P
    else:
        lam = (y2 - y1) % _P * pow((x2 - x1) % _P, -1, _P) % _P
    x3 = (lam * lam - x1 - x2) % _P
    return (x3, (lam * (x1 - x3) - y1) % _P)


def g1_scalar_mult(k: int, pt):
    k %= R_ORDER
    result = None
    addend = pt
    while k:
        if k & 1:
            result = g1_add(result, addend)
        addend = g1_add(addend, addend)
        k >>= 1
    return result


def g2_add(p1, p2):
    if p1 is None:
        return p2
    if p2 is None:
        return p1
    x1, y1 = p1
    x2, y2 = p2
    if x1 == x2:
        if fp2_add(y1, y2) == FP2_ZERO:
            return None
        lam = fp2_mul(fp2_scale(fp2_sq(x1), 3), fp2_inv(fp2_scale(y1, 2)))
    else:
        lam = fp2_mul(fp2_sub(y2, y1), fp2_inv(fp2_sub(x2, x1)))
    x3 = fp2_sub(fp2_sub(fp2_sq(lam), x1), x2)
    return (x3, fp2_sub(fp2_mul(lam, fp2_sub(x1, x3)), y1))


def g2_scalar_mult(k: int, pt):
    k %= R_ORDER
    result = None
    addend = pt
    while k:
        if k & 1:
            result = g2_add(result, addend)
        addend = g2_add(addend, addend)
        k >>= 1
    return result


# ---------------------------------------------------------------- pairing

def _line_fp12(l0, l2, l3):
    # sparse element l0 + l2 w^2 + l3 w^3 in tower form
    return ((l0, l2, FP2_ZERO), (FP2_ZERO, l3, FP2_ZERO))


def miller_loop(p1, q2):
    """f_{|x|,Q}(P) with the negative parameter handled by conjugation."""
    xp, yp = p1
    t = q2
    f = FP12_ONE
    for bit in bin(BLS_X_ABS)[3:]:
        # doubling step: line through T, T
        xt, yt = t
        lam = fp2_mul(fp2_scale(fp2_sq(xt), 3), fp2_inv(fp2_scale(yt, 2)))
        l0 = fp2_sub(fp2_mul(lam, xt), yt)
        l2 = fp2_neg(fp2_scale(lam, xp))
        l3 = (yp, 0)
        f = fp12_mul(fp12_sq(f), _line_fp12(l0, l2, l3))
        x3 = fp2_sub(fp2_sq(lam), fp2_scale(xt, 2))
        t = (x3, fp2_sub(fp2_mul(lam, fp2_sub(xt, x3)), yt))
        if bit == "1":
            # addition step: line through T, Q
            xt, yt = t
            xq, yq = q2
            lam = fp2_mul(fp2_sub(yt, yq), fp2_inv(fp2_sub(xt, xq)))
            l0 = fp2_sub(fp2_mul(lam, xq), yq)
            l2 = fp2_neg(fp2_scale(lam, xp))
            l3 = (yp, 0)
            f = fp12_mul(f, _line_fp12(l0, l2, l3))
            x3 = fp2_sub(fp2_sub(fp2_sq(lam), xt), xq)
            t = (x3, fp2_sub(fp2_mul(lam, fp2_sub(xt, x3)), yt))
    # parameter is negative
    return fp12_conj(f)


def _exp_by_x_abs(a):
    """a^|x| in the cyclotomic subgroup (plain square-and-multiply)."""
    return fp12_pow(a, BLS_X_ABS)


def final_exponentiation(f, fast: bool = True):
    """f^((p^12-1)/r); fast uses the verified chain, slow the naive power."""
    # easy part: f^((p^6-1)(p^2+1))
    m = fp12_mul(fp12_conj(f), fp12_inv(f))
    m = fp12_mul(fp12_frobenius(m, 2), m)
    if not fast:
        return fp12_pow(m, (_P**4 - _P**2 + 1) // R_ORDER)
    # hard part via d = l0 + l1 p + l2 p^2 + l3 p^3;
    # inverse in the cyclotomic subgroup is conjugation
    c = (1 + BLS_X_ABS) // 3
    t = fp12_pow(m, c)
    y3 = fp12_mul(t, _exp_by_x_abs(t))               # m^(c(1-x)) = m^l3
    y2 = fp12_conj(_exp_by_x_abs(y3))                # y3^x = m^l2
    y1 = fp12_mul(fp12_conj(_exp_by_x_abs(y2)), fp12_conj(y3))  # y2^x * y3^-1
    y0 = fp12_mul(fp12_conj(_exp_by_x_abs(y1)), m)   # y1^x * m
    result = fp12_mul(y0, fp12_frobenius(y1, 1))
    result = fp12_mul(result, fp12_frobenius(y2, 2))
    return fp12_mul(result, fp12_frobenius(y3, 3))


def pairing(p1, q2, fast: bool = True):
    """Reduced optimal-ate pairing e(P, Q) as an Fp12 element."""
    if p1 is None or q2 is None:
        raise BadInputError("pairing of the identity is not defined here")
    if not g1_on_curve(p1):
        raise InvalidPointError("G1 point not on curve")
    if not g2_on_curve(q2):
        raise InvalidPointError("G2 point not on twist")
    return final_exponentiation(miller_loop(p1, q2), fast=fast)


# ---------------------------------------------------------------- native

_native_pairing = None


def _load_native() -> None:
    global _native_pairing
    try:
        from . import _native
    except Exception:
        return
    lib = _native.load()
    if lib is not None:
        _native_pairing = _native.make_pairing(lib)


_load_native()


def g1_to_bytes(pt) -> bytes:
    return pt[0].to_bytes(48, "big") + pt[1].to_bytes(48, "big")


def g2_to_bytes(pt) -> bytes:
    (x0, x1), (y0, y1) = pt
    return b"".join(v.to_bytes(48, "big") for v in (x0, x1, y0, y1))


def pairing_bytes(p1, q2) -> bytes:
    """Canonical 576-byte pairing value; native fast path when available."""
    if _native_pairing is not None:
        return _native_pairing(g1_to_bytes(p1), g2_to_bytes(q2))
    return fp12_to_bytes(pairing(p1, q2))


def native_available() -> bool:
    return _native_pairing is not None
