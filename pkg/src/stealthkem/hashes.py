"""Keccak-256 with the legacy 0x01 padding used by Ethereum.

hashlib only ships the final SHA-3 variant (0x06 padding), so the sponge is
implemented here. The permutation is shared between both padding variants,
which lets the test suite validate it against hashlib.sha3_256 and then pin
the 0x01-padded digests against the well-known Ethereum vectors.

A compiled fast path is used when the native helper library is available;
the pure-Python sponge is the reference and the fallback.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1


def _gen_tables() -> tuple[list[int], list[int]]:
    # rho offsets via the (t+1)(t+2)/2 coordinate walk, round constants via
    # the degree-8 LFSR, both straight from the Keccak reference definition.
    rho = [0] * 25
    x, y = 1, 0
    for t in range(24):
        rho[x + 5 * y] = ((t + 1) * (t + 2) // 2) % 64
        x, y = y, (2 * x + 3 * y) % 5
    rc = []
    lfsr = 1
    for _ in range(24):
        c = 0
        for j in range(7):
            if lfsr & 1:
                c ^= 1 << ((1 << j) - 1)
            lfsr = ((lfsr << 1) ^ (0x71 if lfsr & 0x80 else 0)) & 0xFF
        rc.append(c)
    return rho, rc


_RHO, _RC = _gen_tables()
# pi step destination: lane (x, y) moves to (y, 2x+3y)
_PI_DST = [(xy // 5) + 5 * ((2 * (xy % 5) + 3 * (xy // 5)) % 5) for xy in range(25)]


def _keccak_f(state: list[int]) -> list[int]:
    rho, pi_dst = _RHO, _PI_DST
    for rc in _RC:
        c0 = state[0] ^ state[5] ^ state[10] ^ state[15] ^ state[20]
        c1 = state[1] ^ state[6] ^ state[11] ^ state[16] ^ state[21]
        c2 = state[2] ^ state[7] ^ state[12] ^ state[17] ^ state[22]
        c3 = state[3] ^ state[8] ^ state[13] ^ state[18] ^ state[23]
        c4 = state[4] ^ state[9] ^ state[14] ^ state[19] ^ state[24]
        d0 = c4 ^ (((c1 << 1) | (c1 >> 63)) & _MASK)
        d1 = c0 ^ (((c2 << 1) | (c2 >> 63)) & _MASK)
        d2 = c1 ^ (((c3 << 1) | (c3 >> 63)) & _MASK)
        d3 = c2 ^ (((c4 << 1) | (c4 >> 63)) & _MASK)
        d4 = c3 ^ (((c0 << 1) | (c0 >> 63)) & _MASK)
        for i in range(0, 25, 5):
            state[i] ^= d0
            state[i + 1] ^= d1
            state[i + 2] ^= d2
            state[i + 3] ^= d3
            state[i + 4] ^= d4
        b = [0] * 25
        for src in range(25):
            v = state[src]
            r = rho[src]
            b[pi_dst[src]] = ((v << r) | (v >> (64 - r))) & _MASK if r else v
        for y in range(0, 25, 5):
            b0, b1, b2, b3, b4 = b[y], b[y + 1], b[y + 2], b[y + 3], b[y + 4]
            state[y] = b0 ^ (b2 & ~b1 & _MASK)
            state[y + 1] = b1 ^ (b3 & ~b2 & _MASK)
            state[y + 2] = b2 ^ (b4 & ~b3 & _MASK)
            state[y + 3] = b3 ^ (b0 & ~b4 & _MASK)
            state[y + 4] = b4 ^ (b1 & ~b0 & _MASK)
        state[0] ^= rc
    return state


def _sponge(data: bytes, pad_byte: int, rate: int = 136, out_len: int = 32) -> bytes:
    state = [0] * 25
    padded = bytearray(data)
    padded.append(pad_byte)
    padded.extend(b"\x00" * (-len(padded) % rate))
    padded[-1] ^= 0x80
    lanes = rate // 8
    for off in range(0, len(padded), rate):
        for i in range(lanes):
            state[i] ^= int.from_bytes(padded[off + 8 * i : off + 8 * i + 8], "little")
        _keccak_f(state)
    out = bytearray()
    while len(out) < out_len:
        for i in range(lanes):
            out.extend(state[i].to_bytes(8, "little"))
            if len(out) >= out_len:
                break
        else:
            _keccak_f(state)
            continue
        break
    return bytes(out[:out_len])


def keccak256_py(data: bytes) -> bytes:
    """Pure-Python Keccak-256 (0x01 padding), 32-byte digest."""
    return _sponge(data, 0x01)


_native_keccak = None


def _load_native() -> None:
    global _native_keccak
    try:
        from . import _native
    except Exception:
        return
    lib = _native.load()
    if lib is not None:
        _native_keccak = _native.make_keccak256(lib)


_load_native()


def keccak256(data: bytes) -> bytes:
    """Keccak-256 (0x01 padding) of ``data``, 32-byte digest."""
    if _native_keccak is not None:
        return _native_keccak(data)
    return _sponge(data, 0x01)
