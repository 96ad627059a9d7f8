"""Keccak-256: known vectors, permutation oracle, native/pure parity."""

import hashlib
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from stealthkem import hashes
from stealthkem.hashes import _sponge, keccak256, keccak256_py

# canonical 0x01-padding digests
VECTORS = {
    b"": "c5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470",
    b"abc": "4e03657aea45a94fc7d47ba826c8d667c0d1e6e33a64a036ec44f58fa12d6c45",
}


@pytest.mark.parametrize("msg,digest", sorted(VECTORS.items()))
def test_known_vectors(msg, digest):
    assert keccak256_py(msg).hex() == digest
    assert keccak256(msg).hex() == digest


@given(st.binary(max_size=600))
def test_permutation_against_sha3(data):
    # same sponge, SHA-3 padding byte: hashlib is an independent oracle for
    # the permutation and the rate/pad plumbing
    assert _sponge(data, 0x06) == hashlib.sha3_256(data).digest()


def test_native_matches_python_at_block_boundaries():
    rng = random.Random(1)
    for n in (0, 1, 64, 135, 136, 137, 200, 271, 272, 273, 1000):
        data = rng.randbytes(n)
        assert keccak256(data) == keccak256_py(data), f"mismatch at len {n}"


@given(st.binary(max_size=400))
def test_native_matches_python(data):
    assert keccak256(data) == keccak256_py(data)


def test_digest_length():
    assert len(keccak256(b"x" * 999)) == 32


def test_native_path_is_active():
    # environment guard: the compiled helper should be in play here unless
    # explicitly disabled; if this fails the perf comparisons time the
    # fallback instead
    import os

    if os.environ.get("STEALTHKEM_NO_NATIVE"):
        pytest.skip("native explicitly disabled")
    assert hashes._native_keccak is not None


def test_long_input_multiblock():
    data = bytes(range(256)) * 40  # ~10KiB, many sponge blocks
    assert keccak256_py(data) == keccak256(data)
    assert _sponge(data, 0x06) == hashlib.sha3_256(data).digest()
