"""Loader for the optional compiled helper library.

A single zero-dependency Rust source file provides fast Keccak-256 and the
BLS12-381 pairing used by the benchmark comparator. It is compiled on first
use with plain ``rustc`` (no cargo, no crates) and cached next to the source.
Everything degrades gracefully: if rustc is missing or the build fails, the
callers fall back to the pure-Python implementations.

Set STEALTHKEM_NO_NATIVE=1 to force the pure-Python paths.
"""

from __future__ import annotations

import ctypes
import logging
import os
import subprocess
import tempfile
from pathlib import Path

log = logging.getLogger(__name__)

_SOURCE = Path(__file__).resolve().parent / "stealthnative.rs"
_LIB = _SOURCE.with_name("libstealthnative.so")

_loaded: ctypes.CDLL | None = None
_load_attempted = False


def _build() -> bool:
    rustc = os.environ.get("RUSTC", "rustc")
    # build into a temp file then rename, so a crashed build never leaves a
    # half-written library that a later load would pick up
    with tempfile.NamedTemporaryFile(
        dir=_LIB.parent, suffix=".so.tmp", delete=False
    ) as tmp:
        tmp_path = Path(tmp.name)
    try:
        proc = subprocess.run(
            [
                rustc,
                "--edition=2021",
                "--crate-type=cdylib",
                "-C",
                "opt-level=3",
                "-o",
                str(tmp_path),
                str(_SOURCE),
            ],
            capture_output=True,
            text=True,
            timeout=300,
        )
    except (OSError, subprocess.TimeoutExpired) as exc:
        log.info("native build unavailable: %s", exc)
        tmp_path.unlink(missing_ok=True)
        return False
    if proc.returncode != 0:
        log.warning("native build failed:\n%s", proc.stderr[-2000:])
        tmp_path.unlink(missing_ok=True)
        return False
    tmp_path.replace(_LIB)
    return True


def load() -> ctypes.CDLL | None:
    """Return the helper library, building it if needed, or None."""
    global _loaded, _load_attempted
    if _load_attempted:
        return _loaded
    _load_attempted = True
    if os.environ.get("STEALTHKEM_NO_NATIVE"):
        return None
    if not _SOURCE.exists():
        return None
    if not _LIB.exists():
        if not os.access(_LIB.parent, os.W_OK):
            return None
        if not _build():
            return None
    try:
        lib = ctypes.CDLL(str(_LIB))
    except OSError as exc:
        log.warning("native load failed: %s", exc)
        return None
    lib.sk_keccak256.argtypes = [
        ctypes.c_char_p,
        ctypes.c_size_t,
        ctypes.POINTER(ctypes.c_uint8),
    ]
    lib.sk_keccak256.restype = None
    lib.sk_pairing.argtypes = [
        ctypes.c_char_p,
        ctypes.c_char_p,
        ctypes.POINTER(ctypes.c_uint8),
    ]
    lib.sk_pairing.restype = ctypes.c_int
    _loaded = lib
    return lib


def make_keccak256(lib: ctypes.CDLL):
    fn = lib.sk_keccak256
    buf_t = ctypes.c_uint8 * 32

    def keccak256_native(data: bytes) -> bytes:
        out = buf_t()
        fn(data, len(data), out)
        return bytes(out)

    return keccak256_native


def make_pairing(lib: ctypes.CDLL):
    """Wrap sk_pairing: (96-byte G1 affine, 192-byte G2 affine) -> 576-byte Fp12."""
    fn = lib.sk_pairing
    buf_t = ctypes.c_uint8 * 576

    def pairing_native(p_bytes: bytes, q_bytes: bytes) -> bytes:
        if len(p_bytes) != 96 or len(q_bytes) != 192:
            raise ValueError("pairing inputs must be 96- and 192-byte affine encodings")
        out = buf_t()
        rc = fn(p_bytes, q_bytes, out)
        if rc != 0:
            raise ValueError(f"native pairing rejected its inputs (code {rc})")
        return bytes(out)

    return pairing_native
