"""CCA-secure KEM interface backed by ML-KEM (FIPS 203).

The engine delegates to the OpenSSL implementation shipped with the
`cryptography` package; conformance is pinned by the frozen vectors under
tests/data rather than by re-implementing the lattice internals here.

Two properties the protocol layer depends on:

* implicit rejection -- decapsulating a ciphertext meant for someone else
  returns a deterministic pseudorandom secret instead of failing, which is
  what makes silent registry scanning possible;
* the secret key round-trips through its 64-byte seed form (d || z), so key
  files stay small and the implicit-rejection seed z is addressable.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from random import Random
from typing import Any

from cryptography.hazmat.primitives.asymmetric import mlkem

from .errors import KemFormatError, UnsupportedParameterError

SHARED_SECRET_SIZE = 32
SECRET_SEED_SIZE = 64


@dataclass(frozen=True)
class KemSecretKey:
    """Seed-form secret key: decapsulation seed d || implicit-rejection seed z."""

    seed: bytes
    kem: str
    _handle: Any = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if len(self.seed) != SECRET_SEED_SIZE:
            raise KemFormatError(
                f"secret seed must be {SECRET_SEED_SIZE} bytes, got {len(self.seed)}"
            )

    @property
    def decapsulation_seed(self) -> bytes:
        return self.seed[:32]

    @property
    def rejection_seed(self) -> bytes:
        return self.seed[32:]


class KemEngine:
    """One ML-KEM parameter set behind a keygen/encaps/decaps surface."""

    def __init__(self, name: str, backend_cls, public_key_size: int, ciphertext_size: int):
        self.name = name
        self._backend = backend_cls
        self.public_key_size = public_key_size
        self.ciphertext_size = ciphertext_size
        self.shared_secret_size = SHARED_SECRET_SIZE
        self.secret_seed_size = SECRET_SEED_SIZE

    def keygen(self, rng: Random | None = None) -> tuple[bytes, KemSecretKey]:
        """Fresh keypair. A seeded Random yields a reproducible test
        fixture; production callers leave rng unset (OS entropy)."""
        seed = rng.randbytes(SECRET_SEED_SIZE) if rng is not None else os.urandom(SECRET_SEED_SIZE)
        return self.keypair_from_seed(seed)

    def keypair_from_seed(self, seed: bytes) -> tuple[bytes, KemSecretKey]:
        sk = self.secret_key_from_seed(seed)
        return sk._handle.public_key().public_bytes_raw(), sk

    def secret_key_from_seed(self, seed: bytes) -> KemSecretKey:
        if len(seed) != SECRET_SEED_SIZE:
            raise KemFormatError(
                f"secret seed must be {SECRET_SEED_SIZE} bytes, got {len(seed)}"
            )
        handle = self._backend.from_seed_bytes(seed)
        return KemSecretKey(seed=seed, kem=self.name, _handle=handle)

    def public_key_of(self, sk: KemSecretKey) -> bytes:
        return sk._handle.public_key().public_bytes_raw()

    def encaps(self, public_key: bytes) -> tuple[bytes, bytes]:
        """Encapsulate against a recipient key: (ciphertext, shared secret)."""
        if len(public_key) != self.public_key_size:
            raise KemFormatError(
                f"{self.name} public key must be {self.public_key_size} bytes, "
                f"got {len(public_key)}"
            )
        try:
            handle = self._backend_public(public_key)
            shared, ciphertext = handle.encapsulate()
        except KemFormatError:
            raise
        except Exception as exc:
            raise KemFormatError(f"encapsulation failed: {exc}") from exc
        return ciphertext, shared

    def _backend_public(self, public_key: bytes):
        raise NotImplementedError

    def decaps(self, sk: KemSecretKey, ciphertext: bytes) -> bytes:
        """Deterministic decapsulation; never fails for a wrong-recipient
        ciphertext (implicit rejection yields a pseudorandom secret)."""
        if len(ciphertext) != self.ciphertext_size:
            raise KemFormatError(
                f"{self.name} ciphertext must be {self.ciphertext_size} bytes, "
                f"got {len(ciphertext)}"
            )
        if sk.kem != self.name:
            raise KemFormatError(f"secret key is for {sk.kem}, engine is {self.name}")
        return sk._handle.decapsulate(ciphertext)


class _MlKemEngine(KemEngine):
    def __init__(self, name, private_cls, public_cls, public_key_size, ciphertext_size):
        super().__init__(name, private_cls, public_key_size, ciphertext_size)
        self._public_cls = public_cls

    def _backend_public(self, public_key: bytes):
        return self._public_cls.from_public_bytes(public_key)


DEFAULT_KEM = "ml_kem_768"

_ALIASES = {
    "kyber768": "ml_kem_768",
    "kyber1024": "ml_kem_1024",
    "kyber512": "ml_kem_512",
}

_engines: dict[str, KemEngine] = {}


def get_engine(name: str = DEFAULT_KEM) -> KemEngine:
    """Engine lookup by canonical name or Kyber alias."""
    canonical = _ALIASES.get(name.lower().replace("-", "_"), name.lower().replace("-", "_"))
    if canonical in _engines:
        return _engines[canonical]
    if canonical == "ml_kem_768":
        engine = _MlKemEngine(
            canonical, mlkem.MLKEM768PrivateKey, mlkem.MLKEM768PublicKey, 1184, 1088
        )
    elif canonical == "ml_kem_1024":
        engine = _MlKemEngine(
            canonical, mlkem.MLKEM1024PrivateKey, mlkem.MLKEM1024PublicKey, 1568, 1568
        )
    elif canonical == "ml_kem_512":
        raise UnsupportedParameterError(
            "ml_kem_512 is recognized but the OpenSSL backend does not ship it; "
            "use ml_kem_768 or ml_kem_1024"
        )
    else:
        raise UnsupportedParameterError(f"unknown KEM parameter set {name!r}")
    _engines[canonical] = engine
    return engine
