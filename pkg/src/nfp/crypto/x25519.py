"""X25519 key agreement used for the transaction envelope."""

from __future__ import annotations

import hashlib

from cryptography.hazmat.primitives.asymmetric.x25519 import (
    X25519PrivateKey,
    X25519PublicKey,
)

from .errors import KeyError_


class X25519Public:
    def __init__(self, data: bytes):
        if len(data) != 32:
            raise KeyError_("x25519 public key must be 32 bytes")
        self._data = data
        try:
            self._key = X25519PublicKey.from_public_bytes(data)
        except ValueError as exc:
            raise KeyError_(str(exc)) from None

    def to_bytes(self) -> bytes:
        return self._data

    def __eq__(self, other) -> bool:
        return isinstance(other, X25519Public) and self._data == other._data

    def __hash__(self) -> int:
        return hash(self._data)


class X25519Secret:
    def __init__(self, data: bytes):
        if len(data) != 32:
            raise KeyError_("x25519 secret must be 32 bytes")
        # clamping happens inside the primitive per RFC 7748
        self._key = X25519PrivateKey.from_private_bytes(data)
        self._data = data

    @classmethod
    def generate(cls) -> "X25519Secret":
        import os

        return cls(os.urandom(32))

    @classmethod
    def from_seed(cls, seed: bytes) -> "X25519Secret":
        return cls(hashlib.sha256(b"x25519:" + seed).digest())

    def to_bytes(self) -> bytes:
        return self._data

    def public(self) -> X25519Public:
        return X25519Public(self._key.public_key().public_bytes_raw())

    def exchange(self, peer: X25519Public) -> bytes:
        """Shared secret; rejects low-order peers (all-zero output)."""
        try:
            return self._key.exchange(peer._key)
        except ValueError:
            raise KeyError_("low-order x25519 point rejected") from None


def x25519_shared(secret: X25519Secret, peer: X25519Public) -> bytes:
    return secret.exchange(peer)
