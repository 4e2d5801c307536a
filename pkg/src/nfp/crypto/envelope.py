"""Encrypted message envelope carried by every query and execution.

Wire format (bit-exact): 32-byte ephemeral pubkey || 12-byte nonce ||
ciphertext. The AEAD key is HKDF-SHA256 over the X25519 shared secret
with a fixed context label; the response channel reuses the derived key
with the request nonce's last byte XOR 0x01, so one key agreement covers
a full round trip.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from cryptography.hazmat.primitives.hashes import SHA256
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

from .aead import aead_open, aead_seal
from .errors import AeadError, EnvelopeError, KeyError_
from .x25519 import X25519Public, X25519Secret

KDF_CONTEXT = b"nfp-envelope-v1"
NONCE_LEN = 12


@dataclass(frozen=True)
class Envelope:
    ephemeral_pub: bytes
    nonce: bytes
    ciphertext: bytes

    def __post_init__(self):
        if len(self.ephemeral_pub) != 32:
            raise EnvelopeError("ephemeral pubkey must be 32 bytes")
        if len(self.nonce) != NONCE_LEN:
            raise EnvelopeError("nonce must be 12 bytes")

    def to_bytes(self) -> bytes:
        return self.ephemeral_pub + self.nonce + self.ciphertext

    def to_hex(self) -> str:
        return self.to_bytes().hex()

    @classmethod
    def from_bytes(cls, data: bytes) -> "Envelope":
        if len(data) < 32 + NONCE_LEN:
            raise EnvelopeError("envelope too short")
        return cls(data[:32], data[32:32 + NONCE_LEN], data[32 + NONCE_LEN:])

    @classmethod
    def from_hex(cls, text: str) -> "Envelope":
        try:
            raw = bytes.fromhex(text)
        except ValueError:
            raise EnvelopeError("envelope is not valid hex") from None
        return cls.from_bytes(raw)


def derive_key(shared_secret: bytes) -> bytes:
    return HKDF(
        algorithm=SHA256(), length=32, salt=None, info=KDF_CONTEXT
    ).derive(shared_secret)


def _response_nonce(request_nonce: bytes) -> bytes:
    return request_nonce[:-1] + bytes([request_nonce[-1] ^ 0x01])


def envelope_encrypt(
    tx_secret: X25519Secret,
    consensus_pub: X25519Public,
    plaintext: bytes,
    nonce: bytes | None = None,
) -> tuple[Envelope, bytes]:
    """Seal plaintext for the chain; returns (envelope, derived key).

    The caller keeps the derived key to open the response. tx_secret must
    be fresh per message.
    """
    key = derive_key(tx_secret.exchange(consensus_pub))
    nonce = os.urandom(NONCE_LEN) if nonce is None else nonce
    ct = aead_seal(key, nonce, plaintext)
    return Envelope(tx_secret.public().to_bytes(), nonce, ct), key


def envelope_decrypt(consensus_secret: X25519Secret, env: Envelope) -> tuple[bytes, bytes]:
    """Open an incoming envelope; returns (plaintext, derived key).

    Failures are reported as a single opaque error so callers cannot be
    used as a decryption oracle.
    """
    try:
        key = derive_key(consensus_secret.exchange(X25519Public(env.ephemeral_pub)))
        return aead_open(key, env.nonce, env.ciphertext), key
    except (AeadError, KeyError_):
        raise EnvelopeError("envelope decryption failed") from None


def seal_response(key: bytes, request: Envelope, plaintext: bytes) -> Envelope:
    nonce = _response_nonce(request.nonce)
    return Envelope(request.ephemeral_pub, nonce, aead_seal(key, nonce, plaintext))


def open_response(key: bytes, request_nonce: bytes, env: Envelope) -> bytes:
    try:
        if env.nonce != _response_nonce(request_nonce):
            raise AeadError("nonce mismatch")
        return aead_open(key, env.nonce, env.ciphertext)
    except AeadError:
        raise EnvelopeError("envelope decryption failed") from None
