"""AES-GCM-SIV seal/open (RFC 8452)."""

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import AESGCMSIV

from .errors import AeadError

NONCE_LEN = 12
TAG_LEN = 16


def aead_seal(key: bytes, nonce: bytes, plaintext: bytes, aad: bytes = b"") -> bytes:
    if len(key) not in (16, 32):
        raise AeadError("key must be 16 or 32 bytes")
    if len(nonce) != NONCE_LEN:
        raise AeadError("nonce must be 12 bytes")
    return AESGCMSIV(key).encrypt(nonce, plaintext, aad or None)


def aead_open(key: bytes, nonce: bytes, ciphertext: bytes, aad: bytes = b"") -> bytes:
    if len(key) not in (16, 32):
        raise AeadError("key must be 16 or 32 bytes")
    if len(nonce) != NONCE_LEN:
        raise AeadError("nonce must be 12 bytes")
    if len(ciphertext) < TAG_LEN:
        raise AeadError("ciphertext shorter than tag")
    try:
        return AESGCMSIV(key).decrypt(nonce, ciphertext, aad or None)
    except InvalidTag:
        raise AeadError("authentication failed") from None
