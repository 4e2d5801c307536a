"""secp256k1 account keys, deterministic ECDSA, and bech32 addresses.

Signatures are 64-byte r||s, RFC 6979 nonces, low-s normalized, over
SHA-256 of the message. Account addresses follow the standard cosmos
pipeline: bech32(RIPEMD160(SHA256(compressed pubkey))).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.asymmetric import ec
from cryptography.hazmat.primitives.asymmetric.utils import (
    decode_dss_signature,
    encode_dss_signature,
)
from cryptography.hazmat.primitives.serialization import (
    Encoding,
    PublicFormat,
)

from .bech32 import bech32_decode, bech32_encode
from .errors import Bech32Error, KeyError_
from .ripemd160 import ripemd160

CURVE_ORDER = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141
ADDRESS_HRP = "secret"

_SIGN_ALGO = ec.ECDSA(hashes.SHA256(), deterministic_signing=True)
_VERIFY_ALGO = ec.ECDSA(hashes.SHA256())


@dataclass(frozen=True, order=True)
class Address:
    """Bech32 account/contract address with a 20-byte payload."""

    hrp: str
    payload: bytes

    def __post_init__(self):
        if len(self.payload) != 20:
            raise KeyError_("address payload must be 20 bytes")

    def __str__(self) -> str:
        return bech32_encode(self.hrp, self.payload)

    @classmethod
    def from_string(cls, text: str) -> "Address":
        hrp, payload = bech32_decode(text)
        if len(payload) != 20:
            raise Bech32Error("address payload must be 20 bytes")
        return cls(hrp, payload)


class PublicKey:
    """Compressed secp256k1 public key (33 bytes)."""

    def __init__(self, data: bytes):
        if len(data) != 33 or data[0] not in (2, 3):
            raise KeyError_("expected 33-byte compressed secp256k1 point")
        try:
            self._key = ec.EllipticCurvePublicKey.from_encoded_point(
                ec.SECP256K1(), data
            )
        except ValueError as exc:
            raise KeyError_("point not on curve: %s" % exc) from None
        self._data = data

    def to_bytes(self) -> bytes:
        return self._data

    def address(self, hrp: str = ADDRESS_HRP) -> Address:
        return Address(hrp, ripemd160(hashlib.sha256(self._data).digest()))

    def verify(self, msg: bytes, signature: bytes) -> bool:
        """True iff signature is a canonical (low-s) signature over msg."""
        if len(signature) != 64:
            return False
        r = int.from_bytes(signature[:32], "big")
        s = int.from_bytes(signature[32:], "big")
        if not (1 <= r < CURVE_ORDER and 1 <= s <= CURVE_ORDER // 2):
            return False
        try:
            self._key.verify(encode_dss_signature(r, s), msg, _VERIFY_ALGO)
            return True
        except InvalidSignature:
            return False

    def __eq__(self, other) -> bool:
        return isinstance(other, PublicKey) and self._data == other._data

    def __hash__(self) -> int:
        return hash(self._data)


class PrivateKey:
    """secp256k1 signing key wrapping a 32-byte scalar."""

    def __init__(self, scalar_bytes: bytes):
        if len(scalar_bytes) != 32:
            raise KeyError_("private scalar must be 32 bytes")
        scalar = int.from_bytes(scalar_bytes, "big")
        if not 1 <= scalar < CURVE_ORDER:
            raise KeyError_("private scalar out of range [1, n-1]")
        self._scalar = scalar
        self._key = ec.derive_private_key(scalar, ec.SECP256K1())

    @classmethod
    def generate(cls) -> "PrivateKey":
        import os

        while True:
            cand = os.urandom(32)
            if 1 <= int.from_bytes(cand, "big") < CURVE_ORDER:
                return cls(cand)

    @classmethod
    def from_seed(cls, seed: bytes) -> "PrivateKey":
        """Deterministic key for scripted runs; rejection-samples the hash."""
        digest = hashlib.sha256(seed).digest()
        while not 1 <= int.from_bytes(digest, "big") < CURVE_ORDER:
            digest = hashlib.sha256(digest).digest()
        return cls(digest)

    def to_bytes(self) -> bytes:
        return self._scalar.to_bytes(32, "big")

    def public_key(self) -> PublicKey:
        data = self._key.public_key().public_bytes(
            Encoding.X962, PublicFormat.CompressedPoint
        )
        return PublicKey(data)

    def address(self, hrp: str = ADDRESS_HRP) -> Address:
        return self.public_key().address(hrp)

    def sign(self, msg: bytes) -> bytes:
        der = self._key.sign(msg, _SIGN_ALGO)
        r, s = decode_dss_signature(der)
        if s > CURVE_ORDER // 2:
            s = CURVE_ORDER - s
        return r.to_bytes(32, "big") + s.to_bytes(32, "big")


def derive_address(pubkey: bytes | PublicKey, hrp: str = ADDRESS_HRP) -> Address:
    if isinstance(pubkey, bytes):
        pubkey = PublicKey(pubkey)
    return pubkey.address(hrp)
