"""Crypto primitives for the simulated confidential chain and its clients."""

from .aead import aead_open, aead_seal
from .bech32 import bech32_decode, bech32_encode, convertbits
from .envelope import (
    Envelope,
    derive_key,
    envelope_decrypt,
    envelope_encrypt,
    open_response,
    seal_response,
)
from .errors import AeadError, Bech32Error, CryptoError, EnvelopeError, KeyError_
from .keys import ADDRESS_HRP, CURVE_ORDER, Address, PrivateKey, PublicKey, derive_address
from .ripemd160 import ripemd160
from .x25519 import X25519Public, X25519Secret, x25519_shared

__all__ = [
    "ADDRESS_HRP",
    "CURVE_ORDER",
    "Address",
    "AeadError",
    "Bech32Error",
    "CryptoError",
    "Envelope",
    "EnvelopeError",
    "KeyError_",
    "PrivateKey",
    "PublicKey",
    "X25519Public",
    "X25519Secret",
    "aead_open",
    "aead_seal",
    "bech32_decode",
    "bech32_encode",
    "convertbits",
    "derive_address",
    "derive_key",
    "envelope_decrypt",
    "envelope_encrypt",
    "open_response",
    "ripemd160",
    "seal_response",
    "x25519_shared",
]
