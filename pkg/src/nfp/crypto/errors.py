class CryptoError(Exception):
    """Base class for failures in the crypto layer."""


class Bech32Error(CryptoError):
    pass


class KeyError_(CryptoError):
    """Invalid key material (name avoids shadowing the builtin)."""


class AeadError(CryptoError):
    """Authenticated decryption failed; no partial plaintext is exposed."""


class EnvelopeError(CryptoError):
    """Envelope transport failure. Deliberately cause-opaque."""
