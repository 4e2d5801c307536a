"""Bech32 (BIP-173) encoding for account and contract addresses."""

from .errors import Bech32Error

CHARSET = "qpzry9x8gf2tvdw0s3jn54khce6mua7l"
_GEN = (0x3B6A57B2, 0x26508E6D, 0x1EA119FA, 0x3D4233DD, 0x2A1462B3)


def _polymod(values):
    chk = 1
    for v in values:
        top = chk >> 25
        chk = (chk & 0x1FFFFFF) << 5 ^ v
        for i in range(5):
            chk ^= _GEN[i] if (top >> i) & 1 else 0
    return chk


def _hrp_expand(hrp: str):
    return [ord(c) >> 5 for c in hrp] + [0] + [ord(c) & 31 for c in hrp]


def convertbits(data, frombits: int, tobits: int, pad: bool = True):
    """Regroup a bit stream into words of a different width."""
    acc = 0
    bits = 0
    ret = []
    maxv = (1 << tobits) - 1
    for value in data:
        if value < 0 or value >> frombits:
            raise Bech32Error("value out of range for %d-bit group" % frombits)
        acc = (acc << frombits) | value
        bits += frombits
        while bits >= tobits:
            bits -= tobits
            ret.append((acc >> bits) & maxv)
    if pad:
        if bits:
            ret.append((acc << (tobits - bits)) & maxv)
    elif bits >= frombits or (acc << (tobits - bits)) & maxv:
        raise Bech32Error("invalid padding in bit groups")
    return ret


def _check_hrp(hrp: str) -> None:
    if not hrp or any(ord(c) < 33 or ord(c) > 126 for c in hrp):
        raise Bech32Error("invalid HRP %r" % hrp)
    if hrp.lower() != hrp:
        raise Bech32Error("HRP must be lowercase")


def bech32_encode(hrp: str, payload: bytes) -> str:
    """Encode a byte payload under a human-readable part."""
    _check_hrp(hrp)
    data = convertbits(payload, 8, 5)
    combined = _hrp_expand(hrp) + data
    polymod = _polymod(combined + [0] * 6) ^ 1
    checksum = [(polymod >> 5 * (5 - i)) & 31 for i in range(6)]
    return hrp + "1" + "".join(CHARSET[d] for d in data + checksum)


def bech32_decode(text: str) -> tuple[str, bytes]:
    """Decode a bech32 string back to (hrp, payload)."""
    if any(ord(c) < 33 or ord(c) > 126 for c in text):
        raise Bech32Error("invalid character in bech32 string")
    if text.lower() != text and text.upper() != text:
        raise Bech32Error("mixed-case bech32 string")
    text = text.lower()
    pos = text.rfind("1")
    if pos < 1 or pos + 7 > len(text) or len(text) > 90:
        raise Bech32Error("malformed bech32 string")
    hrp, data_part = text[:pos], text[pos + 1:]
    try:
        data = [CHARSET.index(c) for c in data_part]
    except ValueError:
        raise Bech32Error("invalid data character") from None
    if _polymod(_hrp_expand(hrp) + data) != 1:
        raise Bech32Error("bad bech32 checksum")
    payload = bytes(convertbits(data[:-6], 5, 8, pad=False))
    return hrp, payload
