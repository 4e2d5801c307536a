"""External reference vectors: BIP-173, RFC 7748, RFC 8452, RFC 6979."""

import pytest

from nfp.crypto import (
    AeadError,
    Bech32Error,
    KeyError_,
    PrivateKey,
    X25519Public,
    X25519Secret,
    aead_open,
    aead_seal,
    bech32_decode,
    bech32_encode,
    ripemd160,
)

# --- BIP-173 -------------------------------------------------------------

BIP173_VALID = [
    "a12uel5l",
    "A12UEL5L",
    "an83characterlonghumanreadablepartthatcontainsthenumber1andtheexcludedcharactersbio1tt5tgs",
    "abcdef1qpzry9x8gf2tvdw0s3jn54khce6mua7lmqqqxw",
    "split1checkupstagehandshakeupstreamerranterredcaperred2y9e3w",
    "?1ezyfcl",
]

BIP173_INVALID = [
    " 1nwldj5",            # HRP character out of range
    "\x7f1axkwrx",         # HRP character out of range
    "pzry9x0s0muk",        # no separator
    "1pzry9x0s0muk",       # empty HRP
    "x1b4n0q5v",           # invalid data character
    "li1dgmt3",            # too-short checksum
    "A1G7SGD8",            # checksum computed over lowercase HRP
    "10a06t8",             # empty HRP
    "1qzzfhee",            # empty HRP
]


def test_bip173_valid_strings_decode():
    for text in BIP173_VALID:
        hrp, payload = bech32_decode(text)
        assert bech32_encode(hrp, payload).lower() == text.lower()


@pytest.mark.parametrize("text", BIP173_INVALID)
def test_bip173_invalid_strings_rejected(text):
    with pytest.raises(Bech32Error):
        bech32_decode(text)


def test_bip173_empty_payload_vector():
    assert bech32_encode("a", b"") == "a12uel5l"


def test_bip173_full_charset_vector():
    hrp, payload = bech32_decode("abcdef1qpzry9x8gf2tvdw0s3jn54khce6mua7lmqqqxw")
    assert hrp == "abcdef"
    # data part enumerates the 32 charset values 0..31 before regrouping
    assert payload == bytes(
        [0x00, 0x44, 0x32, 0x14, 0xC7, 0x42, 0x54, 0xB6, 0x35, 0xCF,
         0x84, 0x65, 0x3A, 0x56, 0xD7, 0xC6, 0x75, 0xBE, 0x77, 0xDF]
    )


def test_checksum_detects_single_char_mutation():
    text = bech32_encode("secret", bytes(range(20)))
    for i in range(len(text)):
        if text[i] == "1":
            continue
        sub = "q" if text[i] != "q" else "p"
        mutated = text[:i] + sub + text[i + 1:]
        with pytest.raises(Bech32Error):
            bech32_decode(mutated)


# --- RIPEMD-160 (published vectors from the function's spec) -------------

RIPEMD_VECTORS = [
    (b"", "9c1185a5c5e9fc54612808977ee8f548b2258d31"),
    (b"a", "0bdc9d2d256b3ee9daae347be6f4dc835a467ffe"),
    (b"abc", "8eb208f7e05d987a9b044a8e98c6b087f15a0bfc"),
    (b"message digest", "5d0689ef49d2fae572b881b123a85ffa21595f36"),
    (b"abcdefghijklmnopqrstuvwxyz", "f71c27109c692c1b56bbdceb5b9d2865b3708dbc"),
]


@pytest.mark.parametrize("msg,digest", RIPEMD_VECTORS)
def test_ripemd160_vectors(msg, digest):
    assert ripemd160(msg).hex() == digest


# --- RFC 7748 (X25519) ----------------------------------------------------

def test_rfc7748_section_5_2_vector():
    scalar = bytes.fromhex(
        "a546e36bf0527c9d3b16154b82465edd62144c0ac1fc5a18506a2244ba449ac4"
    )
    u = bytes.fromhex(
        "e6db6867583030db3594c1a424b15f7c726624ec26b3353b10a903a6d0ab1c4c"
    )
    out = X25519Secret(scalar).exchange(X25519Public(u))
    assert out.hex() == (
        "c3da55379de9c6908e94ea4df28d084f32eccf03491c71f754b4075577a28552"
    )


def test_rfc7748_section_6_1_diffie_hellman():
    alice = X25519Secret(bytes.fromhex(
        "77076d0a7318a57d3c16c17251b26645df4c2f87ebc0992ab177fba51db92c2a"
    ))
    bob = X25519Secret(bytes.fromhex(
        "5dab087e624a8a4b79e17f8b83800ee66f3bb1292618b6fd1c2f8b27ff88e0eb"
    ))
    assert alice.public().to_bytes().hex() == (
        "8520f0098930a754748b7ddcb43ef75a0dbf3a0d26381af4eba4a98eaa9b4e6a"
    )
    assert bob.public().to_bytes().hex() == (
        "de9edb7d7b7dc1b4d35b61c2ece435373f8343c85b78674dadfc7e146f882b4f"
    )
    shared = "4a5d9d5ba4ce2de1728e3bf480350f25e07e21c947d19e3376f09b3c1e161742"
    assert alice.exchange(bob.public()).hex() == shared
    assert bob.exchange(alice.public()).hex() == shared


def test_x25519_symmetry_random_pairs():
    import os

    for _ in range(100):
        a = X25519Secret(os.urandom(32))
        b = X25519Secret(os.urandom(32))
        assert a.exchange(b.public()) == b.exchange(a.public())


def test_x25519_low_order_point_rejected():
    # order-1 and order-8 points from the curve25519 small-subgroup list
    low_order = [
        bytes(32),                                   # 0
        bytes([1]) + bytes(31),                      # 1
        bytes.fromhex(
            "e0eb7a7c3b41b8ae1656e3faf19fc46ada098deb9c32b1fd866205165f49b800"
        ),
    ]
    secret = X25519Secret.from_seed(b"any")
    for point in low_order:
        with pytest.raises(KeyError_):
            secret.exchange(X25519Public(point))


# --- RFC 8452 (AES-GCM-SIV, Appendix C.1 AEAD_AES_128_GCM_SIV) ------------

GCMSIV_KEY = bytes.fromhex("01000000000000000000000000000000")
GCMSIV_NONCE = bytes.fromhex("030000000000000000000000")


def test_rfc8452_empty_plaintext_vector():
    out = aead_seal(GCMSIV_KEY, GCMSIV_NONCE, b"")
    assert out.hex() == "dc20e2d83f25705bb49e439eca56de25"
    assert len(out) == 16  # tag only


def test_rfc8452_8_byte_plaintext_vector():
    pt = bytes.fromhex("0100000000000000")
    out = aead_seal(GCMSIV_KEY, GCMSIV_NONCE, pt)
    assert out.hex() == "b5d839330ac7b786578782fff6013b815b287c22493a364c"
    assert aead_open(GCMSIV_KEY, GCMSIV_NONCE, out) == pt


def test_rfc8452_aad_vector():
    # 12-byte plaintext with 1-byte AAD from the same vector table
    pt = bytes.fromhex("020000000000000000000000")
    out = aead_seal(GCMSIV_KEY, GCMSIV_NONCE, pt, aad=bytes.fromhex("01"))
    assert aead_open(GCMSIV_KEY, GCMSIV_NONCE, out, aad=bytes.fromhex("01")) == pt
    with pytest.raises(AeadError):
        aead_open(GCMSIV_KEY, GCMSIV_NONCE, out, aad=bytes.fromhex("02"))


def test_aead_length_law_and_integrity():
    key = bytes(range(32))
    nonce = bytes(12)
    for size in (0, 1, 15, 16, 17, 1000):
        ct = aead_seal(key, nonce, b"x" * size)
        assert len(ct) == size + 16
    ct = bytearray(aead_seal(key, nonce, b"attack at dawn"))
    ct[3] ^= 0x40
    with pytest.raises(AeadError):
        aead_open(key, nonce, bytes(ct))


# --- RFC 6979 deterministic ECDSA ----------------------------------------

def test_rfc6979_secp256k1_published_vectors():
    # canonical low-s set reproduced across bitcoin tooling test suites
    key1 = PrivateKey((1).to_bytes(32, "big"))
    sig = key1.sign(b"Satoshi Nakamoto")
    assert sig.hex() == (
        "934b1ea10a4b3c1757e2b0c017d0b6143ce3c9a7e6a4a49860d7a6ab210ee3d8"
        "2442ce9d2b916064108014783e923ec36b49743e2ffa1c4496f01a512aafd9e5"
    )
    sig = key1.sign(
        b"All those moments will be lost in time, like tears in rain. Time to die..."
    )
    assert sig.hex() == (
        "8600dbd41e348fe5c9465ab92d23e3db8b98b873beecd930736488696438cb6b"
        "547fe64427496db33bf66019dacbf0039c04199abb0122918601db38a72cfc21"
    )


def test_sign_is_deterministic_and_verifies():
    key = PrivateKey.from_seed(b"fixed key")
    msg = b"fixed message"
    assert key.sign(msg) == key.sign(msg)
    assert key.public_key().verify(msg, key.sign(msg))


def test_verify_rejects_bit_mutations():
    key = PrivateKey.from_seed(b"mutation target")
    pub = key.public_key()
    msg = b"the quick brown fox"
    sig = key.sign(msg)
    for byte in range(0, 64, 7):
        mutated = bytearray(sig)
        mutated[byte] ^= 0x01
        assert not pub.verify(msg, bytes(mutated))
    mutated_msg = bytearray(msg)
    mutated_msg[0] ^= 0x01
    assert not pub.verify(bytes(mutated_msg), sig)


def test_verify_wrong_pubkey_false():
    key = PrivateKey.from_seed(b"signer")
    other = PrivateKey.from_seed(b"impostor")
    sig = key.sign(b"payload")
    assert not other.public_key().verify(b"payload", sig)


def test_high_s_rejected():
    from nfp.crypto import CURVE_ORDER

    key = PrivateKey.from_seed(b"low-s only")
    msg = b"canonical form"
    sig = key.sign(msg)
    s = int.from_bytes(sig[32:], "big")
    assert s <= CURVE_ORDER // 2
    high = sig[:32] + (CURVE_ORDER - s).to_bytes(32, "big")
    assert not key.public_key().verify(msg, high)
