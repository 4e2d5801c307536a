"""Envelope wire format, round trips, and leakage checks."""

import os
import random

import pytest

from nfp.crypto import (
    Envelope,
    EnvelopeError,
    X25519Secret,
    envelope_decrypt,
    envelope_encrypt,
    open_response,
    seal_response,
)


@pytest.fixture
def consensus():
    return X25519Secret.from_seed(b"consensus test key")


def test_round_trip_1kb(consensus):
    payload = os.urandom(1024)
    env, key = envelope_encrypt(X25519Secret.generate(), consensus.public(), payload)
    plain, chain_key = envelope_decrypt(consensus, env)
    assert plain == payload
    assert chain_key == key


def test_wire_format_layout(consensus):
    tx = X25519Secret.from_seed(b"tx")
    env, _ = envelope_encrypt(tx, consensus.public(), b"hello", nonce=bytes(12))
    raw = env.to_bytes()
    assert raw[:32] == tx.public().to_bytes()
    assert raw[32:44] == bytes(12)
    assert raw[44:] == env.ciphertext
    assert len(env.ciphertext) == 5 + 16
    assert Envelope.from_hex(env.to_hex()) == env


def test_tampered_ephemeral_pub_fails(consensus):
    env, _ = envelope_encrypt(X25519Secret.generate(), consensus.public(), b"secret")
    bad_pub = bytearray(env.ephemeral_pub)
    bad_pub[5] ^= 0x10
    tampered = Envelope(bytes(bad_pub), env.nonce, env.ciphertext)
    with pytest.raises(EnvelopeError):
        envelope_decrypt(consensus, tampered)


def test_tampered_ciphertext_fails(consensus):
    env, _ = envelope_encrypt(X25519Secret.generate(), consensus.public(), b"secret")
    bad_ct = bytearray(env.ciphertext)
    bad_ct[0] ^= 0x01
    with pytest.raises(EnvelopeError):
        envelope_decrypt(consensus, Envelope(env.ephemeral_pub, env.nonce, bytes(bad_ct)))


def test_distinct_tx_secrets_distinct_ciphertexts(consensus):
    plaintext = b"same plaintext every time"
    seen = set()
    for i in range(20):
        env, _ = envelope_encrypt(
            X25519Secret.from_seed(b"fresh %d" % i), consensus.public(), plaintext
        )
        seen.add(env.ciphertext)
    assert len(seen) == 20


def test_response_channel_round_trip(consensus):
    env, key = envelope_encrypt(X25519Secret.generate(), consensus.public(), b"ask")
    _, chain_key = envelope_decrypt(consensus, env)
    resp = seal_response(chain_key, env, b"answer")
    assert resp.nonce[:-1] == env.nonce[:-1]
    assert resp.nonce[-1] == env.nonce[-1] ^ 0x01
    assert open_response(key, env.nonce, resp) == b"answer"


def test_ciphertext_contains_no_plaintext_substring(consensus):
    rng = random.Random(8452)
    pub = consensus.public()
    for _ in range(1000):
        plaintext = rng.randbytes(64)
        env, _ = envelope_encrypt(X25519Secret.generate(), pub, plaintext)
        blob = env.to_bytes()
        for i in range(len(plaintext) - 7):
            assert blob.find(plaintext[i:i + 8]) == -1
