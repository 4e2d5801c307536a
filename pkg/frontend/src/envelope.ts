/** The chain's encrypted message envelope.
 *
 * Wire format: 32-byte ephemeral pubkey || 12-byte nonce || ciphertext.
 * Key: HKDF-SHA256 over the X25519 shared secret, context
 * "nfp-envelope-v1". Responses reuse the key with the last nonce byte
 * XOR 1.
 */

import { bytesToHex, concatBytes, hexToBytes, randomBytes, utf8 } from './bytes';
import { gcmSivOpen, gcmSivSeal } from './gcmsiv';
import { publicKey, x25519 } from './x25519';

export interface EnvelopeSession {
  wire: string;          // hex, ready for the chain
  key: Uint8Array;       // derived AEAD key, opens the response
  nonce: Uint8Array;     // request nonce
}

export async function deriveEnvelopeKey(shared: Uint8Array): Promise<Uint8Array> {
  const ikm = await crypto.subtle.importKey('raw', shared as BufferSource, 'HKDF', false, ['deriveBits']);
  const bits = await crypto.subtle.deriveBits(
    { name: 'HKDF', hash: 'SHA-256', salt: new Uint8Array(32) as BufferSource, info: utf8('nfp-envelope-v1') as BufferSource },
    ikm,
    256,
  );
  return new Uint8Array(bits);
}

export async function sealEnvelope(
  consensusPub: Uint8Array,
  plaintext: Uint8Array,
): Promise<EnvelopeSession> {
  const secret = randomBytes(32);
  const ephemeralPub = publicKey(secret);
  const key = await deriveEnvelopeKey(x25519(secret, consensusPub));
  const nonce = randomBytes(12);
  const ciphertext = await gcmSivSeal(key, nonce, plaintext);
  return { wire: bytesToHex(concatBytes(ephemeralPub, nonce, ciphertext)), key, nonce };
}

export async function openResponse(
  session: EnvelopeSession,
  wireHex: string,
): Promise<Uint8Array> {
  const raw = hexToBytes(wireHex);
  if (raw.length < 44) throw new Error('response envelope too short');
  const nonce = raw.subarray(32, 44);
  const expected = session.nonce.slice();
  expected[11] ^= 1;
  for (let i = 0; i < 12; i++) {
    if (nonce[i] !== expected[i]) throw new Error('response nonce mismatch');
  }
  return gcmSivOpen(session.key, nonce, raw.subarray(44));
}
