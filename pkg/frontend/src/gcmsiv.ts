/** AES-GCM-SIV (RFC 8452) built from WebCrypto AES-CTR.
 *
 * WebCrypto has neither GCM-SIV nor raw ECB; a single-block encryption
 * is AES-CTR over one zero block with the target block as the counter,
 * and the SIV counter mode (little-endian increment of the first four
 * bytes) is driven block by block the same way. POLYVAL runs on BigInt.
 */

import { bytesEqual, concatBytes } from './bytes';

const POLY_M = (1n << 128n) | (1n << 127n) | (1n << 126n) | (1n << 121n) | 1n;

function leToBig(bytes: Uint8Array): bigint {
  let x = 0n;
  for (let i = bytes.length - 1; i >= 0; i--) x = (x << 8n) | BigInt(bytes[i]);
  return x;
}

function bigToLe16(x: bigint): Uint8Array {
  const out = new Uint8Array(16);
  for (let i = 0; i < 16; i++) {
    out[i] = Number(x & 255n);
    x >>= 8n;
  }
  return out;
}

function divX(f: bigint): bigint {
  return f & 1n ? (f ^ POLY_M) >> 1n : f >> 1n;
}

function mulX(f: bigint): bigint {
  f <<= 1n;
  return f >> 128n ? f ^ POLY_M : f;
}

export function polyval(h: Uint8Array, data: Uint8Array): Uint8Array {
  if (data.length % 16) throw new Error('polyval input must be 16-byte aligned');
  let v = leToBig(h);
  for (let i = 0; i < 128; i++) v = divX(v);
  const table: bigint[] = new Array(128);
  for (let i = 0; i < 128; i++) {
    table[i] = v;
    v = mulX(v);
  }
  let s = 0n;
  for (let off = 0; off < data.length; off += 16) {
    let y = s ^ leToBig(data.subarray(off, off + 16));
    let acc = 0n;
    let bit = 0;
    while (y) {
      if (y & 1n) acc ^= table[bit];
      y >>= 1n;
      bit++;
    }
    s = acc;
  }
  return bigToLe16(s);
}

async function importAes(raw: Uint8Array): Promise<CryptoKey> {
  return crypto.subtle.importKey('raw', raw as BufferSource, { name: 'AES-CTR' }, false, ['encrypt']);
}

async function aesBlock(key: CryptoKey, block: Uint8Array): Promise<Uint8Array> {
  const out = await crypto.subtle.encrypt(
    { name: 'AES-CTR', counter: block as BufferSource, length: 32 },
    key,
    new Uint8Array(16) as BufferSource,
  );
  return new Uint8Array(out);
}

interface SivKeys {
  auth: Uint8Array;
  enc: CryptoKey;
}

async function deriveKeys(rawKey: Uint8Array, nonce: Uint8Array): Promise<SivKeys> {
  if (rawKey.length !== 16 && rawKey.length !== 32) throw new Error('bad key size');
  if (nonce.length !== 12) throw new Error('nonce must be 12 bytes');
  const master = await importAes(rawKey);
  const count = rawKey.length === 32 ? 6 : 4;
  const halves: Uint8Array[] = [];
  for (let i = 0; i < count; i++) {
    const block = new Uint8Array(16);
    block[0] = i & 0xff;
    block[1] = (i >> 8) & 0xff;
    block.set(nonce, 4);
    halves.push((await aesBlock(master, block)).subarray(0, 8));
  }
  return {
    auth: concatBytes(halves[0], halves[1]),
    enc: await importAes(concatBytes(...halves.slice(2))),
  };
}

function pad16(data: Uint8Array): Uint8Array {
  return data.length % 16 ? concatBytes(data, new Uint8Array(16 - (data.length % 16))) : data;
}

function lengthBlock(aadLen: number, ptLen: number): Uint8Array {
  const out = new Uint8Array(16);
  let a = aadLen * 8;
  let p = ptLen * 8;
  for (let i = 0; i < 8; i++) {
    out[i] = a % 256;
    a = Math.floor(a / 256);
    out[8 + i] = p % 256;
    p = Math.floor(p / 256);
  }
  return out;
}

async function sivTag(keys: SivKeys, nonce: Uint8Array, aad: Uint8Array, pt: Uint8Array) {
  const s = polyval(keys.auth, concatBytes(pad16(aad), pad16(pt), lengthBlock(aad.length, pt.length)));
  for (let i = 0; i < 12; i++) s[i] ^= nonce[i];
  s[15] &= 0x7f;
  return aesBlock(keys.enc, s);
}

async function ctrApply(key: CryptoKey, tag: Uint8Array, data: Uint8Array): Promise<Uint8Array> {
  const out = new Uint8Array(data.length);
  const base = tag.slice();
  base[15] |= 0x80;
  const ctr0 = (base[0] | (base[1] << 8) | (base[2] << 16) | (base[3] << 24)) >>> 0;
  for (let off = 0; off < data.length; off += 16) {
    const block = base.slice();
    const v = (ctr0 + off / 16) >>> 0;
    block[0] = v & 0xff;
    block[1] = (v >>> 8) & 0xff;
    block[2] = (v >>> 16) & 0xff;
    block[3] = (v >>> 24) & 0xff;
    const keystream = await aesBlock(key, block);
    for (let i = 0; i < 16 && off + i < data.length; i++) out[off + i] = data[off + i] ^ keystream[i];
  }
  return out;
}

export async function gcmSivSeal(
  rawKey: Uint8Array,
  nonce: Uint8Array,
  plaintext: Uint8Array,
  aad: Uint8Array = new Uint8Array(0),
): Promise<Uint8Array> {
  const keys = await deriveKeys(rawKey, nonce);
  const tag = await sivTag(keys, nonce, aad, plaintext);
  const ct = await ctrApply(keys.enc, tag, plaintext);
  return concatBytes(ct, tag);
}

export async function gcmSivOpen(
  rawKey: Uint8Array,
  nonce: Uint8Array,
  sealed: Uint8Array,
  aad: Uint8Array = new Uint8Array(0),
): Promise<Uint8Array> {
  if (sealed.length < 16) throw new Error('ciphertext too short');
  const keys = await deriveKeys(rawKey, nonce);
  const tag = sealed.subarray(sealed.length - 16);
  const plaintext = await ctrApply(keys.enc, tag, sealed.subarray(0, sealed.length - 16));
  const expected = await sivTag(keys, nonce, aad, plaintext);
  if (!bytesEqual(tag, expected)) throw new Error('authentication failed');
  return plaintext;
}
