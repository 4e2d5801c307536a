/** secp256k1 signing for the hot wallet.
 *
 * Deterministic ECDSA (RFC 6979 nonces, low-s) over SHA-256, matching
 * the chain's verifier bit for bit. Scalar multiplication uses Jacobian
 * coordinates; a few milliseconds per signature is fine for gameplay.
 */

import { concatBytes, hexToBytes } from './bytes';
import { ripemd160 } from './ripemd160';
import { bech32Encode } from './bech32';
import { hmacSha256, sha256 } from './sha256';

const P = BigInt('0xfffffffffffffffffffffffffffffffffffffffffffffffffffffffefffffc2f');
export const N = BigInt('0xfffffffffffffffffffffffffffffffebaaedce6af48a03bbfd25e8cd0364141');
const GX = BigInt('0x79be667ef9dcbbac55a06295ce870b07029bfcdb2dce28d959f2815b16f81798');
const GY = BigInt('0x483ada7726a3c4655da4fbfc0e1108a8fd17b448a68554199c47d08ffb10d4b8');

function mod(a: bigint, m: bigint): bigint {
  const r = a % m;
  return r < 0n ? r + m : r;
}

function invMod(a: bigint, m: bigint): bigint {
  let [old_r, r] = [mod(a, m), m];
  let [old_s, s] = [1n, 0n];
  while (r !== 0n) {
    const q = old_r / r;
    [old_r, r] = [r, old_r - q * r];
    [old_s, s] = [s, old_s - q * s];
  }
  if (old_r !== 1n) throw new Error('not invertible');
  return mod(old_s, m);
}

type Jac = { x: bigint; y: bigint; z: bigint };
const INFINITY: Jac = { x: 0n, y: 1n, z: 0n };

function jDouble(pt: Jac): Jac {
  if (pt.z === 0n || pt.y === 0n) return INFINITY;
  const a = mod(pt.x * pt.x, P);
  const b = mod(pt.y * pt.y, P);
  const c = mod(b * b, P);
  let d = mod((pt.x + b) * (pt.x + b) - a - c, P);
  d = mod(2n * d, P);
  const e = mod(3n * a, P);
  const f = mod(e * e, P);
  const x3 = mod(f - 2n * d, P);
  const y3 = mod(e * (d - x3) - 8n * c, P);
  const z3 = mod(2n * pt.y * pt.z, P);
  return { x: x3, y: y3, z: z3 };
}

function jAdd(a: Jac, b: Jac): Jac {
  if (a.z === 0n) return b;
  if (b.z === 0n) return a;
  const z1z1 = mod(a.z * a.z, P);
  const z2z2 = mod(b.z * b.z, P);
  const u1 = mod(a.x * z2z2, P);
  const u2 = mod(b.x * z1z1, P);
  const s1 = mod(a.y * b.z * z2z2, P);
  const s2 = mod(b.y * a.z * z1z1, P);
  if (u1 === u2) {
    if (s1 !== s2) return INFINITY;
    return jDouble(a);
  }
  const h = mod(u2 - u1, P);
  const i = mod(4n * h * h, P);
  const j = mod(h * i, P);
  const r = mod(2n * (s2 - s1), P);
  const v = mod(u1 * i, P);
  const x3 = mod(r * r - j - 2n * v, P);
  const y3 = mod(r * (v - x3) - 2n * s1 * j, P);
  const z3 = mod(2n * h * a.z * b.z, P);
  return { x: x3, y: y3, z: z3 };
}

function jMul(pt: Jac, k: bigint): Jac {
  let result = INFINITY;
  let addend = pt;
  while (k > 0n) {
    if (k & 1n) result = jAdd(result, addend);
    addend = jDouble(addend);
    k >>= 1n;
  }
  return result;
}

function toAffine(pt: Jac): { x: bigint; y: bigint } {
  if (pt.z === 0n) throw new Error('point at infinity');
  const zInv = invMod(pt.z, P);
  const zInv2 = mod(zInv * zInv, P);
  return { x: mod(pt.x * zInv2, P), y: mod(pt.y * zInv2 * zInv, P) };
}

const G: Jac = { x: GX, y: GY, z: 1n };

function bigFromBytes(b: Uint8Array): bigint {
  let x = 0n;
  for (const v of b) x = (x << 8n) | BigInt(v);
  return x;
}

function bigTo32(x: bigint): Uint8Array {
  const out = new Uint8Array(32);
  for (let i = 31; i >= 0; i--) {
    out[i] = Number(x & 255n);
    x >>= 8n;
  }
  return out;
}

export class SigningKey {
  readonly scalar: bigint;

  constructor(readonly privBytes: Uint8Array) {
    if (privBytes.length !== 32) throw new Error('private key must be 32 bytes');
    this.scalar = bigFromBytes(privBytes);
    if (this.scalar <= 0n || this.scalar >= N) throw new Error('scalar out of range');
  }

  static fromHex(hex: string): SigningKey {
    return new SigningKey(hexToBytes(hex));
  }

  static random(): SigningKey {
    for (;;) {
      const candidate = new Uint8Array(32);
      crypto.getRandomValues(candidate);
      const x = bigFromBytes(candidate);
      if (x > 0n && x < N) return new SigningKey(candidate);
    }
  }

  compressedPublicKey(): Uint8Array {
    const pub = toAffine(jMul(G, this.scalar));
    const prefix = pub.y & 1n ? 3 : 2;
    return concatBytes(new Uint8Array([prefix]), bigTo32(pub.x));
  }

  address(hrp = 'secret'): string {
    return bech32Encode(hrp, ripemd160(sha256(this.compressedPublicKey())));
  }

  /** RFC 6979 nonce for SHA-256. */
  private nonce(msgHash: Uint8Array): bigint {
    let v: Uint8Array = new Uint8Array(32).fill(1);
    let k: Uint8Array = new Uint8Array(32).fill(0);
    const x = this.privBytes;
    k = hmacSha256(k, concatBytes(v, new Uint8Array([0]), x, msgHash));
    v = hmacSha256(k, v);
    k = hmacSha256(k, concatBytes(v, new Uint8Array([1]), x, msgHash));
    v = hmacSha256(k, v);
    for (;;) {
      v = hmacSha256(k, v);
      const candidate = bigFromBytes(v);
      if (candidate > 0n && candidate < N) return candidate;
      k = hmacSha256(k, concatBytes(v, new Uint8Array([0])));
      v = hmacSha256(k, v);
    }
  }

  /** 64-byte r||s signature over SHA-256(message), low-s normalized. */
  sign(message: Uint8Array): Uint8Array {
    const msgHash = sha256(message);
    const z = bigFromBytes(msgHash);
    let k = this.nonce(msgHash);
    for (;;) {
      const point = toAffine(jMul(G, k));
      const r = mod(point.x, N);
      if (r === 0n) {
        k = mod(k + 1n, N);
        continue;
      }
      let s = mod(invMod(k, N) * mod(z + r * this.scalar, N), N);
      if (s === 0n) {
        k = mod(k + 1n, N);
        continue;
      }
      if (s > N / 2n) s = N - s;
      return concatBytes(bigTo32(r), bigTo32(s));
    }
  }
}
