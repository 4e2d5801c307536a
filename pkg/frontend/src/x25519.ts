/** X25519 scalar multiplication (RFC 7748) for envelope key agreement. */

const P = (1n << 255n) - 19n;
const A24 = 121665n;

function mod(a: bigint): bigint {
  const r = a % P;
  return r < 0n ? r + P : r;
}

function pow(a: bigint, e: bigint): bigint {
  let result = 1n;
  a = mod(a);
  while (e > 0n) {
    if (e & 1n) result = (result * a) % P;
    a = (a * a) % P;
    e >>= 1n;
  }
  return result;
}

function leToBig(bytes: Uint8Array): bigint {
  let x = 0n;
  for (let i = bytes.length - 1; i >= 0; i--) x = (x << 8n) | BigInt(bytes[i]);
  return x;
}

function bigToLe(x: bigint, n: number): Uint8Array {
  const out = new Uint8Array(n);
  for (let i = 0; i < n; i++) {
    out[i] = Number(x & 255n);
    x >>= 8n;
  }
  return out;
}

export const BASEPOINT = (() => {
  const b = new Uint8Array(32);
  b[0] = 9;
  return b;
})();

export function x25519(scalar: Uint8Array, u: Uint8Array): Uint8Array {
  const clamped = scalar.slice();
  clamped[0] &= 248;
  clamped[31] &= 127;
  clamped[31] |= 64;
  const k = leToBig(clamped);
  const x1 = mod(leToBig(u) & ((1n << 255n) - 1n));
  let x2 = 1n, z2 = 0n, x3 = x1, z3 = 1n;
  let swap = 0n;
  for (let t = 254; t >= 0; t--) {
    const kt = (k >> BigInt(t)) & 1n;
    swap ^= kt;
    if (swap) {
      [x2, x3] = [x3, x2];
      [z2, z3] = [z3, z2];
    }
    swap = kt;
    const a = mod(x2 + z2);
    const aa = (a * a) % P;
    const b = mod(x2 - z2);
    const bb = (b * b) % P;
    const e = mod(aa - bb);
    const c = mod(x3 + z3);
    const d = mod(x3 - z3);
    const da = (d * a) % P;
    const cb = (c * b) % P;
    x3 = mod(da + cb);
    x3 = (x3 * x3) % P;
    z3 = mod(da - cb);
    z3 = (x1 * ((z3 * z3) % P)) % P;
    x2 = (aa * bb) % P;
    z2 = (e * mod(aa + A24 * e)) % P;
  }
  if (swap) {
    [x2, x3] = [x3, x2];
    [z2, z3] = [z3, z2];
  }
  const out = bigToLe(mod(x2 * pow(z2, P - 2n)), 32);
  if (out.every((b) => b === 0)) throw new Error('low-order x25519 point');
  return out;
}

export function publicKey(secret: Uint8Array): Uint8Array {
  return x25519(secret, BASEPOINT);
}
