/* NFP bootloader: connects to a chain endpoint, fetches the application
 * entry module from the contract's package manager, and injects it.
 * Everything here must run from the file: scheme with no external
 * resources; the envelope crypto the chain requires is implemented
 * against WebCrypto plus BigInt arithmetic. */
(function () {
  'use strict';
  var SVG_NS = 'http://www.w3.org/2000/svg';
  var NFP_NS = 'urn:nfp:v1';
  var subtle = (typeof crypto !== 'undefined' && crypto.subtle) ? crypto.subtle : null;

  /* ---- byte helpers ---- */
  function hexToBytes(h) {
    var out = new Uint8Array(h.length / 2);
    for (var i = 0; i < out.length; i++) out[i] = parseInt(h.substr(2 * i, 2), 16);
    return out;
  }
  function bytesToHex(b) {
    var s = '';
    for (var i = 0; i < b.length; i++) s += (b[i] < 16 ? '0' : '') + b[i].toString(16);
    return s;
  }
  function b64ToBytes(s) {
    var bin = atob(s), out = new Uint8Array(bin.length);
    for (var i = 0; i < bin.length; i++) out[i] = bin.charCodeAt(i);
    return out;
  }
  function bytesToB64(b) {
    var s = '';
    for (var i = 0; i < b.length; i++) s += String.fromCharCode(b[i]);
    return btoa(s);
  }
  function concatBytes() {
    var total = 0, i;
    for (i = 0; i < arguments.length; i++) total += arguments[i].length;
    var out = new Uint8Array(total), off = 0;
    for (i = 0; i < arguments.length; i++) { out.set(arguments[i], off); off += arguments[i].length; }
    return out;
  }
  function randomBytes(n) {
    var b = new Uint8Array(n);
    crypto.getRandomValues(b);
    return b;
  }
  /* canonical JSON: sorted keys, no whitespace; the chain's signature domain */
  function sortedJson(value) {
    if (value === null || typeof value !== 'object') return JSON.stringify(value);
    if (Array.isArray(value)) return '[' + value.map(sortedJson).join(',') + ']';
    var keys = Object.keys(value).sort();
    return '{' + keys.map(function (k) {
      return JSON.stringify(k) + ':' + sortedJson(value[k]);
    }).join(',') + '}';
  }

  /* ---- x25519 (RFC 7748) over BigInt ---- */
  var P = (1n << 255n) - 19n;
  var A24 = 121665n;
  function leToBig(b) {
    var x = 0n;
    for (var i = b.length - 1; i >= 0; i--) x = (x << 8n) | BigInt(b[i]);
    return x;
  }
  function bigToLe(x, n) {
    var out = new Uint8Array(n);
    for (var i = 0; i < n; i++) { out[i] = Number(x & 255n); x >>= 8n; }
    return out;
  }
  function fmod(a) { a %= P; return a < 0n ? a + P : a; }
  function fpow(a, e) {
    var r = 1n;
    a = fmod(a);
    while (e > 0n) { if (e & 1n) r = r * a % P; a = a * a % P; e >>= 1n; }
    return r;
  }
  function x25519(scalarBytes, uBytes) {
    var s = scalarBytes.slice();
    s[0] &= 248; s[31] &= 127; s[31] |= 64;
    var k = leToBig(s);
    var x1 = fmod(leToBig(uBytes) & ((1n << 255n) - 1n));
    var x2 = 1n, z2 = 0n, x3 = x1, z3 = 1n, swap = 0n, t, kt, tmp;
    for (t = 254; t >= 0; t--) {
      kt = (k >> BigInt(t)) & 1n;
      swap ^= kt;
      if (swap) { tmp = x2; x2 = x3; x3 = tmp; tmp = z2; z2 = z3; z3 = tmp; }
      swap = kt;
      var A = fmod(x2 + z2), AA = A * A % P;
      var B = fmod(x2 - z2), BB = B * B % P;
      var E = fmod(AA - BB);
      var C = fmod(x3 + z3), D = fmod(x3 - z3);
      var DA = D * A % P, CB = C * B % P;
      x3 = fmod(DA + CB); x3 = x3 * x3 % P;
      z3 = fmod(DA - CB); z3 = x1 * (z3 * z3 % P) % P;
      x2 = AA * BB % P;
      z2 = E * fmod(AA + A24 * E) % P;
    }
    if (swap) { tmp = x2; x2 = x3; x3 = tmp; tmp = z2; z2 = z3; z3 = tmp; }
    var out = bigToLe(fmod(x2 * fpow(z2, P - 2n)), 32);
    var zero = true;
    for (var i = 0; i < 32; i++) if (out[i]) zero = false;
    if (zero) throw new Error('low-order x25519 point');
    return out;
  }
  var BASEPOINT = new Uint8Array(32); BASEPOINT[0] = 9;

  /* ---- AES-GCM-SIV (RFC 8452) from WebCrypto AES-CTR ---- */
  var POLY_M = (1n << 128n) | (1n << 127n) | (1n << 126n) | (1n << 121n) | 1n;
  function polyDivX(f) { return (f & 1n) ? ((f ^ POLY_M) >> 1n) : (f >> 1n); }
  function polyMulX(f) {
    f <<= 1n;
    if (f >> 128n) f ^= POLY_M;
    return f;
  }
  function polyval(hBytes, data) {
    var v = leToBig(hBytes), i;
    for (i = 0; i < 128; i++) v = polyDivX(v);
    var table = new Array(128);
    for (i = 0; i < 128; i++) { table[i] = v; v = polyMulX(v); }
    var s = 0n, off, y, acc, bit;
    for (off = 0; off < data.length; off += 16) {
      y = s ^ leToBig(data.subarray(off, off + 16));
      acc = 0n; bit = 0;
      while (y) {
        if (y & 1n) acc ^= table[bit];
        y >>= 1n; bit++;
      }
      s = acc;
    }
    return bigToLe(s, 16);
  }
  function importAes(raw) {
    return subtle.importKey('raw', raw, { name: 'AES-CTR' }, false, ['encrypt']);
  }
  async function aesBlock(key, block) {
    var out = await subtle.encrypt(
      { name: 'AES-CTR', counter: block, length: 32 }, key, new Uint8Array(16));
    return new Uint8Array(out);
  }
  async function gcmSivKeys(rawKey, nonce) {
    var master = await importAes(rawKey);
    var n = rawKey.length === 32 ? 6 : 4;
    var halves = [];
    for (var i = 0; i < n; i++) {
      var block = new Uint8Array(16);
      block[0] = i & 255; block[1] = (i >> 8) & 255;
      block.set(nonce, 4);
      halves.push((await aesBlock(master, block)).subarray(0, 8));
    }
    return {
      auth: concatBytes(halves[0], halves[1]),
      enc: await importAes(concatBytes.apply(null, halves.slice(2))),
    };
  }
  function pad16(b) {
    if (b.length % 16 === 0) return b;
    return concatBytes(b, new Uint8Array(16 - (b.length % 16)));
  }
  function lengthBlock(aadLen, ptLen) {
    var out = new Uint8Array(16);
    var writeLe64 = function (bits, off) {
      for (var i = 0; i < 8; i++) { out[off + i] = bits % 256; bits = Math.floor(bits / 256); }
    };
    writeLe64(aadLen * 8, 0);
    writeLe64(ptLen * 8, 8);
    return out;
  }
  async function ctrApply(key, tag, data) {
    var out = new Uint8Array(data.length);
    var base = new Uint8Array(tag); base[15] |= 0x80;
    var ctr0 = (base[0] | (base[1] << 8) | (base[2] << 16) | (base[3] << 24)) >>> 0;
    for (var off = 0; off < data.length; off += 16) {
      var block = new Uint8Array(base);
      var v = (ctr0 + off / 16) >>> 0;
      block[0] = v & 255; block[1] = (v >>> 8) & 255;
      block[2] = (v >>> 16) & 255; block[3] = (v >>> 24) & 255;
      var ks = await aesBlock(key, block);
      for (var i = 0; i < 16 && off + i < data.length; i++) out[off + i] = data[off + i] ^ ks[i];
    }
    return out;
  }
  async function sivTag(keys, nonce, aad, pt) {
    var s = polyval(keys.auth, concatBytes(pad16(aad), pad16(pt), lengthBlock(aad.length, pt.length)));
    for (var i = 0; i < 12; i++) s[i] ^= nonce[i];
    s[15] &= 0x7f;
    return aesBlock(keys.enc, s);
  }
  async function gcmSivSeal(rawKey, nonce, pt, aad) {
    aad = aad || new Uint8Array(0);
    var keys = await gcmSivKeys(rawKey, nonce);
    var tag = await sivTag(keys, nonce, aad, pt);
    var ct = await ctrApply(keys.enc, tag, pt);
    return concatBytes(ct, tag);
  }
  async function gcmSivOpen(rawKey, nonce, sealed, aad) {
    aad = aad || new Uint8Array(0);
    if (sealed.length < 16) throw new Error('ciphertext too short');
    var keys = await gcmSivKeys(rawKey, nonce);
    var tag = sealed.subarray(sealed.length - 16);
    var pt = await ctrApply(keys.enc, tag, sealed.subarray(0, sealed.length - 16));
    var expect = await sivTag(keys, nonce, aad, pt);
    var diff = 0;
    for (var i = 0; i < 16; i++) diff |= tag[i] ^ expect[i];
    if (diff) throw new Error('envelope authentication failed');
    return pt;
  }

  /* ---- envelope layer ---- */
  async function hkdfEnvelopeKey(shared) {
    var ikm = await subtle.importKey('raw', shared, 'HKDF', false, ['deriveBits']);
    var bits = await subtle.deriveBits({
      name: 'HKDF', hash: 'SHA-256', salt: new Uint8Array(32),
      info: new TextEncoder().encode('nfp-envelope-v1'),
    }, ikm, 256);
    return new Uint8Array(bits);
  }
  async function sealEnvelope(consensusPub, plaintext) {
    var secret = randomBytes(32);
    var pub = x25519(secret, BASEPOINT);
    var key = await hkdfEnvelopeKey(x25519(secret, consensusPub));
    var nonce = randomBytes(12);
    var ct = await gcmSivSeal(key, nonce, plaintext);
    return { wire: bytesToHex(concatBytes(pub, nonce, ct)), key: key, nonce: nonce };
  }
  async function openResponse(session, wireHex) {
    var raw = hexToBytes(wireHex);
    var nonce = raw.subarray(32, 44);
    var expected = new Uint8Array(session.nonce);
    expected[11] ^= 1;
    for (var i = 0; i < 12; i++) if (nonce[i] !== expected[i]) throw new Error('response nonce mismatch');
    return gcmSivOpen(session.key, nonce, raw.subarray(44));
  }

  /* ---- chain transport ---- */
  async function getJson(url) {
    var resp = await fetch(url, { method: 'GET' });
    if (!resp.ok) throw new Error('HTTP ' + resp.status + ' from ' + url);
    return resp.json();
  }
  async function postJson(url, body) {
    var resp = await fetch(url, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
    });
    var data = await resp.json();
    if (!resp.ok) throw new Error(data.error || ('HTTP ' + resp.status));
    return data;
  }
  async function connectEndpoint(endpoints) {
    var failures = [];
    for (var i = 0; i < endpoints.length; i++) {
      var url = endpoints[i].replace(/\/+$/, '');
      try {
        var info = await getJson(url + '/consensus_pubkey');
        return {
          url: url,
          chainId: info.chain_id,
          consensusPub: hexToBytes(info.consensus_pubkey),
        };
      } catch (err) {
        failures.push(url + ': ' + err.message);
      }
    }
    throw new Error('all endpoints unreachable: ' + failures.join('; '));
  }
  async function queryContract(endpoint, contract, msg) {
    var session = await sealEnvelope(
      endpoint.consensusPub, new TextEncoder().encode(sortedJson(msg)));
    var data = await postJson(endpoint.url + '/query', {
      contract: contract, envelope: session.wire,
    });
    var plain = await openResponse(session, data.envelope);
    var payload = JSON.parse(new TextDecoder().decode(plain));
    if (payload.error) throw new Error(payload.error);
    return payload.ok;
  }
  async function gunzip(bytes) {
    var stream = new Blob([bytes]).stream().pipeThrough(new DecompressionStream('gzip'));
    var buf = await new Response(stream).arrayBuffer();
    return new Uint8Array(buf);
  }

  /* ---- boot sequence ---- */
  function readMetadata() {
    var webs = document.getElementsByTagNameNS(NFP_NS, 'web');
    if (!webs.length) throw new Error('missing nfp metadata');
    var web = webs[0];
    var lcds = web.getAttributeNS(NFP_NS, 'lcds') || '';
    return {
      endpoints: lcds.split(',').filter(function (u) { return u.trim(); }),
      chainId: web.getAttributeNS(NFP_NS, 'chain'),
      contract: web.getAttributeNS(NFP_NS, 'contract'),
      tokenId: web.getAttributeNS(NFP_NS, 'token'),
    };
  }
  var boot = {
    phase: 'preview',
    meta: null,
    endpoint: null,
    serial: null,
    fromCache: false,
    updateAvailable: null,
    error: null,
  };
  function setStatus(text) {
    var el = document.getElementById('nfp-status');
    if (el) el.textContent = text;
    boot.statusText = text;
  }
  function cacheKey() { return 'nfp:app:' + boot.meta.contract; }
  function loadCache() {
    try {
      var raw = localStorage.getItem(cacheKey());
      return raw ? JSON.parse(raw) : null;
    } catch (err) { return null; }
  }
  function saveCache(serial, codeB64) {
    try {
      localStorage.setItem(cacheKey(), JSON.stringify({ serial: serial, code: codeB64 }));
    } catch (err) { /* storage may be unavailable from file: */ }
  }
  function injectModule(codeText) {
    var script = document.createElementNS(SVG_NS, 'script');
    script.setAttribute('data-nfp-module', 'app');
    script.textContent = codeText;
    document.documentElement.appendChild(script);
  }
  async function fetchApp() {
    var pkg = await queryContract(boot.endpoint, boot.meta.contract, {
      get_package: {
        package_id: 'app.js',
        selector: { tag: 'latest' },
        auth: null,
      },
    });
    var data = b64ToBytes(pkg.data);
    if (pkg.content_encoding === 'gzip') data = await gunzip(data);
    return { serial: pkg.serial, code: new TextDecoder().decode(data) };
  }
  async function checkForUpdate() {
    try {
      var fresh = await fetchApp();
      if (boot.serial !== null && fresh.serial > boot.serial) {
        boot.updateAvailable = fresh.serial;
        saveCache(fresh.serial, btoa(unescape(encodeURIComponent(fresh.code))));
        setStatus('update available: v' + fresh.serial + ' (reopen to apply)');
      }
    } catch (err) { /* background check is best-effort */ }
  }
  async function connectAndRun() {
    try {
      boot.phase = 'connecting';
      setStatus('connecting…');
      boot.endpoint = await connectEndpoint(boot.meta.endpoints);
      boot.phase = 'fetching';
      var cached = loadCache();
      var app;
      if (cached && cached.serial) {
        app = { serial: cached.serial, code: decodeURIComponent(escape(atob(cached.code))) };
        boot.fromCache = true;
        setTimeout(checkForUpdate, 0);
      } else {
        setStatus('fetching application…');
        app = await fetchApp();
        saveCache(app.serial, btoa(unescape(encodeURIComponent(app.code))));
      }
      boot.serial = app.serial;
      boot.phase = 'running';
      setStatus('');
      var button = document.getElementById('nfp-connect');
      if (button && button.parentNode) button.parentNode.removeChild(button);
      injectModule(app.code);
    } catch (err) {
      boot.phase = 'error';
      boot.error = String(err && err.message || err);
      setStatus('connection failed — preview only');
    }
  }
  function drawConnectUi() {
    var root = document.documentElement;
    var group = document.createElementNS(SVG_NS, 'g');
    group.setAttribute('id', 'nfp-connect');
    group.setAttribute('cursor', 'pointer');
    var rect = document.createElementNS(SVG_NS, 'rect');
    rect.setAttribute('x', '176'); rect.setAttribute('y', '14');
    rect.setAttribute('width', '160'); rect.setAttribute('height', '34');
    rect.setAttribute('rx', '17');
    rect.setAttribute('fill', '#10131c'); rect.setAttribute('stroke', '#76f7c5');
    rect.setAttribute('stroke-width', '1.5'); rect.setAttribute('opacity', '0.92');
    var label = document.createElementNS(SVG_NS, 'text');
    label.setAttribute('x', '256'); label.setAttribute('y', '36');
    label.setAttribute('text-anchor', 'middle');
    label.setAttribute('font-family', 'monospace'); label.setAttribute('font-size', '14');
    label.setAttribute('fill', '#76f7c5');
    label.textContent = 'connect to chain';
    group.appendChild(rect);
    group.appendChild(label);
    group.addEventListener('click', connectAndRun);
    root.appendChild(group);
    var status = document.createElementNS(SVG_NS, 'text');
    status.setAttribute('id', 'nfp-status');
    status.setAttribute('x', '256'); status.setAttribute('y', '64');
    status.setAttribute('text-anchor', 'middle');
    status.setAttribute('font-family', 'monospace'); status.setAttribute('font-size', '11');
    status.setAttribute('fill', '#d8dee9');
    root.appendChild(status);
  }

  var kit = {
    hexToBytes: hexToBytes, bytesToHex: bytesToHex,
    b64ToBytes: b64ToBytes, bytesToB64: bytesToB64,
    concatBytes: concatBytes, randomBytes: randomBytes,
    sortedJson: sortedJson,
    x25519: x25519, basepoint: BASEPOINT,
    gcmSivSeal: gcmSivSeal, gcmSivOpen: gcmSivOpen,
    hkdfEnvelopeKey: hkdfEnvelopeKey,
    sealEnvelope: sealEnvelope, openResponse: openResponse,
    getJson: getJson, postJson: postJson,
    queryContract: queryContract, gunzip: gunzip,
    polyval: polyval,
  };

  function start() {
    boot.meta = readMetadata();
    window.NFP = {
      boot: boot,
      kit: kit,
      connect: connectAndRun,
      checkForUpdate: checkForUpdate,
    };
    if (!subtle) {
      boot.phase = 'error';
      boot.error = 'WebCrypto unavailable (insecure context)';
      return;
    }
    drawConnectUi();
  }
  if (typeof document !== 'undefined' && document.documentElement) {
    start();
  }
})();
