/** Differential test: the client-side placement validator must agree
 * with the contract's submit_setup verdict on every fuzzed board.
 */

import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { ChainClient, connectEndpoint, ContractError } from '../src/chain';
import { SigningKey } from '../src/secp256k1';
import { validatePlacements, VEHICLES } from '../src/validate';
import { DirectWallet } from '../src/wallet';
import { Sim } from '../harness/sim';

function mulberry32(seed: number) {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

type Rng = () => number;

function randInt(rng: Rng, n: number): number {
  return Math.floor(rng() * n);
}

function randomLegalBoard(rng: Rng): any[] {
  for (;;) {
    const taken = new Set<string>();
    const placements: any[] = [];
    let ok = true;
    for (const [vtype, length] of Object.entries(VEHICLES)) {
      let placed = false;
      for (let tries = 0; tries < 200 && !placed; tries++) {
        const orientation = rng() < 0.5 ? 'horizontal' : 'vertical';
        const x = randInt(rng, 10);
        const y = randInt(rng, 10);
        const cells: string[] = [];
        let fits = true;
        for (let i = 0; i < length; i++) {
          const cx = orientation === 'horizontal' ? x + i : x;
          const cy = orientation === 'horizontal' ? y : y + i;
          if (cx > 9 || cy > 9 || taken.has(`${cx},${cy}`)) {
            fits = false;
            break;
          }
          cells.push(`${cx},${cy}`);
        }
        if (fits) {
          for (const c of cells) taken.add(c);
          placements.push({ vehicle_type: vtype, origin: [x, y], orientation });
          placed = true;
        }
      }
      if (!placed) {
        ok = false;
        break;
      }
    }
    if (ok) return placements;
  }
}

function mutate(rng: Rng, board: any[]): any[] {
  const out = board.map((p) => ({ ...p, origin: [...p.origin] }));
  switch (randInt(rng, 7)) {
    case 0: // push a vehicle off grid
      out[randInt(rng, out.length)].origin[randInt(rng, 2)] = 7 + randInt(rng, 6);
      break;
    case 1: // duplicate a type
      out[randInt(rng, out.length)].vehicle_type =
        out[randInt(rng, out.length)].vehicle_type;
      break;
    case 2: // force an overlap
      out[1].origin = [...out[0].origin];
      out[1].orientation = out[0].orientation;
      break;
    case 3: // drop one placement
      out.pop();
      break;
    case 4: // unknown type
      out[randInt(rng, out.length)].vehicle_type = 'zeppelin';
      break;
    case 5: // non-integer coordinate
      out[randInt(rng, out.length)].origin[0] = 3.5;
      break;
    case 6: // negative coordinate
      out[randInt(rng, out.length)].origin[1] = -1;
      break;
  }
  return out;
}

function garbage(rng: Rng): any[] {
  const count = randInt(rng, 8);
  const types = [...Object.keys(VEHICLES), 'dirigible'];
  const out: any[] = [];
  for (let i = 0; i < count; i++) {
    out.push({
      vehicle_type: types[randInt(rng, types.length)],
      origin: [randInt(rng, 14) - 2, randInt(rng, 14) - 2],
      orientation: rng() < 0.5 ? 'horizontal' : 'vertical',
    });
  }
  return out;
}

describe('differential placement validation', () => {
  const sim = new Sim('nfp-diff-');
  let p0: DirectWallet;
  let p1: DirectWallet;

  beforeAll(async () => {
    sim.init({ p0: 10_000_000_000, p1: 10_000_000_000 }, 'diff-seed');
    await sim.serve();
    sim.cli(['mint', '--key', 'p0', '--out', 'a.svg', '--endpoints', sim.url]);
    sim.cli(['mint', '--key', 'p0', '--to', 'p1', '--out', 'b.svg', '--endpoints', sim.url]);
    const endpoint = await connectEndpoint([sim.url]);
    p0 = new DirectWallet(SigningKey.fromHex(sim.keyHex('p0')), new ChainClient(endpoint, sim.contract));
    p1 = new DirectWallet(SigningKey.fromHex(sim.keyHex('p1')), new ChainClient(endpoint, sim.contract));
  }, 60000);

  afterAll(() => sim.stop());

  it('agrees with the contract on 1000 fuzzed boards', async () => {
    const rng = mulberry32(0x5eed);

    // a valid submission stores the board and permanently occupies its
    // tokens (matches have no forfeit), so consumed probes are replaced
    // with freshly minted token pairs
    const { bytesToB64, utf8 } = await import('../src/bytes');
    const svg = bytesToB64(utf8('<svg/>'));
    const freshMatch = async (): Promise<string> => {
      const tokenA = (await p0.execute({ mint: { to: p0.address, svg } })).token_id;
      const tokenB = (await p0.execute({ mint: { to: p1.address, svg } })).token_id;
      const match = await p0.execute({ new_match: { token_id: tokenA, wager: 0 } });
      await p1.execute({ join_match: { match_id: match.match_id, token_id: tokenB } });
      return match.match_id;
    };

    let probeMatch = await freshMatch();
    let agreements = 0;
    const cases = 1000;
    for (let i = 0; i < cases; i++) {
      const dice = rng();
      const board =
        dice < 0.35 ? randomLegalBoard(rng)
        : dice < 0.8 ? mutate(rng, randomLegalBoard(rng))
        : garbage(rng);
      const clientVerdict = validatePlacements(board).ok;

      let contractVerdict: boolean;
      try {
        await p0.execute({ submit_setup: { match_id: probeMatch, placements: board } });
        contractVerdict = true;
        probeMatch = await freshMatch(); // board stored; probe consumed
      } catch (err) {
        if (!(err instanceof ContractError)) throw err;
        contractVerdict = false;
      }
      expect(contractVerdict, `case ${i}: ${JSON.stringify(board)}`).toBe(clientVerdict);
      agreements++;
    }
    expect(agreements).toBe(cases);
  }, 300000);
});
