/** End-to-end browser flow against a live sim: bootload from the built
 * SVG, hot-wallet approval, a full match with zero owner prompts after
 * setup, mid-match reopen recovery, fresh-profile recovery, background
 * update notice, and a no-secret-egress audit of every request body.
 */

import { readFileSync } from 'node:fs';
import { join } from 'node:path';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { sortedJson } from '../src/bytes';
import { ChainClient, connectEndpoint } from '../src/chain';
import { GameClient } from '../src/game';
import { SigningKey } from '../src/secp256k1';
import { DirectWallet, SoftwareSigner } from '../src/wallet';
import { Sandbox } from '../harness/dom';
import { Sim } from '../harness/sim';

const OWNER_LAYOUT = [
  { vehicle_type: 'carrier', origin: [0, 0], orientation: 'horizontal' },
  { vehicle_type: 'battleship', origin: [0, 2], orientation: 'horizontal' },
  { vehicle_type: 'cruiser', origin: [0, 4], orientation: 'horizontal' },
  { vehicle_type: 'submarine', origin: [0, 6], orientation: 'horizontal' },
  { vehicle_type: 'destroyer', origin: [0, 8], orientation: 'horizontal' },
] as any;

const TARGETS: Array<[number, number]> = [];
for (const [y, len] of [[0, 5], [2, 4], [4, 3], [6, 3], [8, 2]] as const) {
  for (let x = 0; x < len; x++) TARGETS.push([x, y]);
}
const WATER: Array<[number, number]> = [];
for (let y = 0; y < 10; y++) WATER.push([9, y]);
for (let y = 0; y < 10; y++) WATER.push([8, y]);

function bootFromSvg(svgText: string, storage?: Map<string, string>): Sandbox {
  const sandbox = new Sandbox(storage);
  sandbox.loadSvgMetadata(svgText);
  sandbox.runScript(Sandbox.extractBootloader(svgText));
  return sandbox;
}

async function connectSandbox(sandbox: Sandbox): Promise<any> {
  const nfp = (sandbox.window as any).NFP;
  expect(nfp, 'bootloader exposed window.NFP').toBeTruthy();
  const button = sandbox.document.getElementById('nfp-connect');
  expect(button, 'connect button drawn').toBeTruthy();
  button!.click();
  await sandbox.waitFor(() => nfp.boot.phase === 'running' || nfp.boot.phase === 'error',
    'bootload to finish');
  expect(nfp.boot.error).toBeNull();
  expect(nfp.boot.phase).toBe('running');
  const app = (sandbox.window as any).NFP_APP_INSTANCE;
  expect(app, 'application instance started').toBeTruthy();
  return app;
}

describe('browser flow', () => {
  const sim = new Sim('nfp-flow-');
  let svgText: string;
  let opponent: GameClient;
  let ownerKeyHex: string;

  beforeAll(async () => {
    sim.init({ owner: 1_000_000_000, opp: 1_000_000_000 }, 'flow-seed');
    await sim.serve();
    sim.cli([
      'mint', '--key', 'owner', '--out', join(sim.workdir, 'token1.svg'),
      '--endpoints', sim.url,
    ]);
    sim.cli([
      'mint', '--key', 'owner', '--to', 'opp',
      '--out', join(sim.workdir, 'token2.svg'), '--endpoints', sim.url,
    ]);
    // bundle the compiled client and publish it as the bootloadable app
    sim.cli([
      'bundle', '--entry', 'app', '--src', join(__dirname, '..', 'dist', 'modules'),
      '--out', join(sim.workdir, 'app.js.gz'),
    ]);
    sim.cli([
      'publish', '--key', 'owner', '--package-id', 'app.js',
      '--file', join(sim.workdir, 'app.js.gz'), '--tags', 'latest',
      '--encoding', 'gzip',
    ]);
    svgText = readFileSync(join(sim.workdir, 'token1.svg'), 'utf-8');
    ownerKeyHex = sim.keyHex('owner');

    const endpoint = await connectEndpoint([sim.url]);
    const oppWallet = new DirectWallet(
      SigningKey.fromHex(sim.keyHex('opp')),
      new ChainClient(endpoint, sim.contract),
    );
    opponent = new GameClient(oppWallet.chain, oppWallet, '2');
  }, 120000);

  afterAll(() => sim.stop());

  it('boots, approves a hot wallet, plays a full match without owner prompts, and survives reopen', async () => {
    // --- bootload from the real SVG ---------------------------------------
    const storage = new Map<string, string>();
    const sandboxA = bootFromSvg(svgText, storage);
    const appA = await connectSandbox(sandboxA);
    const nfpA = (sandboxA.window as any).NFP;
    expect(nfpA.boot.fromCache).toBe(false);
    expect(nfpA.boot.serial).toBe(1);

    // --- hot wallet approval: the only owner prompts in the whole flow ----
    const owner = new SoftwareSigner(SigningKey.fromHex(ownerKeyHex));
    await appA.ensureHotWallet(owner);
    const promptsAfterSetup = owner.prompts;
    expect(promptsAfterSetup).toBe(2); // fee grant + delegation
    const hotAddress: string = appA.wallet.address;
    const chain: ChainClient = appA.chain;
    expect((await chain.account(hotAddress)).balance).toBe(0);

    // a compromised hot wallet cannot move the token or touch funds
    await expect(
      appA.wallet.execute({ transfer: { token_id: '1', to: hotAddress } }),
    ).rejects.toThrow(/unauthorized/);

    // --- match lifecycle ----------------------------------------------------
    const matchId: string = await appA.newMatch(0);
    await opponent.joinMatch(matchId, 0);
    await appA.submitSetup(OWNER_LAYOUT);
    await opponent.submitSetup(matchId, OWNER_LAYOUT);

    let view = await appA.refresh();
    expect(view!.phase).toBe('playing');
    let myTurn = view!.turn === 'you';
    let ownerShots = 0;
    let oppShots = 0;

    // a few opening moves, then make sure reopen recovers mid-match
    for (let move = 0; move < 6; move++) {
      if (myTurn) {
        await appA.attack(...TARGETS[ownerShots++]);
      } else {
        await opponent.attack(matchId, ...WATER[oppShots++]);
        const sawIt = await appA.pollOnce(); // opponent's move arrives by polling
        expect(sawIt).toBe(true);
      }
      myTurn = !myTurn;
    }
    const midViewA = sortedJson(appA.view);
    const midBoardsA = appA.renderedBoards();

    // --- close/reopen: same profile, cached module, identical view --------
    const sandboxB = bootFromSvg(svgText, storage);
    const appB = await connectSandbox(sandboxB);
    expect((sandboxB.window as any).NFP.boot.fromCache).toBe(true);
    expect(appB.wallet.address).toBe(hotAddress); // same persisted key
    expect(appB.restoreSession()).toBe(true);
    const viewB = await appB.refresh();
    expect(sortedJson(viewB)).toBe(midViewA);
    expect(appB.renderedBoards()).toEqual(midBoardsA);

    // --- fresh profile: recovery from chain state alone --------------------
    const sandboxC = bootFromSvg(svgText, new Map());
    const appC = await connectSandbox(sandboxC);
    const ownerAgain = new SoftwareSigner(SigningKey.fromHex(ownerKeyHex));
    await appC.ensureHotWallet(ownerAgain); // new delegate, new approvals
    expect(appC.restoreSession()).toBe(false);
    const recovered = await appC.recoverMatch();
    expect(recovered).toBe(matchId);
    expect(sortedJson(appC.view)).toBe(midViewA);

    // --- finish the game through the hot wallet ----------------------------
    let result: any = null;
    for (let guard = 0; guard < 60; guard++) {
      if (myTurn) {
        result = await appA.attack(...TARGETS[ownerShots++]);
        if (result.game_over) break;
      } else {
        await opponent.attack(matchId, ...WATER[oppShots++]);
        await appA.pollOnce();
      }
      myTurn = !myTurn;
    }
    expect(result?.game_over).toBe(true);
    const finalView = await appA.refresh();
    expect(finalView!.phase).toBe('finished');
    expect(finalView!.winner).toBe('you');
    expect(appA.ui.state.screen).toBe('finished');

    // zero owner prompts after setup, and the hot wallet stayed empty
    expect(owner.prompts).toBe(promptsAfterSetup);
    expect((await chain.account(hotAddress)).balance).toBe(0);

    // --- background update notice ------------------------------------------
    sim.cli([
      'publish', '--key', 'owner', '--package-id', 'app.js',
      '--file', join(sim.workdir, 'app.js.gz'), '--tags', 'latest',
      '--encoding', 'gzip',
    ]);
    const sandboxE = bootFromSvg(svgText, storage);
    const nfpE = (sandboxE.window as any).NFP;
    await connectSandbox(sandboxE); // runs cached serial 1 immediately
    expect(nfpE.boot.serial).toBe(1);
    await sandboxE.waitFor(() => nfpE.boot.updateAvailable === 2, 'background update notice');

    // --- no secret ever leaves the client in plaintext ----------------------
    const secrets = [
      ownerKeyHex,
      JSON.parse(storage.get('nfp:hot-wallet')!).priv,
      sortedJson(OWNER_LAYOUT),
      '"placements"',
      '"vehicle_type"',
    ];
    const bodies = [
      ...sandboxA.requests, ...sandboxB.requests, ...sandboxC.requests,
      ...sandboxE.requests,
    ].map((r) => r.body + '|' + r.url);
    expect(bodies.length).toBeGreaterThan(10);
    for (const body of bodies) {
      for (const secret of secrets) {
        for (let i = 0; i + 8 <= secret.length; i++) {
          expect(body.includes(secret.substring(i, i + 8)), `leak of ${secret.substring(i, i + 8)}`).toBe(false);
        }
      }
    }
  }, 240000);

  it('fails over to the second endpoint when the first is dead', async () => {
    const minted = sim.cli([
      'mint', '--key', 'owner', '--out', join(sim.workdir, 'token3.svg'),
      '--endpoints', `http://127.0.0.1:9,${sim.url}`,
    ]);
    expect(minted.token_id).toBeTruthy();
    const failoverSvg = readFileSync(join(sim.workdir, 'token3.svg'), 'utf-8');
    const sandbox = bootFromSvg(failoverSvg, new Map());
    const nfp = (sandbox.window as any).NFP;
    sandbox.document.getElementById('nfp-connect')!.click();
    await sandbox.waitFor(() => nfp.boot.phase === 'running', 'failover bootload', 30000);
    expect(nfp.boot.endpoint.url).toBe(sim.url);
  }, 120000);

  it('keeps the preview usable when every endpoint is dead', async () => {
    const minted = sim.cli([
      'mint', '--key', 'owner', '--out', join(sim.workdir, 'token4.svg'),
      '--endpoints', 'http://127.0.0.1:9,http://127.0.0.1:10',
    ]);
    expect(minted.token_id).toBeTruthy();
    const deadSvg = readFileSync(join(sim.workdir, 'token4.svg'), 'utf-8');
    const sandbox = bootFromSvg(deadSvg, new Map());
    const nfp = (sandbox.window as any).NFP;
    sandbox.document.getElementById('nfp-connect')!.click();
    await sandbox.waitFor(() => nfp.boot.phase === 'error', 'boot error state', 30000);
    expect(nfp.boot.error).toMatch(/unreachable/);
    // the artwork stays; only a status banner appears
    const status = sandbox.document.getElementById('nfp-status');
    expect(status!.textContent).toMatch(/preview/);
  }, 60000);
});
