/** Application entry: what the bootloader fetches from the package
 * manager and injects. Wires chain transport, hot wallet, game client,
 * and views together, and exposes a programmatic API on window.NFP_APP
 * (tests and power users drive the same paths the buttons do).
 */

import { ChainClient, connectEndpoint, Endpoint } from './chain';
import { GameClient, MatchView, POLL_INTERVAL_MS } from './game';
import { SigningKey } from './secp256k1';
import { Placement, validatePlacements } from './validate';
import { boardLines, Ui } from './views';
import { HotWallet, OwnerSigner, SoftwareSigner } from './wallet';

interface BootInfo {
  boot: {
    meta: { endpoints: string[]; chainId: string; contract: string; tokenId: string };
    endpoint: { url: string; chainId: string; consensusPub: Uint8Array } | null;
  };
}

export class App {
  chain!: ChainClient;
  wallet!: HotWallet;
  game!: GameClient;
  ui: Ui;
  matchId: string | null = null;
  view: MatchView | null = null;
  private pollTimer: ReturnType<typeof setInterval> | null = null;
  private executing = false;

  constructor(readonly meta: BootInfo['boot']['meta'], endpoint: Endpoint | null) {
    this.ui = new Ui();
    if (endpoint) {
      this.attach(endpoint);
    }
  }

  private attach(endpoint: Endpoint): void {
    this.chain = new ChainClient(endpoint, this.meta.contract);
    this.wallet = HotWallet.load(this.chain);
    this.game = new GameClient(this.chain, this.wallet, this.meta.tokenId);
  }

  async connect(): Promise<void> {
    if (!this.chain) {
      this.attach(await connectEndpoint(this.meta.endpoints));
    }
    this.renderConnect();
  }

  /** Fee grant + delegation; the only step that prompts the owner. */
  async ensureHotWallet(owner: OwnerSigner): Promise<void> {
    await this.wallet.requestApprovals(owner);
    await this.showLobby();
  }

  restoreSession(): boolean {
    const active = localStorage.getItem('nfp:active-match:' + this.meta.tokenId);
    if (active) {
      this.matchId = active;
      return true;
    }
    return false;
  }

  /** Recover the active match with nothing but chain state: the token's
   * private notification channel names every match it was drawn into. */
  async recoverMatch(): Promise<string | null> {
    const result = await this.wallet.query(
      { fetch_notifications: { token_id: this.meta.tokenId, since_seq: 0 } },
      ['notifications'],
    );
    for (let i = result.notifications.length - 1; i >= 0; i--) {
      const payload = JSON.parse(
        new TextDecoder().decode(
          Uint8Array.from(atob(result.notifications[i].payload), (c) => c.charCodeAt(0)),
        ),
      );
      if (payload.match_id) {
        this.rememberMatch(payload.match_id);
        await this.refresh();
        return payload.match_id;
      }
    }
    return null;
  }

  private rememberMatch(matchId: string): void {
    this.matchId = matchId;
    localStorage.setItem('nfp:active-match:' + this.meta.tokenId, matchId);
  }

  // --- flows ---------------------------------------------------------------

  async showLobby(): Promise<void> {
    const matches = await this.game.listOpenMatches();
    const rows = matches.map((m) =>
      this.ui.button(`join ${m.match_id} (wager ${m.wager})`, `join-${m.match_id}`, () => {
        void this.joinMatch(m.match_id, m.wager);
      }),
    );
    rows.push(
      this.ui.button('new match (no wager)', 'new-match', () => {
        void this.newMatch(0);
      }),
    );
    this.ui.render({ screen: 'lobby', banner: `${matches.length} open match(es)` }, rows);
  }

  async newMatch(wager: number): Promise<string> {
    const matchId = await this.game.newMatch(wager);
    this.rememberMatch(matchId);
    await this.refresh();
    return matchId;
  }

  async joinMatch(matchId: string, wager: number): Promise<void> {
    await this.game.joinMatch(matchId, wager);
    this.rememberMatch(matchId);
    await this.refresh();
  }

  validateBoard(placements: Placement[]) {
    return validatePlacements(placements);
  }

  async submitSetup(placements: Placement[]): Promise<void> {
    if (!this.matchId) throw new Error('no active match');
    await this.game.submitSetup(this.matchId, placements);
    await this.refresh();
  }

  async attack(x: number, y: number) {
    if (!this.matchId) throw new Error('no active match');
    if (this.executing) throw new Error('an execution is already in flight');
    this.executing = true;
    try {
      const result = await this.game.attack(this.matchId, x, y);
      await this.refresh();
      return result;
    } finally {
      this.executing = false;
    }
  }

  /** One poll step; the timer calls this, tests call it directly. */
  async pollOnce(): Promise<boolean> {
    if (this.executing) return false; // paused while an execution is pending
    const fresh = await this.game.pollNotifications();
    const relevant = fresh.filter(
      (n) => !this.matchId || n.payload.match_id === this.matchId || !n.payload.match_id,
    );
    if (relevant.length) await this.refresh();
    return relevant.length > 0;
  }

  startPolling(): void {
    if (this.pollTimer === null) {
      this.pollTimer = setInterval(() => void this.pollOnce(), POLL_INTERVAL_MS);
    }
  }

  stopPolling(): void {
    if (this.pollTimer !== null) {
      clearInterval(this.pollTimer);
      this.pollTimer = null;
    }
  }

  async refresh(): Promise<MatchView | null> {
    if (!this.matchId) return null;
    this.view = await this.game.matchState(this.matchId);
    this.renderMatch();
    return this.view;
  }

  /** Deterministic text rendering of my current knowledge of the match. */
  renderedBoards(): { home: string[]; away: string[] } {
    if (!this.view) throw new Error('no view');
    const cells = this.view.my_board
      ? (validatePlacements(this.view.my_board.placements).cells ?? null)
      : null;
    return boardLines(
      cells,
      this.view.my_board?.hits_against_me ?? [],
      this.view.opponent_board.shots,
    );
  }

  // --- rendering -----------------------------------------------------------

  private renderConnect(): void {
    const status = this.wallet.status();
    const body = [
      this.ui.textRow(`hot wallet: ${status.address}`, 'nfp-hot-address'),
      this.ui.textRow(
        `fee grant: ${status.feeGranted ? 'yes' : 'no'} / delegated: ${status.delegated ? 'yes' : 'no'}`,
        'nfp-hot-status',
      ),
    ];
    this.ui.render(
      { screen: 'connect', banner: 'approve the hot wallet to play without prompts' },
      body,
    );
  }

  private renderMatch(): void {
    const view = this.view!;
    if (view.phase === 'setup') {
      this.ui.render(
        {
          screen: 'setup',
          banner: view.submitted
            ? 'waiting for the opponent to place their fleet'
            : 'place your fleet',
          detail: `match ${view.match_id}, wager ${view.wager}`,
        },
        [],
      );
      return;
    }
    if (view.phase === 'playing' || view.phase === 'finished') {
      const boards = this.renderedBoards();
      const rows = [
        this.ui.textRow('home: ' + boards.home.join('/'), 'nfp-home-board'),
        this.ui.textRow('away: ' + boards.away.join('/'), 'nfp-away-board'),
      ];
      this.ui.render(
        {
          screen: view.phase === 'finished' ? 'finished' : 'play',
          banner:
            view.phase === 'finished'
              ? view.winner === 'you'
                ? 'you win'
                : 'you lose'
              : view.turn === 'you'
                ? 'your turn'
                : "opponent's turn",
          detail: `match ${view.match_id}, wager ${view.wager}`,
        },
        rows,
      );
      return;
    }
    this.ui.render(
      { screen: 'lobby', banner: `match ${view.match_id} is ${view.phase}` },
      [],
    );
  }
}

export { SigningKey, SoftwareSigner, validatePlacements };

declare global {
  interface Window {
    NFP?: BootInfo;
    NFP_APP?: unknown;
  }
}

export function start(boot: BootInfo['boot']): App {
  const app = new App(boot.meta as BootInfo['boot']['meta'], boot.endpoint as Endpoint | null);
  return app;
}

// when injected by the bootloader, window.NFP carries the boot context
if (typeof window !== 'undefined' && window.NFP) {
  const app = start((window.NFP as BootInfo).boot);
  void app.connect();
  (window as unknown as Record<string, unknown>).NFP_APP_INSTANCE = app;
}
