/** Game client: lobby, setup, turns, notification polling, recovery. */

import { b64ToBytes, fromUtf8 } from './bytes';
import { ChainClient } from './chain';
import { Executor } from './wallet';
import { Placement, validatePlacements } from './validate';

export interface OpenMatch {
  match_id: string;
  wager: number;
  created_height: number;
}

export interface MatchView {
  match_id: string;
  phase: 'open' | 'setup' | 'playing' | 'finished';
  wager: number;
  created_height: number;
  turn: 'you' | 'opponent' | null;
  winner: 'you' | 'opponent' | null;
  submitted: boolean;
  opponent_submitted: boolean;
  my_board: { placements: Placement[]; hits_against_me: string[] } | null;
  opponent_board: {
    shots: Record<string, 'hit' | 'miss'>;
    destroyed: Array<{ vehicle_type: string; cells: string[] }>;
  };
}

export interface Notification {
  seq: number;
  height: number;
  payload: Record<string, any>;
}

export const POLL_INTERVAL_MS = 2000;

export class GameClient {
  lastSeq = 0;

  constructor(
    readonly chain: ChainClient,
    readonly wallet: Executor,
    readonly tokenId: string,
  ) {}

  async listOpenMatches(): Promise<OpenMatch[]> {
    return (await this.chain.query({ list_open_matches: {} })).matches;
  }

  async newMatch(wager: number): Promise<string> {
    const result = await this.wallet.execute(
      { new_match: { token_id: this.tokenId, wager } },
      wager,
    );
    return result.match_id;
  }

  async joinMatch(matchId: string, wager: number): Promise<void> {
    await this.wallet.execute(
      { join_match: { match_id: matchId, token_id: this.tokenId } },
      wager,
    );
  }

  async submitSetup(matchId: string, placements: Placement[]): Promise<void> {
    // pre-validate client-side with the same rules the contract applies
    const verdict = validatePlacements(placements);
    if (!verdict.ok) throw new Error(`invalid board: ${verdict.error}`);
    await this.wallet.execute({
      submit_setup: { match_id: matchId, placements },
    });
  }

  async attack(matchId: string, x: number, y: number) {
    return this.wallet.execute({ attack: { match_id: matchId, cell: [x, y] } });
  }

  async matchState(matchId: string): Promise<MatchView> {
    return this.wallet.query(
      { match_state: { match_id: matchId, token_id: this.tokenId } },
      ['game_state'],
    );
  }

  /** Pull new notifications past the last seen sequence number. */
  async pollNotifications(): Promise<Notification[]> {
    const result = await this.wallet.query(
      { fetch_notifications: { token_id: this.tokenId, since_seq: this.lastSeq } },
      ['notifications'],
    );
    const fresh: Notification[] = result.notifications.map(
      (n: { seq: number; height: number; payload: string }) => ({
        seq: n.seq,
        height: n.height,
        payload: JSON.parse(fromUtf8(b64ToBytes(n.payload))),
      }),
    );
    if (fresh.length) this.lastSeq = fresh[fresh.length - 1].seq;
    return fresh;
  }
}
