/** Chain transport: endpoint failover, encrypted queries, broadcasts. */

import { fromUtf8, hexToBytes, sortedJson, utf8 } from './bytes';
import { openResponse, sealEnvelope } from './envelope';

export interface Endpoint {
  url: string;
  chainId: string;
  consensusPub: Uint8Array;
}

export interface TxResult {
  code: number;
  height: number;
  tx_hash: string;
  gas_used: number;
  responses: Array<{ cipher?: string; plain?: Record<string, unknown> }>;
  error: string | null;
}

export class ContractError extends Error {}
export class TransportError extends Error {}

async function getJson(url: string): Promise<Record<string, any>> {
  let resp: Response;
  try {
    resp = await fetch(url, { method: 'GET' });
  } catch (err) {
    throw new TransportError(`GET ${url}: ${String(err)}`);
  }
  if (!resp.ok) throw new TransportError(`GET ${url}: HTTP ${resp.status}`);
  return resp.json();
}

async function postJson(url: string, body: unknown): Promise<Record<string, any>> {
  let resp: Response;
  try {
    resp = await fetch(url, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
    });
  } catch (err) {
    throw new TransportError(`POST ${url}: ${String(err)}`);
  }
  const data = await resp.json();
  if (!resp.ok) throw new ContractError(data.error ?? `HTTP ${resp.status}`);
  return data;
}

export async function connectEndpoint(urls: string[]): Promise<Endpoint> {
  const failures: string[] = [];
  for (const raw of urls) {
    const url = raw.replace(/\/+$/, '');
    try {
      const info = await getJson(url + '/consensus_pubkey');
      return {
        url,
        chainId: info.chain_id,
        consensusPub: hexToBytes(info.consensus_pubkey),
      };
    } catch (err) {
      failures.push(`${url}: ${(err as Error).message}`);
    }
  }
  throw new TransportError('all endpoints unreachable: ' + failures.join('; '));
}

export class ChainClient {
  constructor(readonly endpoint: Endpoint, readonly contract: string) {}

  async query(msg: Record<string, unknown>): Promise<any> {
    const session = await sealEnvelope(this.endpoint.consensusPub, utf8(sortedJson(msg)));
    const data = await postJson(this.endpoint.url + '/query', {
      contract: this.contract,
      envelope: session.wire,
    });
    const payload = JSON.parse(fromUtf8(await openResponse(session, data.envelope)));
    if (payload.error !== undefined) throw new ContractError(payload.error);
    return payload.ok;
  }

  async account(address: string): Promise<{ balance: number; sequence: number }> {
    const data = await getJson(`${this.endpoint.url}/account/${address}`);
    return { balance: data.balance, sequence: data.sequence };
  }

  async height(): Promise<number> {
    return (await getJson(this.endpoint.url + '/block')).height;
  }

  async broadcastTx(tx: Record<string, unknown>): Promise<TxResult> {
    return (await postJson(this.endpoint.url + '/broadcast', { tx })) as TxResult;
  }
}
