/** Hot hot wallet: a browser-generated key acting as a fee-granted,
 * method-limited delegate of the token owner, so gameplay never prompts.
 *
 * The private key lives in localStorage and its on-chain balance stays
 * zero for its whole life; fees ride the owner's grant.
 */

import { bytesToHex, fromUtf8, sortedJson, utf8 } from './bytes';
import { ChainClient, ContractError, TxResult } from './chain';
import { openResponse, sealEnvelope } from './envelope';
import { SigningKey } from './secp256k1';

export const GAME_METHODS = ['attack', 'join_match', 'new_match', 'submit_setup'];

/** Anything that can sign with the owner's account. Real deployments
 * plug a browser-extension wallet in here; tests use SoftwareSigner. */
export interface OwnerSigner {
  address(): string;
  signDoc(doc: Uint8Array): Promise<{ pubkey: string; signature: string }>;
}

export class SoftwareSigner implements OwnerSigner {
  prompts = 0;

  constructor(private key: SigningKey) {}

  address(): string {
    return this.key.address();
  }

  async signDoc(doc: Uint8Array): Promise<{ pubkey: string; signature: string }> {
    this.prompts += 1; // every signature models one wallet prompt
    return {
      pubkey: bytesToHex(this.key.compressedPublicKey()),
      signature: bytesToHex(this.key.sign(doc)),
    };
  }
}

interface TxBody {
  chain_id: string;
  sequence: number;
  fee: number;
  fee_granter: string | null;
  msgs: unknown[];
}

export class TxSigner {
  constructor(readonly key: SigningKey) {}

  get address(): string {
    return this.key.address();
  }

  signTx(body: TxBody): Record<string, unknown> {
    return {
      body,
      pubkey: bytesToHex(this.key.compressedPublicKey()),
      signature: bytesToHex(this.key.sign(utf8(sortedJson(body)))),
    };
  }

  signPermit(chainId: string, contract: string, name: string, permissions: string[]) {
    const params = {
      permit_name: name,
      allowed_contracts: [contract],
      permissions: [...permissions].sort(),
      chain_id: chainId,
    };
    return {
      params,
      pubkey: bytesToHex(this.key.compressedPublicKey()),
      signature: bytesToHex(this.key.sign(utf8(sortedJson(params)))),
    };
  }
}

const STORAGE_KEY = 'nfp:hot-wallet';

export interface HotWalletStatus {
  address: string;
  feeGranted: boolean;
  delegated: boolean;
}

/** What the game client needs from a wallet: silent executes and
 * permit-signed queries. */
export interface Executor {
  readonly address: string;
  readonly chain: ChainClient;
  execute(msg: Record<string, unknown>, funds?: number, fee?: number): Promise<Record<string, any>>;
  query(msg: Record<string, unknown>, permissions: string[]): Promise<any>;
}

export class HotWallet {
  readonly signer: TxSigner;
  feeGranted = false;
  delegated = false;

  private constructor(key: SigningKey, readonly chain: ChainClient) {
    this.signer = new TxSigner(key);
  }

  /** Load the persisted key or generate a fresh one. */
  static load(chain: ChainClient): HotWallet {
    const stored = localStorage.getItem(STORAGE_KEY);
    if (stored) {
      const parsed = JSON.parse(stored);
      const wallet = new HotWallet(SigningKey.fromHex(parsed.priv), chain);
      wallet.feeGranted = !!parsed.feeGranted;
      wallet.delegated = !!parsed.delegated;
      wallet.ownerAddress = parsed.owner ?? null;
      return wallet;
    }
    const wallet = new HotWallet(SigningKey.random(), chain);
    wallet.persist();
    return wallet;
  }

  persist(): void {
    localStorage.setItem(
      STORAGE_KEY,
      JSON.stringify({
        priv: bytesToHex(this.signer.key.privBytes),
        feeGranted: this.feeGranted,
        delegated: this.delegated,
        owner: this.ownerAddress,
      }),
    );
  }

  get address(): string {
    return this.signer.address;
  }

  status(): HotWalletStatus {
    return { address: this.address, feeGranted: this.feeGranted, delegated: this.delegated };
  }

  /** Owner approves a fee grant and a method-limited delegation.
   *
   * Two owner prompts, once per wallet; afterwards gameplay executions
   * are signed silently with fee_granter = owner.
   */
  async requestApprovals(
    owner: OwnerSigner,
    spendLimit = 5_000_000,
    expiration = 1_000_000_000,
  ): Promise<void> {
    if (this.feeGranted && this.delegated) return;
    const ownerAccount = await this.chain.account(owner.address());

    const grantBody: TxBody = {
      chain_id: this.chain.endpoint.chainId,
      sequence: ownerAccount.sequence,
      fee: 10_000,
      fee_granter: null,
      msgs: [
        { grant_fee: { grantee: this.address, spend_limit: spendLimit, expiration } },
      ],
    };
    const grantSig = await owner.signDoc(utf8(sortedJson(grantBody)));
    await this.chain.broadcastTx({ body: grantBody, ...grantSig });
    this.feeGranted = true;

    const session = await sealEnvelope(
      this.chain.endpoint.consensusPub,
      utf8(
        sortedJson({
          approve_delegate: {
            scope: { owner: {} },
            delegate: this.address,
            allowed_methods: GAME_METHODS,
          },
        }),
      ),
    );
    const delegateBody: TxBody = {
      chain_id: this.chain.endpoint.chainId,
      sequence: ownerAccount.sequence + 1,
      fee: 10_000,
      fee_granter: null,
      msgs: [
        { exec: { contract: this.chain.contract, envelope: session.wire, funds: 0 } },
      ],
    };
    const delegateSig = await owner.signDoc(utf8(sortedJson(delegateBody)));
    const result = await this.chain.broadcastTx({ body: delegateBody, ...delegateSig });
    await this.openExec(result, session);
    this.delegated = true;
    this.ownerAddress = owner.address();
    this.persist();
  }

  ownerAddress: string | null = null;

  /** Silent execution: hot wallet signs, owner's grant pays the fee. */
  async execute(
    msg: Record<string, unknown>,
    funds = 0,
    fee = 20_000,
  ): Promise<Record<string, any>> {
    const session = await sealEnvelope(
      this.chain.endpoint.consensusPub,
      utf8(sortedJson(msg)),
    );
    const account = await this.chain.account(this.address);
    const body: TxBody = {
      chain_id: this.chain.endpoint.chainId,
      sequence: account.sequence,
      fee,
      fee_granter: this.ownerAddress,
      msgs: [
        { exec: { contract: this.chain.contract, envelope: session.wire, funds } },
      ],
    };
    const result = await this.chain.broadcastTx(this.signer.signTx(body));
    return this.openExec(result, session);
  }

  private async openExec(result: TxResult, session: { key: Uint8Array; nonce: Uint8Array; wire: string }) {
    const response = result.responses[0];
    if (response?.plain) {
      if ((response.plain as any).error) throw new ContractError((response.plain as any).error);
      return (response.plain as any).ok ?? {};
    }
    if (!response?.cipher) throw new ContractError(result.error ?? 'transaction failed');
    const payload = JSON.parse(
      fromUtf8(await openResponse(session as any, response.cipher)),
    );
    if (payload.error !== undefined) throw new ContractError(payload.error);
    return payload.ok;
  }

  /** Permit-signed private query as the delegate. */
  async query(msg: Record<string, unknown>, permissions: string[]): Promise<any> {
    const auth = this.signer.signPermit(
      this.chain.endpoint.chainId,
      this.chain.contract,
      'hot-wallet-session',
      permissions,
    );
    const [method, body] = Object.entries(msg)[0] as [string, Record<string, unknown>];
    return this.chain.query({ [method]: { ...body, auth } });
  }
}

/** A wallet holding its own key and paying its own fees. Used for
 * accounts that exist on chain (tests, tooling); the browser flow
 * proper uses HotWallet. */
export class DirectWallet implements Executor {
  readonly signer: TxSigner;

  constructor(key: SigningKey, readonly chain: ChainClient) {
    this.signer = new TxSigner(key);
  }

  get address(): string {
    return this.signer.address;
  }

  async execute(
    msg: Record<string, unknown>,
    funds = 0,
    fee = 20_000,
  ): Promise<Record<string, any>> {
    const session = await sealEnvelope(
      this.chain.endpoint.consensusPub,
      utf8(sortedJson(msg)),
    );
    const account = await this.chain.account(this.address);
    const body: TxBody = {
      chain_id: this.chain.endpoint.chainId,
      sequence: account.sequence,
      fee,
      fee_granter: null,
      msgs: [
        { exec: { contract: this.chain.contract, envelope: session.wire, funds } },
      ],
    };
    const result = await this.chain.broadcastTx(this.signer.signTx(body));
    const response = result.responses[0];
    if (response?.plain) {
      if ((response.plain as any).error) throw new ContractError((response.plain as any).error);
      return (response.plain as any).ok ?? {};
    }
    if (!response?.cipher) throw new ContractError(result.error ?? 'transaction failed');
    const payload = JSON.parse(
      fromUtf8(await openResponse(session, response.cipher)),
    );
    if (payload.error !== undefined) throw new ContractError(payload.error);
    return payload.ok;
  }

  async query(msg: Record<string, unknown>, permissions: string[]): Promise<any> {
    const auth = this.signer.signPermit(
      this.chain.endpoint.chainId,
      this.chain.contract,
      'direct-session',
      permissions,
    );
    const [method, body] = Object.entries(msg)[0] as [string, Record<string, unknown>];
    return this.chain.query({ [method]: { ...body, auth } });
  }
}
