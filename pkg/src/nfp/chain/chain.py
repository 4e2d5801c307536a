"""Single-node simulated confidential chain.

One block producer, instant finality, serialized executions. Contract
state lives in a sealed store and every contract message travels inside
an encrypted envelope addressed to the chain's consensus key, so the
simulation preserves the confidentiality shape of the real thing:
plaintext exists only inside the execution context.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass

from ..contract.base import ContractError, Context, canonical_json
from ..crypto import (
    Address,
    Envelope,
    EnvelopeError,
    PublicKey,
    X25519Secret,
    ripemd160,
    seal_response,
)
from .errors import OutOfGas, QueryFailed, TxRejected
from .gas import GasMeter, GasParams
from .store import ContractStorage, Journal, SealedStore, _MISSING
from .tx import TxResult, tx_hash as compute_tx_hash


@dataclass
class Account:
    balance: int = 0
    sequence: int = 0


@dataclass
class FeeGrant:
    granter: str
    grantee: str
    remaining: int
    expiration: int


@dataclass
class BlockHeader:
    height: int
    hash: str
    prev_hash: str
    tx_hashes: list[str]

    def to_dict(self) -> dict:
        return {
            "height": self.height,
            "hash": self.hash,
            "prev_hash": self.prev_hash,
            "tx_hashes": self.tx_hashes,
        }


class _MsgFailed(Exception):
    """Internal: contract-level failure with a ready client response."""

    def __init__(self, response: dict, reason: str):
        super().__init__(reason)
        self.response = response
        self.reason = reason


class Chain:
    def __init__(
        self,
        params: GasParams | None = None,
        genesis_accounts: list[tuple[str, int]] | None = None,
        chain_id: str = "nfp-sim-1",
        seed: bytes | str | None = None,
        auto_produce: bool = True,
    ):
        self.params = params or GasParams()
        self.chain_id = chain_id
        self.auto_produce = auto_produce
        if seed is None:
            seed = os.urandom(32)
        elif isinstance(seed, str):
            seed = seed.encode("utf-8")
        self._master = hashlib.sha256(b"nfp-chain\x00" + seed).digest()
        self._consensus = X25519Secret.from_seed(self._master + b"\x00consensus")

        self.accounts: dict[str, Account] = {}
        for addr, balance in genesis_accounts or []:
            addr = str(addr)
            if addr in self.accounts:
                raise TxRejected(f"duplicate genesis address {addr}")
            Address.from_string(addr)
            self.accounts[addr] = Account(balance=balance)
        self.genesis_supply = sum(a.balance for a in self.accounts.values())
        self.burned = 0

        self.fee_grants: dict[tuple[str, str], FeeGrant] = {}
        self.store = SealedStore()
        self.contracts: dict[str, object] = {}
        self.contract_labels: dict[str, str] = {}
        self._instance_count = 0
        self._journal: Journal | None = None

        genesis_hash = hashlib.sha256(
            b"genesis\x00" + chain_id.encode() + self._master
        ).hexdigest()
        self.blocks: list[BlockHeader] = [BlockHeader(0, genesis_hash, "", [])]
        self._pending: list[str] = []

    # --- chain surface -----------------------------------------------------

    @property
    def height(self) -> int:
        return self.blocks[-1].height

    @property
    def consensus_pub(self):
        return self._consensus.public()

    def total_supply(self) -> int:
        return sum(a.balance for a in self.accounts.values())

    def account(self, addr: str) -> Account:
        acct = self.accounts.get(addr)
        if acct is None:
            if self._journal is not None:
                self._journal.record_account(addr, _MISSING)
            acct = Account()
            self.accounts[addr] = acct
        return acct

    def balance(self, addr: str) -> int:
        acct = self.accounts.get(addr)
        return 0 if acct is None else acct.balance

    def produce_block(self) -> BlockHeader:
        prev = self.blocks[-1]
        height = prev.height + 1
        digest = hashlib.sha256(
            bytes.fromhex(prev.hash)
            + height.to_bytes(8, "big")
            + b"".join(bytes.fromhex(h) for h in self._pending)
        ).hexdigest()
        header = BlockHeader(height, digest, prev.hash, list(self._pending))
        self.blocks.append(header)
        self._pending = []
        return header

    def raw_storage_dump(self) -> dict[str, dict[bytes, bytes]]:
        """Test-only ciphertext snapshot of contract storage."""
        return self.store.dump()

    # --- contract registry ---------------------------------------------------

    def instantiate(self, contract, init_msg: dict, sender: str, label: str = "") -> str:
        self._instance_count += 1
        payload = ripemd160(
            hashlib.sha256(
                b"contract\x00"
                + self.chain_id.encode()
                + self._instance_count.to_bytes(8, "big")
            ).digest()
        )
        addr = str(Address("secret", payload))
        self.contracts[addr] = contract
        self.contract_labels[addr] = label
        self.account(addr)
        ctx = self._make_context(
            contract_addr=addr,
            sender=sender,
            funds=0,
            meter=GasMeter(self.params.block_gas_limit),
            read_only=False,
            current_tx_hash=b"",
        )
        contract.instantiate(ctx, init_msg)
        return addr

    def _state_key(self, contract_addr: str) -> bytes:
        return hashlib.sha256(
            self._master + b"\x00state\x00" + contract_addr.encode()
        ).digest()

    def contract_seed(self, contract_addr: str) -> bytes:
        return hashlib.sha256(
            self._master + b"\x00seed\x00" + contract_addr.encode()
        ).digest()

    def _make_context(
        self,
        *,
        contract_addr: str,
        sender: str | None,
        funds: int,
        meter: GasMeter,
        read_only: bool,
        current_tx_hash: bytes,
    ) -> Context:
        storage = ContractStorage(
            self.store,
            contract_addr,
            self._state_key(contract_addr),
            meter,
            self.params,
            read_only,
            journal=self._journal,
        )
        seed = self.contract_seed(contract_addr)
        last_hash = bytes.fromhex(self.blocks[-1].hash)

        def entropy(extra: bytes) -> bytes:
            return hashlib.sha256(last_hash + current_tx_hash + seed + extra).digest()

        def send(to: str, amount: int) -> None:
            self._move_funds(contract_addr, to, amount)

        def balance() -> int:
            return self.balance(contract_addr)

        return Context(
            storage=storage,
            contract_address=contract_addr,
            sender=sender,
            funds=funds,
            height=self.height if read_only else self.height + 1,
            chain_id=self.chain_id,
            read_only=read_only,
            entropy_fn=entropy,
            send_fn=send,
            balance_fn=balance,
            contract_seed=seed,
            block_hash=last_hash,
        )

    def _touch_account(self, addr: str) -> Account:
        acct = self.account(addr)
        if self._journal is not None:
            self._journal.record_account(addr, Account(acct.balance, acct.sequence))
        return acct

    def _move_funds(self, src: str, dst: str, amount: int) -> None:
        if not isinstance(amount, int) or amount < 0:
            raise ContractError("invalid transfer amount")
        source = self._touch_account(src)
        if source.balance < amount:
            raise ContractError("insufficient funds")
        dest = self._touch_account(dst)
        source.balance -= amount
        dest.balance += amount

    # --- execution ---------------------------------------------------------

    def broadcast_execute(self, tx: dict) -> TxResult:
        body, signer = self._admit(tx)
        txh = compute_tx_hash(tx)
        fee = body["fee"]
        granter = body.get("fee_granter")

        fee_journal = Journal()
        fee_journal.burned = self.burned
        self._journal = fee_journal
        try:
            self._charge_fee(signer, fee, granter)
            acct = self._touch_account(signer)
            acct.sequence += 1
        finally:
            self._journal = None

        msg_journal = Journal()
        msg_journal.burned = self.burned
        self._journal = msg_journal
        meter = GasMeter(self.params.block_gas_limit)
        try:
            meter.charge(self.params.base_tx_cost)
            responses = []
            for msg in body["msgs"]:
                responses.append(
                    self._execute_msg(msg, signer, meter, bytes.fromhex(txh))
                )
        except OutOfGas as exc:
            msg_journal.rollback(self)
            fee_journal.rollback(self)
            raise TxRejected(
                f"tx exceeds block gas limit ({exc.used} > {exc.limit})"
            ) from None
        except _MsgFailed as failed:
            msg_journal.rollback(self)
            return self._finish_tx(
                txh,
                TxResult(
                    code=1,
                    height=0,
                    tx_hash=txh,
                    gas_used=meter.used,
                    responses=[failed.response],
                    error="contract execution failed",
                ),
            )
        except EnvelopeError:
            msg_journal.rollback(self)
            return self._finish_tx(
                txh,
                TxResult(
                    code=2,
                    height=0,
                    tx_hash=txh,
                    gas_used=meter.used,
                    responses=[],
                    error="envelope decryption failed",
                ),
            )
        finally:
            self._journal = None

        return self._finish_tx(
            txh,
            TxResult(
                code=0, height=0, tx_hash=txh, gas_used=meter.used,
                responses=responses,
            ),
        )

    def _finish_tx(self, txh: str, result: TxResult) -> TxResult:
        self._pending.append(txh)
        result.height = self.height + 1
        if self.auto_produce:
            self.produce_block()
        return result

    def _admit(self, tx: dict) -> tuple[dict, str]:
        try:
            body = tx["body"]
            pubkey = PublicKey(bytes.fromhex(tx["pubkey"]))
            signature = bytes.fromhex(tx["signature"])
            msgs = body["msgs"]
            fee = body["fee"]
            sequence = body["sequence"]
        except Exception:
            raise TxRejected("malformed transaction") from None
        if body.get("chain_id") != self.chain_id:
            raise TxRejected("wrong chain id")
        if not isinstance(fee, int) or fee < 0:
            raise TxRejected("invalid fee")
        if not isinstance(msgs, list) or not msgs:
            raise TxRejected("transaction has no messages")
        if not pubkey.verify(canonical_json(body), signature):
            raise TxRejected("invalid signature")
        signer = str(pubkey.address())
        expected_seq = self.account(signer).sequence
        if sequence != expected_seq:
            raise TxRejected(
                f"sequence mismatch: tx {sequence}, account {expected_seq}"
            )
        granter = body.get("fee_granter")
        if granter is not None:
            grant = self.fee_grants.get((granter, signer))
            if grant is None:
                raise TxRejected("no fee grant from granter")
            if self.height + 1 > grant.expiration:
                raise TxRejected("fee grant expired")
            if fee > grant.remaining:
                raise TxRejected("fee exceeds remaining grant limit")
            if self.balance(granter) < fee:
                raise TxRejected("granter has insufficient funds for fee")
        elif self.balance(signer) < fee:
            raise TxRejected("insufficient funds for fee")
        return body, signer

    def _charge_fee(self, signer: str, fee: int, granter: str | None) -> None:
        payer = granter if granter is not None else signer
        self._touch_account(payer).balance -= fee
        self.burned += fee
        if granter is not None:
            key = (granter, signer)
            grant = self.fee_grants[key]
            if self._journal is not None:
                self._journal.record_grant(
                    key,
                    FeeGrant(grant.granter, grant.grantee, grant.remaining,
                             grant.expiration),
                )
            grant.remaining -= fee

    def _execute_msg(
        self, msg: dict, signer: str, meter: GasMeter, current_tx_hash: bytes
    ) -> dict:
        if not isinstance(msg, dict) or len(msg) != 1:
            raise _MsgFailed(
                {"plain": {"error": "malformed message"}}, "malformed message"
            )
        kind, payload = next(iter(msg.items()))
        if kind == "bank_send":
            meter.charge(self.params.native_msg_cost)
            try:
                self._move_funds(signer, payload["to"], payload["amount"])
            except (ContractError, KeyError, TypeError) as exc:
                raise _MsgFailed({"plain": {"error": str(exc)}}, str(exc)) from None
            return {"plain": {"ok": {}}}
        if kind == "grant_fee":
            meter.charge(self.params.native_msg_cost)
            try:
                grantee = payload["grantee"]
                limit = int(payload["spend_limit"])
                expiration = int(payload["expiration"])
            except Exception:
                raise _MsgFailed(
                    {"plain": {"error": "malformed fee grant"}}, "malformed"
                ) from None
            key = (signer, grantee)
            if self._journal is not None:
                prev = self.fee_grants.get(key)
                self._journal.record_grant(
                    key,
                    _MISSING if prev is None else FeeGrant(
                        prev.granter, prev.grantee, prev.remaining, prev.expiration
                    ),
                )
            self.fee_grants[key] = FeeGrant(signer, grantee, limit, expiration)
            return {"plain": {"ok": {}}}
        if kind == "exec":
            meter.charge(self.params.msg_exec_cost)
            try:
                contract_addr = payload["contract"]
                env = Envelope.from_hex(payload["envelope"])
                funds = int(payload.get("funds", 0))
            except EnvelopeError:
                raise
            except Exception:
                raise _MsgFailed(
                    {"plain": {"error": "malformed exec message"}}, "malformed"
                ) from None
            contract = self.contracts.get(contract_addr)
            if contract is None:
                raise _MsgFailed(
                    {"plain": {"error": "unknown contract"}}, "unknown contract"
                )
            plaintext, key = self._decrypt_envelope(env)
            try:
                contract_msg = json.loads(plaintext.decode("utf-8"))
                if not isinstance(contract_msg, dict):
                    raise ValueError
            except ValueError:
                raise _MsgFailed(
                    {
                        "cipher": seal_response(
                            key, env, canonical_json({"error": "invalid message"})
                        ).to_hex()
                    },
                    "invalid message",
                ) from None
            ctx = self._make_context(
                contract_addr=contract_addr,
                sender=signer,
                funds=funds,
                meter=meter,
                read_only=False,
                current_tx_hash=current_tx_hash,
            )
            try:
                self._move_funds(signer, contract_addr, funds)
                result = contract.execute(ctx, contract_msg)
            except ContractError as exc:
                raise _MsgFailed(
                    {
                        "cipher": seal_response(
                            key, env, canonical_json({"error": str(exc)})
                        ).to_hex()
                    },
                    str(exc),
                ) from None
            return {
                "cipher": seal_response(key, env, canonical_json({"ok": result})).to_hex()
            }
        raise _MsgFailed(
            {"plain": {"error": f"unknown message kind {kind!r}"}}, "unknown kind"
        )

    def _decrypt_envelope(self, env: Envelope) -> tuple[bytes, bytes]:
        from ..crypto import envelope_decrypt

        return envelope_decrypt(self._consensus, env)

    # --- state serialization ---------------------------------------------------

    def to_state(self) -> dict:
        """Full serializable snapshot (sim-grade: includes key material)."""
        import base64

        return {
            "chain_id": self.chain_id,
            "params": self.params.to_dict(),
            "master": self._master.hex(),
            "auto_produce": self.auto_produce,
            "burned": self.burned,
            "genesis_supply": self.genesis_supply,
            "instance_count": self._instance_count,
            "accounts": {
                a: [v.balance, v.sequence] for a, v in self.accounts.items()
            },
            "fee_grants": [
                [g.granter, g.grantee, g.remaining, g.expiration]
                for g in self.fee_grants.values()
            ],
            "blocks": [b.to_dict() for b in self.blocks],
            "pending": list(self._pending),
            "contracts": [
                [addr, self.contract_labels.get(addr, "")] for addr in self.contracts
            ],
            "store": {
                addr: {k.hex(): base64.b64encode(v).decode() for k, v in kv.items()}
                for addr, kv in self.store.dump().items()
            },
        }

    @classmethod
    def from_state(cls, state: dict, contract_factories: dict[str, object]) -> "Chain":
        import base64

        chain = cls(
            GasParams.from_dict(state["params"]),
            [],
            chain_id=state["chain_id"],
            auto_produce=state["auto_produce"],
        )
        chain._master = bytes.fromhex(state["master"])
        chain._consensus = X25519Secret.from_seed(chain._master + b"\x00consensus")
        chain.burned = state["burned"]
        chain.genesis_supply = state["genesis_supply"]
        chain._instance_count = state["instance_count"]
        chain.accounts = {
            a: Account(balance, sequence)
            for a, (balance, sequence) in state["accounts"].items()
        }
        chain.fee_grants = {
            (granter, grantee): FeeGrant(granter, grantee, remaining, expiration)
            for granter, grantee, remaining, expiration in state["fee_grants"]
        }
        chain.blocks = [BlockHeader(**b) for b in state["blocks"]]
        chain._pending = list(state["pending"])
        for addr, label in state["contracts"]:
            factory = contract_factories.get(label)
            if factory is None:
                raise TxRejected(f"no contract factory for label {label!r}")
            chain.contracts[addr] = factory()
            chain.contract_labels[addr] = label
            chain.account(addr)
        chain.store.load(
            {
                addr: {
                    bytes.fromhex(k): base64.b64decode(v) for k, v in kv.items()
                }
                for addr, kv in state["store"].items()
            }
        )
        return chain

    # --- queries -------------------------------------------------------------

    def query(self, contract_addr: str, env: Envelope | str) -> Envelope:
        if isinstance(env, str):
            env = Envelope.from_hex(env)
        contract = self.contracts.get(contract_addr)
        if contract is None:
            raise QueryFailed("unknown contract")
        try:
            plaintext, key = self._decrypt_envelope(env)
        except EnvelopeError:
            raise QueryFailed("envelope decryption failed") from None
        meter = GasMeter(self.params.query_gas_limit)
        try:
            contract_msg = json.loads(plaintext.decode("utf-8"))
            if not isinstance(contract_msg, dict):
                raise ValueError
        except ValueError:
            return seal_response(key, env, canonical_json({"error": "invalid message"}))
        ctx = self._make_context(
            contract_addr=contract_addr,
            sender=None,
            funds=0,
            meter=meter,
            read_only=True,
            current_tx_hash=b"",
        )
        try:
            result = {"ok": contract.query(ctx, contract_msg)}
        except ContractError as exc:
            result = {"error": str(exc)}
        except OutOfGas:
            result = {"error": "query gas limit exceeded"}
        return seal_response(key, env, canonical_json(result))
