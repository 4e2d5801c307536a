"""Client-side wallet: signing, envelope encryption, permits.

Everything a contract caller needs, over either an in-process chain or
the HTTP endpoints served by the CLI. The wallet performs the same
crypto a browser client would: fresh X25519 secret per message, HKDF'd
envelope key, deterministic ECDSA over canonical JSON.
"""

from __future__ import annotations

import json
import os

from .chain import Chain, QueryFailed, TxRejected
from .chain.tx import make_exec_msg, make_tx_body, sign_tx
from .contract.base import canonical_json
from .crypto import (
    Envelope,
    EnvelopeError,
    PrivateKey,
    X25519Public,
    X25519Secret,
    envelope_encrypt,
    open_response,
)


class TransportError(Exception):
    """Endpoint unreachable or returned a malformed reply."""


class ExecError(Exception):
    """Contract or chain rejected the transaction."""

    def __init__(self, message: str, result: dict | None = None):
        super().__init__(message)
        self.result = result


class LocalBackend:
    """Direct in-process access to a Chain instance."""

    def __init__(self, chain: Chain):
        self.chain = chain

    def chain_id(self) -> str:
        return self.chain.chain_id

    def consensus_pubkey(self) -> bytes:
        return self.chain.consensus_pub.to_bytes()

    def account(self, addr: str) -> tuple[int, int]:
        acct = self.chain.accounts.get(addr)
        return (0, 0) if acct is None else (acct.balance, acct.sequence)

    def broadcast(self, tx: dict) -> dict:
        try:
            return self.chain.broadcast_execute(tx).to_dict()
        except TxRejected as exc:
            raise ExecError(str(exc)) from None

    def query(self, contract: str, envelope_hex: str) -> str:
        try:
            return self.chain.query(contract, envelope_hex).to_hex()
        except QueryFailed as exc:
            raise TransportError(str(exc)) from None

    def height(self) -> int:
        return self.chain.height


class HttpBackend:
    """Talks to a running `nfp serve` instance."""

    def __init__(self, base_url: str, timeout: float = 10.0):
        import requests

        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self._session = requests.Session()

    def _get(self, path: str) -> dict:
        import requests

        try:
            resp = self._session.get(self.base_url + path, timeout=self.timeout)
        except requests.RequestException as exc:
            raise TransportError(f"GET {path}: {exc}") from None
        if resp.status_code != 200:
            raise TransportError(f"GET {path}: HTTP {resp.status_code}")
        return resp.json()

    def _post(self, path: str, payload: dict) -> dict:
        import requests

        try:
            resp = self._session.post(
                self.base_url + path, json=payload, timeout=self.timeout
            )
        except requests.RequestException as exc:
            raise TransportError(f"POST {path}: {exc}") from None
        data = resp.json()
        if resp.status_code != 200:
            raise ExecError(data.get("error", f"HTTP {resp.status_code}"), data)
        return data

    def chain_id(self) -> str:
        return self._get("/consensus_pubkey")["chain_id"]

    def consensus_pubkey(self) -> bytes:
        return bytes.fromhex(self._get("/consensus_pubkey")["consensus_pubkey"])

    def account(self, addr: str) -> tuple[int, int]:
        data = self._get(f"/account/{addr}")
        return data["balance"], data["sequence"]

    def broadcast(self, tx: dict) -> dict:
        return self._post("/broadcast", {"tx": tx})

    def query(self, contract: str, envelope_hex: str) -> str:
        data = self._post("/query", {"contract": contract, "envelope": envelope_hex})
        return data["envelope"]

    def height(self) -> int:
        return self._get("/block")["height"]


class Wallet:
    def __init__(self, priv: PrivateKey, backend, rng=None):
        self.priv = priv
        self.backend = backend
        self.address = str(priv.address())
        self._rng = rng  # deterministic envelope randomness for scripted runs
        self._consensus_pub: X25519Public | None = None
        self._chain_id: str | None = None

    # --- chain metadata, fetched lazily ------------------------------------

    @property
    def chain_id(self) -> str:
        if self._chain_id is None:
            self._chain_id = self.backend.chain_id()
        return self._chain_id

    @property
    def consensus_pub(self) -> X25519Public:
        if self._consensus_pub is None:
            self._consensus_pub = X25519Public(self.backend.consensus_pubkey())
        return self._consensus_pub

    def sequence(self) -> int:
        return self.backend.account(self.address)[1]

    def balance(self) -> int:
        return self.backend.account(self.address)[0]

    # --- envelopes ----------------------------------------------------------

    def _randbytes(self, n: int) -> bytes:
        return self._rng.randbytes(n) if self._rng is not None else os.urandom(n)

    def seal_msg(self, contract_msg: dict) -> tuple[Envelope, bytes]:
        tx_secret = X25519Secret(self._randbytes(32))
        return envelope_encrypt(
            tx_secret,
            self.consensus_pub,
            canonical_json(contract_msg),
            nonce=self._randbytes(12),
        )

    # --- transactions ---------------------------------------------------------

    def build_tx(
        self,
        msgs: list[dict],
        fee: int = 25_000,
        fee_granter: str | None = None,
        sequence: int | None = None,
    ) -> dict:
        body = make_tx_body(
            self.chain_id,
            self.sequence() if sequence is None else sequence,
            msgs,
            fee,
            fee_granter,
        )
        return sign_tx(self.priv, body)

    def execute(
        self,
        contract: str,
        contract_msg: dict,
        funds: int = 0,
        fee: int = 25_000,
        fee_granter: str | None = None,
    ) -> tuple[dict, dict]:
        """Sign, broadcast, and decrypt. Returns (contract result, tx result)."""
        env, key = self.seal_msg(contract_msg)
        tx = self.build_tx(
            [make_exec_msg(contract, env.to_hex(), funds)], fee, fee_granter
        )
        result = self.backend.broadcast(tx)
        if result.get("code", 0) != 0 and not result.get("responses"):
            raise ExecError(result.get("error") or "transaction failed", result)
        payload = self._open_exec_response(result["responses"][0], key, env.nonce)
        if "error" in payload:
            raise ExecError(payload["error"], result)
        return payload["ok"], result

    @staticmethod
    def _open_exec_response(response: dict, key: bytes, nonce: bytes) -> dict:
        if "plain" in response:
            return response["plain"]
        try:
            resp_env = Envelope.from_hex(response["cipher"])
            return json.loads(open_response(key, nonce, resp_env).decode("utf-8"))
        except (EnvelopeError, ValueError, KeyError) as exc:
            raise TransportError(f"unreadable response: {exc}") from None

    def bank_send(self, to: str, amount: int, fee: int = 25_000) -> dict:
        from .chain.tx import make_bank_send

        tx = self.build_tx([make_bank_send(to, amount)], fee)
        result = self.backend.broadcast(tx)
        if result.get("code", 0) != 0:
            raise ExecError(result.get("error") or "bank send failed", result)
        return result

    def grant_fee(
        self, grantee: str, spend_limit: int, expiration: int, fee: int = 25_000
    ) -> dict:
        from .chain.tx import make_grant_fee

        tx = self.build_tx([make_grant_fee(grantee, spend_limit, expiration)], fee)
        result = self.backend.broadcast(tx)
        if result.get("code", 0) != 0:
            raise ExecError(result.get("error") or "fee grant failed", result)
        return result

    # --- queries ---------------------------------------------------------------

    def query(self, contract: str, contract_msg: dict) -> dict:
        env, key = self.seal_msg(contract_msg)
        resp_hex = self.backend.query(contract, env.to_hex())
        try:
            resp = Envelope.from_hex(resp_hex)
            payload = json.loads(open_response(key, env.nonce, resp).decode("utf-8"))
        except (EnvelopeError, ValueError) as exc:
            raise TransportError(f"unreadable query response: {exc}") from None
        if "error" in payload:
            raise ExecError(payload["error"])
        return payload["ok"]

    # --- query permits -----------------------------------------------------------

    def sign_permit(
        self,
        permit_name: str,
        allowed_contracts: list[str],
        permissions: list[str],
    ) -> dict:
        params = {
            "permit_name": permit_name,
            "allowed_contracts": sorted(allowed_contracts),
            "permissions": sorted(permissions),
            "chain_id": self.chain_id,
        }
        return {
            "params": params,
            "pubkey": self.priv.public_key().to_bytes().hex(),
            "signature": self.priv.sign(canonical_json(params)).hex(),
        }
