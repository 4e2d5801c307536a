"""Signed transaction structure and canonical serialization.

A transaction body is canonical JSON (sorted keys, UTF-8, no whitespace)
and the signature covers exactly those bytes, binding msgs, fee,
fee_granter, sequence, and chain_id.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from ..contract.base import canonical_json
from ..crypto import PrivateKey


def make_exec_msg(contract: str, envelope_hex: str, funds: int = 0) -> dict:
    return {"exec": {"contract": contract, "envelope": envelope_hex, "funds": funds}}


def make_bank_send(to: str, amount: int) -> dict:
    return {"bank_send": {"to": to, "amount": amount}}


def make_grant_fee(grantee: str, spend_limit: int, expiration: int) -> dict:
    return {
        "grant_fee": {
            "grantee": grantee,
            "spend_limit": spend_limit,
            "expiration": expiration,
        }
    }


def make_tx_body(
    chain_id: str,
    sequence: int,
    msgs: list[dict],
    fee: int,
    fee_granter: str | None = None,
) -> dict:
    return {
        "chain_id": chain_id,
        "sequence": sequence,
        "fee": fee,
        "fee_granter": fee_granter,
        "msgs": msgs,
    }


def sign_tx(priv: PrivateKey, body: dict) -> dict:
    return {
        "body": body,
        "pubkey": priv.public_key().to_bytes().hex(),
        "signature": priv.sign(canonical_json(body)).hex(),
    }


def tx_hash(tx: dict) -> str:
    return hashlib.sha256(canonical_json(tx)).hexdigest()


@dataclass
class TxResult:
    code: int
    height: int
    tx_hash: str
    gas_used: int
    responses: list = field(default_factory=list)
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.code == 0

    def to_dict(self) -> dict:
        return {
            "code": self.code,
            "height": self.height,
            "tx_hash": self.tx_hash,
            "gas_used": self.gas_used,
            "responses": self.responses,
            "error": self.error,
        }
