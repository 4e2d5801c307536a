"""Contract execution interface against the simulated chain.

Contracts keep all state in ctx.storage (sealed at rest by the chain) and
must not mutate Python instance attributes during execute/query, so that
the chain's snapshot/rollback covers everything.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any, Protocol


def canonical_json(obj: Any) -> bytes:
    """Sorted keys, no insignificant whitespace, UTF-8. Signature domain."""
    return json.dumps(
        obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False
    ).encode("utf-8")


class ContractError(Exception):
    """Raised by contract logic; the chain rolls the message back."""


class Unauthorized(ContractError):
    def __init__(self, msg: str = "unauthorized"):
        super().__init__(msg)


class NotFound(ContractError):
    pass


class ReadOnlyViolation(ContractError):
    def __init__(self):
        super().__init__("storage write attempted during query")


class StorageView(Protocol):
    def get(self, key: str) -> bytes | None: ...
    def set(self, key: str, value: bytes) -> None: ...
    def delete(self, key: str) -> None: ...


class Context:
    """Per-call view of chain facilities handed to contract code."""

    def __init__(
        self,
        *,
        storage,
        contract_address: str,
        sender: str | None,
        funds: int,
        height: int,
        chain_id: str,
        read_only: bool,
        entropy_fn,
        send_fn,
        balance_fn,
        contract_seed: bytes = b"",
        block_hash: bytes = b"",
    ):
        self.storage = storage
        self.contract_address = contract_address
        self.sender = sender
        self.funds = funds
        self.height = height
        self.chain_id = chain_id
        self.read_only = read_only
        self.contract_seed = contract_seed
        self.block_hash = block_hash
        self._entropy_fn = entropy_fn
        self._send_fn = send_fn
        self._balance_fn = balance_fn

    def entropy(self, *parts: bytes) -> bytes:
        """32 bytes derived from block hash, tx hash, and contract seed."""
        return self._entropy_fn(b"".join(parts))

    def send(self, to: str, amount: int) -> None:
        if self.read_only:
            raise ReadOnlyViolation()
        self._send_fn(to, amount)

    def contract_balance(self) -> int:
        return self._balance_fn()

    # json helpers over sealed storage -------------------------------------

    def get_json(self, key: str) -> Any:
        raw = self.storage.get(key)
        return None if raw is None else json.loads(raw.decode("utf-8"))

    def set_json(self, key: str, value: Any) -> None:
        self.storage.set(key, canonical_json(value))


class Contract(Protocol):
    def instantiate(self, ctx: Context, msg: dict) -> None: ...
    def execute(self, ctx: Context, msg: dict) -> dict: ...
    def query(self, ctx: Context, msg: dict) -> dict: ...


def sha256(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()
