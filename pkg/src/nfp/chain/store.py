"""Encrypted-at-rest contract storage.

Every key is hashed and every value sealed with the contract's 32-byte
state key before touching the raw store, so a dump of the store never
contains contract plaintext. Nonces are content-derived, which is safe
under AES-GCM-SIV (nonce misuse resistant) and keeps replay fully
deterministic: identical writes produce identical ciphertexts.

Mutations are journaled so a failing transaction can be undone in time
proportional to what it touched, not to total state size.
"""

from __future__ import annotations

import hashlib

from ..contract.base import ReadOnlyViolation
from ..crypto import aead_open, aead_seal
from .gas import GasMeter, GasParams

_DELETE_COST = 100
_READ_FLAT = 10

_MISSING = object()


def _hashed_key(state_key: bytes, key: str) -> bytes:
    return hashlib.sha256(state_key + b"\x00k\x00" + key.encode("utf-8")).digest()


def _seal(state_key: bytes, hashed: bytes, value: bytes) -> bytes:
    nonce = hashlib.sha256(state_key + b"\x00n\x00" + hashed + value).digest()[:12]
    return nonce + aead_seal(state_key, nonce, value, aad=hashed)


def unseal(state_key: bytes, hashed: bytes, sealed: bytes) -> bytes:
    return aead_open(state_key, sealed[:12], sealed[12:], aad=hashed)


class Journal:
    """Undo log for one transaction scope."""

    def __init__(self):
        self._store_ops: list[tuple[dict, bytes, object]] = []
        self._accounts: dict[str, object] = {}
        self._grants: dict[tuple[str, str], object] = {}
        self.burned: int | None = None

    def record_store(self, ns: dict, key: bytes) -> None:
        self._store_ops.append((ns, key, ns.get(key, _MISSING)))

    def record_account(self, addr: str, prev: object) -> None:
        self._accounts.setdefault(addr, prev)

    def record_grant(self, key: tuple[str, str], prev: object) -> None:
        self._grants.setdefault(key, prev)

    def rollback(self, chain) -> None:
        for ns, key, old in reversed(self._store_ops):
            if old is _MISSING:
                ns.pop(key, None)
            else:
                ns[key] = old
        for addr, prev in self._accounts.items():
            if prev is _MISSING:
                chain.accounts.pop(addr, None)
            else:
                chain.accounts[addr] = prev
        for key, prev in self._grants.items():
            if prev is _MISSING:
                chain.fee_grants.pop(key, None)
            else:
                chain.fee_grants[key] = prev
        if self.burned is not None:
            chain.burned = self.burned


class SealedStore:
    """contract address -> (hashed key -> sealed value)."""

    def __init__(self):
        self._data: dict[str, dict[bytes, bytes]] = {}

    def namespace(self, contract: str) -> dict[bytes, bytes]:
        return self._data.setdefault(contract, {})

    def dump(self) -> dict[str, dict[bytes, bytes]]:
        return {addr: dict(kv) for addr, kv in self._data.items()}

    def load(self, data: dict[str, dict[bytes, bytes]]) -> None:
        self._data = {addr: dict(kv) for addr, kv in data.items()}

    def total_bytes(self) -> int:
        return sum(
            len(k) + len(v) for kv in self._data.values() for k, v in kv.items()
        )


class ContractStorage:
    """Gas-metered plaintext view over one contract's sealed namespace."""

    def __init__(
        self,
        store: SealedStore,
        contract: str,
        state_key: bytes,
        meter: GasMeter,
        params: GasParams,
        read_only: bool,
        journal: Journal | None = None,
    ):
        self._ns = store.namespace(contract)
        self._state_key = state_key
        self._meter = meter
        self._params = params
        self._read_only = read_only
        self._journal = journal

    def get(self, key: str) -> bytes | None:
        hashed = _hashed_key(self._state_key, key)
        sealed = self._ns.get(hashed)
        if sealed is None:
            self._meter.charge(_READ_FLAT)
            return None
        value = unseal(self._state_key, hashed, sealed)
        self._meter.charge(_READ_FLAT + self._params.read_cost_per_byte * len(value))
        return value

    def set(self, key: str, value: bytes) -> None:
        if self._read_only:
            raise ReadOnlyViolation()
        hashed = _hashed_key(self._state_key, key)
        self._meter.charge(
            self._params.write_cost_per_byte * (len(key.encode()) + len(value))
        )
        if self._journal is not None:
            self._journal.record_store(self._ns, hashed)
        self._ns[hashed] = _seal(self._state_key, hashed, value)

    def delete(self, key: str) -> None:
        if self._read_only:
            raise ReadOnlyViolation()
        self._meter.charge(_DELETE_COST)
        hashed = _hashed_key(self._state_key, key)
        if self._journal is not None:
            self._journal.record_store(self._ns, hashed)
        self._ns.pop(hashed, None)
