"""Append-only chain state file with periodic snapshots.

One JSON record per line: a genesis record, contract instantiations,
then every accepted transaction. A snapshot record is inserted every
SNAPSHOT_EVERY transactions; loading restores the latest snapshot and
replays only the tail. Replays are deterministic because all chain
randomness is derived from the genesis seed and record contents.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from filelock import FileLock, Timeout

from ..chain import Chain, GasParams, TxRejected
from ..client import LocalBackend
from ..contract.nfp import NfpContract

SNAPSHOT_EVERY = 100

CONTRACT_FACTORIES = {"nfp": NfpContract}


class StateFileError(Exception):
    pass


def lock_for(path: str | Path) -> FileLock:
    return FileLock(str(path) + ".lock")


def acquire_lock(path: str | Path, timeout: float = 0.25) -> FileLock:
    lock = lock_for(path)
    try:
        lock.acquire(timeout=timeout)
    except Timeout:
        raise StateFileError(
            f"state file {path} is locked by another process"
        ) from None
    return lock


def create(
    path: str | Path,
    params: GasParams,
    accounts: list[tuple[str, int]],
    chain_id: str,
    seed: str,
    instantiations: list[dict],
) -> Chain:
    path = Path(path)
    if path.exists():
        raise StateFileError(f"{path} already exists")
    chain = Chain(params, accounts, chain_id=chain_id, seed=seed)
    records = [
        {
            "type": "genesis",
            "chain_id": chain_id,
            "params": params.to_dict(),
            "accounts": [[a, b] for a, b in accounts],
            "seed": seed,
        }
    ]
    for inst in instantiations:
        chain.instantiate(
            CONTRACT_FACTORIES[inst["label"]](),
            inst["init"],
            sender=inst["sender"],
            label=inst["label"],
        )
        records.append({"type": "instantiate", **inst})
    with path.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, sort_keys=True) + "\n")
    return chain


def load(path: str | Path) -> Chain:
    path = Path(path)
    if not path.exists():
        raise StateFileError(f"state file {path} not found (run `nfp init`)")
    chain: Chain | None = None
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except ValueError:
                raise StateFileError(f"{path}:{line_no}: corrupt record") from None
            kind = record.get("type")
            if kind == "genesis":
                chain = Chain(
                    GasParams.from_dict(record["params"]),
                    [tuple(a) for a in record["accounts"]],
                    chain_id=record["chain_id"],
                    seed=record["seed"],
                )
            elif chain is None:
                raise StateFileError(f"{path}:{line_no}: record before genesis")
            elif kind == "instantiate":
                chain.instantiate(
                    CONTRACT_FACTORIES[record["label"]](),
                    record["init"],
                    sender=record["sender"],
                    label=record["label"],
                )
            elif kind == "tx":
                try:
                    chain.broadcast_execute(record["tx"])
                except TxRejected as exc:
                    raise StateFileError(
                        f"{path}:{line_no}: recorded tx no longer replays: {exc}"
                    ) from None
            elif kind == "snapshot":
                chain = Chain.from_state(record["state"], CONTRACT_FACTORIES)
            else:
                raise StateFileError(f"{path}:{line_no}: unknown record {kind!r}")
    if chain is None:
        raise StateFileError(f"{path} contains no genesis record")
    return chain


class FileBackend(LocalBackend):
    """LocalBackend that persists accepted transactions to the state file."""

    def __init__(self, path: str | Path, chain: Chain | None = None):
        self.path = Path(path)
        super().__init__(chain if chain is not None else load(self.path))
        self._txs_since_snapshot = 0

    def broadcast(self, tx: dict) -> dict:
        result = super().broadcast(tx)  # raises on admission failure
        self._append({"type": "tx", "tx": tx})
        self._txs_since_snapshot += 1
        if self._txs_since_snapshot >= SNAPSHOT_EVERY:
            self._append({"type": "snapshot", "state": self.chain.to_state()})
            self._txs_since_snapshot = 0
        return result

    def _append(self, record: dict) -> None:
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, sort_keys=True) + "\n")
            fh.flush()
            os.fsync(fh.fileno())
