"""Gas schedule for the simulated chain.

The defaults put the single-transaction upload ceiling at ~320KB against
the 6M block gas limit: fixed per-tx overhead is base_tx_cost plus one
msg_exec_cost, so a package of N payload bytes costs roughly
230_000 + 18*N gas and tops out just above 320,000 bytes.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .errors import OutOfGas


@dataclass(frozen=True)
class GasParams:
    block_gas_limit: int = 6_000_000
    write_cost_per_byte: int = 18
    read_cost_per_byte: int = 3
    base_tx_cost: int = 50_000
    msg_exec_cost: int = 180_000
    native_msg_cost: int = 10_000
    query_gas_limit: int = 3_000_000

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "GasParams":
        return cls(**data)


class GasMeter:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def charge(self, amount: int) -> None:
        self.used += amount
        if self.used > self.limit:
            raise OutOfGas(self.used, self.limit)
