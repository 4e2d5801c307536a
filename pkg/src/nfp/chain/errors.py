class ChainError(Exception):
    """Base class for chain-level failures."""


class TxRejected(ChainError):
    """Transaction refused at admission; no state change at all."""


class OutOfGas(ChainError):
    def __init__(self, used: int, limit: int):
        super().__init__(f"gas {used} exceeds limit {limit}")
        self.used = used
        self.limit = limit


class QueryFailed(ChainError):
    pass
