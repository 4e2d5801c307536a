from .chain import Account, BlockHeader, Chain, FeeGrant
from .errors import ChainError, OutOfGas, QueryFailed, TxRejected
from .gas import GasMeter, GasParams
from .store import ContractStorage, Journal, SealedStore, unseal
from .tx import (
    TxResult,
    make_bank_send,
    make_exec_msg,
    make_grant_fee,
    make_tx_body,
    sign_tx,
    tx_hash,
)

__all__ = [
    "Account",
    "BlockHeader",
    "Chain",
    "ChainError",
    "ContractStorage",
    "FeeGrant",
    "GasMeter",
    "GasParams",
    "Journal",
    "OutOfGas",
    "QueryFailed",
    "SealedStore",
    "TxRejected",
    "TxResult",
    "make_bank_send",
    "make_exec_msg",
    "make_grant_fee",
    "make_tx_body",
    "sign_tx",
    "tx_hash",
    "unseal",
]
