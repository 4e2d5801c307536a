import pytest

from nfp.chain import Chain, GasParams
from nfp.client import LocalBackend, Wallet
from nfp.contract.nfp import NfpContract
from nfp.crypto import PrivateKey

MINT_PRICE = 1_000


def make_funded_chain(
    names=("alice", "bob", "carol"),
    balance=50_000_000,
    seed="test-seed",
    deterministic_wallets=False,
):
    import random

    keys = {name: PrivateKey.from_seed(name.encode()) for name in names}
    genesis = [(str(k.address()), balance) for k in keys.values()]
    chain = Chain(GasParams(), genesis, seed=seed)
    backend = LocalBackend(chain)
    wallets = {
        name: Wallet(
            k,
            backend,
            rng=random.Random(f"wallet:{name}") if deterministic_wallets else None,
        )
        for name, k in keys.items()
    }
    return chain, wallets


def make_nfp_chain(
    names=("alice", "bob", "carol", "dave"),
    seed="test-seed",
    balance=50_000_000,
    deterministic_wallets=False,
):
    """Chain with an instantiated NFP contract; alice is admin and minter."""
    chain, wallets = make_funded_chain(
        names, balance=balance, seed=seed, deterministic_wallets=deterministic_wallets
    )
    admin = wallets["alice"].address
    contract = chain.instantiate(
        NfpContract(),
        {"admin": admin, "minters": [admin], "mint_price": MINT_PRICE},
        sender=admin,
        label="nfp",
    )
    return chain, wallets, contract


@pytest.fixture
def funded_chain():
    return make_funded_chain()


@pytest.fixture
def nfp():
    return make_nfp_chain()


def mint_token(wallets, contract, minter="alice", to=None, svg=b"<svg/>"):
    from nfp.contract.nfp.state import b64

    wallet = wallets[minter]
    to = to or wallet.address
    result, _ = wallet.execute(contract, {"mint": {"to": to, "svg": b64(svg)}})
    return result["token_id"]


def permit_for(wallet, contract, permissions, name="test-permit"):
    return wallet.sign_permit(name, [contract], list(permissions))
