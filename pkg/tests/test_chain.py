"""Chain simulator: accounts, gas, blocks, atomicity, confidentiality."""

import json

import pytest

from nfp.chain import Chain, GasParams, TxRejected, unseal
from nfp.chain.store import _hashed_key
from nfp.client import ExecError, LocalBackend, Wallet
from nfp.contract.base import ContractError, ReadOnlyViolation
from nfp.crypto import PrivateKey

from conftest import make_funded_chain


class ScratchContract:
    """Minimal contract used to exercise the chain: a byte store."""

    def instantiate(self, ctx, msg):
        ctx.set_json("owner", msg.get("owner"))

    def execute(self, ctx, msg):
        if "put" in msg:
            body = msg["put"]
            ctx.storage.set("data/" + body["key"], bytes.fromhex(body["hex"]))
            return {"stored": len(body["hex"]) // 2}
        if "fail_after_write" in msg:
            ctx.storage.set("doomed", b"should never persist")
            raise ContractError("deliberate failure")
        if "pay" in msg:
            ctx.send(msg["pay"]["to"], msg["pay"]["amount"])
            return {}
        raise ContractError("unknown action")

    def query(self, ctx, msg):
        if "get" in msg:
            raw = ctx.storage.get("data/" + msg["get"]["key"])
            return {"hex": None if raw is None else raw.hex()}
        if "write_attempt" in msg:
            ctx.storage.set("illegal", b"nope")
            return {}
        raise ContractError("unknown query")


@pytest.fixture
def scratch(funded_chain):
    chain, wallets = funded_chain
    addr = chain.instantiate(ScratchContract(), {"owner": wallets["alice"].address},
                             sender=wallets["alice"].address, label="scratch")
    return chain, wallets, addr


# --- genesis ---------------------------------------------------------------


def test_genesis_empty():
    chain = Chain(GasParams(), [], seed="empty")
    assert chain.height == 0
    assert chain.total_supply() == 0


def test_genesis_supply_sums():
    a = PrivateKey.from_seed(b"a").address()
    b = PrivateKey.from_seed(b"b").address()
    chain = Chain(GasParams(), [(str(a), 100), (str(b), 200)], seed="s")
    assert chain.total_supply() == 300


def test_genesis_duplicate_address_rejected():
    a = str(PrivateKey.from_seed(b"a").address())
    with pytest.raises(TxRejected):
        Chain(GasParams(), [(a, 100), (a, 200)], seed="s")


def test_consensus_pubkey_deterministic_under_seed():
    c1 = Chain(GasParams(), [], seed="fixed")
    c2 = Chain(GasParams(), [], seed="fixed")
    assert c1.consensus_pub.to_bytes() == c2.consensus_pub.to_bytes()


# --- transfers and admission -------------------------------------------------


def test_bank_send_updates_balances(funded_chain):
    chain, wallets = funded_chain
    alice, bob = wallets["alice"], wallets["bob"]
    before_bob = bob.balance()
    result = alice.bank_send(bob.address, 1234, fee=500)
    assert result["gas_used"] >= chain.params.base_tx_cost
    assert bob.balance() == before_bob + 1234
    assert alice.balance() == 50_000_000 - 1234 - 500


def test_wrong_signature_rejected(funded_chain):
    chain, wallets = funded_chain
    alice = wallets["alice"]
    from nfp.chain.tx import make_bank_send, make_tx_body, sign_tx

    body = make_tx_body(chain.chain_id, 0, [make_bank_send(wallets["bob"].address, 1)], 100)
    tx = sign_tx(alice.priv, body)
    tx["body"]["fee"] = 999  # mutate after signing
    with pytest.raises(ExecError, match="invalid signature"):
        alice.backend.broadcast(tx)


def test_stale_sequence_rejected(funded_chain):
    chain, wallets = funded_chain
    alice = wallets["alice"]
    alice.bank_send(wallets["bob"].address, 1)
    tx = alice.build_tx(
        [{"bank_send": {"to": wallets["bob"].address, "amount": 1}}],
        fee=100,
        sequence=0,
    )
    with pytest.raises(ExecError, match="sequence mismatch"):
        alice.backend.broadcast(tx)


def test_insufficient_fee_funds_rejected(funded_chain):
    chain, wallets = funded_chain
    poor = Wallet(PrivateKey.from_seed(b"penniless"), LocalBackend(chain))
    with pytest.raises(ExecError, match="insufficient funds for fee"):
        poor.bank_send(wallets["alice"].address, 0, fee=100)


def test_fees_are_burned_conservation(funded_chain):
    chain, wallets = funded_chain
    start = chain.total_supply()
    wallets["alice"].bank_send(wallets["bob"].address, 777, fee=1000)
    wallets["bob"].bank_send(wallets["carol"].address, 5, fee=300)
    assert chain.total_supply() == start - 1300
    assert chain.burned == 1300
    assert chain.total_supply() + chain.burned == chain.genesis_supply


# --- contract execution ------------------------------------------------------


def test_put_get_round_trip(scratch):
    chain, wallets, addr = scratch
    alice = wallets["alice"]
    result, tx_result = alice.execute(addr, {"put": {"key": "x", "hex": "deadbeef"}})
    assert result == {"stored": 4}
    assert tx_result["code"] == 0
    assert alice.query(addr, {"get": {"key": "x"}}) == {"hex": "deadbeef"}


def test_query_reflects_state_change(scratch):
    chain, wallets, addr = scratch
    alice = wallets["alice"]
    assert alice.query(addr, {"get": {"key": "y"}}) == {"hex": None}
    alice.execute(addr, {"put": {"key": "y", "hex": "00ff"}})
    assert alice.query(addr, {"get": {"key": "y"}}) == {"hex": "00ff"}


def test_query_costs_no_balance(scratch):
    chain, wallets, addr = scratch
    balances = {w.address: w.balance() for w in wallets.values()}
    for _ in range(5):
        wallets["bob"].query(addr, {"get": {"key": "nothing"}})
    assert {w.address: w.balance() for w in wallets.values()} == balances
    assert chain.burned == 0


def test_contract_write_during_query_fails(scratch):
    chain, wallets, addr = scratch
    with pytest.raises(ExecError, match="storage write attempted during query"):
        wallets["alice"].query(addr, {"write_attempt": {}})


def test_contract_error_rolls_back_but_charges_fee(scratch):
    chain, wallets, addr = scratch
    alice = wallets["alice"]
    alice.execute(addr, {"put": {"key": "k", "hex": "aa"}}, fee=400)
    dump_before = chain.raw_storage_dump()
    balance_before = alice.balance()
    seq_before = alice.sequence()
    with pytest.raises(ExecError, match="deliberate failure"):
        alice.execute(addr, {"fail_after_write": {}}, fee=400)
    assert chain.raw_storage_dump() == dump_before  # byte-identical storage
    assert alice.balance() == balance_before - 400  # fee still charged
    assert alice.sequence() == seq_before + 1


def test_gas_over_block_limit_rejected_without_state_change(scratch):
    chain, wallets, addr = scratch
    alice = wallets["alice"]
    dump_before = chain.raw_storage_dump()
    balance_before = alice.balance()
    seq_before = alice.sequence()
    height_before = chain.height
    huge = "00" * 321_000
    with pytest.raises(ExecError, match="block gas limit"):
        alice.execute(addr, {"put": {"key": "huge", "hex": huge}}, fee=400)
    assert chain.raw_storage_dump() == dump_before
    assert alice.balance() == balance_before
    assert alice.sequence() == seq_before
    assert chain.height == height_before


def test_gas_scales_linearly_with_payload(scratch):
    chain, wallets, addr = scratch
    alice = wallets["alice"]
    n = 10_000
    _, r1 = alice.execute(addr, {"put": {"key": "a", "hex": "ab" * n}})
    _, r2 = alice.execute(addr, {"put": {"key": "b", "hex": "ab" * (2 * n)}})
    diff = r2["gas_used"] - r1["gas_used"]
    expected = chain.params.write_cost_per_byte * n
    assert abs(diff - expected) <= 0.01 * expected


def test_funds_attach_and_contract_can_pay_out(scratch):
    chain, wallets, addr = scratch
    alice, bob = wallets["alice"], wallets["bob"]
    alice.execute(addr, {"put": {"key": "z", "hex": "00"}}, funds=5000)
    assert chain.balance(addr) == 5000
    bob_before = bob.balance()
    alice.execute(addr, {"pay": {"to": bob.address, "amount": 2000}})
    assert chain.balance(addr) == 3000
    assert bob.balance() == bob_before + 2000


# --- blocks -------------------------------------------------------------------


def test_empty_blocks_have_distinct_hashes():
    chain = Chain(GasParams(), [], seed="blocks")
    b1 = chain.produce_block()
    b2 = chain.produce_block()
    assert b1.hash != b2.hash
    assert b2.prev_hash == b1.hash
    assert [b.height for b in chain.blocks] == [0, 1, 2]


def test_block_hash_deterministic():
    c1 = Chain(GasParams(), [], seed="same")
    c2 = Chain(GasParams(), [], seed="same")
    assert c1.produce_block().hash == c2.produce_block().hash


def test_height_increases_per_tx(funded_chain):
    chain, wallets = funded_chain
    h = chain.height
    wallets["alice"].bank_send(wallets["bob"].address, 1)
    assert chain.height == h + 1


# --- fee grants -----------------------------------------------------------------


def test_fee_grant_deducts_from_granter(funded_chain):
    chain, wallets = funded_chain
    alice, bob = wallets["alice"], wallets["bob"]
    alice.grant_fee(bob.address, spend_limit=1000, expiration=10_000)
    granter_before = alice.balance()
    bob_before = bob.balance()
    tx = bob.build_tx(
        [{"bank_send": {"to": wallets["carol"].address, "amount": 0}}],
        fee=300,
        fee_granter=alice.address,
    )
    bob.backend.broadcast(tx)
    assert alice.balance() == granter_before - 300
    assert bob.balance() == bob_before
    assert chain.fee_grants[(alice.address, bob.address)].remaining == 700


def test_zero_balance_grantee_executes(funded_chain):
    chain, wallets = funded_chain
    alice = wallets["alice"]
    fresh = Wallet(PrivateKey.from_seed(b"hot wallet"), LocalBackend(chain))
    alice.grant_fee(fresh.address, spend_limit=5000, expiration=10_000)
    tx = fresh.build_tx(
        [{"bank_send": {"to": alice.address, "amount": 0}}],
        fee=200,
        fee_granter=alice.address,
    )
    result = fresh.backend.broadcast(tx)
    assert result["code"] == 0
    assert fresh.balance() == 0


def test_fee_over_remaining_limit_rejected(funded_chain):
    chain, wallets = funded_chain
    alice, bob = wallets["alice"], wallets["bob"]
    alice.grant_fee(bob.address, spend_limit=700, expiration=10_000)
    balances_before = (alice.balance(), bob.balance())
    tx = bob.build_tx(
        [{"bank_send": {"to": alice.address, "amount": 0}}],
        fee=800,
        fee_granter=alice.address,
    )
    with pytest.raises(ExecError, match="exceeds remaining grant limit"):
        bob.backend.broadcast(tx)
    assert (alice.balance(), bob.balance()) == balances_before


def test_expired_grant_rejected(funded_chain):
    chain, wallets = funded_chain
    alice, bob = wallets["alice"], wallets["bob"]
    alice.grant_fee(bob.address, spend_limit=1000, expiration=chain.height)
    tx = bob.build_tx(
        [{"bank_send": {"to": alice.address, "amount": 0}}],
        fee=100,
        fee_granter=alice.address,
    )
    with pytest.raises(ExecError, match="expired"):
        bob.backend.broadcast(tx)


# --- sealed storage ---------------------------------------------------------------


def test_raw_store_contains_no_plaintext(scratch):
    chain, wallets, addr = scratch
    secret_value = b"coordinates (3,7) battleship"
    wallets["alice"].execute(addr, {"put": {"key": "s", "hex": secret_value.hex()}})
    blob = b"".join(
        k + v for ns in chain.raw_storage_dump().values() for k, v in ns.items()
    )
    for i in range(len(secret_value) - 7):
        assert blob.find(secret_value[i:i + 8]) == -1
    assert blob.find(b"data/s") == -1  # keys are hashed too


def test_dump_grows_monotonically(scratch):
    chain, wallets, addr = scratch
    sizes = []
    for i in range(3):
        wallets["alice"].execute(addr, {"put": {"key": f"k{i}", "hex": "aa" * 50}})
        sizes.append(chain.store.total_bytes())
    assert sizes == sorted(sizes) and sizes[0] < sizes[-1]


def test_sealed_value_unseals_with_state_key(scratch):
    chain, wallets, addr = scratch
    wallets["alice"].execute(addr, {"put": {"key": "u", "hex": "cafef00d"}})
    state_key = chain._state_key(addr)
    hashed = _hashed_key(state_key, "data/u")
    sealed = chain.store.namespace(addr)[hashed]
    assert unseal(state_key, hashed, sealed) == bytes.fromhex("cafef00d")
