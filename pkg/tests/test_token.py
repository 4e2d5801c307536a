"""NFP token contract: mint, transfer, permits, delegates, kv, channels."""

import pytest

from nfp.client import ExecError, LocalBackend, Wallet
from nfp.contract.nfp import DELEGABLE_METHODS
from nfp.contract.nfp.state import b64
from nfp.crypto import PrivateKey

from conftest import MINT_PRICE, make_nfp_chain, mint_token, permit_for


@pytest.fixture
def nfp():
    return make_nfp_chain()


# --- instantiate / mint -------------------------------------------------------


def test_instantiate_starts_empty(nfp):
    chain, wallets, contract = nfp
    assert wallets["bob"].query(contract, {"total_tokens": {}}) == {"count": 0}


def test_non_minter_without_payment_rejected(nfp):
    chain, wallets, contract = nfp
    with pytest.raises(ExecError, match="payment"):
        wallets["bob"].execute(
            contract, {"mint": {"to": wallets["bob"].address, "svg": b64(b"<svg/>")}}
        )


def test_public_mint_with_payment(nfp):
    chain, wallets, contract = nfp
    result, _ = wallets["bob"].execute(
        contract,
        {"mint": {"to": wallets["bob"].address, "svg": b64(b"<svg/>")}},
        funds=MINT_PRICE,
    )
    assert result["token_id"] == "1"


def test_underpayment_rejected(nfp):
    chain, wallets, contract = nfp
    with pytest.raises(ExecError, match="payment"):
        wallets["bob"].execute(
            contract,
            {"mint": {"to": wallets["bob"].address, "svg": b64(b"<svg/>")}},
            funds=MINT_PRICE - 1,
        )


def test_sequential_token_ids(nfp):
    chain, wallets, contract = nfp
    id1 = mint_token(wallets, contract, to=wallets["bob"].address)
    id2 = mint_token(wallets, contract, to=wallets["carol"].address)
    assert (id1, id2) == ("1", "2")
    assert wallets["alice"].query(contract, {"total_tokens": {}}) == {"count": 2}


def test_mint_23kb_svg_well_under_gas_limit(nfp):
    chain, wallets, contract = nfp
    svg = b"<svg>" + b"g" * (23 * 1024) + b"</svg>"
    result, tx_result = wallets["alice"].execute(
        contract, {"mint": {"to": wallets["alice"].address, "svg": b64(svg)}}
    )
    assert result["token_id"] == "1"
    assert tx_result["gas_used"] < chain.params.block_gas_limit / 2


def test_empty_svg_rejected(nfp):
    chain, wallets, contract = nfp
    with pytest.raises(ExecError, match="empty"):
        mint_token(wallets, contract, svg=b"")


# --- transfer --------------------------------------------------------------------


def test_owner_transfer(nfp):
    chain, wallets, contract = nfp
    token_id = mint_token(wallets, contract, to=wallets["bob"].address)
    wallets["bob"].execute(
        contract, {"transfer": {"token_id": token_id, "to": wallets["carol"].address}}
    )
    permit = permit_for(wallets["carol"], contract, ["owner"])
    result = wallets["carol"].query(
        contract, {"owner_of": {"token_id": token_id, "auth": permit}}
    )
    assert result == {"owner": wallets["carol"].address}


def test_delegate_cannot_transfer(nfp):
    chain, wallets, contract = nfp
    token_id = mint_token(wallets, contract, to=wallets["bob"].address)
    wallets["bob"].execute(
        contract,
        {
            "approve_delegate": {
                "scope": {"token": {"token_id": token_id}},
                "delegate": wallets["carol"].address,
                "allowed_methods": sorted(DELEGABLE_METHODS),
            }
        },
    )
    with pytest.raises(ExecError, match="unauthorized"):
        wallets["carol"].execute(
            contract,
            {"transfer": {"token_id": token_id, "to": wallets["carol"].address}},
        )


def test_transfer_method_not_delegable(nfp):
    chain, wallets, contract = nfp
    token_id = mint_token(wallets, contract, to=wallets["bob"].address)
    with pytest.raises(ExecError, match="not delegable"):
        wallets["bob"].execute(
            contract,
            {
                "approve_delegate": {
                    "scope": {"token": {"token_id": token_id}},
                    "delegate": wallets["carol"].address,
                    "allowed_methods": ["transfer"],
                }
            },
        )


def test_transfer_revokes_token_scoped_grants(nfp):
    chain, wallets, contract = nfp
    token_id = mint_token(wallets, contract, to=wallets["bob"].address)
    # grant, transfer, then the old delegate tries to act
    wallets["bob"].execute(
        contract,
        {
            "approve_delegate": {
                "scope": {"token": {"token_id": token_id}},
                "delegate": wallets["dave"].address,
                "allowed_methods": ["kv_put"],
            }
        },
    )
    wallets["dave"].execute(
        contract,
        {"kv_put": {"token_id": token_id, "key": "k", "value": b64(b"v")}},
    )
    wallets["bob"].execute(
        contract, {"transfer": {"token_id": token_id, "to": wallets["carol"].address}}
    )
    with pytest.raises(ExecError, match="unauthorized"):
        wallets["dave"].execute(
            contract,
            {"kv_put": {"token_id": token_id, "key": "k", "value": b64(b"v")}},
        )


def test_transfer_of_unknown_token_is_uniform_unauthorized(nfp):
    chain, wallets, contract = nfp
    with pytest.raises(ExecError, match="^unauthorized$"):
        wallets["bob"].execute(
            contract, {"transfer": {"token_id": "999", "to": wallets["bob"].address}}
        )


# --- owner_of auth matrix -----------------------------------------------------------


def _owner_of(wallet, contract, token_id, permit):
    return wallet.query(contract, {"owner_of": {"token_id": token_id, "auth": permit}})


def test_owner_permit_reads_owner(nfp):
    chain, wallets, contract = nfp
    token_id = mint_token(wallets, contract, to=wallets["bob"].address)
    permit = permit_for(wallets["bob"], contract, ["owner"])
    assert _owner_of(wallets["bob"], contract, token_id, permit) == {
        "owner": wallets["bob"].address
    }


def test_query_auth_five_case_matrix(nfp):
    """unsigned / bad signature / revoked / wrong contract / no permission."""
    chain, wallets, contract = nfp
    token_id = mint_token(wallets, contract, to=wallets["bob"].address)
    bob = wallets["bob"]

    for method, body in [
        ("owner_of", {"token_id": token_id}),
        ("token_svg", {"token_id": token_id}),
        ("fetch_notifications", {"token_id": token_id, "since_seq": 0}),
        ("kv_get", {"token_id": token_id, "key": "k"}),
        ("match_state", {"token_id": token_id, "match_id": "00"}),
    ]:
        permission = {
            "owner_of": "owner",
            "token_svg": "owner",
            "fetch_notifications": "notifications",
            "kv_get": "owner",
            "match_state": "game_state",
        }[method]

        # (a) unsigned
        with pytest.raises(ExecError, match="permit"):
            bob.query(contract, {method: {**body, "auth": None}})
        # (b) wrongly signed
        permit = permit_for(bob, contract, [permission])
        permit["signature"] = "00" * 64
        with pytest.raises(ExecError, match="invalid permit signature"):
            bob.query(contract, {method: {**body, "auth": permit}})
        # (c) revoked
        permit = permit_for(bob, contract, [permission], name="revoked-one")
        bob.execute(contract, {"revoke_permit": {"permit_name": "revoked-one"}})
        with pytest.raises(ExecError, match="revoked"):
            bob.query(contract, {method: {**body, "auth": permit}})
        # (d) wrong contract
        permit = permit_for(bob, "secret1othercontract", [permission])
        with pytest.raises(ExecError, match="does not cover this contract"):
            bob.query(contract, {method: {**body, "auth": permit}})
        # (e) insufficient permission
        other = "owner" if permission != "owner" else "packages"
        permit = permit_for(bob, contract, [other])
        with pytest.raises(ExecError, match="lacks"):
            bob.query(contract, {method: {**body, "auth": permit}})


def test_unknown_token_reads_as_unauthorized_not_missing(nfp):
    chain, wallets, contract = nfp
    permit = permit_for(wallets["bob"], contract, ["owner"])
    with pytest.raises(ExecError, match="^unauthorized$"):
        _owner_of(wallets["bob"], contract, "424242", permit)


def test_stranger_permit_cannot_read_owner(nfp):
    chain, wallets, contract = nfp
    token_id = mint_token(wallets, contract, to=wallets["bob"].address)
    permit = permit_for(wallets["carol"], contract, ["owner"])
    with pytest.raises(ExecError, match="^unauthorized$"):
        _owner_of(wallets["carol"], contract, token_id, permit)


# --- revoke_permit ---------------------------------------------------------------


def test_revoke_unknown_name_is_noop(nfp):
    chain, wallets, contract = nfp
    result, _ = wallets["bob"].execute(
        contract, {"revoke_permit": {"permit_name": "never-issued"}}
    )
    assert result == {}


def test_permit_usable_before_unusable_after(nfp):
    chain, wallets, contract = nfp
    token_id = mint_token(wallets, contract, to=wallets["bob"].address)
    permit = permit_for(wallets["bob"], contract, ["owner"], name="session")
    assert _owner_of(wallets["bob"], contract, token_id, permit)["owner"]
    wallets["bob"].execute(contract, {"revoke_permit": {"permit_name": "session"}})
    with pytest.raises(ExecError, match="revoked"):
        _owner_of(wallets["bob"], contract, token_id, permit)


def test_revocation_is_keyed_by_signer(nfp):
    chain, wallets, contract = nfp
    t_bob = mint_token(wallets, contract, to=wallets["bob"].address)
    t_carol = mint_token(wallets, contract, to=wallets["carol"].address)
    p_bob = permit_for(wallets["bob"], contract, ["owner"], name="shared-name")
    p_carol = permit_for(wallets["carol"], contract, ["owner"], name="shared-name")
    wallets["bob"].execute(contract, {"revoke_permit": {"permit_name": "shared-name"}})
    with pytest.raises(ExecError, match="revoked"):
        _owner_of(wallets["bob"], contract, t_bob, p_bob)
    assert _owner_of(wallets["carol"], contract, t_carol, p_carol)["owner"]


# --- delegates -----------------------------------------------------------------------


def test_delegate_capability_soundness_exhaustive(nfp):
    """Execution succeeds iff the method is listed and the scope matches."""
    chain, wallets, contract = nfp
    token_id = mint_token(wallets, contract, to=wallets["bob"].address)
    delegate = wallets["carol"]

    probe_bodies = {
        "kv_put": {"token_id": token_id, "key": "probe", "value": b64(b"x")},
        "new_match": {"token_id": token_id, "wager": 0},
    }
    # probe only methods whose failure modes don't entangle game state
    for granted in sorted(DELEGABLE_METHODS):
        wallets["bob"].execute(
            contract,
            {
                "approve_delegate": {
                    "scope": {"token": {"token_id": token_id}},
                    "delegate": delegate.address,
                    "allowed_methods": [granted],
                }
            },
        )
        for method, body in probe_bodies.items():
            if method == granted:
                continue  # exercised below via the positive path
            with pytest.raises(ExecError, match="^unauthorized$"):
                delegate.execute(contract, {method: dict(body)})
        wallets["bob"].execute(
            contract,
            {
                "revoke_delegate": {
                    "scope": {"token": {"token_id": token_id}},
                    "delegate": delegate.address,
                }
            },
        )
    # positive path: granted method goes through
    wallets["bob"].execute(
        contract,
        {
            "approve_delegate": {
                "scope": {"token": {"token_id": token_id}},
                "delegate": delegate.address,
                "allowed_methods": ["kv_put"],
            }
        },
    )
    delegate.execute(contract, {"kv_put": dict(probe_bodies["kv_put"])})


def test_revoke_delegate_is_immediate(nfp):
    chain, wallets, contract = nfp
    token_id = mint_token(wallets, contract, to=wallets["bob"].address)
    grant = {
        "approve_delegate": {
            "scope": {"token": {"token_id": token_id}},
            "delegate": wallets["carol"].address,
            "allowed_methods": ["kv_put"],
        }
    }
    wallets["bob"].execute(contract, grant)
    wallets["carol"].execute(
        contract, {"kv_put": {"token_id": token_id, "key": "a", "value": b64(b"1")}}
    )
    wallets["bob"].execute(
        contract,
        {
            "revoke_delegate": {
                "scope": {"token": {"token_id": token_id}},
                "delegate": wallets["carol"].address,
            }
        },
    )
    with pytest.raises(ExecError, match="^unauthorized$"):
        wallets["carol"].execute(
            contract, {"kv_put": {"token_id": token_id, "key": "a", "value": b64(b"1")}}
        )


def test_delegate_scope_isolation(nfp):
    chain, wallets, contract = nfp
    token_a = mint_token(wallets, contract, to=wallets["bob"].address)
    token_b = mint_token(wallets, contract, to=wallets["bob"].address)
    wallets["bob"].execute(
        contract,
        {
            "approve_delegate": {
                "scope": {"token": {"token_id": token_a}},
                "delegate": wallets["carol"].address,
                "allowed_methods": ["kv_put"],
            }
        },
    )
    wallets["carol"].execute(
        contract, {"kv_put": {"token_id": token_a, "key": "x", "value": b64(b"1")}}
    )
    with pytest.raises(ExecError, match="^unauthorized$"):
        wallets["carol"].execute(
            contract, {"kv_put": {"token_id": token_b, "key": "x", "value": b64(b"1")}}
        )


def test_owner_wide_grant_covers_all_owned_tokens(nfp):
    chain, wallets, contract = nfp
    token_a = mint_token(wallets, contract, to=wallets["bob"].address)
    token_b = mint_token(wallets, contract, to=wallets["bob"].address)
    wallets["bob"].execute(
        contract,
        {
            "approve_delegate": {
                "scope": {"owner": {}},
                "delegate": wallets["carol"].address,
                "allowed_methods": ["kv_put"],
            }
        },
    )
    for tid in (token_a, token_b):
        wallets["carol"].execute(
            contract, {"kv_put": {"token_id": tid, "key": "y", "value": b64(b"2")}}
        )


def test_grant_scoped_to_unowned_token_unauthorized(nfp):
    chain, wallets, contract = nfp
    token_id = mint_token(wallets, contract, to=wallets["bob"].address)
    with pytest.raises(ExecError, match="^unauthorized$"):
        wallets["carol"].execute(
            contract,
            {
                "approve_delegate": {
                    "scope": {"token": {"token_id": token_id}},
                    "delegate": wallets["dave"].address,
                    "allowed_methods": ["kv_put"],
                }
            },
        )


# --- notifications ---------------------------------------------------------------------


def test_notification_ordering_and_since_seq(nfp):
    chain, wallets, contract = nfp
    token_id = mint_token(wallets, contract, to=wallets["bob"].address)
    # each transfer pushes one notification into the token channel
    owners = [wallets["bob"], wallets["carol"], wallets["bob"], wallets["carol"]]
    for src, dst in zip(owners, owners[1:]):
        src.execute(contract, {"transfer": {"token_id": token_id, "to": dst.address}})
    permit = permit_for(wallets["carol"], contract, ["notifications"])
    result = wallets["carol"].query(
        contract,
        {"fetch_notifications": {"token_id": token_id, "since_seq": 1, "auth": permit}},
    )
    assert [n["seq"] for n in result["notifications"]] == [2, 3]
    latest = wallets["carol"].query(
        contract,
        {"fetch_notifications": {"token_id": token_id, "since_seq": 3, "auth": permit}},
    )
    assert latest["notifications"] == []


def test_channel_isolation(nfp):
    chain, wallets, contract = nfp
    token_bob = mint_token(wallets, contract, to=wallets["bob"].address)
    wallets["bob"].execute(
        contract, {"transfer": {"token_id": token_bob, "to": wallets["dave"].address}}
    )
    permit = permit_for(wallets["carol"], contract, ["notifications"])
    with pytest.raises(ExecError, match="^unauthorized$"):
        wallets["carol"].query(
            contract,
            {
                "fetch_notifications": {
                    "token_id": token_bob,
                    "since_seq": 0,
                    "auth": permit,
                }
            },
        )


# --- kv store ------------------------------------------------------------------------------


def test_kv_round_trip(nfp):
    chain, wallets, contract = nfp
    token_id = mint_token(wallets, contract, to=wallets["bob"].address)
    wallets["bob"].execute(
        contract,
        {"kv_put": {"token_id": token_id, "key": "profile", "value": b64(b"hello")}},
    )
    permit = permit_for(wallets["bob"], contract, ["owner"])
    result = wallets["bob"].query(
        contract, {"kv_get": {"token_id": token_id, "key": "profile", "auth": permit}}
    )
    assert result == {"value": b64(b"hello")}


def test_kv_namespaced_per_token(nfp):
    chain, wallets, contract = nfp
    t1 = mint_token(wallets, contract, to=wallets["bob"].address)
    t2 = mint_token(wallets, contract, to=wallets["carol"].address)
    wallets["bob"].execute(
        contract, {"kv_put": {"token_id": t1, "key": "k", "value": b64(b"one")}}
    )
    wallets["carol"].execute(
        contract, {"kv_put": {"token_id": t2, "key": "k", "value": b64(b"two")}}
    )
    p1 = permit_for(wallets["bob"], contract, ["owner"])
    p2 = permit_for(wallets["carol"], contract, ["owner"])
    assert wallets["bob"].query(
        contract, {"kv_get": {"token_id": t1, "key": "k", "auth": p1}}
    ) == {"value": b64(b"one")}
    assert wallets["carol"].query(
        contract, {"kv_get": {"token_id": t2, "key": "k", "auth": p2}}
    ) == {"value": b64(b"two")}


def test_kv_absent_key_is_not_found_not_unauthorized(nfp):
    chain, wallets, contract = nfp
    token_id = mint_token(wallets, contract, to=wallets["bob"].address)
    permit = permit_for(wallets["bob"], contract, ["owner"])
    with pytest.raises(ExecError, match="key not found"):
        wallets["bob"].query(
            contract, {"kv_get": {"token_id": token_id, "key": "ghost", "auth": permit}}
        )


def test_kv_size_limits(nfp):
    chain, wallets, contract = nfp
    token_id = mint_token(wallets, contract, to=wallets["bob"].address)
    with pytest.raises(ExecError, match="key must be"):
        wallets["bob"].execute(
            contract,
            {"kv_put": {"token_id": token_id, "key": "k" * 257, "value": b64(b"v")}},
        )
    with pytest.raises(ExecError, match="value exceeds"):
        wallets["bob"].execute(
            contract,
            {
                "kv_put": {
                    "token_id": token_id,
                    "key": "big",
                    "value": b64(b"x" * (64 * 1024 + 1)),
                }
            },
        )


def test_ownership_uniqueness_through_history(nfp):
    chain, wallets, contract = nfp
    token_id = mint_token(wallets, contract, to=wallets["bob"].address)
    from nfp.contract.nfp import state as nfp_state

    order = ["carol", "dave", "bob"]
    holder = wallets["bob"]
    for name in order:
        holder.execute(
            contract, {"transfer": {"token_id": token_id, "to": wallets[name].address}}
        )
        holder = wallets[name]
        # exactly one owner index lists the token after each hop
        listed_by = [
            w.address
            for w in wallets.values()
            if token_id in _owned(chain, contract, w.address)
        ]
        assert listed_by == [holder.address]


def _owned(chain, contract, addr):
    """Peek at the sealed owner index via a context (test-only)."""
    from nfp.chain.gas import GasMeter
    from nfp.chain.store import ContractStorage

    storage = ContractStorage(
        chain.store,
        contract,
        chain._state_key(contract),
        GasMeter(10**9),
        chain.params,
        read_only=True,
    )
    import json

    raw = storage.get(f"owner/{addr}")
    return [] if raw is None else json.loads(raw)
