"""Token core: minting, transfer, delegation, notifications, kv store."""

from __future__ import annotations

from ...crypto import Address, Bech32Error
from ..base import ContractError, Context, NotFound, Unauthorized
from . import state
from .auth import require_token_exec_access, require_token_query_access

MAX_KV_KEY = 256
MAX_KV_VALUE = 64 * 1024


def _require_address(text) -> str:
    try:
        return str(Address.from_string(text))
    except (Bech32Error, TypeError):
        raise ContractError("invalid address") from None


def instantiate(ctx: Context, msg: dict) -> None:
    admin = _require_address(msg.get("admin"))
    minters = [_require_address(m) for m in msg.get("minters", [])]
    if not minters:
        raise ContractError("at least one minter is required")
    mint_price = msg.get("mint_price", 0)
    if not isinstance(mint_price, int) or mint_price < 0:
        raise ContractError("invalid mint price")
    state.set_config(
        ctx,
        {
            "admin": admin,
            "minters": sorted(set(minters)),
            "mint_price": mint_price,
            "next_token": 1,
            "match_counter": 0,
        },
    )


def mint(ctx: Context, body: dict) -> dict:
    config = state.get_config(ctx)
    to = _require_address(body.get("to"))
    svg = state.unb64(body.get("svg", ""))
    if not svg:
        raise ContractError("svg payload must not be empty")
    if ctx.sender not in config["minters"]:
        if ctx.funds < config["mint_price"]:
            raise ContractError(
                f"mint requires payment of {config['mint_price']} uscrt"
            )
    token_id = str(config["next_token"])
    config["next_token"] += 1
    state.set_config(ctx, config)
    state.set_token(
        ctx,
        token_id,
        {"owner": to, "minted_height": ctx.height, "cleared": []},
    )
    ctx.storage.set(f"token/{token_id}/svg", svg)
    state.set_owned_tokens(ctx, to, state.owned_tokens(ctx, to) + [token_id])
    return {"token_id": token_id}


def transfer(ctx: Context, body: dict) -> dict:
    token_id = body.get("token_id")
    token = state.get_token(ctx, token_id)
    # owner only; delegates are deliberately excluded from transfer
    if token is None or ctx.sender != token["owner"]:
        raise Unauthorized()
    to = _require_address(body.get("to"))
    prev_owner = token["owner"]

    remaining = [t for t in state.owned_tokens(ctx, prev_owner) if t != token_id]
    state.set_owned_tokens(ctx, prev_owner, remaining)
    state.set_owned_tokens(ctx, to, state.owned_tokens(ctx, to) + [token_id])

    # token-scoped delegate grants die with the sale
    grants = state.token_grants(ctx, token_id)
    for delegate in grants:
        state.bump_delegate_refcount(ctx, delegate, -1)
    if grants:
        ctx.storage.delete(f"delegate/token/{token_id}")

    # per-package choice whether clearance survives transfer
    if token["cleared"]:
        from .packages import package_index

        index = package_index(ctx)
        token["cleared"] = [
            p for p in token["cleared"]
            if not index.get(p, {}).get("reset_on_transfer", False)
        ]
    token["owner"] = to
    state.set_token(ctx, token_id, token)
    state.push_notification(
        ctx,
        token_id,
        {"kind": "transfer", "token_id": token_id, "from": prev_owner, "to": to},
    )
    return {}


def revoke_permit(ctx: Context, body: dict) -> dict:
    name = body.get("permit_name")
    if not isinstance(name, str) or not name:
        raise ContractError("permit_name required")
    state.revoke_permit_name(ctx, ctx.sender, name)
    return {}


def _parse_scope(ctx: Context, scope) -> tuple[str, str | None]:
    if isinstance(scope, dict) and "owner" in scope:
        return "owner", None
    if isinstance(scope, dict) and isinstance(scope.get("token"), dict):
        token_id = scope["token"].get("token_id")
        token = state.get_token(ctx, token_id)
        if token is None or token["owner"] != ctx.sender:
            raise Unauthorized()
        return "token", token_id
    raise ContractError("scope must be {\"owner\":{}} or {\"token\":{\"token_id\":...}}")


def approve_delegate(ctx: Context, body: dict) -> dict:
    delegate = _require_address(body.get("delegate"))
    methods = body.get("allowed_methods")
    if not isinstance(methods, list) or not methods:
        raise ContractError("allowed_methods must be a non-empty list")
    bad = sorted(set(methods) - state.DELEGABLE_METHODS)
    if bad:
        raise ContractError(f"methods not delegable: {', '.join(bad)}")
    kind, token_id = _parse_scope(ctx, body.get("scope"))
    if kind == "owner":
        grants = state.owner_grants(ctx, ctx.sender)
        if delegate not in grants:
            state.bump_delegate_refcount(ctx, delegate, +1)
        grants[delegate] = sorted(set(methods))
        state.set_owner_grants(ctx, ctx.sender, grants)
    else:
        grants = state.token_grants(ctx, token_id)
        if delegate not in grants:
            state.bump_delegate_refcount(ctx, delegate, +1)
        grants[delegate] = sorted(set(methods))
        state.set_token_grants(ctx, token_id, grants)
    return {}


def revoke_delegate(ctx: Context, body: dict) -> dict:
    delegate = _require_address(body.get("delegate"))
    kind, token_id = _parse_scope(ctx, body.get("scope"))
    if kind == "owner":
        grants = state.owner_grants(ctx, ctx.sender)
        if delegate in grants:
            del grants[delegate]
            state.bump_delegate_refcount(ctx, delegate, -1)
            state.set_owner_grants(ctx, ctx.sender, grants)
    else:
        grants = state.token_grants(ctx, token_id)
        if delegate in grants:
            del grants[delegate]
            state.bump_delegate_refcount(ctx, delegate, -1)
            state.set_token_grants(ctx, token_id, grants)
    return {}


def kv_put(ctx: Context, body: dict) -> dict:
    token_id = body.get("token_id")
    require_token_exec_access(ctx, token_id, "kv_put")
    key = body.get("key")
    if not isinstance(key, str) or not key or len(key.encode()) > MAX_KV_KEY:
        raise ContractError(f"key must be 1..{MAX_KV_KEY} bytes")
    value = state.unb64(body.get("value", ""))
    if len(value) > MAX_KV_VALUE:
        raise ContractError(f"value exceeds {MAX_KV_VALUE} bytes")
    ctx.storage.set(f"kv/{token_id}/{key}", value)
    return {}


# --- queries ------------------------------------------------------------------


def query_total_tokens(ctx: Context, body: dict) -> dict:
    return {"count": state.get_config(ctx)["next_token"] - 1}


def query_owner_of(ctx: Context, body: dict) -> dict:
    _, token = require_token_query_access(
        ctx, body.get("token_id"), body.get("auth"), "owner"
    )
    return {"owner": token["owner"]}


def query_fetch_notifications(ctx: Context, body: dict) -> dict:
    token_id = body.get("token_id")
    require_token_query_access(ctx, token_id, body.get("auth"), "notifications")
    since = body.get("since_seq", 0)
    if not isinstance(since, int) or since < 0:
        raise ContractError("since_seq must be a non-negative integer")
    return {"notifications": state.get_notifications(ctx, token_id, since)}


def query_token_svg(ctx: Context, body: dict) -> dict:
    """Owner/delegate download of the token's on-chain SVG payload."""
    token_id = body.get("token_id")
    require_token_query_access(ctx, token_id, body.get("auth"), "owner")
    svg = ctx.storage.get(f"token/{token_id}/svg")
    return {"svg": state.b64(svg)}


def query_kv_get(ctx: Context, body: dict) -> dict:
    token_id = body.get("token_id")
    require_token_query_access(ctx, token_id, body.get("auth"), "owner")
    key = body.get("key")
    if not isinstance(key, str) or not key:
        raise ContractError("key required")
    value = ctx.storage.get(f"kv/{token_id}/{key}")
    if value is None:
        raise NotFound("key not found")
    return {"value": state.b64(value)}
