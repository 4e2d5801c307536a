"""Storage layout and record accessors for the NFP contract.

All records are canonical JSON under string keys; the chain seals them
at rest. Nothing here checks authorization.
"""

from __future__ import annotations

import base64

from ..base import ContractError, Context, canonical_json

DELEGABLE_METHODS = frozenset(
    {"new_match", "join_match", "submit_setup", "attack", "kv_put"}
)

PERMIT_PERMISSIONS = frozenset({"owner", "packages", "notifications", "game_state"})


def b64(data: bytes) -> str:
    return base64.b64encode(data).decode("ascii")


def unb64(text: str) -> bytes:
    try:
        return base64.b64decode(text, validate=True)
    except Exception:
        raise ContractError("invalid base64 payload") from None


# --- config -----------------------------------------------------------------

def get_config(ctx: Context) -> dict:
    config = ctx.get_json("config")
    if config is None:
        raise ContractError("contract not initialized")
    return config


def set_config(ctx: Context, config: dict) -> None:
    ctx.set_json("config", config)


def is_admin(ctx: Context, addr: str | None) -> bool:
    return addr is not None and addr == get_config(ctx)["admin"]


# --- tokens -------------------------------------------------------------------

def token_key(token_id: str) -> str:
    return f"token/{token_id}"


def get_token(ctx: Context, token_id: str) -> dict | None:
    if not isinstance(token_id, str):
        return None
    return ctx.get_json(token_key(token_id))


def set_token(ctx: Context, token_id: str, record: dict) -> None:
    ctx.set_json(token_key(token_id), record)


def owned_tokens(ctx: Context, addr: str) -> list[str]:
    return ctx.get_json(f"owner/{addr}") or []


def set_owned_tokens(ctx: Context, addr: str, token_ids: list[str]) -> None:
    ctx.set_json(f"owner/{addr}", sorted(token_ids, key=lambda t: (len(t), t)))


def owns_any_token(ctx: Context, addr: str) -> bool:
    return bool(owned_tokens(ctx, addr))


# --- delegate grants ------------------------------------------------------------

def owner_grants(ctx: Context, owner: str) -> dict:
    return ctx.get_json(f"delegate/owner/{owner}") or {}


def token_grants(ctx: Context, token_id: str) -> dict:
    return ctx.get_json(f"delegate/token/{token_id}") or {}


def set_owner_grants(ctx: Context, owner: str, grants: dict) -> None:
    ctx.set_json(f"delegate/owner/{owner}", grants)


def set_token_grants(ctx: Context, token_id: str, grants: dict) -> None:
    ctx.set_json(f"delegate/token/{token_id}", grants)


def delegate_refcount(ctx: Context, addr: str) -> int:
    return ctx.get_json(f"delegate/of/{addr}") or 0


def bump_delegate_refcount(ctx: Context, addr: str, delta: int) -> None:
    ctx.set_json(f"delegate/of/{addr}", max(0, delegate_refcount(ctx, addr) + delta))


def is_delegate(
    ctx: Context, caller: str, token_id: str, owner: str, method: str | None
) -> bool:
    """Token- or owner-scoped grant covering the caller.

    method=None is the query-level check: any grant on the token (or from
    its current owner) admits the delegate to private reads for it.
    Execute paths pass the method name, which must be listed.
    """
    for grants in (token_grants(ctx, token_id), owner_grants(ctx, owner)):
        methods = grants.get(caller)
        if methods is None:
            continue
        if method is None or method in methods:
            return True
    return False


# --- permit revocation -------------------------------------------------------------

def permit_revoked(ctx: Context, addr: str, name: str) -> bool:
    return ctx.storage.get(f"permit_revoked/{addr}/{name}") is not None


def revoke_permit_name(ctx: Context, addr: str, name: str) -> None:
    ctx.storage.set(f"permit_revoked/{addr}/{name}", b"1")


# --- notifications -----------------------------------------------------------------

def notification_count(ctx: Context, token_id: str) -> int:
    return ctx.get_json(f"notif/{token_id}/len") or 0


def push_notification(ctx: Context, token_id: str, payload: dict) -> int:
    """Internal-only append to a token's private channel."""
    seq = notification_count(ctx, token_id) + 1
    ctx.set_json(
        f"notif/{token_id}/{seq}",
        {"payload": b64(canonical_json(payload)), "height": ctx.height},
    )
    ctx.set_json(f"notif/{token_id}/len", seq)
    return seq


def get_notifications(ctx: Context, token_id: str, since_seq: int) -> list[dict]:
    latest = notification_count(ctx, token_id)
    out = []
    for seq in range(max(0, since_seq) + 1, latest + 1):
        record = ctx.get_json(f"notif/{token_id}/{seq}")
        out.append({"seq": seq, **record})
    return out
