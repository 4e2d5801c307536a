"""Query-permit verification and caller authorization.

Failures that would let an anonymous caller probe for the existence of
tokens or matches all collapse into a uniform Unauthorized; problems
with the caller's own credential (bad signature, revoked name, missing
permission) are reported specifically.
"""

from __future__ import annotations

from ...crypto import KeyError_, PublicKey
from ..base import Context, Unauthorized, canonical_json
from . import state


def verify_permit(ctx: Context, permit, permission: str) -> str:
    """Validate a signed query permit and return the signer address."""
    if not isinstance(permit, dict):
        raise Unauthorized("query requires a permit")
    try:
        params = permit["params"]
        pubkey = PublicKey(bytes.fromhex(permit["pubkey"]))
        signature = bytes.fromhex(permit["signature"])
        name = params["permit_name"]
        contracts = params["allowed_contracts"]
        permissions = params["permissions"]
    except (KeyError, TypeError, ValueError, KeyError_):
        raise Unauthorized("malformed permit") from None
    if params.get("chain_id") != ctx.chain_id:
        raise Unauthorized("permit signed for a different chain")
    if not pubkey.verify(canonical_json(params), signature):
        raise Unauthorized("invalid permit signature")
    if ctx.contract_address not in contracts:
        raise Unauthorized("permit does not cover this contract")
    signer = str(pubkey.address())
    if state.permit_revoked(ctx, signer, name):
        raise Unauthorized("permit revoked")
    if permission not in permissions:
        raise Unauthorized(f"permit lacks the {permission!r} permission")
    return signer


def require_token_query_access(
    ctx: Context, token_id, permit, permission: str
) -> tuple[str, dict]:
    """Permit-authenticated owner/delegate access to one token.

    Unknown tokens and non-owners get the same uniform answer.
    """
    identity = verify_permit(ctx, permit, permission)
    token = state.get_token(ctx, token_id)
    if token is None:
        raise Unauthorized()
    if identity != token["owner"] and not state.is_delegate(
        ctx, identity, token_id, token["owner"], method=None
    ):
        raise Unauthorized()
    return identity, token


def require_token_exec_access(ctx: Context, token_id, method: str) -> dict:
    """Owner or delegate (with the method listed) may execute on a token."""
    token = state.get_token(ctx, token_id)
    if token is None:
        raise Unauthorized()
    if ctx.sender != token["owner"] and not state.is_delegate(
        ctx, ctx.sender, token_id, token["owner"], method=method
    ):
        raise Unauthorized()
    return token
