"""The NFP contract: message router over token, package, and game logic.

Every message is canonical JSON with a single top-level variant key
naming the method, e.g. {"approve_delegate": {...}}. The full schema is
documented in schemas/contract_messages.md at the repo root.
"""

from __future__ import annotations

from ..base import ContractError, Context
from . import game, packages, token


class NfpContract:
    EXECUTE = {
        "mint": token.mint,
        "transfer": token.transfer,
        "revoke_permit": token.revoke_permit,
        "approve_delegate": token.approve_delegate,
        "revoke_delegate": token.revoke_delegate,
        "kv_put": token.kv_put,
        "upload_package": packages.upload_package,
        "set_cleared": packages.set_cleared,
        "new_match": game.new_match,
        "join_match": game.join_match,
        "submit_setup": game.submit_setup,
        "attack": game.attack,
    }

    QUERY = {
        "total_tokens": token.query_total_tokens,
        "owner_of": token.query_owner_of,
        "token_svg": token.query_token_svg,
        "fetch_notifications": token.query_fetch_notifications,
        "kv_get": token.query_kv_get,
        "get_package": packages.query_get_package,
        "list_packages": packages.query_list_packages,
        "list_open_matches": game.query_list_open_matches,
        "match_state": game.query_match_state,
    }

    def instantiate(self, ctx: Context, msg: dict) -> None:
        token.instantiate(ctx, msg)

    def execute(self, ctx: Context, msg: dict) -> dict:
        return self._dispatch(self.EXECUTE, ctx, msg)

    def query(self, ctx: Context, msg: dict) -> dict:
        return self._dispatch(self.QUERY, ctx, msg)

    @staticmethod
    def _dispatch(table: dict, ctx: Context, msg: dict) -> dict:
        if not isinstance(msg, dict) or len(msg) != 1:
            raise ContractError("message must have exactly one method key")
        method, body = next(iter(msg.items()))
        handler = table.get(method)
        if handler is None:
            raise ContractError(f"unknown method {method!r}")
        if not isinstance(body, dict):
            raise ContractError("method body must be an object")
        return handler(ctx, body)
