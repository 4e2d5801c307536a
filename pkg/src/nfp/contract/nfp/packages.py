"""On-chain package manager: immutable tagged versions behind four
access specifiers (public / owners / cleared / token)."""

from __future__ import annotations

import gzip

from ..base import ContractError, Context, NotFound, Unauthorized
from . import state
from .auth import verify_permit

ACCESS_SPECIFIERS = ("public", "owners", "cleared", "token")
MAX_PACKAGE_ID = 128


def package_index(ctx: Context) -> dict:
    return ctx.get_json("pkg/index") or {}


def _set_package_index(ctx: Context, index: dict) -> None:
    ctx.set_json("pkg/index", index)


def _version_meta(ctx: Context, package_id: str, serial: int) -> dict | None:
    return ctx.get_json(f"pkg/{package_id}/v/{serial}")


def _tag_serial(ctx: Context, package_id: str, tag: str) -> int | None:
    return ctx.get_json(f"pkg/{package_id}/tag/{tag}")


def _package_tags(ctx: Context, package_id: str) -> list[str]:
    return ctx.get_json(f"pkg/{package_id}/tags") or []


def _validate_tags(tags) -> list[str]:
    if tags is None:
        return []
    if not isinstance(tags, list) or any(
        not isinstance(t, str) or not t for t in tags
    ):
        raise ContractError("tags must be non-empty strings")
    return sorted(set(tags))


def _append_version(
    ctx: Context,
    package_id: str,
    access: str,
    data: bytes,
    content_encoding: str,
    tags: list[str],
    metadata: dict,
    bound_token: str | None,
    reset_on_transfer: bool,
) -> int:
    index = package_index(ctx)
    entry = index.get(package_id)
    if entry is None:
        entry = {
            "access": access,
            "bound_token": bound_token,
            "latest_serial": 0,
            "reset_on_transfer": reset_on_transfer,
        }
    else:
        if entry["access"] != access:
            raise ContractError("access specifier cannot be changed")
        if entry["bound_token"] != bound_token:
            raise ContractError("token binding cannot be changed")
    serial = entry["latest_serial"] + 1
    entry["latest_serial"] = serial
    index[package_id] = entry
    _set_package_index(ctx, index)
    ctx.set_json(
        f"pkg/{package_id}/v/{serial}",
        {
            "content_encoding": content_encoding,
            "tags": tags,
            "metadata": metadata,
            "uploaded_height": ctx.height,
        },
    )
    ctx.storage.set(f"pkg/{package_id}/v/{serial}/data", data)
    all_tags = set(_package_tags(ctx, package_id))
    for tag in tags:
        # append-only tag claims: newest serial wins, old versions keep theirs
        ctx.set_json(f"pkg/{package_id}/tag/{tag}", serial)
        all_tags.add(tag)
    if tags:
        ctx.set_json(f"pkg/{package_id}/tags", sorted(all_tags))
    return serial


def upload_package(ctx: Context, body: dict) -> dict:
    if not state.is_admin(ctx, ctx.sender):
        raise Unauthorized()
    package_id = body.get("package_id")
    if (
        not isinstance(package_id, str)
        or not package_id
        or len(package_id.encode()) > MAX_PACKAGE_ID
    ):
        raise ContractError(f"package_id must be 1..{MAX_PACKAGE_ID} bytes")
    access = body.get("access")
    if access not in ACCESS_SPECIFIERS:
        raise ContractError("access must be one of public, owners, cleared, token")
    if access == "token":
        raise ContractError(
            "admins may not publish packages with the token specifier"
        )
    encoding = body.get("content_encoding", "none")
    if encoding not in ("none", "gzip"):
        raise ContractError("content_encoding must be 'none' or 'gzip'")
    data = state.unb64(body.get("data", ""))
    if encoding == "gzip":
        try:
            gzip.decompress(data)
        except Exception:
            raise ContractError("data does not decode as gzip") from None
    metadata = body.get("metadata") or {}
    if not isinstance(metadata, dict) or any(
        not isinstance(k, str) or not isinstance(v, str) for k, v in metadata.items()
    ):
        raise ContractError("metadata must be a string map")
    serial = _append_version(
        ctx,
        package_id,
        access,
        data,
        encoding,
        _validate_tags(body.get("tags")),
        metadata,
        bound_token=None,
        reset_on_transfer=bool(body.get("reset_on_transfer", False)),
    )
    return {"serial": serial}


def publish_token_package(
    ctx: Context, token_id: str, package_id: str, data: bytes, tags: list[str]
) -> int:
    """Contract-logic-only path for token-specifier packages.

    Not reachable from the message router; callers are other contract
    modules (e.g. the game awarding a per-token package).
    """
    return _append_version(
        ctx,
        package_id,
        "token",
        data,
        "none",
        _validate_tags(tags),
        {},
        bound_token=token_id,
        reset_on_transfer=False,
    )


def set_cleared(ctx: Context, body: dict) -> dict:
    if not state.is_admin(ctx, ctx.sender):
        raise Unauthorized()
    package_id = body.get("package_id")
    entry = package_index(ctx).get(package_id)
    if entry is None:
        raise NotFound("package not found")
    if entry["access"] != "cleared":
        raise ContractError("package does not use the cleared specifier")
    token_id = body.get("token_id")
    token = state.get_token(ctx, token_id)
    if token is None:
        raise NotFound("token not found")
    if package_id not in token["cleared"]:
        token["cleared"] = sorted(token["cleared"] + [package_id])
        state.set_token(ctx, token_id, token)
    return {}


def clear_token_for_package(ctx: Context, token_id: str, package_id: str) -> None:
    """Internal hook: contract logic approving a token for a cleared package."""
    token = state.get_token(ctx, token_id)
    if token is None:
        raise NotFound("token not found")
    if package_id not in token["cleared"]:
        token["cleared"] = sorted(token["cleared"] + [package_id])
        state.set_token(ctx, token_id, token)


# --- read access ------------------------------------------------------------------


def _caller_identity(ctx: Context, auth) -> str | None:
    if auth is None:
        return None
    return verify_permit(ctx, auth, "packages")


def _may_read(ctx: Context, identity: str | None, entry: dict) -> bool:
    access = entry["access"]
    if access == "public":
        return True
    if identity is None:
        return False
    admin = state.is_admin(ctx, identity)
    if access == "owners":
        return (
            admin
            or state.owns_any_token(ctx, identity)
            or state.delegate_refcount(ctx, identity) > 0
        )
    if access == "cleared":
        if admin:
            return True
        package_id = entry["package_id"]
        return any(
            package_id in (state.get_token(ctx, t) or {}).get("cleared", [])
            for t in state.owned_tokens(ctx, identity)
        )
    if access == "token":
        bound = entry["bound_token"]
        token = state.get_token(ctx, bound)
        if token is None:
            return False
        return identity == token["owner"] or state.is_delegate(
            ctx, identity, bound, token["owner"], method=None
        )
    return False


def query_get_package(ctx: Context, body: dict) -> dict:
    identity = _caller_identity(ctx, body.get("auth"))
    package_id = body.get("package_id")
    entry = package_index(ctx).get(package_id) if isinstance(package_id, str) else None
    if entry is None:
        # only authenticated owners/admins may learn that an id is unused
        if identity is not None and (
            state.is_admin(ctx, identity) or state.owns_any_token(ctx, identity)
        ):
            raise NotFound("package not found")
        raise Unauthorized()
    entry = {**entry, "package_id": package_id}
    if not _may_read(ctx, identity, entry):
        raise Unauthorized()

    selector = body.get("selector")
    if not isinstance(selector, dict) or len(selector) != 1:
        raise ContractError("selector must be {\"serial\": n} or {\"tag\": t}")
    if "serial" in selector:
        serial = selector["serial"]
        if not isinstance(serial, int):
            raise ContractError("serial must be an integer")
    else:
        tag = selector.get("tag")
        if not isinstance(tag, str):
            raise ContractError("selector must be {\"serial\": n} or {\"tag\": t}")
        serial = _tag_serial(ctx, package_id, tag)
        if serial is None:
            raise NotFound(f"no version tagged {tag!r}")
    meta = _version_meta(ctx, package_id, serial)
    if meta is None:
        raise NotFound(f"no version with serial {serial}")
    data = ctx.storage.get(f"pkg/{package_id}/v/{serial}/data")
    return {
        "package_id": package_id,
        "serial": serial,
        "access": entry["access"],
        "content_encoding": meta["content_encoding"],
        "tags": meta["tags"],
        "metadata": meta["metadata"],
        "data": state.b64(data),
    }


def query_list_packages(ctx: Context, body: dict) -> dict:
    identity = _caller_identity(ctx, body.get("auth"))
    out = []
    for package_id, entry in sorted(package_index(ctx).items()):
        if _may_read(ctx, identity, {**entry, "package_id": package_id}):
            out.append(
                {
                    "package_id": package_id,
                    "access": entry["access"],
                    "latest_serial": entry["latest_serial"],
                    "tags": _package_tags(ctx, package_id),
                }
            )
    return {"packages": out}
