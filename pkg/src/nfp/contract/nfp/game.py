"""Hidden-information two-player game: lobby, wagers, boards, turns.

Boards never leave sealed storage unfiltered. A player's view of the
match is reconstructed purely from their own board, their own shot log,
and the reveal records created when a vehicle is fully destroyed, so two
matches that differ only in un-attacked opponent cells produce
byte-identical views.
"""

from __future__ import annotations

from ..base import ContractError, Context, NotFound, Unauthorized, canonical_json
from . import state
from .auth import require_token_exec_access, require_token_query_access
from .packages import publish_token_package

GRID = 10
VEHICLES = {
    "carrier": 5,
    "battleship": 4,
    "cruiser": 3,
    "submarine": 3,
    "destroyer": 2,
}
TOTAL_VEHICLE_CELLS = sum(VEHICLES.values())  # 17


def _cell_key(x: int, y: int) -> str:
    return f"{x},{y}"


def _first_player_bit(ctx: Context, match_id: str) -> int:
    """Starter draw over seed, match id, and the sealed block hash.

    Deliberately independent of the setup transaction's own bytes, so the
    draw cannot be a function of either submitted board.
    """
    import hashlib

    digest = hashlib.sha256(
        ctx.contract_seed + match_id.encode() + ctx.block_hash
    ).digest()
    return digest[-1] & 1


def validate_placements(placements) -> dict[str, str]:
    """Check a full board layout; returns cell -> vehicle type.

    Raises ContractError with the first rule violated: wrong vehicle set,
    out-of-grid cells, or overlaps.
    """
    if not isinstance(placements, list) or len(placements) != len(VEHICLES):
        raise ContractError(f"exactly {len(VEHICLES)} placements required")
    seen_types = set()
    cells: dict[str, str] = {}
    for item in placements:
        if not isinstance(item, dict):
            raise ContractError("placement must be an object")
        vtype = item.get("vehicle_type")
        if vtype not in VEHICLES:
            raise ContractError(f"unknown vehicle type {vtype!r}")
        if vtype in seen_types:
            raise ContractError(f"duplicate vehicle type {vtype!r}")
        seen_types.add(vtype)
        origin = item.get("origin")
        orientation = item.get("orientation")
        if (
            not isinstance(origin, list)
            or len(origin) != 2
            or not all(isinstance(v, int) for v in origin)
        ):
            raise ContractError("origin must be [x, y] integers")
        if orientation not in ("horizontal", "vertical"):
            raise ContractError("orientation must be horizontal or vertical")
        x, y = origin
        dx, dy = (1, 0) if orientation == "horizontal" else (0, 1)
        for i in range(VEHICLES[vtype]):
            cx, cy = x + dx * i, y + dy * i
            if not (0 <= cx < GRID and 0 <= cy < GRID):
                raise ContractError(f"{vtype} extends outside the grid")
            key = _cell_key(cx, cy)
            if key in cells:
                raise ContractError(f"placements overlap at ({cx},{cy})")
            cells[key] = vtype
    return cells


# --- storage accessors ---------------------------------------------------------


def _get_match(ctx: Context, match_id) -> dict | None:
    if not isinstance(match_id, str):
        return None
    return ctx.get_json(f"game/match/{match_id}")


def _set_match(ctx: Context, match: dict) -> None:
    ctx.set_json(f"game/match/{match['match_id']}", match)


def _get_board(ctx: Context, match_id: str, idx: int) -> dict | None:
    return ctx.get_json(f"game/board/{match_id}/{idx}")


def _set_board(ctx: Context, match_id: str, idx: int, board: dict) -> None:
    ctx.set_json(f"game/board/{match_id}/{idx}", board)


def _get_shots(ctx: Context, match_id: str, idx: int) -> dict:
    return ctx.get_json(f"game/shots/{match_id}/{idx}") or {}


def _set_shots(ctx: Context, match_id: str, idx: int, shots: dict) -> None:
    ctx.set_json(f"game/shots/{match_id}/{idx}", shots)


def _get_revealed(ctx: Context, match_id: str, idx: int) -> list:
    return ctx.get_json(f"game/revealed/{match_id}/{idx}") or []


def _set_revealed(ctx: Context, match_id: str, idx: int, revealed: list) -> None:
    ctx.set_json(f"game/revealed/{match_id}/{idx}", revealed)


def _lobby(ctx: Context) -> list[str]:
    return ctx.get_json("game/lobby") or []


def _set_lobby(ctx: Context, lobby: list[str]) -> None:
    ctx.set_json("game/lobby", lobby)


def _active_match(ctx: Context, token_id: str) -> str | None:
    raw = ctx.storage.get(f"game/active/{token_id}")
    return raw.decode() if raw else None


def _participant_index(match: dict, token_id: str) -> int | None:
    for idx, player in enumerate(match["players"]):
        if player["token"] == token_id:
            return idx
    return None


# --- executions ---------------------------------------------------------------


def new_match(ctx: Context, body: dict) -> dict:
    token_id = body.get("token_id")
    require_token_exec_access(ctx, token_id, "new_match")
    wager = body.get("wager", 0)
    if not isinstance(wager, int) or wager < 0:
        raise ContractError("wager must be a non-negative integer")
    if ctx.funds != wager:
        raise ContractError(
            f"attached funds ({ctx.funds}) must equal the wager ({wager})"
        )
    if _active_match(ctx, token_id) is not None:
        raise ContractError("token already has an active match")

    config = state.get_config(ctx)
    config["match_counter"] += 1
    state.set_config(ctx, config)
    match_id = ctx.entropy(
        b"match-id", config["match_counter"].to_bytes(8, "big")
    )[:8].hex()

    match = {
        "match_id": match_id,
        "phase": "open",
        "wager": wager,
        "created_height": ctx.height,
        "players": [{"token": token_id}],
        "submitted": [False, False],
        "turn": None,
        "winner": None,
        "log": [],
    }
    _set_match(ctx, match)
    ctx.storage.set(f"game/active/{token_id}", match_id.encode())
    _set_lobby(ctx, _lobby(ctx) + [match_id])
    return {"match_id": match_id}


def join_match(ctx: Context, body: dict) -> dict:
    token_id = body.get("token_id")
    require_token_exec_access(ctx, token_id, "join_match")
    match = _get_match(ctx, body.get("match_id"))
    if match is None:
        raise NotFound("match not found")
    if match["phase"] != "open":
        raise ContractError("match is not open")
    if match["players"][0]["token"] == token_id:
        raise ContractError("cannot join your own match")
    if ctx.funds != match["wager"]:
        raise ContractError(
            f"attached funds ({ctx.funds}) must equal the wager ({match['wager']})"
        )
    if _active_match(ctx, token_id) is not None:
        raise ContractError("token already has an active match")

    match["players"].append({"token": token_id})
    match["phase"] = "setup"
    _set_match(ctx, match)
    ctx.storage.set(f"game/active/{token_id}", match["match_id"].encode())
    _set_lobby(ctx, [m for m in _lobby(ctx) if m != match["match_id"]])
    for player in match["players"]:
        state.push_notification(
            ctx,
            player["token"],
            {"kind": "match_joined", "match_id": match["match_id"]},
        )
    return {}


def submit_setup(ctx: Context, body: dict) -> dict:
    match = _get_match(ctx, body.get("match_id"))
    if match is None:
        raise Unauthorized()
    idx = None
    for candidate, player in enumerate(match["players"]):
        token = state.get_token(ctx, player["token"])
        if ctx.sender == token["owner"] or state.is_delegate(
            ctx, ctx.sender, player["token"], token["owner"], "submit_setup"
        ):
            idx = candidate
            break
    if idx is None:
        raise Unauthorized()
    if match["phase"] != "setup":
        raise ContractError("match is not in the setup phase")
    if match["submitted"][idx]:
        raise ContractError("board already submitted")

    cells = validate_placements(body.get("placements"))
    _set_board(
        ctx,
        match["match_id"],
        idx,
        {"placements": body["placements"], "cells": cells, "hits": []},
    )
    match["submitted"][idx] = True
    response = {"phase": match["phase"]}
    if all(match["submitted"]):
        match["phase"] = "playing"
        first = _first_player_bit(ctx, match["match_id"])
        match["turn"] = first
        response = {"phase": "playing"}
        for player in match["players"]:
            state.push_notification(
                ctx,
                player["token"],
                {
                    "kind": "match_started",
                    "match_id": match["match_id"],
                    "first_token": match["players"][first]["token"],
                },
            )
    _set_match(ctx, match)
    return response


def attack(ctx: Context, body: dict) -> dict:
    match = _get_match(ctx, body.get("match_id"))
    if match is None:
        raise Unauthorized()
    idx = None
    for candidate, player in enumerate(match["players"]):
        token = state.get_token(ctx, player["token"])
        if token and (
            ctx.sender == token["owner"]
            or state.is_delegate(
                ctx, ctx.sender, player["token"], token["owner"], "attack"
            )
        ):
            idx = candidate
            break
    if idx is None:
        raise Unauthorized()
    if match["phase"] != "playing":
        raise ContractError("match is not in the playing phase")
    if match["turn"] != idx:
        raise ContractError("not your turn")

    cell = body.get("cell")
    if (
        not isinstance(cell, list)
        or len(cell) != 2
        or not all(isinstance(v, int) for v in cell)
        or not all(0 <= v < GRID for v in cell)
    ):
        raise ContractError("cell must be [x, y] within the grid")
    key = _cell_key(*cell)
    shots = _get_shots(ctx, match["match_id"], idx)
    if key in shots:
        raise ContractError("cell already attacked")

    opponent = 1 - idx
    board = _get_board(ctx, match["match_id"], opponent)
    hit = key in board["cells"]
    destroyed = None
    game_over = False
    if hit:
        board["hits"] = sorted(set(board["hits"]) | {key})
        vtype = board["cells"][key]
        vehicle_cells = sorted(
            c for c, t in board["cells"].items() if t == vtype
        )
        if all(c in board["hits"] for c in vehicle_cells):
            destroyed = {"vehicle_type": vtype, "cells": vehicle_cells}
            revealed = _get_revealed(ctx, match["match_id"], idx)
            _set_revealed(ctx, match["match_id"], idx, revealed + [destroyed])
        if len(board["hits"]) == TOTAL_VEHICLE_CELLS:
            game_over = True
        _set_board(ctx, match["match_id"], opponent, board)

    shots[key] = "hit" if hit else "miss"
    _set_shots(ctx, match["match_id"], idx, shots)
    match["log"].append(
        {
            "player": idx,
            "cell": cell,
            "result": "hit" if hit else "miss",
            "destroyed": destroyed,
            "height": ctx.height,
        }
    )

    if game_over:
        match["phase"] = "finished"
        match["winner"] = idx
        match["turn"] = None
        winner_token = match["players"][idx]["token"]
        payout = 2 * match["wager"]
        if payout:
            winner_owner = state.get_token(ctx, winner_token)["owner"]
            ctx.send(winner_owner, payout)
        for player in match["players"]:
            ctx.storage.delete(f"game/active/{player['token']}")
        publish_token_package(
            ctx,
            winner_token,
            f"token/{winner_token}/trophy",
            canonical_json(
                {
                    "kind": "match_trophy",
                    "match_id": match["match_id"],
                    "height": ctx.height,
                    "moves": len(match["log"]),
                }
            ),
            tags=["latest"],
        )
    else:
        match["turn"] = opponent
    _set_match(ctx, match)

    state.push_notification(
        ctx,
        match["players"][opponent]["token"],
        {
            "kind": "attack",
            "match_id": match["match_id"],
            "cell": cell,
            "result": "hit" if hit else "miss",
            "destroyed": destroyed,
            "game_over": game_over,
        },
    )
    return {
        "result": "hit" if hit else "miss",
        "destroyed": destroyed,
        "game_over": game_over,
    }


# --- queries -------------------------------------------------------------------


def query_list_open_matches(ctx: Context, body: dict) -> dict:
    out = []
    for match_id in _lobby(ctx):
        match = _get_match(ctx, match_id)
        if match and match["phase"] == "open":
            out.append(
                {
                    "match_id": match_id,
                    "wager": match["wager"],
                    "created_height": match["created_height"],
                }
            )
    return {"matches": out}


def query_match_state(ctx: Context, body: dict) -> dict:
    token_id = body.get("token_id")
    require_token_query_access(ctx, token_id, body.get("auth"), "game_state")
    match = _get_match(ctx, body.get("match_id"))
    if match is None:
        raise Unauthorized()
    idx = _participant_index(match, token_id)
    if idx is None:
        raise Unauthorized()

    board = _get_board(ctx, match["match_id"], idx)
    my_board = None
    if board is not None:
        my_board = {
            "placements": board["placements"],
            "hits_against_me": board["hits"],
        }
    turn = None
    if match["turn"] is not None:
        turn = "you" if match["turn"] == idx else "opponent"
    winner = None
    if match["winner"] is not None:
        winner = "you" if match["winner"] == idx else "opponent"
    return {
        "match_id": match["match_id"],
        "phase": match["phase"],
        "wager": match["wager"],
        "created_height": match["created_height"],
        "turn": turn,
        "winner": winner,
        "submitted": match["submitted"][idx],
        "opponent_submitted": match["submitted"][1 - idx],
        "my_board": my_board,
        "opponent_board": {
            "shots": {k: v for k, v in sorted(_get_shots(ctx, match["match_id"], idx).items())},
            "destroyed": _get_revealed(ctx, match["match_id"], idx),
        },
    }
