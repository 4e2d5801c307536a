"""Operator CLI: run the sim, mint tokens, publish packages, play matches.

Exit codes: 0 success, 2 user error, 3 contract/chain rejection,
4 transport failure.
"""

from __future__ import annotations

import base64
import gzip
import json
import sys
from pathlib import Path

import click

from ..chain import GasParams, TxRejected
from ..client import ExecError, HttpBackend, TransportError, Wallet
from ..contract.base import canonical_json
from ..crypto import Address, Bech32Error, PrivateKey
from ..svgtool import DEFAULT_TRAITS, NfpMetadata, SvgTemplate, build_svg, bundle_package
from . import statefile
from .statefile import FileBackend, StateFileError

EXIT_CONTRACT = 3
EXIT_TRANSPORT = 4


class Session:
    def __init__(self, state: str, endpoint: str | None, keys_path: str, output: str,
                 deterministic: bool = False):
        self.state_path = state
        self.endpoint = endpoint
        self.keys_path = Path(keys_path)
        self.output = output
        self.deterministic = deterministic
        self._backend = None
        self._lock = None

    def keys(self) -> dict[str, str]:
        if self.keys_path.exists():
            return json.loads(self.keys_path.read_text())
        return {}

    def save_keys(self, keys: dict[str, str]) -> None:
        self.keys_path.parent.mkdir(parents=True, exist_ok=True)
        self.keys_path.write_text(json.dumps(keys, indent=2, sort_keys=True) + "\n")

    def privkey(self, name: str) -> PrivateKey:
        keys = self.keys()
        if name not in keys:
            raise click.UsageError(
                f"no key named {name!r} in {self.keys_path} (run `nfp keys add {name}`)"
            )
        return PrivateKey(bytes.fromhex(keys[name]))

    def resolve_address(self, value: str) -> str:
        """Accept a bech32 address or a local key name."""
        try:
            return str(Address.from_string(value))
        except Bech32Error:
            keys = self.keys()
            if value in keys:
                return str(PrivateKey(bytes.fromhex(keys[value])).address())
            raise click.UsageError(f"{value!r} is neither an address nor a key name")

    def backend(self):
        if self._backend is None:
            if self.endpoint:
                self._backend = HttpBackend(self.endpoint)
            else:
                self._lock = statefile.acquire_lock(self.state_path)
                self._backend = FileBackend(self.state_path)
        return self._backend

    def close(self):
        if self._lock is not None:
            self._lock.release()
            self._lock = None

    def wallet(self, key_name: str) -> Wallet:
        rng = None
        if self.deterministic:
            import random

            rng = random.Random(f"nfp-det-wallet:{key_name}")
        return Wallet(self.privkey(key_name), self.backend(), rng=rng)

    def anonymous_wallet(self) -> Wallet:
        rng = None
        if self.deterministic:
            import random

            rng = random.Random("nfp-det-wallet:anonymous")
        return Wallet(PrivateKey.from_seed(b"anonymous-query"), self.backend(), rng=rng)

    def contract_address(self) -> str:
        backend = self.backend()
        if hasattr(backend, "chain"):
            for addr, label in backend.chain.contract_labels.items():
                if label == "nfp":
                    return addr
            raise click.UsageError("no nfp contract on this chain")
        raise click.UsageError("pass --contract when using --endpoint")

    def emit(self, payload) -> None:
        if self.output == "json":
            click.echo(json.dumps(payload, indent=2, sort_keys=True))
        else:
            _emit_table(payload)


def _emit_table(payload) -> None:
    if isinstance(payload, dict):
        for key, value in payload.items():
            click.echo(f"{key}: {json.dumps(value) if isinstance(value, (dict, list)) else value}")
    elif isinstance(payload, list):
        for item in payload:
            _emit_table(item)
            click.echo("-")
    else:
        click.echo(payload)


def run_guarded(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (ExecError, TxRejected, StateFileError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_CONTRACT)
    except TransportError as exc:
        click.echo(f"transport error: {exc}", err=True)
        sys.exit(EXIT_TRANSPORT)


pass_session = click.make_pass_decorator(Session)


@click.group()
@click.option("--state", default="chain.jsonl", show_default=True,
              help="Chain state file (local mode).")
@click.option("--endpoint", default=None, help="HTTP endpoint of a running sim.")
@click.option("--keys", default="keys.json", show_default=True, help="Key file.")
@click.option("--output", type=click.Choice(["json", "table"]), default="json",
              show_default=True)
@click.option("--contract", "contract_override", default=None,
              help="NFP contract address (required with --endpoint).")
@click.option("--deterministic-wallets", is_flag=True,
              help="Derive envelope randomness from key names; makes scripted "
                   "replays bit-reproducible. Test/replay use only.")
@click.pass_context
def cli(ctx, state, endpoint, keys, output, contract_override, deterministic_wallets):
    """Desk-scale Non-Fungible Program chain simulator."""
    session = Session(state, endpoint, keys, output,
                      deterministic=deterministic_wallets)
    if contract_override:
        session.contract_address = lambda: contract_override
    ctx.obj = session
    ctx.call_on_close(session.close)


# --- chain lifecycle ------------------------------------------------------------


@cli.command()
@pass_session
@click.option("--chain-id", default="nfp-sim-1", show_default=True)
@click.option("--seed", default="dev-seed", show_default=True,
              help="Deterministic chain seed.")
@click.option("--account", "accounts", multiple=True,
              help="NAME=BALANCE; creates the key if missing.")
@click.option("--admin", default=None, help="Admin key name (default: first account).")
@click.option("--mint-price", default=1000, show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="JSON chain config: chain_id, seed, gas_params, accounts, "
                   "mint_price, admin. Flags override nothing it sets.")
def init(session, chain_id, seed, accounts, admin, mint_price, config_path):
    """Create a fresh chain state file and instantiate the NFP contract."""
    gas_params = GasParams()
    if config_path:
        config = json.loads(Path(config_path).read_text())
        chain_id = config.get("chain_id", chain_id)
        seed = config.get("seed", seed)
        mint_price = config.get("mint_price", mint_price)
        admin = config.get("admin", admin)
        if config.get("accounts"):
            accounts = tuple(
                f"{name}={balance}" for name, balance in config["accounts"].items()
            )
        if config.get("gas_params"):
            base = gas_params.to_dict()
            base.update(config["gas_params"])
            gas_params = GasParams.from_dict(base)
    if not accounts:
        accounts = ("alice=100000000", "bob=100000000")
    keys = session.keys()
    genesis = []
    names = []
    for spec in accounts:
        name, _, balance = spec.partition("=")
        if not balance.isdigit():
            raise click.UsageError(f"bad --account {spec!r}, want NAME=BALANCE")
        if name not in keys:
            keys[name] = PrivateKey.from_seed(f"{seed}:{name}".encode()).to_bytes().hex()
        genesis.append((str(PrivateKey(bytes.fromhex(keys[name])).address()), int(balance)))
        names.append(name)
    session.save_keys(keys)
    admin = admin or names[0]
    if admin not in keys:
        raise click.UsageError(f"admin key {admin!r} not among accounts")
    admin_addr = str(PrivateKey(bytes.fromhex(keys[admin])).address())

    def _do():
        chain = statefile.create(
            session.state_path,
            gas_params,
            genesis,
            chain_id,
            seed,
            instantiations=[
                {
                    "label": "nfp",
                    "init": {
                        "admin": admin_addr,
                        "minters": [admin_addr],
                        "mint_price": mint_price,
                    },
                    "sender": admin_addr,
                }
            ],
        )
        contract = next(iter(chain.contract_labels))
        session.emit(
            {
                "chain_id": chain_id,
                "state_file": str(session.state_path),
                "contract": contract,
                "accounts": {n: a for n, (a, _) in zip(names, genesis)},
            }
        )

    run_guarded(_do)


@cli.group()
def keys():
    """Manage local signing keys."""


@keys.command("add")
@pass_session
@click.argument("name")
@click.option("--from-seed", "seed_phrase", default=None,
              help="Derive deterministically from a seed phrase.")
def keys_add(session, name, seed_phrase):
    store = session.keys()
    if name in store:
        raise click.UsageError(f"key {name!r} already exists")
    if seed_phrase:
        priv = PrivateKey.from_seed(seed_phrase.encode())
    else:
        priv = PrivateKey.generate()
    store[name] = priv.to_bytes().hex()
    session.save_keys(store)
    session.emit({"name": name, "address": str(priv.address())})


@keys.command("show")
@pass_session
@click.argument("name")
def keys_show(session, name):
    priv = session.privkey(name)
    session.emit({"name": name, "address": str(priv.address())})


@keys.command("list")
@pass_session
def keys_list(session):
    out = {}
    for name, hexkey in sorted(session.keys().items()):
        out[name] = str(PrivateKey(bytes.fromhex(hexkey)).address())
    session.emit(out)


@cli.command()
@pass_session
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=1317, show_default=True)
@click.option("--verbose", is_flag=True)
def serve(session, host, port, verbose):
    """Serve the chain over HTTP for SVG clients and remote CLIs."""
    from .server import make_server

    def _do():
        lock = statefile.acquire_lock(session.state_path)
        backend = FileBackend(session.state_path)
        server = make_server(backend, host, port, verbose)
        contract = next(iter(backend.chain.contract_labels), None)
        click.echo(
            json.dumps(
                {
                    "listening": f"http://{host}:{server.server_address[1]}",
                    "chain_id": backend.chain.chain_id,
                    "height": backend.chain.height,
                    "contract": contract,
                }
            )
        )
        try:
            server.serve_forever()
        except KeyboardInterrupt:
            pass
        finally:
            server.server_close()
            lock.release()

    run_guarded(_do)


@cli.command()
@pass_session
def status(session):
    """Chain id, height, consensus key."""

    def _do():
        backend = session.backend()
        session.emit(
            {
                "chain_id": backend.chain_id(),
                "height": backend.height(),
                "consensus_pubkey": backend.consensus_pubkey().hex(),
            }
        )

    run_guarded(_do)


@cli.command()
@pass_session
@click.option("--height", type=int, default=None)
def block(session, height):
    """Show a block header (latest by default); produces nothing."""

    def _do():
        backend = session.backend()
        if hasattr(backend, "chain"):
            chain = backend.chain
            h = chain.height if height is None else height
            if not 0 <= h < len(chain.blocks):
                raise ExecError(f"no block at height {h}")
            session.emit(chain.blocks[h].to_dict())
        else:
            path = "/block" if height is None else f"/block?height={height}"
            session.emit(backend._get(path))

    run_guarded(_do)


# --- transaction helpers ------------------------------------------------------------


def _maybe_dry_run(session, wallet, contract, msg, funds, fee, fee_granter, dry_run):
    if not dry_run:
        return False
    env, _ = wallet.seal_msg(msg)
    from ..chain.tx import make_exec_msg, make_tx_body, sign_tx

    body = make_tx_body(
        wallet.chain_id, wallet.sequence(),
        [make_exec_msg(contract, env.to_hex(), funds)], fee, fee_granter,
    )
    tx = sign_tx(wallet.priv, body)
    click.echo(canonical_json(tx).decode())
    return True


def _execute(session, key, msg, funds=0, fee=25_000, fee_granter=None, dry_run=False):
    wallet = session.wallet(key)
    contract = session.contract_address()
    if _maybe_dry_run(session, wallet, contract, msg, funds, fee, fee_granter, dry_run):
        return None
    result, tx_result = wallet.execute(
        contract, msg, funds=funds, fee=fee, fee_granter=fee_granter
    )
    return result, tx_result


# --- token operations ------------------------------------------------------------------


@cli.command()
@pass_session
@click.option("--key", required=True, help="Minter/payer key name.")
@click.option("--to", "to_value", default=None, help="Recipient (default: key).")
@click.option("--out", "out_path", default=None, type=click.Path(),
              help="Write the token SVG here.")
@click.option("--endpoints", default="http://127.0.0.1:1317",
              show_default=True, help="Comma-separated endpoint URLs baked into the SVG.")
@click.option("--trait", "traits", multiple=True, help="name=value overrides.")
@click.option("--payment", default=0, help="Attach uscrt for the public mint path.")
@click.option("--fee", default=25_000, show_default=True)
@click.option("--dry-run", is_flag=True)
def mint(session, key, to_value, out_path, endpoints, traits, payment, fee, dry_run):
    """Mint a token and write its bootloadable SVG to disk."""

    def _do():
        wallet = session.wallet(key)
        to = session.resolve_address(to_value) if to_value else wallet.address
        contract = session.contract_address()
        trait_map = dict(DEFAULT_TRAITS)
        for spec in traits:
            name, _, value = spec.partition("=")
            trait_map[name] = value

        # token ids are sequential, so the next id is knowable up front and
        # the finished SVG (which embeds its own id) goes on chain verbatim
        count = wallet.query(contract, {"total_tokens": {}})["count"]
        token_id = str(count + 1)
        meta = NfpMetadata(
            api_endpoints=tuple(u for u in endpoints.split(",") if u),
            chain_id=wallet.chain_id,
            contract_address=contract,
            token_id=token_id,
        )
        svg = build_svg(SvgTemplate.reference(), meta, trait_map)
        result = _execute(
            session, key,
            {"mint": {"to": to, "svg": base64.b64encode(svg).decode()}},
            funds=payment, fee=fee, dry_run=dry_run,
        )
        if result is None:
            return
        if result[0]["token_id"] != token_id:
            raise ExecError(
                f"minted id {result[0]['token_id']} does not match the "
                f"predicted id {token_id}; chain advanced mid-mint"
            )
        target = Path(out_path or f"nfp-{token_id}.svg")
        target.write_bytes(svg)
        session.emit(
            {
                "token_id": token_id,
                "owner": to,
                "svg_file": str(target),
                "svg_bytes": len(svg),
                "gas_used": result[1]["gas_used"],
            }
        )

    run_guarded(_do)


@cli.command()
@pass_session
@click.option("--key", required=True)
@click.option("--token", required=True)
@click.option("--to", "to_value", required=True)
@click.option("--fee", default=25_000)
@click.option("--dry-run", is_flag=True)
def transfer(session, key, token, to_value, fee, dry_run):
    """Transfer token ownership."""

    def _do():
        to = session.resolve_address(to_value)
        result = _execute(
            session, key, {"transfer": {"token_id": token, "to": to}},
            fee=fee, dry_run=dry_run,
        )
        if result is not None:
            session.emit({"token_id": token, "owner": to})

    run_guarded(_do)


# --- packages ----------------------------------------------------------------------------


@cli.command()
@pass_session
@click.option("--key", required=True, help="Admin key.")
@click.option("--package-id", required=True)
@click.option("--file", "file_path", required=True, type=click.Path(exists=True))
@click.option("--access", default="public",
              type=click.Choice(["public", "owners", "cleared"]), show_default=True)
@click.option("--tags", default="", help="Comma-separated tags.")
@click.option("--encoding", type=click.Choice(["none", "gzip", "auto"]),
              default="auto", show_default=True,
              help="auto gzips unless the file already is gzip.")
@click.option("--reset-on-transfer", is_flag=True)
@click.option("--fee", default=25_000)
@click.option("--dry-run", is_flag=True)
def publish(session, key, package_id, file_path, access, tags, encoding,
            reset_on_transfer, fee, dry_run):
    """Upload a package version to the on-chain package manager."""

    def _do():
        data = Path(file_path).read_bytes()
        enc = encoding
        if enc == "auto":
            if data[:2] == b"\x1f\x8b":
                enc = "gzip"
            else:
                data_gz = gzip.compress(data, mtime=0)
                data_out, enc = (data_gz, "gzip") if len(data_gz) < len(data) else (data, "none")
                data = data_out
        msg = {
            "upload_package": {
                "package_id": package_id,
                "access": access,
                "data": base64.b64encode(data).decode(),
                "content_encoding": enc,
                "tags": [t for t in tags.split(",") if t],
                "metadata": {},
                "reset_on_transfer": reset_on_transfer,
            }
        }
        result = _execute(session, key, msg, fee=fee, dry_run=dry_run)
        if result is not None:
            session.emit(
                {
                    "package_id": package_id,
                    "serial": result[0]["serial"],
                    "bytes": len(data),
                    "content_encoding": enc,
                    "gas_used": result[1]["gas_used"],
                }
            )

    run_guarded(_do)


@cli.command("get-package")
@pass_session
@click.option("--package-id", required=True)
@click.option("--tag", default=None)
@click.option("--serial", type=int, default=None)
@click.option("--key", default=None, help="Sign a permit with this key (else anonymous).")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Write decoded payload to file.")
def get_package(session, package_id, tag, serial, key, out_path):
    """Fetch a package version (bootloader-style by tag, or by serial)."""
    if (tag is None) == (serial is None):
        raise click.UsageError("pass exactly one of --tag or --serial")

    def _do():
        contract = session.contract_address()
        if key:
            wallet = session.wallet(key)
            auth = wallet.sign_permit("cli-package", [contract], ["packages"])
        else:
            wallet = session.anonymous_wallet()
            auth = None
        selector = {"tag": tag} if tag else {"serial": serial}
        result = wallet.query(
            contract,
            {"get_package": {"package_id": package_id, "selector": selector,
                             "auth": auth}},
        )
        data = base64.b64decode(result["data"])
        if result["content_encoding"] == "gzip":
            data = gzip.decompress(data)
        if out_path:
            Path(out_path).write_bytes(data)
        session.emit(
            {
                "package_id": result["package_id"],
                "serial": result["serial"],
                "content_encoding": result["content_encoding"],
                "tags": result["tags"],
                "decoded_bytes": len(data),
                "out": out_path,
            }
        )

    run_guarded(_do)


@cli.command("list-packages")
@pass_session
@click.option("--key", default=None)
def list_packages(session, key):
    def _do():
        contract = session.contract_address()
        if key:
            wallet = session.wallet(key)
            auth = wallet.sign_permit("cli-package", [contract], ["packages"])
        else:
            wallet = session.anonymous_wallet()
            auth = None
        session.emit(wallet.query(contract, {"list_packages": {"auth": auth}}))

    run_guarded(_do)


@cli.command()
@pass_session
@click.option("--entry", required=True, help="Entry module name.")
@click.option("--src", "src_dir", required=True, type=click.Path(exists=True),
              help="Directory of CommonJS .js modules.")
@click.option("--asset", "asset_paths", multiple=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--ceiling", default=320_000, show_default=True)
def bundle(session, entry, src_dir, asset_paths, out_path, ceiling):
    """Bundle a module directory into a gzip package ready to publish."""

    def _do():
        sources = {}
        root = Path(src_dir)
        for path in sorted(root.rglob("*.js")):
            sources[str(path.relative_to(root))[:-3]] = path.read_text("utf-8")
        assets = {Path(p).name: Path(p).read_bytes() for p in asset_paths}
        result = bundle_package(entry, sources, assets or None, ceiling=ceiling)
        Path(out_path).write_bytes(result.data)
        session.emit(
            {
                "out": out_path,
                "modules": result.modules,
                "raw_bytes": result.raw_size,
                "compressed_bytes": result.compressed_size,
                "content_encoding": result.content_encoding,
            }
        )

    run_guarded(_do)


# --- fee grants and delegation ----------------------------------------------------------------


@cli.command("download-svg")
@pass_session
@click.option("--key", required=True, help="Owner or delegate key.")
@click.option("--token", required=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def download_svg(session, key, token, out_path):
    """Fetch a token's on-chain SVG payload (owner/delegate only)."""

    def _do():
        wallet = session.wallet(key)
        contract = session.contract_address()
        permit = wallet.sign_permit("cli-svg", [contract], ["owner"])
        result = wallet.query(
            contract, {"token_svg": {"token_id": token, "auth": permit}}
        )
        data = base64.b64decode(result["svg"])
        Path(out_path).write_bytes(data)
        session.emit({"token_id": token, "out": out_path, "bytes": len(data)})

    run_guarded(_do)


@cli.command("grant-fee")
@pass_session
@click.option("--key", required=True)
@click.option("--grantee", required=True)
@click.option("--limit", required=True, type=int)
@click.option("--expiration", required=True, type=int, help="Block height.")
@click.option("--fee", default=25_000)
def grant_fee(session, key, grantee, limit, expiration, fee):
    def _do():
        wallet = session.wallet(key)
        grantee_addr = session.resolve_address(grantee)
        wallet.grant_fee(grantee_addr, limit, expiration, fee=fee)
        session.emit({"granter": wallet.address, "grantee": grantee_addr,
                      "spend_limit": limit, "expiration": expiration})

    run_guarded(_do)


@cli.command("approve-delegate")
@pass_session
@click.option("--key", required=True)
@click.option("--delegate", required=True)
@click.option("--methods", required=True, help="Comma-separated method names.")
@click.option("--token", default=None, help="Token scope (else owner-wide).")
@click.option("--fee", default=25_000)
def approve_delegate(session, key, delegate, methods, token, fee):
    def _do():
        scope = {"token": {"token_id": token}} if token else {"owner": {}}
        msg = {
            "approve_delegate": {
                "scope": scope,
                "delegate": session.resolve_address(delegate),
                "allowed_methods": [m for m in methods.split(",") if m],
            }
        }
        result = _execute(session, key, msg, fee=fee)
        if result is not None:
            session.emit({"ok": True})

    run_guarded(_do)


@cli.command("revoke-permit")
@pass_session
@click.option("--key", required=True)
@click.option("--name", "permit_name", required=True)
@click.option("--fee", default=25_000)
def revoke_permit(session, key, permit_name, fee):
    def _do():
        _execute(session, key, {"revoke_permit": {"permit_name": permit_name}}, fee=fee)
        session.emit({"revoked": permit_name})

    run_guarded(_do)


# --- game -----------------------------------------------------------------------------------------


def _parse_placements(spec: str) -> list[dict]:
    """carrier:0,0,h;battleship:0,2,v;..."""
    out = []
    for part in spec.split(";"):
        part = part.strip()
        if not part:
            continue
        try:
            vtype, rest = part.split(":")
            x, y, orient = rest.split(",")
            out.append(
                {
                    "vehicle_type": vtype.strip(),
                    "origin": [int(x), int(y)],
                    "orientation": {"h": "horizontal", "v": "vertical"}[orient.strip().lower()],
                }
            )
        except (ValueError, KeyError):
            raise click.UsageError(
                f"bad placement {part!r}, want type:x,y,h|v"
            ) from None
    return out


@cli.command("new-match")
@pass_session
@click.option("--key", required=True)
@click.option("--token", required=True)
@click.option("--wager", default=0, show_default=True)
@click.option("--fee", default=25_000)
@click.option("--fee-granter", default=None)
@click.option("--dry-run", is_flag=True)
def new_match(session, key, token, wager, fee, fee_granter, dry_run):
    def _do():
        granter = session.resolve_address(fee_granter) if fee_granter else None
        result = _execute(
            session, key, {"new_match": {"token_id": token, "wager": wager}},
            funds=wager, fee=fee, fee_granter=granter, dry_run=dry_run,
        )
        if result is not None:
            session.emit({"match_id": result[0]["match_id"], "wager": wager})

    run_guarded(_do)


@cli.command()
@pass_session
def lobby(session):
    """List open matches (anonymous query)."""

    def _do():
        wallet = session.anonymous_wallet()
        contract = session.contract_address()
        session.emit(wallet.query(contract, {"list_open_matches": {}}))

    run_guarded(_do)


@cli.command()
@pass_session
@click.option("--key", required=True)
@click.option("--token", required=True)
@click.option("--match", "match_id", required=True)
@click.option("--wager", default=0, help="Must equal the match wager.")
@click.option("--fee", default=25_000)
@click.option("--fee-granter", default=None)
def join(session, key, token, match_id, wager, fee, fee_granter):
    def _do():
        granter = session.resolve_address(fee_granter) if fee_granter else None
        _execute(
            session, key, {"join_match": {"match_id": match_id, "token_id": token}},
            funds=wager, fee=fee, fee_granter=granter,
        )
        session.emit({"match_id": match_id, "joined": True})

    run_guarded(_do)


@cli.command()
@pass_session
@click.option("--key", required=True)
@click.option("--match", "match_id", required=True)
@click.option("--placements", required=True,
              help="Semicolon list: carrier:0,0,h;battleship:0,2,v;...")
@click.option("--fee", default=25_000)
@click.option("--fee-granter", default=None)
def setup(session, key, match_id, placements, fee, fee_granter):
    """Submit a board layout for a match in the setup phase."""

    def _do():
        granter = session.resolve_address(fee_granter) if fee_granter else None
        result = _execute(
            session, key,
            {
                "submit_setup": {
                    "match_id": match_id,
                    "placements": _parse_placements(placements),
                }
            },
            fee=fee, fee_granter=granter,
        )
        session.emit(result[0])

    run_guarded(_do)


@cli.command()
@pass_session
@click.option("--key", required=True)
@click.option("--match", "match_id", required=True)
@click.option("--cell", required=True, help="x,y")
@click.option("--fee", default=25_000)
@click.option("--fee-granter", default=None)
def attack(session, key, match_id, cell, fee, fee_granter):
    def _do():
        try:
            x, y = (int(v) for v in cell.split(","))
        except ValueError:
            raise click.UsageError(f"bad --cell {cell!r}, want x,y") from None
        granter = session.resolve_address(fee_granter) if fee_granter else None
        result = _execute(
            session, key, {"attack": {"match_id": match_id, "cell": [x, y]}},
            fee=fee, fee_granter=granter,
        )
        session.emit(result[0])

    run_guarded(_do)


@cli.command()
@pass_session
@click.option("--key", required=True)
@click.option("--match", "match_id", required=True)
@click.option("--token", required=True)
def state(session, key, match_id, token):
    """Recover the caller's filtered view of a match."""

    def _do():
        wallet = session.wallet(key)
        contract = session.contract_address()
        permit = wallet.sign_permit("cli-state", [contract], ["game_state"])
        session.emit(
            wallet.query(
                contract,
                {"match_state": {"match_id": match_id, "token_id": token,
                                 "auth": permit}},
            )
        )

    run_guarded(_do)


@cli.command()
@pass_session
@click.option("--key", required=True)
@click.option("--token", required=True)
@click.option("--since", default=0, show_default=True)
def notifications(session, key, token, since):
    def _do():
        wallet = session.wallet(key)
        contract = session.contract_address()
        permit = wallet.sign_permit("cli-notifications", [contract], ["notifications"])
        result = wallet.query(
            contract,
            {"fetch_notifications": {"token_id": token, "since_seq": since,
                                     "auth": permit}},
        )
        for item in result["notifications"]:
            item["payload"] = json.loads(base64.b64decode(item["payload"]))
        session.emit(result)

    run_guarded(_do)


@cli.command("bank-send")
@pass_session
@click.option("--key", required=True)
@click.option("--to", "to_value", required=True)
@click.option("--amount", required=True, type=int)
@click.option("--fee", default=25_000)
def bank_send(session, key, to_value, amount, fee):
    def _do():
        wallet = session.wallet(key)
        to = session.resolve_address(to_value)
        result = wallet.bank_send(to, amount, fee=fee)
        session.emit({"to": to, "amount": amount, "gas_used": result["gas_used"]})

    run_guarded(_do)


@cli.command()
@pass_session
@click.argument("replay_file", type=click.Path(exists=True))
def replay(session, replay_file):
    """Execute a JSON-lines action script (one CLI action per line)."""

    def _do():
        outputs = []
        for line_no, line in enumerate(Path(replay_file).read_text().splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            action = json.loads(line)
            cmd = action.pop("cmd")
            outputs.append({"line": line_no, "cmd": cmd, "result": _replay_one(session, cmd, action)})
        session.emit(outputs)

    run_guarded(_do)


def _replay_one(session, cmd: str, args: dict):
    contract = session.contract_address()
    if cmd == "mint":
        wallet = session.wallet(args["key"])
        to = session.resolve_address(args.get("to", args["key"]))
        svg = base64.b64encode(args.get("svg", "<svg/>").encode()).decode()
        result, _ = wallet.execute(
            contract, {"mint": {"to": to, "svg": svg}},
            funds=args.get("payment", 0), fee=args.get("fee", 25_000),
        )
        return result
    if cmd == "new_match":
        wallet = session.wallet(args["key"])
        result, _ = wallet.execute(
            contract,
            {"new_match": {"token_id": args["token"], "wager": args.get("wager", 0)}},
            funds=args.get("wager", 0), fee=args.get("fee", 25_000),
            fee_granter=args.get("fee_granter"),
        )
        return result
    if cmd == "join":
        wallet = session.wallet(args["key"])
        result, _ = wallet.execute(
            contract,
            {"join_match": {"match_id": args["match"], "token_id": args["token"]}},
            funds=args.get("wager", 0), fee=args.get("fee", 25_000),
        )
        return result
    if cmd == "setup":
        wallet = session.wallet(args["key"])
        placements = args.get("placements")
        if isinstance(placements, str):
            placements = _parse_placements(placements)
        result, _ = wallet.execute(
            contract,
            {"submit_setup": {"match_id": args["match"], "placements": placements}},
            fee=args.get("fee", 25_000), fee_granter=args.get("fee_granter"),
        )
        return result
    if cmd == "attack":
        wallet = session.wallet(args["key"])
        result, _ = wallet.execute(
            contract,
            {"attack": {"match_id": args["match"], "cell": args["cell"]}},
            fee=args.get("fee", 25_000), fee_granter=args.get("fee_granter"),
        )
        return result
    if cmd == "state":
        wallet = session.wallet(args["key"])
        permit = wallet.sign_permit("replay-state", [contract], ["game_state"])
        return wallet.query(
            contract,
            {"match_state": {"match_id": args["match"], "token_id": args["token"],
                             "auth": permit}},
        )
    if cmd == "grant_fee":
        wallet = session.wallet(args["key"])
        wallet.grant_fee(
            session.resolve_address(args["grantee"]), args["limit"],
            args["expiration"], fee=args.get("fee", 25_000),
        )
        return {"ok": True}
    if cmd == "approve_delegate":
        wallet = session.wallet(args["key"])
        scope = (
            {"token": {"token_id": args["token"]}} if args.get("token")
            else {"owner": {}}
        )
        result, _ = wallet.execute(
            contract,
            {
                "approve_delegate": {
                    "scope": scope,
                    "delegate": session.resolve_address(args["delegate"]),
                    "allowed_methods": args["methods"],
                }
            },
            fee=args.get("fee", 25_000),
        )
        return result
    raise click.UsageError(f"unknown replay cmd {cmd!r}")


if __name__ == "__main__":
    cli()
