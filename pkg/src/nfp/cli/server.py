"""HTTP surface over the simulated chain.

Endpoints: GET /consensus_pubkey, /block, /account/<addr>; POST
/broadcast, /query. Queries run concurrently; broadcasts serialize
through a lock (single writer) and persist to the state file. CORS is
wide open because SVG clients call from a file: origin.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from ..chain import QueryFailed, TxRejected
from ..client import ExecError
from .statefile import FileBackend


class ChainRequestHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "nfp-sim"
    backend: FileBackend = None  # set by make_server
    write_lock: threading.Lock = None

    def log_message(self, fmt, *args):  # quiet by default
        if getattr(self.server, "verbose", False):
            super().log_message(fmt, *args)

    # --- plumbing ---------------------------------------------------------

    def _send(self, status: int, payload: dict) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("content-type", "application/json")
        self.send_header("content-length", str(len(body)))
        self.send_header("access-control-allow-origin", "*")
        self.send_header("access-control-allow-headers", "content-type")
        self.send_header("access-control-allow-methods", "GET, POST, OPTIONS")
        self.end_headers()
        self.wfile.write(body)

    def _read_json(self) -> dict:
        length = int(self.headers.get("content-length", 0))
        if length <= 0 or length > 64 * 1024 * 1024:
            raise ValueError("missing or oversized body")
        data = json.loads(self.rfile.read(length).decode("utf-8"))
        if not isinstance(data, dict):
            raise ValueError("body must be a JSON object")
        return data

    # --- methods ---------------------------------------------------------------

    def do_OPTIONS(self):
        self._send(200, {})

    def do_GET(self):
        chain = self.backend.chain
        url = urlparse(self.path)
        if url.path == "/consensus_pubkey":
            self._send(
                200,
                {
                    "consensus_pubkey": chain.consensus_pub.to_bytes().hex(),
                    "chain_id": chain.chain_id,
                    "height": chain.height,
                },
            )
        elif url.path == "/block":
            params = parse_qs(url.query)
            height = chain.height
            if "height" in params:
                try:
                    height = int(params["height"][0])
                except ValueError:
                    return self._send(400, {"error": "invalid height"})
            if not 0 <= height < len(chain.blocks):
                return self._send(404, {"error": f"no block at height {height}"})
            self._send(200, chain.blocks[height].to_dict())
        elif url.path.startswith("/account/"):
            addr = url.path[len("/account/"):]
            acct = chain.accounts.get(addr)
            self._send(
                200,
                {
                    "address": addr,
                    "balance": acct.balance if acct else 0,
                    "sequence": acct.sequence if acct else 0,
                },
            )
        else:
            self._send(404, {"error": f"unknown path {url.path}"})

    def do_POST(self):
        try:
            body = self._read_json()
        except ValueError as exc:
            return self._send(400, {"error": f"bad request: {exc}"})
        if self.path == "/broadcast":
            tx = body.get("tx")
            if not isinstance(tx, dict):
                return self._send(400, {"error": "bad request: missing tx"})
            try:
                with self.write_lock:
                    result = self.backend.broadcast(tx)
            except (ExecError, TxRejected) as exc:
                return self._send(400, {"error": str(exc)})
            self._send(200, result)
        elif self.path == "/query":
            contract = body.get("contract")
            envelope = body.get("envelope")
            if not isinstance(contract, str) or not isinstance(envelope, str):
                return self._send(400, {"error": "bad request: contract and envelope required"})
            try:
                response = self.backend.chain.query(contract, envelope)
            except QueryFailed as exc:
                return self._send(400, {"error": str(exc)})
            except Exception:
                return self._send(400, {"error": "malformed envelope"})
            self._send(200, {"envelope": response.to_hex()})
        else:
            self._send(404, {"error": f"unknown path {self.path}"})


def make_server(backend: FileBackend, host: str = "127.0.0.1", port: int = 1317,
                verbose: bool = False) -> ThreadingHTTPServer:
    handler = type(
        "BoundHandler",
        (ChainRequestHandler,),
        {"backend": backend, "write_lock": threading.Lock()},
    )
    server = ThreadingHTTPServer((host, port), handler)
    server.verbose = verbose
    return server
