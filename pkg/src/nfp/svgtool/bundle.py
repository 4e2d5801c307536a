"""Single-file bundling of CommonJS module graphs for on-chain storage.

Modules are plain CommonJS (module/exports/require), which is what tsc
emits with module=commonjs. The bundle is wrapped in an IIFE with a tiny
registry, gzip-compressed with a zeroed mtime so identical inputs give
identical bytes, and refused outright if the compressed size exceeds the
upload ceiling.
"""

from __future__ import annotations

import base64
import gzip
import posixpath
import re
from dataclasses import dataclass, field

DEFAULT_CEILING = 320_000
ASSETS_MODULE = "nfp:assets"

_REQUIRE_RE = re.compile(r"""\brequire\(\s*(['"])([^'"]+)\1\s*\)""")
_ES_MODULE_RE = re.compile(r"^\s*(import\s|export\s)", re.MULTILINE)


class BundleError(Exception):
    pass


@dataclass
class Bundle:
    data: bytes
    content_encoding: str
    raw_size: int
    compressed_size: int
    modules: list[str] = field(default_factory=list)


def _normalize(importer: str, spec: str) -> str:
    if spec == ASSETS_MODULE:
        return spec
    if spec.startswith("."):
        spec = posixpath.normpath(posixpath.join(posixpath.dirname(importer), spec))
    if spec.endswith(".js"):
        spec = spec[:-3]
    return spec


def _requires(name: str, source: str) -> list[str]:
    return [_normalize(name, m.group(2)) for m in _REQUIRE_RE.finditer(source)]


def bundle_package(
    entry: str,
    sources: dict[str, str],
    assets: dict[str, bytes] | None = None,
    ceiling: int = DEFAULT_CEILING,
) -> Bundle:
    sources = {
        (k[:-3] if k.endswith(".js") else k): v for k, v in sources.items()
    }
    entry = entry[:-3] if entry.endswith(".js") else entry
    if entry not in sources:
        raise BundleError(f"entry module {entry!r} not in sources")

    for name, source in sources.items():
        if _ES_MODULE_RE.search(source):
            raise BundleError(
                f"module {name!r} uses ES module syntax; compile to CommonJS first"
            )

    ordered: list[str] = []
    visited: set[str] = set()

    def visit(name: str, importer: str | None) -> None:
        if name == ASSETS_MODULE:
            return
        if name not in sources:
            origin = f" (imported from {importer!r})" if importer else ""
            raise BundleError(f"unresolved import {name!r}{origin}")
        if name in visited:
            return
        visited.add(name)
        for dep in _requires(name, sources[name]):
            if dep not in visited or dep == name:
                visit(dep, name)
        ordered.append(name)

    visit(entry, None)

    parts = [
        "(function(){\n'use strict';\n",
        "var __modules={},__cache={};\n",
        "function __register(n,f){__modules[n]=f;}\n",
        "function __require(n){if(__cache[n])return __cache[n].exports;"
        "var m={exports:{}};__cache[n]=m;__modules[n](m,m.exports,__require);"
        "return m.exports;}\n",
    ]
    if assets:
        encoded = {name: base64.b64encode(data).decode() for name, data in assets.items()}
        import json

        parts.append(
            "__register(%r,function(module){var raw=%s;"
            "function bytes(n){var s=atob(raw[n]);var b=new Uint8Array(s.length);"
            "for(var i=0;i<s.length;i++)b[i]=s.charCodeAt(i);return b;}"
            "module.exports={raw:raw,bytes:bytes,"
            "text:function(n){return new TextDecoder().decode(bytes(n));},"
            "names:Object.keys(raw)};});\n"
            % (ASSETS_MODULE, json.dumps(encoded, sort_keys=True))
        )

    for name in ordered:
        rewritten = _REQUIRE_RE.sub(
            lambda m, _n=name: f'__require("{_normalize(_n, m.group(2))}")',
            sources[name],
        )
        parts.append(f"__register({name!r},function(module,exports,require){{\n")
        parts.append(rewritten)
        parts.append("\n});\n")
    parts.append(f"var __entry=__require({entry!r});\n")
    parts.append(
        "if(typeof window!=='undefined'){window.NFP_APP=__entry;}\n"
        "if(typeof module!=='undefined'&&module.exports){module.exports=__entry;}\n"
    )
    parts.append("})();\n")

    raw = "".join(parts).encode("utf-8")
    compressed = gzip.compress(raw, compresslevel=9, mtime=0)
    if len(compressed) > ceiling:
        raise BundleError(
            f"compressed bundle is {len(compressed)} bytes, over the "
            f"{ceiling}-byte ceiling"
        )
    return Bundle(
        data=compressed,
        content_encoding="gzip",
        raw_size=len(raw),
        compressed_size=len(compressed),
        modules=ordered,
    )
