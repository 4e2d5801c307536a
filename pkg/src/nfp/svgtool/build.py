"""Build-time assembly of per-token SVG documents.

A template is XML text carrying {{slot}} placeholders. The build fills
trait slots, injects the metadata element and bootloader script, then
refuses to emit anything that isn't standalone: invalid XML, missing or
duplicated metadata, or any reference that would load a remote resource.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from xml.etree import ElementTree

NFP_NAMESPACE = "urn:nfp:v1"
_SLOT_RE = re.compile(r"\{\{([a-zA-Z0-9_.-]+)\}\}")
_BUILTIN_SLOTS = {"token_id", "nfp_metadata", "bootloader"}


class SvgBuildError(Exception):
    pass


@dataclass(frozen=True)
class NfpMetadata:
    api_endpoints: tuple[str, ...]
    chain_id: str
    contract_address: str
    token_id: str

    def __post_init__(self):
        if not self.api_endpoints:
            raise SvgBuildError("metadata requires at least one API endpoint")

    def to_element_text(self) -> str:
        lcds = ",".join(self.api_endpoints)
        return (
            f'<nfp:web xmlns:nfp="{NFP_NAMESPACE}" nfp:lcds="{_escape(lcds)}" '
            f'nfp:chain="{_escape(self.chain_id)}" '
            f'nfp:contract="{_escape(self.contract_address)}" '
            f'nfp:token="{_escape(self.token_id)}"/>'
        )


@dataclass
class SvgTemplate:
    source: str
    bootloader: str = ""

    @classmethod
    def reference(cls) -> "SvgTemplate":
        assets = resources.files("nfp.svgtool") / "assets"
        return cls(
            source=(assets / "template.svg").read_text("utf-8"),
            bootloader=(assets / "bootloader.js").read_text("utf-8"),
        )

    def slots(self) -> set[str]:
        return set(_SLOT_RE.findall(self.source))

    def trait_slots(self) -> set[str]:
        return self.slots() - _BUILTIN_SLOTS


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def build_svg(template: SvgTemplate, meta: NfpMetadata, traits: dict[str, str]) -> bytes:
    missing = template.trait_slots() - set(traits)
    if missing:
        raise SvgBuildError(f"unresolved trait slots: {', '.join(sorted(missing))}")

    values = {name: _escape(str(value)) for name, value in traits.items()}
    values["token_id"] = _escape(meta.token_id)
    values["nfp_metadata"] = f"<metadata>{meta.to_element_text()}</metadata>"
    # script body goes into CDATA; escaping would corrupt it
    values["bootloader"] = template.bootloader

    def substitute(match: re.Match) -> str:
        return values.get(match.group(1), match.group(0))

    text = _SLOT_RE.sub(substitute, template.source)
    leftover = _SLOT_RE.findall(text)
    if leftover:
        raise SvgBuildError(f"unresolved slots: {', '.join(sorted(set(leftover)))}")

    data = text.encode("utf-8")
    root = _parse(data)
    webs = root.findall(f".//{{{NFP_NAMESPACE}}}web")
    if len(webs) != 1:
        raise SvgBuildError(
            f"document must contain exactly one nfp metadata block, found {len(webs)}"
        )
    scripts = [el for el in root.iter() if el.tag.endswith("script")]
    if not scripts:
        raise SvgBuildError("document is missing the bootloader script")
    scan_self_containment(root)
    return data


def _parse(data: bytes) -> ElementTree.Element:
    try:
        return ElementTree.fromstring(data)
    except ElementTree.ParseError as exc:
        raise SvgBuildError(f"not valid XML: {exc}") from None


_URL_IN_CSS = re.compile(r"url\(\s*['\"]?([^'\")]+)['\"]?\s*\)", re.IGNORECASE)


def _is_remote_ref(value: str) -> bool:
    # anything that is not a fragment or inline data URI leaves the file
    value = value.strip()
    return bool(value) and not value.startswith(("#", "data:"))


def scan_self_containment(root: ElementTree.Element) -> None:
    """Reject resource references that leave the document.

    Only fragment refs (#id) and data: URIs are allowed in href/src
    attributes and CSS url() values. Endpoint URLs inside the nfp
    metadata namespace are configuration, not resource loads.
    """
    for element in root.iter():
        texts = []
        if element.tag.endswith("style") and element.text:
            texts.append(element.text)
        for attr, value in element.attrib.items():
            if attr.startswith(f"{{{NFP_NAMESPACE}}}"):
                continue
            local = attr.rsplit("}", 1)[-1].lower()
            if local in ("href", "src"):
                if _is_remote_ref(value):
                    raise SvgBuildError(
                        f"external reference {value!r} in <{element.tag}>"
                    )
            if local == "style":
                texts.append(value)
        for text in texts:
            for url in _URL_IN_CSS.findall(text):
                if _is_remote_ref(url):
                    raise SvgBuildError(f"external reference {url!r} in CSS")


def validate_nfp_metadata(svg: bytes) -> NfpMetadata:
    root = _parse(svg)
    webs = root.findall(f".//{{{NFP_NAMESPACE}}}web")
    if not webs:
        raise SvgBuildError("no nfp metadata block found")
    if len(webs) > 1:
        raise SvgBuildError("multiple nfp metadata blocks found")
    web = webs[0]

    def attr(name: str) -> str:
        return web.get(f"{{{NFP_NAMESPACE}}}{name}", "")

    endpoints = tuple(u for u in attr("lcds").split(",") if u.strip())
    if not endpoints:
        raise SvgBuildError("metadata lists zero API endpoints")
    return NfpMetadata(
        api_endpoints=endpoints,
        chain_id=attr("chain"),
        contract_address=attr("contract"),
        token_id=attr("token"),
    )
