from .build import (
    NFP_NAMESPACE,
    NfpMetadata,
    SvgBuildError,
    SvgTemplate,
    build_svg,
    validate_nfp_metadata,
)
from .bundle import ASSETS_MODULE, DEFAULT_CEILING, Bundle, BundleError, bundle_package

DEFAULT_TRAITS = {
    "ship_name": "Dune Skiff",
    "hull_color": "#4e5d78",
    "accent_color": "#76f7c5",
    "glow_color": "#8bd0ff",
}

__all__ = [
    "ASSETS_MODULE",
    "DEFAULT_CEILING",
    "DEFAULT_TRAITS",
    "Bundle",
    "BundleError",
    "NFP_NAMESPACE",
    "NfpMetadata",
    "SvgBuildError",
    "SvgTemplate",
    "build_svg",
    "bundle_package",
    "validate_nfp_metadata",
]
