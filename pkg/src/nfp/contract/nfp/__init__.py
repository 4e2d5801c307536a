from .contract import NfpContract
from .game import GRID, TOTAL_VEHICLE_CELLS, VEHICLES, validate_placements
from .state import DELEGABLE_METHODS, PERMIT_PERMISSIONS

__all__ = [
    "DELEGABLE_METHODS",
    "GRID",
    "NfpContract",
    "PERMIT_PERMISSIONS",
    "TOTAL_VEHICLE_CELLS",
    "VEHICLES",
    "validate_placements",
]
