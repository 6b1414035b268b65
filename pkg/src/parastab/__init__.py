"""Stable functions on finite reductive groups and Lie algebras, and their limit
elements in a desk-scale model of SL_2(Q_p)."""

from .algcore import Cyc, psi, unit_group_generator
from .dlstable import SL2Data, dual_chart, sl2_data
from .grpfin import CapacityError, StructureError, character_table, enumerate_group
from .liestable import FinLieAlgebra, lie_algebra

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "Cyc",
    "FinLieAlgebra",
    "SL2Data",
    "StructureError",
    "character_table",
    "dual_chart",
    "enumerate_group",
    "lie_algebra",
    "psi",
    "sl2_data",
    "unit_group_generator",
]
