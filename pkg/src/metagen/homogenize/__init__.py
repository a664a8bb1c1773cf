"""Periodic homogenization and derived properties."""
from .fem import (BASE, E_VOID, BaseMaterial, PeriodicOperator, element_stiffness, homogenize,
                  isotropic_stiffness, pcg, unit_strain_displacements)
from .properties import (PROPERTY_NAMES, PropertyVector, extract_properties, round_2sf,
                         round_props, vrh)

__all__ = [
    "BASE", "E_VOID", "BaseMaterial", "PeriodicOperator", "element_stiffness", "homogenize",
    "isotropic_stiffness", "pcg", "unit_strain_displacements",
    "PROPERTY_NAMES", "PropertyVector", "extract_properties", "round_2sf", "round_props", "vrh",
]
