"""Admission checks for database models."""
from .checks import (ValidationReport, boundary_samples, check_compiles, check_physical, check_tilable,
                     simulate, validate_model)

__all__ = ["ValidationReport", "boundary_samples", "check_compiles", "check_physical", "check_tilable",
           "simulate", "validate_model"]
