"""Fusion systems, partial groups and localities over explicit finite groups,
with executable verification suites for the normalizer/centralizer theory of
subnormal subsystems."""

from .groups import FiniteGroup, GroupSpecError, CapExceeded, load_group

__all__ = ["FiniteGroup", "GroupSpecError", "CapExceeded", "load_group"]
__version__ = "0.1.0"
