"""Generalised Lotka-Volterra model layer."""

from __future__ import annotations

from .connections import (
    Box,
    ConnectionReport,
    Inequality,
    Interior3D,
    NoBoxError,
    check_connection_2d,
    check_tlv3,
    check_tlv30,
    interior_equilibrium_3d,
    invariant_box,
    planar_case,
    roles,
    verify_box,
)
from .cycles import (
    GlvCycle,
    NodeGeometry,
    circulant,
    cycle_from_geometry,
    example1,
    example1_conditions,
    example2,
    example2_conditions,
    example2_system,
    homoclinic_glv,
)
from .system import (
    EquilibriumInfo,
    GlvSystem,
    NoEquilibriumError,
    axis_equilibrium,
    boundary_equilibria,
    equilibrium_on_support,
    numerical_jacobian,
    planar_equilibrium,
    planar_equilibrium_exact,
)

__all__ = [name for name in dir() if not name.startswith("_")]
