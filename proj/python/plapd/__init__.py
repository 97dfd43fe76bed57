"""Finite element and radial tools for -Delta_p u = f(u) with Dirichlet data."""

from ._core import (
    Error,
    Mesh,
    Nonlinearity,
    classify,
    cli,
    energy_identity,
    estimate_lambda_max,
    first_eigenpair,
    fixed_point_solve,
    inner_solve,
    mesh_disc,
    mesh_polygon,
    nonlinearity,
    pohozaev,
    radial_eigen,
    radial_solve_bvp,
    regular_polygon,
    torsion_exact,
)

__version__ = "0.1.0"
