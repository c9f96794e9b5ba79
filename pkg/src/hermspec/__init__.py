"""Generalised Hermite spectral methods on R^d (d = 1, 2, 3).

Basis families (plain, adjoint, and Muntz-type generalised Hermite
functions), the fractional-Laplacian Galerkin solver, the Crank-Nicolson
fractional Schrodinger stepper, and the Schrodinger eigensolver for
Coulomb and rational power potentials.
"""

from . import (cli_harness, eigen_solver, fl_solver, ghf_basis, harmonics,
               linalg_blocks, muntz_basis, specfun, tdse_solver)
from .eigen_solver import EigenProblem, exact_coulomb, solve_eigs
from .fl_solver import FLProblem, manufactured_source, manufactured_solution
from .ghf_basis import BasisIndex, BasisSpec, SpectralField, Truncation
from .muntz_basis import MuntzSpec
from .tdse_solver import TDSEProblem

__all__ = [
    "cli_harness", "eigen_solver", "fl_solver", "ghf_basis", "harmonics",
    "linalg_blocks", "muntz_basis", "specfun", "tdse_solver",
    "BasisIndex", "BasisSpec", "SpectralField", "Truncation", "MuntzSpec",
    "FLProblem", "TDSEProblem", "EigenProblem",
    "manufactured_source", "manufactured_solution", "exact_coulomb", "solve_eigs",
]

__version__ = "0.1.0"
