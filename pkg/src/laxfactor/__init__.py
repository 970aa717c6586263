"""Factorized Lax pairs of Ruijsenaars-Schneider and Calogero-Moser systems.

Submodules: elliptic (theta and Kronecker functions), linalg, models
(direct Lax pairs), factorization (intertwining matrices), rmatrix,
schlesinger, rootsys (BC_N), dynamics and the verification suites.
"""

from .elliptic import Elliptic, RATIONAL, TRIG, make_class, pole_radius
from .errors import (CollisionDetected, ConfigError, DegenerateConfiguration, LaxFactorError,
                     NearSingular, NonConvergent, StepUnderflow)
from .models import ModelSpec, PhasePoint, lax_matrix, m_matrix, hamiltonian
from .rootsys import BCNSpec

__version__ = "0.1.0"

__all__ = [
    "Elliptic",
    "TRIG",
    "RATIONAL",
    "make_class",
    "pole_radius",
    "ModelSpec",
    "PhasePoint",
    "BCNSpec",
    "lax_matrix",
    "m_matrix",
    "hamiltonian",
    "LaxFactorError",
    "NonConvergent",
    "NearSingular",
    "DegenerateConfiguration",
    "CollisionDetected",
    "StepUnderflow",
    "ConfigError",
]
