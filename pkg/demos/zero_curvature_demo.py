"""Elliptic Calogero-Moser as a nonautonomous flow in tau.

With the coupling shifted the zero-curvature residual is at finite-difference
noise level. Without the shift a scalar defect nu 2 pi i d_tau E1(z) remains.
"""

import numpy as np

from laxfactor import Elliptic
from laxfactor import schlesinger as sch

tau = 0.3 + 0.9j
nu = 0.7
z = 0.21 + 0.13j
rng = np.random.default_rng(3)

for N in (2, 3):
    q = 0.2 * np.arange(N) + 0.04j * rng.standard_normal(N)
    q -= q.mean()
    p = 0.3 * rng.standard_normal(N)
    shifted = sch.zero_curvature_residual(q, p, z, nu, tau)
    R = sch.zero_curvature_residual(q, p, z, nu, tau, shift=False, return_matrix=True)
    expected = nu * 2j * np.pi * Elliptic(tau).dtau_E1(z)
    off = np.abs(R - np.diag(np.diag(R))).max()
    print(f"N={N}  shifted residual {shifted:.1e}")
    print(f"      unshifted diagonal {np.diag(R).round(6)}  predicted {expected:.6f}  off-diagonal {off:.1e}")
