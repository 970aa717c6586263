"""Isospectral BC_n flow.

Integrates the BC_2 Calogero-Moser system and compares the spectrum of the
Lax matrix before and after. Imaginary couplings keep the particles apart.
Breaking the coupling constraint destroys isospectrality.
"""

import numpy as np

from laxfactor.dynamics import integrate
from laxfactor.linalg import eigenvalues
from laxfactor.models import PhasePoint
from laxfactor.rootsys import BCNSpec, constraint_value, lax_bcn

ph = PhasePoint([0.6, 1.5], [0.1, -0.2])
for label, spec in [("C_2 preset", BCNSpec.C(2, 0.6j, 0.4j)),
                    ("D_2 preset", BCNSpec.D(2, 0.6j)),
                    ("constraint broken", BCNSpec(2, 0.3j, 0.6j, 0.4j))]:
    tr = integrate(spec, ph, 1.0, 1e-12)
    ev0 = np.sort_complex(eigenvalues(lax_bcn(spec, ph)))
    ev1 = np.sort_complex(eigenvalues(lax_bcn(spec, tr.final)))
    print(f"{label:18s} constraint {abs(constraint_value(spec)):.1e}  "
          f"q(1) {np.round(tr.final.q.real, 4)}  spectral drift {np.abs(ev1 - ev0).max():.1e}")
