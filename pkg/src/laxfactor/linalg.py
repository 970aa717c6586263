"""Dense complex linear algebra on Mat(N) and on the two-site space C^N (x) C^N.

Tensor convention: the site-1 index is the slow one, so a two-site
operator ``X`` has row index ``i1 * n + i2``.  This is the convention of
``np.kron(A, B)`` for ``A`` on site 1 and ``B`` on site 2.
"""

import numpy as np

from .errors import NonConverged, PoleOrderTooHigh, RankDeficiencyViolation

__all__ = [
    "complex_matrix",
    "site_dimension",
    "clock_matrix",
    "shift_matrix",
    "heisenberg_basis",
    "heisenberg_kappa",
    "heisenberg_indices",
    "heisenberg_coefficients",
    "permutation_operator",
    "standard_unit",
    "o12",
    "embed",
    "residue_at",
    "laurent_coefficients",
    "trace_over_site",
    "inverse",
    "solve",
    "eigenvalues",
    "singular_ratio",
    "rank_one_factors",
    "commutator",
    "max_abs",
    "trace_free",
]


def complex_matrix(a, rows=None, cols=None):
    """Validate and return ``a`` as a 2-d complex array.

    NaN and infinite entries are rejected.
    """
    m = np.asarray(a, dtype=complex)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {m.shape}")
    if rows is not None and m.shape[0] != rows:
        raise ValueError(f"expected {rows} rows, got {m.shape[0]}")
    if cols is not None and m.shape[1] != cols:
        raise ValueError(f"expected {cols} columns, got {m.shape[1]}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def site_dimension(op):
    """Return n for an n^2 x n^2 two-site operator."""
    m = np.asarray(op)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("two-site operator must be square")
    n = int(round(np.sqrt(m.shape[0])))
    if n * n != m.shape[0]:
        raise ValueError(f"size {m.shape[0]} is not a perfect square")
    return n


# ---------------------------------------------------------------------------
# Finite Heisenberg group


def clock_matrix(N):
    """Q_kl = delta_kl exp(2 pi i k / N), k = 1..N."""
    k = np.arange(1, N + 1)
    return np.diag(np.exp(2j * np.pi * k / N))


def shift_matrix(N):
    """Lambda_kl = 1 iff k - l + 1 = 0 mod N."""
    lam = np.zeros((N, N), dtype=complex)
    for k in range(N):
        lam[k, (k + 1) % N] = 1.0
    return lam


def _power(m, k):
    return np.linalg.matrix_power(m, k % m.shape[0])


def heisenberg_basis(a1, a2, N):
    """T_a = exp(pi i a1 a2 / N) Q^a1 Lambda^a2.

    The integers are used as given (not reduced mod N) in the phase, so
    ``T_a T_b = kappa(a, b) T_{a+b}`` holds with unreduced sums.
    """
    if N < 1:
        raise ValueError("N must be positive")
    phase = np.exp(1j * np.pi * a1 * a2 / N)
    return phase * _power(clock_matrix(N), a1) @ _power(shift_matrix(N), a2)


def heisenberg_kappa(a, b, N):
    """kappa_{a,b} = exp(pi i (b1 a2 - b2 a1) / N)."""
    return np.exp(1j * np.pi * (b[0] * a[1] - b[1] * a[0]) / N)


def heisenberg_indices(N, include_zero=True):
    """All alpha in Z_N x Z_N with representatives in 0..N-1."""
    out = [(a1, a2) for a1 in range(N) for a2 in range(N)]
    if not include_zero:
        out = out[1:]
    return out


def heisenberg_coefficients(S):
    """S_alpha = tr(S T_{-alpha}) / N, so that S = sum_alpha T_alpha S_alpha."""
    S = complex_matrix(S)
    N = S.shape[0]
    return {a: np.trace(S @ heisenberg_basis(-a[0], -a[1], N)) / N
            for a in heisenberg_indices(N)}


def standard_unit(i, j, N):
    e = np.zeros((N, N), dtype=complex)
    e[i, j] = 1.0
    return e


def permutation_operator(N, check=True):
    """P_12 = sum_ij E_ij (x) E_ji.

    With ``check`` the builder also forms (1/N) sum_alpha T_alpha (x) T_-alpha
    and asserts agreement to 1e-12.
    """
    P = np.zeros((N * N, N * N), dtype=complex)
    for i in range(N):
        for j in range(N):
            P[i * N + j, j * N + i] = 1.0
    if check:
        alt = sum(np.kron(heisenberg_basis(a1, a2, N), heisenberg_basis(-a1, -a2, N))
                  for a1, a2 in heisenberg_indices(N)) / N
        err = np.abs(alt - P).max()
        assert err < 1e-12, f"permutation operator forms disagree by {err:.3e}"
    return P


def o12(N):
    """O_12 = sum_ij E_ii (x) E_ji."""
    O = np.zeros((N * N, N * N), dtype=complex)
    for i in range(N):
        for j in range(N):
            # (E_ii)_{i,i} (E_ji)_{j,i}
            O[i * N + j, i * N + i] = 1.0
    return O


def embed(op, sites, n, nsites=3):
    """Embed a one- or two-site operator into ``nsites`` copies of C^n.

    ``sites`` is a tuple of 0-based site labels (one label, or two in
    increasing order).
    """
    op = np.asarray(op, dtype=complex)
    letters = "abcdefgh"
    outs, ins = letters[:nsites], letters[nsites:2 * nsites]
    if len(sites) == 1:
        (s,) = sites
        t = op
        sub_op = outs[s] + ins[s]
    else:
        s, u = sites
        if s >= u:
            raise ValueError("sites must be increasing")
        t = op.reshape(n, n, n, n)
        sub_op = outs[s] + outs[u] + ins[s] + ins[u]
    ident = np.eye(n)
    operands, subs = [t], [sub_op]
    for k in range(nsites):
        if k not in sites:
            operands.append(ident)
            subs.append(outs[k] + ins[k])
    spec = ",".join(subs) + "->" + outs + ins
    return np.einsum(spec, *operands).reshape(n ** nsites, n ** nsites)


# ---------------------------------------------------------------------------
# Residues by trapezoidal quadrature on a circle


def laurent_coefficients(f, z0=0.0, radius=1e-2, nodes=64, orders=(-1,)):
    """Laurent coefficients c_k of f around z0 from a circle of given radius.

    c_k = (1/2 pi i) \\oint f(z) (z - z0)^(-k-1) dz; trapezoid rule, which is
    spectrally accurate for functions analytic in an annulus.
    """
    theta = 2 * np.pi * np.arange(nodes) / nodes
    w = radius * np.exp(1j * theta)
    vals = [np.asarray(f(z0 + wk), dtype=complex) for wk in w]
    out = []
    for k in orders:
        out.append(sum(v * wk ** (-k) for v, wk in zip(vals, w)) / nodes)
    return out


def residue_at(f, z0=0.0, radius=1e-2, nodes=64, tol=1e-10):
    """Residue of a function with at most a simple pole at z0.

    The estimate is repeated with twice the nodes; a change above ``tol``
    (relative to max(1, |res|)) raises NonConverged.  A non-negligible
    z^-2 coefficient, measured on circles of radius r and r/2, raises
    PoleOrderTooHigh.
    """
    res, c2 = laurent_coefficients(f, z0, radius, nodes, orders=(-1, -2))
    res2, c2b = laurent_coefficients(f, z0, radius, 2 * nodes, orders=(-1, -2))
    scale = max(1.0, float(np.max(np.abs(res2))))
    if np.max(np.abs(res2 - res)) > tol * scale:
        raise NonConverged(
            f"residue changed by {np.max(np.abs(res2 - res)):.3e} on node doubling")
    half = laurent_coefficients(f, z0, radius / 2, 2 * nodes, orders=(-2,))[0]
    # c_{-2} of a simple pole is pure aliasing, O(radius^nodes)
    lead = max(float(np.max(np.abs(c2b))), float(np.max(np.abs(half))))
    if lead > 1e3 * tol * scale * radius:
        raise PoleOrderTooHigh(f"z^-2 coefficient {lead:.3e} is not negligible")
    return res2


def trace_over_site(op, site, weight):
    """Partial trace of ``op (1 (x) W)`` over site 2, or of ``op (W (x) 1)`` over site 1."""
    n = site_dimension(op)
    W = complex_matrix(weight, n, n)
    if site == 2:
        X = (np.asarray(op) @ np.kron(np.eye(n), W)).reshape(n, n, n, n)
        return np.einsum("ikjk->ij", X)
    if site == 1:
        X = (np.asarray(op) @ np.kron(W, np.eye(n))).reshape(n, n, n, n)
        return np.einsum("kikj->ij", X)
    raise ValueError("site must be 1 or 2")


# ---------------------------------------------------------------------------
# Inverses and spectra (LAPACK through numpy)


def inverse(m, with_condition=False):
    """Inverse by partial-pivot LU; optionally also the 1-norm condition number."""
    m = complex_matrix(m)
    inv = np.linalg.inv(m)
    if with_condition:
        cond = np.linalg.norm(m, 1) * np.linalg.norm(inv, 1)
        return inv, float(cond)
    return inv


def solve(a, b):
    """a^{-1} b."""
    return np.linalg.solve(a, b)


def eigenvalues(m):
    """Eigenvalues sorted by (real part, imaginary part)."""
    ev = np.linalg.eigvals(complex_matrix(m))
    return ev[np.lexsort((ev.imag, ev.real))]


def singular_ratio(m):
    """sigma_2 / sigma_1 (0 for the zero matrix or a 1x1 matrix)."""
    s = np.linalg.svd(np.asarray(m, dtype=complex), compute_uv=False)
    if s.size < 2 or s[0] == 0:
        return 0.0
    return float(s[1] / s[0])


def rank_one_factors(m, tol=1e-8):
    """Return (u, v) with m = u (x) v, or raise RankDeficiencyViolation."""
    m = np.asarray(m, dtype=complex)
    r = singular_ratio(m)
    if r >= tol:
        raise RankDeficiencyViolation(f"sigma2/sigma1 = {r:.3e} is not rank one")
    U, s, Vh = np.linalg.svd(m)
    return U[:, 0] * s[0], Vh[0]


def commutator(a, b):
    return a @ b - b @ a


def max_abs(m):
    return float(np.max(np.abs(m)))


def trace_free(m):
    """m - (tr m / n) 1."""
    m = np.asarray(m, dtype=complex)
    return m - np.trace(m) / m.shape[0] * np.eye(m.shape[0])
