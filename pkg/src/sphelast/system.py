"""Right-hand-side projection and the linear solve.

The operator equation pairs the matrix with the *conjugated* coefficient
vector (the Bloch phase is pulled out of the inner product's second slot
conjugated), so the solve conjugates the raw LU solution before returning
it; ``SolveResult.coeffs`` is always the expansion coefficients of the
density itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .assembly import AssembledMatrix, BasisMap
from .kelvin import norm_factor
from .oracle import SphQuadrature, basis_samples, inner_product_S2

__all__ = ["SolveResult", "project_rhs", "solve_single", "solve_dimer"]

_COND_WARN = 1e12


@dataclass
class SolveResult:
    coeffs: np.ndarray
    residual: float
    cond: float
    warning: str | None = None


def project_rhs(
    phi, quad: SphQuadrature, basis: BasisMap, coeffs: bool = False
) -> np.ndarray:
    """Project a boundary field onto the basis harmonics.

    ``phi`` is a sampler (direction -> 3-vector), precomputed samples of
    shape (n_nodes, 3), or, with ``coeffs=True``, an expansion coefficient
    vector, in which case the projection is the closed form
    ``conj(c) * norm`` with no quadrature at all.
    """
    if coeffs:
        c = np.asarray(phi, dtype=complex)
        if c.shape != (basis.n_eff,):
            raise ValueError(f"expected {basis.n_eff} coefficients")
        norms = np.array([norm_factor(fam, l) for l, _m, fam in basis])
        return c.conjugate() * norms
    if quad.degree < 2 * basis.l_max + 2:
        raise ValueError(
            f"quadrature degree {quad.degree} < 2*L_max+2 = "
            f"{2 * basis.l_max + 2}"
        )
    fields = basis_samples(basis, quad)
    out = np.zeros(basis.n_eff, dtype=complex)
    for i in range(basis.n_eff):
        out[i] = inner_product_S2(fields[i], phi, quad)
    return out


def _lu_solve(mat: np.ndarray, rhs: np.ndarray):
    lu, piv = sla.lu_factor(mat)
    raw = sla.lu_solve((lu, piv), rhs)
    # LAPACK one-norm reciprocal condition estimate from the same factors.
    gecon = sla.get_lapack_funcs("gecon", (mat,))
    rcond, _info = gecon(lu, np.linalg.norm(mat, 1), norm="1")
    cond = np.inf if rcond == 0 else 1.0 / float(rcond)
    return raw, cond


def _solve(mat: np.ndarray, rhs: np.ndarray) -> SolveResult:
    rhs = np.asarray(rhs, dtype=complex)
    if mat.shape[0] != mat.shape[1] or rhs.shape != (mat.shape[0],):
        raise ValueError("matrix/rhs shape mismatch")
    raw, cond = _lu_solve(mat, rhs)
    if not np.all(np.isfinite(raw)):
        raise np.linalg.LinAlgError(
            f"singular operator matrix (condition estimate {cond:.3e})"
        )
    coeffs = raw.conjugate()
    denom = np.linalg.norm(rhs)
    residual = float(
        np.linalg.norm(mat @ coeffs.conjugate() - rhs) / (denom if denom else 1.0)
    )
    warning = None
    if cond > _COND_WARN:
        warning = f"ill-conditioned system: cond ~ {cond:.3e}"
    return SolveResult(coeffs, residual, cond, warning)


def solve_single(m: AssembledMatrix, rhs: np.ndarray) -> SolveResult:
    """Solve for the density coefficients of a single ball."""
    if m.dimer is not None:
        raise ValueError("got a dimer matrix; use solve_dimer")
    return _solve(m.matrix, rhs)


def solve_dimer(m: AssembledMatrix, rhs_pair) -> tuple[SolveResult, ...]:
    """Solve the two-ball block system; returns per-ball results sharing
    the stacked residual and condition number."""
    if m.dimer is None:
        raise ValueError("got a single-ball matrix; use solve_single")
    b1, b2 = rhs_pair
    n = m.basis.n_eff
    stacked = np.concatenate([np.asarray(b1), np.asarray(b2)])
    res = _solve(m.matrix, stacked)
    first = SolveResult(res.coeffs[:n], res.residual, res.cond, res.warning)
    second = SolveResult(res.coeffs[n:], res.residual, res.cond, res.warning)
    return first, second
