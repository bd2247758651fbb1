"""Self-check suites runnable from the command line.

Each suite exercises the invariants of one module against an independent
route (quadrature, finite differences, direct evaluation or truncated brute
force) and reports ``(check name, observed residual, tolerance)`` rows.
The pytest suite covers the same ground more exhaustively; these runs are
sized to finish in seconds per suite.
"""

from __future__ import annotations

import math

import numpy as np

from . import assembly, latsum, oracle, system, translation
from .kelvin import (
    LameParams,
    exterior_response,
    kelvin_tensor,
    surface_response,
)
from .sphharm import ylm_complex, ylm_equator
from .vsh import Family, rhat_dot_a_expand, vsh_complex, vsh_real

__all__ = ["SUITES", "run_suites"]

_PARAMS = LameParams(1.0, 1.0)


def _rand_dirs(rng, n):
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1)[:, None]


def suite_sphharm(rng):
    checks = []
    quad = oracle.build_quadrature(16)
    dirs = quad.directions()
    worst = 0.0
    vals = {}
    for l in range(7):
        for m in range(-l, l + 1):
            vals[(l, m)] = np.array([ylm_complex(l, m, d) for d in dirs])
    for (l, m), f in vals.items():
        for (lp, mp), g in vals.items():
            ip = np.sum(f * g.conjugate() * quad.weights)
            expect = 1.0 if (l, m) == (lp, mp) else 0.0
            worst = max(worst, abs(ip - expect))
    checks.append(("orthonormality l<=6", worst, 1e-12))
    worst = 0.0
    for v in _rand_dirs(rng, 50):
        for l in range(5):
            for m in range(0, l + 1):
                worst = max(
                    worst,
                    abs(
                        ylm_complex(l, -m, v)
                        - (-1) ** m * np.conj(ylm_complex(l, m, v))
                    ),
                )
    checks.append(("conjugation rule", worst, 1e-14))
    worst = 0.0
    for l in range(7):
        for m in range(-l, l + 1):
            if (l + m) % 2 == 1:
                worst = max(worst, abs(ylm_equator(l, m)))
            worst = max(
                worst,
                abs(
                    ylm_equator(l, m, at_pi=True)
                    - (-1) ** m * ylm_equator(l, m, at_pi=False)
                ),
            )
    checks.append(("equator parity", worst, 1e-14))
    return checks


def suite_vsh(rng):
    checks = []
    worst = 0.0
    for v in _rand_dirs(rng, 40):
        for l in range(1, 6):
            for m in range(-l, l + 1):
                w = vsh_complex(Family.W, l, m, v)
                vv = vsh_complex(Family.V, l, m, v)
                x = vsh_complex(Family.X, l, m, v)
                worst = max(
                    worst,
                    np.abs(w - vv - (2 * l + 1) * ylm_complex(l, m, v) * v).max(),
                    abs(np.dot(v, x)),
                    abs(np.dot(v, vv) + (l + 1) * ylm_complex(l, m, v)),
                    abs(np.dot(v, w) - l * ylm_complex(l, m, v)),
                )
    checks.append(("pointwise identities", worst, 1e-13))
    quad = oracle.build_quadrature(14)
    dirs = quad.directions()
    worst = 0.0
    from .kelvin import norm_factor

    fields = {}
    for fam in Family:
        for l in range(0 if fam == Family.V else 1, 5):
            for m in range(-l, l + 1):
                fields[(fam, l, m)] = np.array(
                    [vsh_real(fam, l, m, d) for d in dirs]
                )
    for (fam, l, m), f in fields.items():
        for (fam2, l2, m2), g in fields.items():
            ip = np.einsum("nk,nk,n->", f, g, quad.weights)
            expect = (
                norm_factor(fam, l)
                if (fam, l, m) == (fam2, l2, m2)
                else 0.0
            )
            worst = max(worst, abs(ip - expect))
    checks.append(("orthogonality and norms l<=4", worst, 1e-11))
    worst = 0.0
    for v in _rand_dirs(rng, 20):
        a = rng.normal(size=3)
        comp = rhat_dot_a_expand(a)
        expand = math.sqrt(4 * math.pi / 3) * sum(
            (-1) ** q * comp[q] * ylm_complex(1, q, v) for q in (-1, 0, 1)
        )
        worst = max(worst, abs(np.dot(v, a) - expand))
    checks.append(("axis-projection expansion", worst, 1e-13))
    return checks


def suite_translation(rng):
    checks = []
    from .sphharm import solid_irregular, solid_regular

    worst = 0.0
    for _ in range(4):
        r = rng.normal(size=3) * 0.7
        a = rng.normal(size=3)
        for l in range(5):
            for m in range(-l, l + 1):
                worst = max(
                    worst,
                    abs(
                        translation.translate_solid_regular(l, m, r, a)
                        - solid_regular(l, m, r + a)
                    ),
                )
    checks.append(("finite growing re-expansion", worst, 1e-12))
    pol = translation.TruncationPolicy(lam_max=24)
    worst = 0.0
    a = np.array([1.0, 0.0, 0.0])
    r = _rand_dirs(rng, 1)[0] * 0.3
    for l in range(4):
        for m in range(-l, l + 1):
            worst = max(
                worst,
                abs(
                    translation.translate_solid_irregular(l, m, r, a, pol)
                    - solid_irregular(l, m, r + a)
                ),
            )
    checks.append(("decaying re-expansion at ratio 0.3", worst, 1e-9))
    pol = translation.TruncationPolicy(lam_max=24)
    worst = 0.0
    rp = r + a
    rpn = np.linalg.norm(rp)
    cases = [
        (translation.translate_W, Family.W, lambda l: l - 1, 2, 1),
        (translation.translate_V_decay, Family.V, lambda l: -l - 2, 2, -1),
        (translation.translate_V_neg_l, Family.V, lambda l: -l, 2, 0),
        (translation.translate_W_neg_l, Family.W, lambda l: -l, 2, 2),
        (translation.translate_X, Family.X, lambda l: -l - 1, 2, -2),
    ]
    for fn, fam, power, l, m in cases:
        got = (
            fn(l, m, r, a)
            if fn is translation.translate_W
            else fn(l, m, r, a, pol)
        )
        expect = rpn ** power(l) * vsh_real(fam, l, m, rp / rpn)
        worst = max(worst, np.abs(got - expect).max())
    checks.append(("vector re-expansion series", worst, 1e-9))
    return checks


def suite_kelvin(rng):
    checks = []
    g = kelvin_tensor((1.0, 0.0, 0.0), _PARAMS)
    worst = max(
        abs(g[0, 0] - 1.0 / (4 * math.pi)), abs(g[1, 1] - 1.0 / (6 * math.pi))
    )
    checks.append(("fundamental solution values", worst, 1e-15))
    quad = oracle.build_quadrature(60)
    basis = assembly.BasisMap(3)
    rho = 0.3
    worst = 0.0
    for l, fam in [(1, Family.W), (3, Family.X), (2, Family.V)]:
        m = int(rng.integers(-l, l + 1))
        c = np.zeros(basis.n_eff)
        c[basis.index_of(l, m, fam)] = 1.0
        xhat = _rand_dirs(rng, 1)[0]
        for fac in (1.5, 3.0):
            direct = oracle.brute_potential(
                fac * rho * xhat, c, (0, 0, 0), rho, _PARAMS, quad, basis
            )
            mat = exterior_response(l, fac, _PARAMS)
            closed = rho * sum(
                mat[j - 1, fam - 1] * vsh_real(j, l, m, xhat)
                for j in Family
                if not (l == 0 and j != Family.V)
            )
            scale = max(np.abs(closed).max(), 1e-30)
            worst = max(worst, np.abs(direct - closed).max() / scale)
    checks.append(("exterior layer identity", worst, 1e-8))
    worst = 0.0
    for l in range(4):
        taus = surface_response(l, _PARAMS)
        mat = exterior_response(l, 1.0 + 1e-9, _PARAMS)
        for j in range(3):
            if l == 0 and j > 0:
                continue
            worst = max(worst, abs(mat[j, j] - taus[j]))
    checks.append(("boundary continuity", worst, 1e-7))
    return checks


def suite_latsum(rng):
    checks = []
    worst = abs(latsum.polylog_unit(2, math.pi) + math.pi**2 / 12)
    checks.append(("dilogarithm at the zone edge", worst, 1e-12))
    k = np.arange(1, 100_001, dtype=float)
    worst = 0.0
    for s, al in [(3, 0.7), (4, 2.2)]:
        brute = np.sum(np.exp(1j * al * k) / k**s)
        worst = max(worst, abs(latsum.polylog_unit(s, al, 1) - brute))
    k0 = np.arange(0, 100_000, dtype=float)
    for s, dd, al in [(3, 0.4, 1.0), (4, 0.6, 2.4)]:
        brute = np.sum(np.exp(-1j * al * k0) / (k0 + dd) ** s)
        worst = max(worst, abs(latsum.lerch_unit(s, al, -1, dd) - brute))
    checks.append(("polylog and Lerch vs truncation", worst, 1e-9))
    z = complex(math.cos(1.3), math.sin(1.3))
    worst = abs(latsum.lerch_unit(3, 1.3, 1, 1.0) * z - latsum.polylog_unit(3, 1.3, 1))
    checks.append(("offset-1 reduction", worst, 1e-12))
    alpha = 1.1
    ns = np.arange(1, 20001, dtype=float)
    ns = np.concatenate([-ns[::-1], ns])
    worst = 0.0
    for l, lam, m, mu in [(1, 1, 0, 0), (2, 1, 1, 0), (1, 2, -1, 1)]:
        ker = assembly._SingleShiftKernel(ns)
        brute = np.sum(ker.plain(l, lam, m, mu) * np.exp(-1j * alpha * ns))
        worst = max(
            worst, abs(latsum.lattice_decay_sum(l, lam, m, mu, alpha) - brute)
        )
    checks.append(("phased coefficient sums vs truncation", worst, 1e-8))
    return checks


def suite_assembly(rng):
    checks = []
    rho, alpha = 0.1, 0.9
    mat = assembly.assemble_single(alpha, rho, _PARAMS, 2)
    mat2 = assembly.assemble_single(2 * math.pi - alpha, rho, _PARAMS, 2)
    checks.append(
        (
            "conjugation symmetry",
            float(np.abs(mat2.matrix - mat.matrix.conjugate()).max()),
            1e-12,
        )
    )
    worst = 0.0
    for i, (lp, mp, pf) in enumerate(mat.basis):
        for j, (l, m, qf) in enumerate(mat.basis):
            if pf == Family.V and qf == Family.V and (lp, mp) != (l, m):
                worst = max(worst, abs(mat.matrix[i, j]))
            if {pf, qf} == {Family.V, Family.X}:
                worst = max(worst, abs(mat.matrix[i, j]))
    checks.append(("structural zero pattern", worst, 0.0))
    cache = latsum.LatticeSumCache(alpha)
    worst = 0.0
    for pf, lp, mp, qf, l, m in [
        (Family.W, 1, 0, Family.V, 1, 0),
        (Family.W, 2, 0, Family.W, 2, 0),
        (Family.X, 1, 0, Family.W, 1, -1),
    ]:
        closed = assembly.entry_single(
            pf, lp, mp, qf, l, m, alpha, rho, _PARAMS, cache
        )
        diag = assembly._diagonal_term(pf, qf, l, lp, m, mp, rho, _PARAMS)
        brute = oracle.brute_lattice_entry(
            pf, lp, mp, qf, l, m, alpha, rho, _PARAMS, 20000
        )
        worst = max(worst, abs(closed - (brute + diag)))
    checks.append(("entries vs truncated sums", worst, 1e-6))
    geom = latsum.DimerGeometry(0.2, 0.1)
    dim = assembly.assemble_dimer(alpha, geom, _PARAMS, 1)
    n = dim.basis.n_eff
    checks.append(
        (
            "dimer self blocks equal",
            float(np.abs(dim.matrix[:n, :n] - dim.matrix[n:, n:]).max()),
            0.0,
        )
    )
    worst = 0.0
    for block, shift in (("21", 2 * geom.d), ("12", -2 * geom.d)):
        closed = assembly.entry_dimer(
            block, Family.W, 1, 0, Family.W, 1, 0, alpha, geom, _PARAMS
        )
        brute = oracle.brute_lattice_entry(
            Family.W, 1, 0, Family.W, 1, 0, alpha, geom.rho, _PARAMS, 20000,
            shift=shift, include_zero=True,
        )
        worst = max(worst, abs(closed - brute))
    checks.append(("dimer blocks vs shifted sums", worst, 1e-5))
    return checks


def suite_system(rng):
    checks = []
    rho, alpha = 0.1, 1.3
    mat = assembly.assemble_single(alpha, rho, _PARAMS, 2)
    n = mat.basis.n_eff
    f = rng.normal(size=n) + 1j * rng.normal(size=n)
    rhs = mat.matrix @ f.conjugate()
    res = system.solve_single(mat, rhs)
    checks.append(
        ("algebraic round trip", float(np.abs(res.coeffs - f).max()), 1e-10)
    )
    rhs2 = rng.normal(size=n) + 1j * rng.normal(size=n)
    c1, c2 = 0.7 - 0.3j, -1.1 + 0.2j
    lhs = system.solve_single(mat, c1 * rhs + c2 * rhs2).coeffs
    rhsv = (
        np.conj(c1) * res.coeffs
        + np.conj(c2) * system.solve_single(mat, rhs2).coeffs
    )
    checks.append(
        ("conjugate linearity", float(np.abs(lhs - rhsv).max()), 1e-10)
    )
    quad = oracle.build_quadrature(2 * 2 + 2)
    b_closed = system.project_rhs(f, quad, mat.basis, coeffs=True)
    fields = oracle.basis_samples(mat.basis, quad)
    phi = np.tensordot(f, fields, axes=(0, 0))
    b_quad = system.project_rhs(phi, quad, mat.basis)
    checks.append(
        ("projection exactness", float(np.abs(b_closed - b_quad).max()), 1e-12)
    )
    return checks


SUITES = {
    "sphharm": suite_sphharm,
    "vsh": suite_vsh,
    "translation": suite_translation,
    "kelvin": suite_kelvin,
    "latsum": suite_latsum,
    "assembly": suite_assembly,
    "system": suite_system,
}


def run_suites(names=None, seed: int = 0):
    """Run the named suites (all by default); returns
    ``[(suite, check, residual, tol, passed), ...]``."""
    names = list(SUITES) if not names else list(names)
    rows = []
    for name in names:
        if name not in SUITES:
            raise KeyError(f"unknown suite {name!r}")
        rng = np.random.default_rng(seed)
        for check, residual, tol in SUITES[name](rng):
            rows.append((name, check, float(residual), float(tol), residual <= tol))
    return rows
