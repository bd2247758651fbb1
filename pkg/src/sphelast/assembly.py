"""Matrix representation of the quasi-periodic single layer operator.

Every inner product of a row harmonic against the potential of a shifted
copy of a column harmonic reduces to one closed-form combination of four
primitive coefficient families (plain, axis-weighted, squared-moment and
cross-product).  The same combination is evaluated against three
interchangeable backends:

* ``_SingleShiftKernel``  -- the coefficients of one copy at a given shift
  (vectorised over many shifts), giving ``per_copy_entry``;
* ``_BlochKernel``        -- polylogarithm lattice sums over all integer
  shifts, giving the single-ball matrix entries;
* ``_DimerKernel``        -- Lerch sums over the half-offset lattices,
  giving the dimer coupling blocks.

Row/column structural zeros: a V-family density produces a pure W-family
potential off its own ball, so the (V,V) off-diagonal, (X,V) and (V,X)
entries vanish; ``per_copy_entry`` still evaluates the printed (V,X)
combination so its numerical vanishing can be tested, while the assembled
matrices store exact zeros there.

Basis ordering: degree ascending, order ``-l..l`` ascending, family V,W,X
innermost, with the two identically-zero degree-0 labels removed, giving
``3 (L+1)^2 - 2`` basis elements.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__ as _pkg_version
from .kelvin import LameParams, norm_factor, response_coeffs
from .coupling import cg
from .latsum import (
    DimerGeometry,
    LatticeSumCache,
    lattice_axis_sum,
    lattice_axis_sum_dimer,
    lattice_cross_sum,
    lattice_cross_sum_dimer,
    lattice_decay_sum,
    lattice_decay_sum_dimer,
    lattice_moment_sum,
    lattice_moment_sum_dimer,
    reduce_alpha,
    AXIS_COMPONENT,
)
from .sphharm import ylm_equator
from .translation import (
    combine_row,
    combine_source,
    cross_prefactor,
    decay_prefactor,
    recoupling_weight,
)
from .vsh import Family, ForbiddenIndexError

__all__ = [
    "BASIS_VERSION",
    "BasisMap",
    "AssembledMatrix",
    "per_copy_entry",
    "per_copy_entries",
    "entry_single",
    "assemble_single",
    "entry_dimer",
    "assemble_dimer",
]

BASIS_VERSION = "vwx-ordered-1"


class BasisMap:
    """Ordered basis labels ``(l, m, family)`` up to ``L_max``."""

    def __init__(self, l_max: int):
        if l_max < 0:
            raise ValueError("L_max must be >= 0")
        self.l_max = l_max
        self.labels = []
        for l in range(l_max + 1):
            for m in range(-l, l + 1):
                for fam in (Family.V, Family.W, Family.X):
                    if l == 0 and fam != Family.V:
                        continue
                    self.labels.append((l, m, fam))
        self._lookup = {lab: i for i, lab in enumerate(self.labels)}

    @property
    def n_eff(self) -> int:
        return len(self.labels)

    def index_of(self, l: int, m: int, family) -> int:
        family = Family(family)
        if l == 0 and family != Family.V:
            raise ForbiddenIndexError(
                f"{family.name}(0,0) is excluded from the basis"
            )
        try:
            return self._lookup[(l, m, family)]
        except KeyError:
            raise IndexError(f"label (l={l}, m={m}, {family.name}) "
                             f"outside basis with L_max={self.l_max}") from None

    def __iter__(self):
        return iter(self.labels)

    def __len__(self):
        return len(self.labels)


@dataclass
class AssembledMatrix:
    """Dense operator matrix with the inputs that produced it."""

    matrix: np.ndarray
    basis: BasisMap
    alpha: float
    rho: float
    params: LameParams
    l_max: int
    dimer: DimerGeometry | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.meta.setdefault("basis_version", BASIS_VERSION)
        self.meta.setdefault("tool_version", _pkg_version)


# ---------------------------------------------------------------------------
# kernel backends


class _SingleShiftKernel:
    """Coefficient values of single shifted copies at signed shift lengths
    ``N`` (the shift vector is ``(N, 0, 0)``); vectorised over ``N``."""

    def __init__(self, shifts):
        self.n = np.atleast_1d(np.asarray(shifts, dtype=float))
        if np.any(self.n == 0.0):
            raise ValueError("shift lengths must be nonzero")
        self._pos = self.n > 0
        self._ieq_cache = {}

    def zero(self):
        return np.zeros_like(self.n, dtype=complex)

    def _ieq(self, big_l: int, t: int):
        key = (big_l, t)
        if key not in self._ieq_cache:
            if abs(t) > big_l:
                self._ieq_cache[key] = np.zeros_like(self.n)
            else:
                y = np.where(
                    self._pos,
                    ylm_equator(big_l, t, at_pi=True),
                    ylm_equator(big_l, t, at_pi=False),
                )
                self._ieq_cache[key] = (
                    math.sqrt(4.0 * math.pi / (2 * big_l + 1))
                    * y
                    * np.abs(self.n) ** (-big_l - 1)
                )
        return self._ieq_cache[key]

    def plain(self, l, lam, mt, mu):
        pref = decay_prefactor(l, lam, mt, mu)
        if pref == 0.0:
            return self.zero()
        return pref * self._ieq(l + lam, mt - mu).astype(complex)

    def axis(self, l, lam, mt, mu, q):
        eps = AXIS_COMPONENT[q]
        if eps == 0.0:
            return self.zero()
        return eps * self.n * self.plain(l, lam, mt, mu)

    def moment(self, l, lam, mt, mu):
        return self.n * self.n * self.plain(l, lam, mt, mu)

    def cross(self, l, j, lam, mt, mu, q, m1):
        eps = AXIS_COMPONENT[q]
        pref = cross_prefactor(l, j, lam, mt, mu, q, m1)
        if eps == 0.0 or pref == 0.0:
            return self.zero()
        return pref * eps * self.n * self._ieq(l + lam, mt - mu)


class _BlochKernel:
    """Full-lattice sums through the polylogarithm closed forms."""

    def __init__(self, alpha: float, cache: LatticeSumCache | None = None):
        self.alpha = reduce_alpha(alpha)
        self.cache = cache if cache is not None else LatticeSumCache(alpha)

    @staticmethod
    def zero():
        return 0.0 + 0.0j

    def plain(self, l, lam, mt, mu):
        return lattice_decay_sum(l, lam, mt, mu, self.alpha, self.cache)

    def axis(self, l, lam, mt, mu, q):
        return lattice_axis_sum(l, lam, mt, mu, self.alpha, q, self.cache)

    def moment(self, l, lam, mt, mu):
        return lattice_moment_sum(l, lam, mt, mu, self.alpha, self.cache)

    def cross(self, l, j, lam, mt, mu, q, m1):
        return lattice_cross_sum(l, j, lam, mt, mu, q, m1, self.alpha, self.cache)


class _DimerKernel:
    """Half-offset lattice sums through the Lerch closed forms."""

    def __init__(self, alpha, geom, block, cache=None):
        self.alpha = reduce_alpha(alpha)
        self.geom = geom
        self.block = block
        self.cache = cache if cache is not None else LatticeSumCache(alpha, geom)

    @staticmethod
    def zero():
        return 0.0 + 0.0j

    def plain(self, l, lam, mt, mu):
        return lattice_decay_sum_dimer(
            l, lam, mt, mu, self.alpha, self.geom, self.block, self.cache
        )

    def axis(self, l, lam, mt, mu, q):
        return lattice_axis_sum_dimer(
            l, lam, mt, mu, self.alpha, q, self.geom, self.block, self.cache
        )

    def moment(self, l, lam, mt, mu):
        return lattice_moment_sum_dimer(
            l, lam, mt, mu, self.alpha, self.geom, self.block, self.cache
        )

    def cross(self, l, j, lam, mt, mu, q, m1):
        return lattice_cross_sum_dimer(
            l, j, lam, mt, mu, q, m1, self.alpha, self.geom, self.block, self.cache
        )


# ---------------------------------------------------------------------------
# the shared combination


def _combined_value(p, lp, mp, q, l, m, rho, params, ker):
    """Evaluate one (row family p, column family q) inner-product
    combination against a kernel backend.  The radial factors are all
    instantiated on the ball surface (r = rho)."""
    p, q = Family(p), Family(q)
    r = rho
    a11, a12, a22, a33 = response_coeffs(l, params)

    def hc(lam, mu):
        return combine_source(m, lambda mt: ker.plain(l, lam, mt, mu))

    def ac(lam, mu, qq):
        return combine_source(m, lambda mt: ker.axis(l, lam, mt, mu, qq))

    def dc(lam, mu):
        return combine_source(m, lambda mt: ker.moment(l, lam, mt, mu))

    def lc(j, lam, mu, qq, m1):
        return combine_source(
            m, lambda mt: ker.cross(l, j, lam, mt, mu, qq, m1)
        )

    if q == Family.V:
        if p != Family.W:
            return ker.zero()

        def row(mu):
            return (
                rho ** (l + 3)
                * a11
                * r ** (lp - 1)
                * norm_factor(Family.W, lp)
                * hc(lp, mu)
            )

        return combine_row(mp, row)

    if q == Family.X:
        if p == Family.V:
            pref = (
                rho ** (l + 2)
                * a33
                * r ** (lp + 1)
                * math.sqrt(norm_factor(Family.V, lp))
            )

            def row(mu):
                acc = ker.zero()
                for qq in (-1, 0, 1):
                    for m1 in (-1, 0, 1):
                        acc = acc + lc(lp, lp + 2, mu - qq, qq, m1)
                return pref * acc

            return combine_row(mp, row)

        if p == Family.W:
            pref = (
                rho ** (l + 2)
                * a33
                * r ** (lp - 1)
                * math.sqrt(norm_factor(Family.W, lp))
            )

            def row(mu):
                acc = ker.zero()
                for qq in (-1, 0, 1):
                    for m1 in (-1, 0, 1):
                        acc = acc + lc(lp, lp, mu - qq, qq, m1)
                return pref * acc

            return combine_row(mp, row)

        pref = rho ** (l + 2) * a33 * r**lp
        n3 = norm_factor(Family.X, lp)

        def row(mu):
            acc = ker.zero()
            for qq in (-1, 0, 1):
                for m1 in (-1, 0, 1):
                    acc = acc + lc(lp, lp + 1, mu - qq, qq, m1)
            return pref * (n3 * hc(lp, mu) - 1j * math.sqrt(n3) * acc)

        return combine_row(mp, row)

    # q == Family.W
    if p == Family.V:
        n1 = norm_factor(Family.V, lp)

        def row(mu):
            t1 = ker.zero()
            for lam in (lp + 1, lp + 3):
                for qq in (-1, 0, 1):
                    for m1 in (-1, 0, 1):
                        w = recoupling_weight(lp + 1, lp, lam, m1, mu - qq, qq)
                        if w == 0.0:
                            continue
                        t1 = t1 + r**lam * w * ac(lam, mu - qq, qq)
            t1 = 2.0 * rho ** (l + 1) * (a22 - a12) * math.sqrt(n1) * t1
            t2 = (
                -rho ** (l + 1)
                * a22
                * r ** (lp + 1)
                * (2 * l + 1)
                * (lp + 1)
                * hc(lp, mu)
            )
            t3 = ker.zero()
            for qq in (-1, 0, 1):
                w = cg(lp + 1, mu - qq, 1, qq, lp, mu)
                if w == 0.0:
                    continue
                t3 = t3 + (-1.0) ** qq * w * ac(lp + 1, mu - qq, qq)
            t3 = (
                rho ** (l + 1)
                * a22
                * r ** (lp + 1)
                * (2 * l + 1)
                * math.sqrt(n1)
                * t3
            )
            return t1 + t2 + t3

        return combine_row(mp, row)

    if p == Family.X:
        n3 = norm_factor(Family.X, lp)

        def row(mu):
            t1 = ker.zero()
            for lam in (lp, lp + 2):
                for qq in (-1, 0, 1):
                    for m1 in (-1, 0, 1):
                        w = recoupling_weight(lp, lp, lam, m1, mu - qq, qq)
                        if w == 0.0:
                            continue
                        t1 = t1 + r**lam * w * ac(lam, mu - qq, qq)
            t1 = -2j * rho ** (l + 1) * (a22 - a12) * math.sqrt(n3) * t1
            t3 = ker.zero()
            for qq in (-1, 0, 1):
                w = cg(lp, mu - qq, 1, qq, lp, mu)
                if w == 0.0:
                    continue
                t3 = t3 + (-1.0) ** qq * w * ac(lp, mu - qq, qq)
            t3 = (
                -1j
                * rho ** (l + 1)
                * a22
                * r**lp
                * (2 * l + 1)
                * math.sqrt(n3)
                * t3
            )
            return t1 + t3

        return combine_row(mp, row)

    # (W, W)
    n2 = norm_factor(Family.W, lp)

    def row(mu):
        bracket = (
            rho ** (l + 3) * a12 * r ** (lp - 1)
            + rho ** (l + 1) * (a22 - a12) * r ** (lp + 1)
            + rho ** (l + 1) * a22 * r ** (lp + 1) * (2 * l + 1) / (2 * lp + 1)
        )
        t0 = n2 * (
            bracket * hc(lp, mu)
            + rho ** (l + 1) * (a22 - a12) * r ** (lp - 1) * dc(lp, mu)
        )
        t1 = ker.zero()
        for lam in (lp - 1, lp + 1):
            if lam < 1:
                continue
            for qq in (-1, 0, 1):
                for m1 in (-1, 0, 1):
                    w = recoupling_weight(lp - 1, lp, lam, m1, mu - qq, qq)
                    if w == 0.0:
                        continue
                    t1 = t1 + r**lam * w * ac(lam, mu - qq, qq)
        t1 = 2.0 * rho ** (l + 1) * (a22 - a12) * math.sqrt(n2) * t1
        t3 = ker.zero()
        for qq in (-1, 0, 1):
            w = cg(lp - 1, mu - qq, 1, qq, lp, mu)
            if w == 0.0:
                continue
            t3 = t3 + (-1.0) ** qq * w * ac(lp - 1, mu - qq, qq)
        t3 = (
            rho ** (l + 1)
            * a22
            * (2 * l + 1)
            * math.sqrt(n2)
            * r ** (lp - 1)
            * t3
        )
        return t0 + t1 + t3

    return combine_row(mp, row)


def _check_labels(p, lp, mp, q, l, m):
    for fam, deg, order in ((p, lp, mp), (q, l, m)):
        fam = Family(fam)
        if deg < 0 or abs(order) > deg:
            raise IndexError(f"invalid label (l={deg}, m={order})")
        if deg == 0 and fam != Family.V:
            raise ForbiddenIndexError(
                f"{fam.name}(0,0) is excluded from the basis"
            )


def per_copy_entries(p, lp, mp, q, l, m, shifts, rho, params: LameParams):
    """Inner products against one shifted copy, vectorised over the signed
    shift lengths; values are real up to roundoff but returned complex."""
    _check_labels(p, lp, mp, q, l, m)
    ker = _SingleShiftKernel(shifts)
    val = _combined_value(p, lp, mp, q, l, m, rho, params, ker)
    if np.isscalar(val) or np.ndim(val) == 0:
        return np.full_like(ker.n, complex(val), dtype=complex)
    return np.asarray(val, dtype=complex)


def per_copy_entry(p, lp, mp, q, l, m, n, rho, params: LameParams) -> float:
    """Single-copy inner product at shift ``(n, 0, 0)``, ``n != 0``.

    The result is mathematically real; the imaginary roundoff residue is
    asserted below 1e-12.
    """
    val = complex(per_copy_entries(p, lp, mp, q, l, m, [n], rho, params)[0])
    if abs(val.imag) > 1e-12 * max(1.0, abs(val.real)):
        raise AssertionError(
            f"per-copy value unexpectedly complex: {val!r}"
        )
    return val.real


def _diagonal_term(p, q, l, lp, m, mp, rho, params):
    if p != q or l != lp or m != mp:
        return 0.0
    a11, a12, a22, a33 = response_coeffs(l, params)
    tau = {Family.V: a11, Family.W: a22, Family.X: a33}[Family(p)]
    return rho * tau * norm_factor(p, l)


def entry_single(
    p, lp, mp, q, l, m, alpha, rho, params: LameParams, cache=None
) -> complex:
    """One entry of the quasi-periodic operator matrix: the on-ball
    diagonal plus the phased sum over all other copies in closed form."""
    _check_labels(p, lp, mp, q, l, m)
    p, q = Family(p), Family(q)
    diag = _diagonal_term(p, q, l, lp, m, mp, rho, params)
    if (p, q) in ((Family.V, Family.X), (Family.X, Family.V)):
        return 0.0 + 0.0j
    if p == Family.V and q == Family.V:
        return complex(diag)
    ker = _BlochKernel(alpha, cache)
    return complex(_combined_value(p, lp, mp, q, l, m, rho, params, ker) + diag)


def entry_dimer(
    block, p, lp, mp, q, l, m, alpha, geom: DimerGeometry,
    params: LameParams, cache=None,
) -> complex:
    """One coupling-block entry (source ball ``s`` onto target ``t`` for
    block = "st"): the phased sum over the half-offset lattice, including
    the in-cell copy, with no on-ball diagonal."""
    _check_labels(p, lp, mp, q, l, m)
    p, q = Family(p), Family(q)
    if (p, q) in ((Family.V, Family.X), (Family.X, Family.V)):
        return 0.0 + 0.0j
    if p == Family.V and q == Family.V:
        return 0.0 + 0.0j
    ker = _DimerKernel(alpha, geom, block, cache)
    return complex(_combined_value(p, lp, mp, q, l, m, geom.rho, params, ker))


def _fill(basis, entry_fn, n_threads=1):
    n = basis.n_eff
    out = np.zeros((n, n), dtype=complex)

    def fill_col(col):
        l, m, qfam = basis.labels[col]
        for row in range(n):
            lp, mp, pfam = basis.labels[row]
            out[row, col] = entry_fn(pfam, lp, mp, qfam, l, m)

    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            list(pool.map(fill_col, range(n)))
    else:
        for col in range(n):
            fill_col(col)
    return out


def assemble_single(
    alpha, rho, params: LameParams, l_max: int, n_threads: int = 1
) -> AssembledMatrix:
    """Assemble the full single-ball operator matrix at one Bloch phase."""
    if not 0.0 < rho < 0.5:
        raise ValueError("need 0 < rho < 1/2")
    basis = BasisMap(l_max)
    cache = LatticeSumCache(alpha)
    cache.warm(2 * l_max + 3)

    def entry(pfam, lp, mp, qfam, l, m):
        return entry_single(pfam, lp, mp, qfam, l, m, alpha, rho, params, cache)

    mat = _fill(basis, entry, n_threads)
    return AssembledMatrix(
        matrix=mat, basis=basis, alpha=reduce_alpha(alpha), rho=rho,
        params=params, l_max=l_max,
    )


def assemble_dimer(
    alpha, geom: DimerGeometry, params: LameParams, l_max: int,
    n_threads: int = 1,
) -> AssembledMatrix:
    """Assemble the two-ball block matrix ``[[M11, M21], [M12, M22]]``.

    The self blocks are the single-ball matrix; the coupling blocks sum the
    shifted copies of the other ball (block "st" maps the density on ball s
    to values on ball t).
    """
    basis = BasisMap(l_max)
    n = basis.n_eff
    self_block = assemble_single(alpha, geom.rho, params, l_max, n_threads)
    cache = LatticeSumCache(alpha, geom)
    cache.warm(2 * l_max + 3)

    def entry_for(block):
        def entry(pfam, lp, mp, qfam, l, m):
            return entry_dimer(
                block, pfam, lp, mp, qfam, l, m, alpha, geom, params, cache
            )
        return entry

    m21 = _fill(basis, entry_for("21"), n_threads)
    m12 = _fill(basis, entry_for("12"), n_threads)
    big = np.zeros((2 * n, 2 * n), dtype=complex)
    big[:n, :n] = self_block.matrix
    big[:n, n:] = m21
    big[n:, :n] = m12
    big[n:, n:] = self_block.matrix
    return AssembledMatrix(
        matrix=big, basis=basis, alpha=reduce_alpha(alpha), rho=geom.rho,
        params=params, l_max=l_max, dimer=geom,
    )
