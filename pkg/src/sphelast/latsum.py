"""Unit-circle polylogarithm/Lerch values and Bloch-phased lattice sums.

Summing a re-expansion coefficient over all lattice copies with phase
``e^{-i n alpha}`` collapses, because the shifts all lie on one axis, to
polylogarithm values at ``e^{+-i alpha}`` times two equator harmonics.  Four
sum families appear:

* ``lattice_decay_sum``  -- plain coefficient sum (order ``l+lam+1``),
* ``lattice_axis_sum``   -- weighted by the axis component of the shift
  (order ``l+lam``),
* ``lattice_moment_sum`` -- weighted by the squared shift length
  (order ``l+lam-1``),
* ``lattice_cross_sum``  -- cross-product coefficient sum (order ``l+lam``).

The ``*_dimer`` variants sum over a half-offset axis lattice (two balls per
cell) and evaluate through the Lerch transcendent with offsets ``2d`` and
``1 - 2d``; block "21" couples the right ball onto the left one, "12" the
reverse.

The polylogarithm and Lerch values themselves are delegated to mpmath at 30
significant digits and memoised in ``LatticeSumCache``; the brute-force
truncated sums live in the test suite, never here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

from .sphharm import ylm_equator
from .translation import cross_prefactor, decay_prefactor

__all__ = [
    "QuasiMomentumSingular",
    "DimerGeometry",
    "LatticeSumCache",
    "reduce_alpha",
    "polylog_unit",
    "lerch_unit",
    "lattice_decay_sum",
    "lattice_axis_sum",
    "lattice_moment_sum",
    "lattice_cross_sum",
    "lattice_decay_sum_dimer",
    "lattice_axis_sum_dimer",
    "lattice_moment_sum_dimer",
    "lattice_cross_sum_dimer",
    "AXIS_COMPONENT",
]

_DPS = 30
_TWO_PI = 2.0 * math.pi

# Spherical components of a unit shift along -x: the axis weight per unit
# (signed) shift length.
AXIS_COMPONENT = {-1: 1.0 / math.sqrt(2.0), 0: 0.0, 1: -1.0 / math.sqrt(2.0)}


class QuasiMomentumSingular(ValueError):
    """Bloch phase at which a conditionally convergent sum diverges."""


@dataclass(frozen=True)
class DimerGeometry:
    """Two disjoint balls of radius ``rho`` at ``(-d, 0, 0)`` and
    ``(d, 0, 0)`` in a unit cell."""

    d: float
    rho: float

    def __post_init__(self):
        if not 0.0 < self.rho < 0.5:
            raise ValueError("need 0 < rho < 1/2")
        if 2 * self.d <= 2 * self.rho:
            raise ValueError("balls overlap inside the cell (need d > rho)")
        if 1 - 2 * self.d <= 2 * self.rho:
            raise ValueError("balls overlap across cells (need 1 - 2d > 2 rho)")


def reduce_alpha(alpha: float, tol: float = 1e-12) -> float:
    """Reduce the Bloch phase mod 2 pi; rejects phases at the lattice
    resonance where order-1 sums diverge."""
    a = float(alpha) % _TWO_PI
    if a < tol or _TWO_PI - a < tol:
        raise QuasiMomentumSingular(
            "Bloch phase is congruent to 0 (mod 2 pi); the order-1 lattice "
            "sums diverge there"
        )
    return a


def _unit_z(alpha: float, sign: int):
    return mpmath.exp(mpmath.mpc(0, sign) * mpmath.mpf(alpha))


def polylog_unit(s: int, alpha: float, sign: int = 1) -> complex:
    """``Li_s(e^{i sign alpha})`` for integer ``s >= 1``."""
    if s < 1:
        raise ValueError("polylog order must be >= 1")
    if sign not in (1, -1):
        raise ValueError("sign must be +-1")
    alpha = reduce_alpha(alpha)
    with mpmath.workdps(_DPS):
        val = mpmath.polylog(s, _unit_z(alpha, sign))
        return complex(val)


def lerch_unit(s: int, alpha: float, sign: int, offset: float) -> complex:
    """Lerch transcendent ``Phi(e^{i sign alpha}, s, offset)`` for integer
    ``s >= 1`` and ``0 < offset <= 1``."""
    if s < 1:
        raise ValueError("Lerch order must be >= 1")
    if sign not in (1, -1):
        raise ValueError("sign must be +-1")
    if not 0.0 < offset <= 1.0:
        raise ValueError("offset must lie in (0, 1]")
    alpha = reduce_alpha(alpha)
    with mpmath.workdps(_DPS):
        val = mpmath.lerchphi(_unit_z(alpha, sign), s, mpmath.mpf(offset))
        return complex(val)


class LatticeSumCache:
    """Memoised polylog/Lerch values for one Bloch phase (and geometry).

    Keys are ``(s, sign, offset)`` with ``offset=None`` for the plain
    polylogarithm.  Writes are idempotent set-once insertions, so concurrent
    fills are safe.
    """

    def __init__(self, alpha: float, geom: DimerGeometry | None = None):
        self.alpha = reduce_alpha(alpha)
        self.geom = geom
        self._store: dict = {}

    def polylog(self, s: int, sign: int) -> complex:
        key = (s, sign, None)
        if key not in self._store:
            self._store[key] = polylog_unit(s, self.alpha, sign)
        return self._store[key]

    def lerch(self, s: int, sign: int, offset: float) -> complex:
        key = (s, sign, round(offset, 15))
        if key not in self._store:
            self._store[key] = lerch_unit(s, self.alpha, sign, offset)
        return self._store[key]

    def warm(self, s_max: int) -> None:
        """Precompute every order up to ``s_max`` (both phase signs, and
        both dimer offsets when a geometry is attached)."""
        for s in range(1, s_max + 1):
            for sign in (1, -1):
                self.polylog(s, sign)
                if self.geom is not None:
                    self.lerch(s, sign, 2 * self.geom.d)
                    self.lerch(s, sign, 1 - 2 * self.geom.d)

    def __len__(self) -> int:
        return len(self._store)


def _line_pair(s: int, alpha: float, cache: LatticeSumCache | None):
    if cache is None:
        cache = LatticeSumCache(alpha)
    return cache.polylog(s, -1), cache.polylog(s, 1)


def _dimer_pair(
    s: int, alpha: float, geom: DimerGeometry, block: str,
    cache: LatticeSumCache | None,
):
    """Lerch pair for the half-offset lattices.

    Block "21" sums shifts ``n + 2d``: positive side offsets ``2d``,
    negative side ``1 - 2d`` with one extra phase.  Block "12" mirrors the
    offsets ("negative" side at ``2d``).
    """
    if cache is None:
        cache = LatticeSumCache(alpha, geom)
    alpha = reduce_alpha(alpha)
    if block == "21":
        c_minus = cache.lerch(s, -1, 2 * geom.d)
        c_plus = complex(math.cos(alpha), math.sin(alpha)) * cache.lerch(
            s, 1, 1 - 2 * geom.d
        )
    elif block == "12":
        c_minus = complex(math.cos(alpha), -math.sin(alpha)) * cache.lerch(
            s, -1, 1 - 2 * geom.d
        )
        c_plus = cache.lerch(s, 1, 2 * geom.d)
    else:
        raise ValueError("block must be '21' or '12'")
    return c_minus, c_plus


def _equator_pair(l: int, m: int):
    if abs(m) > l:
        return 0.0, 0.0
    return ylm_equator(l, m, at_pi=True), ylm_equator(l, m, at_pi=False)


def _decay_like(l, lam, m, mu, pair, order_shift, plus_sign):
    pref = decay_prefactor(l, lam, m, mu)
    if pref == 0.0:
        return 0.0 + 0.0j
    big_l = l + lam
    y_pi, y_0 = _equator_pair(big_l, m - mu)
    if y_pi == 0.0 and y_0 == 0.0:
        return 0.0 + 0.0j
    c_minus, c_plus = pair(big_l + order_shift)
    pref *= math.sqrt(4.0 * math.pi / (2 * big_l + 1))
    return pref * (c_minus * y_pi + plus_sign * c_plus * y_0)


def lattice_decay_sum(l, lam, m, mu, alpha, cache=None) -> complex:
    """Phased sum of ``decay_coeff`` over all nonzero integer shifts."""
    return _decay_like(
        l, lam, m, mu, lambda s: _line_pair(s, alpha, cache), 1, 1.0
    )


def lattice_axis_sum(l, lam, m, mu, alpha, q, cache=None) -> complex:
    """Phased sum of ``decay_coeff`` weighted by the axis component of the
    shift; zero for ``q = 0``."""
    eps = AXIS_COMPONENT[q]
    if eps == 0.0:
        return 0.0 + 0.0j
    return eps * _decay_like(
        l, lam, m, mu, lambda s: _line_pair(s, alpha, cache), 0, -1.0
    )


def lattice_moment_sum(l, lam, m, mu, alpha, cache=None) -> complex:
    """Phased sum of ``decay_coeff`` weighted by the squared shift length."""
    return _decay_like(
        l, lam, m, mu, lambda s: _line_pair(s, alpha, cache), -1, 1.0
    )


def lattice_cross_sum(l, j, lam, m, mu, q, m1, alpha, cache=None) -> complex:
    """Phased sum of ``cross_coeff`` over all nonzero integer shifts."""
    eps = AXIS_COMPONENT[q]
    pref = cross_prefactor(l, j, lam, m, mu, q, m1)
    if eps == 0.0 or pref == 0.0:
        return 0.0 + 0.0j
    big_l = l + lam
    y_pi, y_0 = _equator_pair(big_l, m - mu)
    if y_pi == 0.0 and y_0 == 0.0:
        return 0.0 + 0.0j
    c_minus, c_plus = _line_pair(big_l, alpha, cache)
    pref = pref * eps * math.sqrt(4.0 * math.pi / (2 * big_l + 1))
    return pref * (c_minus * y_pi - c_plus * y_0)


def lattice_decay_sum_dimer(l, lam, m, mu, alpha, geom, block, cache=None) -> complex:
    return _decay_like(
        l, lam, m, mu,
        lambda s: _dimer_pair(s, alpha, geom, block, cache), 1, 1.0,
    )


def lattice_axis_sum_dimer(l, lam, m, mu, alpha, q, geom, block, cache=None) -> complex:
    eps = AXIS_COMPONENT[q]
    if eps == 0.0:
        return 0.0 + 0.0j
    return eps * _decay_like(
        l, lam, m, mu,
        lambda s: _dimer_pair(s, alpha, geom, block, cache), 0, -1.0,
    )


def lattice_moment_sum_dimer(l, lam, m, mu, alpha, geom, block, cache=None) -> complex:
    return _decay_like(
        l, lam, m, mu,
        lambda s: _dimer_pair(s, alpha, geom, block, cache), -1, 1.0,
    )


def lattice_cross_sum_dimer(
    l, j, lam, m, mu, q, m1, alpha, geom, block, cache=None
) -> complex:
    eps = AXIS_COMPONENT[q]
    pref = cross_prefactor(l, j, lam, m, mu, q, m1)
    if eps == 0.0 or pref == 0.0:
        return 0.0 + 0.0j
    big_l = l + lam
    y_pi, y_0 = _equator_pair(big_l, m - mu)
    if y_pi == 0.0 and y_0 == 0.0:
        return 0.0 + 0.0j
    c_minus, c_plus = _dimer_pair(big_l, alpha, geom, block, cache)
    pref = pref * eps * math.sqrt(4.0 * math.pi / (2 * big_l + 1))
    return pref * (c_minus * y_pi - c_plus * y_0)
