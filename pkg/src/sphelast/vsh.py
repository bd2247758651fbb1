"""Real and complex vector spherical harmonics.

Three families on the unit sphere, built from a scalar harmonic Y:

* ``V = grad_S Y - (l+1) Y r_hat``   (decaying-trace family),
* ``W = grad_S Y + l Y r_hat``       (growing-trace family),
* ``X = r_hat x grad_S Y``           (toroidal family).

``W(0,0)`` and ``X(0,0)`` are identically zero and excluded from any basis;
evaluating them through the public functions raises ``ForbiddenIndexError``
so indexing bugs surface immediately.  Series code that relies on the
zero-function semantics uses ``vsh_complex_or_zero``.

The surface gradient is evaluated analytically through the pole-safe
``pi``/``tau`` Legendre helpers and rotated to Cartesian components, so no
numerical differentiation happens anywhere in this module.

``vector_Y(j, l, m)`` is the total-angular-momentum harmonic of orbital
degree l; the three allowed ``j`` values are proportional to V, X, W of the
adjacent degrees, which is how translation series are converted back into
the three families.
"""

from __future__ import annotations

import math
from enum import IntEnum

import numpy as np

from .sphharm import (
    Direction,
    DomainError,
    assoc_legendre,
    pi_tau_row,
    sph_norm,
)

__all__ = [
    "Family",
    "ForbiddenIndexError",
    "CHI",
    "chi",
    "vsh_complex",
    "vsh_real",
    "vsh_complex_or_zero",
    "vector_Y",
    "cross_spherical",
    "rhat_dot_a_expand",
]

_SQRT2 = math.sqrt(2.0)


class Family(IntEnum):
    V = 1
    W = 2
    X = 3


class ForbiddenIndexError(ValueError):
    """Raised for basis labels naming an identically zero harmonic."""


# Spherical basis vectors chi_{1,q}.  chi_{1,0} is the unit z-vector; this is
# the unique choice consistent with both the cross-product rule
# chi_m x chi_n = i sgn(m-n) chi_{m+n} and the axis-projection expansion
# below (rhat_dot_a_expand).
CHI = {
    1: np.array([-1.0, 0.0, 0.0]) / _SQRT2 + 1j * np.array([0.0, -1.0, 0.0]) / _SQRT2,
    0: np.array([0.0, 0.0, 1.0]) + 0j,
    -1: np.array([1.0, 0.0, 0.0]) / _SQRT2 + 1j * np.array([0.0, -1.0, 0.0]) / _SQRT2,
}


def chi(q: int) -> np.ndarray:
    return CHI[q].copy()


def _check_indices(family: Family, l: int, m: int) -> None:
    family = Family(family)
    if l < 0 or abs(m) > l:
        raise DomainError(f"invalid harmonic index l={l} m={m}")
    if l == 0 and family in (Family.W, Family.X):
        raise ForbiddenIndexError(
            f"{family.name}(0,0) is identically zero and not a basis element"
        )


def _as_direction(d) -> Direction:
    if isinstance(d, Direction):
        return d
    return Direction.from_vector(np.asarray(d, dtype=float))


def _amplitudes(family: Family, l: int, m_abs: int, d: Direction):
    """Cartesian (real, imag) amplitude vectors of the ``m >= 0`` harmonic,
    without the azimuthal factor ``exp(i m phi)`` and without the
    Condon-Shortley phase."""
    r_hat, t_hat, p_hat = d.frame()
    norm = sph_norm(l, m_abs)
    pi_row, tau_row = pi_tau_row(l, m_abs, d.theta)
    a_tau = norm * tau_row[l]
    a_pi = norm * m_abs * pi_row[l]
    a_y = norm * assoc_legendre(l, m_abs, d.cos_theta)
    if family == Family.V:
        return a_tau * t_hat - (l + 1) * a_y * r_hat, a_pi * p_hat
    if family == Family.W:
        return a_tau * t_hat + l * a_y * r_hat, a_pi * p_hat
    return a_tau * p_hat, -a_pi * t_hat


def vsh_complex(family, l: int, m: int, d) -> np.ndarray:
    """Complex vector spherical harmonic as a Cartesian 3-vector."""
    family = Family(family)
    _check_indices(family, l, m)
    d = _as_direction(d)
    ma = abs(m)
    re, im = _amplitudes(family, l, ma, d)
    phase = complex(math.cos(ma * d.phi), math.sin(ma * d.phi))
    val = (-1) ** ma * (re + 1j * im) * phase
    if m < 0:
        val = (-1) ** ma * val.conjugate()
    return val


def vsh_real(family, l: int, m: int, d) -> np.ndarray:
    """Real vector spherical harmonic, evaluated in real arithmetic."""
    family = Family(family)
    _check_indices(family, l, m)
    d = _as_direction(d)
    ma = abs(m)
    re, im = _amplitudes(family, l, ma, d)
    if m == 0:
        return re
    c, s = math.cos(ma * d.phi), math.sin(ma * d.phi)
    if m > 0:
        return _SQRT2 * (re * c - im * s)
    return _SQRT2 * (re * s + im * c)


def vsh_complex_or_zero(family, l: int, m: int, d) -> np.ndarray:
    """As ``vsh_complex`` but returning the zero vector for the excluded
    labels and for ``|m| > l``; used inside re-expansion series."""
    family = Family(family)
    if l < 0 or abs(m) > l or (l == 0 and family in (Family.W, Family.X)):
        return np.zeros(3, dtype=complex)
    return vsh_complex(family, l, m, d)


def vector_Y(j: int, l: int, m: int, d) -> np.ndarray:
    """Total-angular-momentum vector harmonic of orbital degree ``l``.

    Returns the zero vector when the target family harmonic is identically
    zero (``j = l = 0``).
    """
    if abs(j - l) > 1 or j < 0 or l < 0:
        raise DomainError(f"need |j - l| <= 1, got j={j} l={l}")
    if abs(m) > j:
        raise DomainError(f"|m|={abs(m)} > j={j}")
    if j == l - 1:
        return vsh_complex_or_zero(Family.V, l - 1, m, d) / math.sqrt(
            l * (2 * l - 1)
        )
    if j == l:
        if l == 0:
            return np.zeros(3, dtype=complex)
        return -1j * vsh_complex_or_zero(Family.X, l, m, d) / math.sqrt(
            l * (l + 1)
        )
    return vsh_complex_or_zero(Family.W, l + 1, m, d) / math.sqrt(
        (l + 1) * (2 * l + 3)
    )


def cross_spherical(m: int, n: int) -> np.ndarray:
    """Cross product of spherical basis vectors:
    ``chi_m x chi_n = i sgn(m - n) chi_{m+n}``; zero when ``m = n`` or
    ``|m + n| > 1``."""
    if m not in (-1, 0, 1) or n not in (-1, 0, 1):
        raise DomainError("spherical basis orders must be in {-1, 0, 1}")
    if m == n or abs(m + n) > 1:
        return np.zeros(3, dtype=complex)
    sign = 1.0 if m > n else -1.0
    return 1j * sign * CHI[m + n]


def rhat_dot_a_expand(a) -> dict:
    """Spherical components of a constant vector ``a``, keyed so that the
    entry at key ``q`` is the component ``a_{-q}`` pairing with order ``q``:

    ``r_hat . a = sqrt(4 pi / 3) sum_q (-1)^q a_{-q} Y_1^q`` and
    ``a = sum_q (-1)^q a_{-q} chi_{1,q}``.
    """
    a = np.asarray(a, dtype=complex)
    return {
        1: (a[0] - 1j * a[1]) / _SQRT2,
        0: a[2] + 0j,
        -1: -(a[0] + 1j * a[1]) / _SQRT2,
    }
