"""Scalar spherical harmonics, associated Legendre functions and solid harmonics.

Conventions used throughout the package:

* complex harmonics carry the Condon-Shortley phase, i.e.
  ``Y(l, m) = (-1)^m N_lm P_l^m(cos theta) exp(i m phi)`` for ``m >= 0``
  with the *unsigned* associated Legendre function ``P_l^m``
  (``P_m^m = (2m-1)!! sin^m theta``), and
  ``Y(l, -m) = (-1)^m conj(Y(l, m))``;
* real harmonics follow the usual cos/sin convention
  (``m > 0`` pairs with ``cos(m phi)``, ``m < 0`` with ``sin(|m| phi)``),
  which is exactly the three-case combination of the complex ones;
* solid harmonics use the Racah normalisation
  ``sqrt(4 pi / (2l+1))`` so the regular one is a plain homogeneous
  polynomial (``solid_regular(1, 0, r) = z``).

Directions on the poles use ``phi = 0``; all harmonics stay well defined
there because every ``phi``-dependent term carries a ``sin theta`` factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Direction",
    "assoc_legendre",
    "legendre_row",
    "pi_tau_row",
    "ylm_complex",
    "ylm_real",
    "ylm_equator",
    "solid_regular",
    "solid_irregular",
    "sph_norm",
]

class DomainError(ValueError):
    """Raised when harmonic indices or arguments leave their valid range."""


@dataclass(frozen=True, eq=False)
class Direction:
    """A point on the unit sphere, stored both as angles and a unit vector.

    ``theta`` is the polar angle in ``[0, pi]``, ``phi`` the azimuth in
    ``[0, 2 pi)``.  On the poles ``phi`` is fixed to 0.
    """

    theta: float
    phi: float
    vec: np.ndarray = field(repr=False)

    @staticmethod
    def from_angles(theta: float, phi: float) -> "Direction":
        if not 0.0 <= theta <= math.pi + 1e-12:
            raise DomainError(f"theta={theta} outside [0, pi]")
        st = math.sin(theta)
        if st < 1e-15:
            phi = 0.0
        phi = phi % (2.0 * math.pi)
        vec = np.array(
            [st * math.cos(phi), st * math.sin(phi), math.cos(theta)]
        )
        return Direction(theta, phi, vec)

    @staticmethod
    def from_vector(v) -> "Direction":
        v = np.asarray(v, dtype=float)
        n = np.linalg.norm(v)
        if n == 0.0:
            raise DomainError("zero vector has no direction")
        u = v / n
        theta = math.acos(min(1.0, max(-1.0, u[2])))
        if math.hypot(u[0], u[1]) < 1e-15:
            phi = 0.0
        else:
            phi = math.atan2(u[1], u[0]) % (2.0 * math.pi)
        return Direction(theta, phi, u)

    @property
    def cos_theta(self) -> float:
        return math.cos(self.theta)

    @property
    def sin_theta(self) -> float:
        return math.sin(self.theta)

    def frame(self):
        """Orthonormal frame (r_hat, theta_hat, phi_hat) at this direction."""
        ct, st = math.cos(self.theta), math.sin(self.theta)
        cp, sp = math.cos(self.phi), math.sin(self.phi)
        r_hat = np.array([st * cp, st * sp, ct])
        t_hat = np.array([ct * cp, ct * sp, -st])
        p_hat = np.array([-sp, cp, 0.0])
        return r_hat, t_hat, p_hat


def _as_direction(d) -> Direction:
    if isinstance(d, Direction):
        return d
    return Direction.from_vector(np.asarray(d, dtype=float))


def _double_factorial(n: int) -> float:
    out = 1.0
    while n > 1:
        out *= n
        n -= 2
    return out


def legendre_row(lmax: int, m: int, u: float) -> np.ndarray:
    """Unsigned associated Legendre values ``P_l^m(u)`` for ``l = 0..lmax``.

    Upward three-term recurrence in ``l`` at fixed ``m``, seeded on the
    diagonal by the double-factorial product.  No Condon-Shortley phase.
    """
    if m < 0:
        raise DomainError("m must be >= 0 for legendre_row")
    if abs(u) > 1.0 + 1e-14:
        raise DomainError(f"|u|={abs(u)} > 1")
    u = min(1.0, max(-1.0, u))
    out = np.zeros(lmax + 1)
    if m > lmax:
        return out
    s = math.sqrt(max(0.0, 1.0 - u * u))
    pmm = _double_factorial(2 * m - 1) * s**m
    out[m] = pmm
    if m + 1 <= lmax:
        out[m + 1] = u * (2 * m + 1) * pmm
    for l in range(m + 1, lmax):
        out[l + 1] = ((2 * l + 1) * u * out[l] - (l + m) * out[l - 1]) / (
            l - m + 1
        )
    return out


def assoc_legendre(l: int, m: int, u: float) -> float:
    """Unsigned ``P_l^m(u)``; raises for ``m > l``, ``m < 0`` or ``|u| > 1``."""
    if not 0 <= m <= l:
        raise DomainError(f"need 0 <= m <= l, got l={l} m={m}")
    return float(legendre_row(l, m, u)[l])


def pi_tau_row(lmax: int, m: int, theta: float):
    """Pole-safe angular helper functions for the surface gradient.

    For ``m >= 1`` returns ``pi_l = P_l^m(cos theta)/sin theta`` and
    ``tau_l = d P_l^m(cos theta)/d theta`` for ``l = 0..lmax``; both stay
    finite on the poles because ``P_l^m`` carries ``sin^m theta``.
    For ``m = 0``, ``pi_l = 0`` and ``tau_l = -P_l^1``.
    """
    u, s = math.cos(theta), math.sin(theta)
    if m == 0:
        pi_row = np.zeros(lmax + 1)
        tau_row = -legendre_row(lmax, 1, u)
        return pi_row, tau_row
    pi_row = np.zeros(lmax + 1)
    if m <= lmax:
        pi_row[m] = _double_factorial(2 * m - 1) * s ** (m - 1)
        if m + 1 <= lmax:
            pi_row[m + 1] = u * (2 * m + 1) * pi_row[m]
        for l in range(m + 1, lmax):
            pi_row[l + 1] = (
                (2 * l + 1) * u * pi_row[l] - (l + m) * pi_row[l - 1]
            ) / (l - m + 1)
    tau_row = np.zeros(lmax + 1)
    for l in range(m, lmax + 1):
        prev = pi_row[l - 1] if l - 1 >= m else 0.0
        tau_row[l] = l * u * pi_row[l] - (l + m) * prev
    return pi_row, tau_row


def sph_norm(l: int, m: int) -> float:
    """Orthonormalisation constant ``sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!)``."""
    return math.sqrt(
        (2 * l + 1)
        / (4.0 * math.pi)
        * math.exp(math.lgamma(l - m + 1) - math.lgamma(l + m + 1))
    )


def ylm_complex(l: int, m: int, d) -> complex:
    """Orthonormal complex spherical harmonic with Condon-Shortley phase."""
    if abs(m) > l:
        raise DomainError(f"|m|={abs(m)} > l={l}")
    d = _as_direction(d)
    ma = abs(m)
    p = assoc_legendre(l, ma, d.cos_theta)
    val = (-1) ** ma * sph_norm(l, ma) * p * complex(
        math.cos(ma * d.phi), math.sin(ma * d.phi)
    )
    if m < 0:
        val = (-1) ** ma * val.conjugate()
    return val


def ylm_real(l: int, m: int, d) -> float:
    """Real spherical harmonic (cos/sin convention), evaluated in real arithmetic."""
    if abs(m) > l:
        raise DomainError(f"|m|={abs(m)} > l={l}")
    d = _as_direction(d)
    ma = abs(m)
    p = assoc_legendre(l, ma, d.cos_theta) * sph_norm(l, ma)
    if m == 0:
        return p
    if m > 0:
        return math.sqrt(2.0) * p * math.cos(ma * d.phi)
    return math.sqrt(2.0) * p * math.sin(ma * d.phi)


def ylm_equator(l: int, m: int, at_pi: bool = False) -> float:
    """``Y_l^m`` on the equator at azimuth 0 (or pi); real, zero for odd ``l+m``."""
    if abs(m) > l:
        raise DomainError(f"|m|={abs(m)} > l={l}")
    ma = abs(m)
    val = (-1) ** ma * sph_norm(l, ma) * assoc_legendre(l, ma, 0.0)
    if m < 0:
        val = (-1) ** ma * val
    if at_pi:
        val = (-1) ** ma * val
    return val


def solid_regular(l: int, m: int, r) -> complex:
    """Racah-normalised growing solid harmonic, ``|r|^l``-homogeneous."""
    r = np.asarray(r, dtype=float)
    n = float(np.linalg.norm(r))
    if n == 0.0:
        if l == 0:
            return complex(math.sqrt(4.0 * math.pi) * ylm_complex(0, 0, (0, 0, 1)))
        return 0.0 + 0.0j
    d = Direction.from_vector(r)
    return math.sqrt(4.0 * math.pi / (2 * l + 1)) * n**l * ylm_complex(l, m, d)


def solid_irregular(l: int, m: int, r) -> complex:
    """Racah-normalised decaying solid harmonic, ``|r|^{-l-1}``-homogeneous."""
    r = np.asarray(r, dtype=float)
    n = float(np.linalg.norm(r))
    if n == 0.0:
        raise DomainError("decaying solid harmonic is singular at the origin")
    d = Direction.from_vector(r)
    return (
        math.sqrt(4.0 * math.pi / (2 * l + 1))
        * ylm_complex(l, m, d)
        / n ** (l + 1)
    )
