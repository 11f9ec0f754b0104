"""Closed-form oracles: Laguerre polynomials, the exact Aharonov-Bohm
harmonic spectrum and eigenfunctions, the angular mode basis, the free heat
kernel and exact zero-field Gaussian evolution."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad


def laguerre(n, mu, x):
    """Generalized Laguerre polynomial by the three-term recurrence in n.

    Parameters
    ----------
    n : int >= 0
    mu : float > -1
    x : float or ndarray, >= 0
    """
    if n < 0:
        raise ValueError(f"Laguerre degree must be >= 0, got {n}")
    if mu <= -1.0:
        raise ValueError(f"Laguerre parameter must exceed -1, got {mu}")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.shape else float(prev)
    cur = 1.0 + mu - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + mu - x) * cur - (k + mu) * prev) / (k + 1.0)
    return cur if cur.shape else float(cur)


@dataclass(frozen=True)
class ABLevel:
    value: float
    n: int
    m: int
    multiplicity: int


@dataclass(frozen=True)
class ABSpectrum:
    """Sorted low end of the Aharonov-Bohm harmonic spectrum n + (1+|m+flux|)/2."""

    flux: float
    levels: tuple[ABLevel, ...]

    @property
    def values(self):
        return tuple(lv.value for lv in self.levels)


def ab_spectrum(flux, count):
    """The ``count`` smallest levels n + (1 + |m + flux|)/2 with labels.

    The enumeration window is chosen so the returned multiset is provably
    complete: values grow linearly in n and |m|, so every candidate below the
    cap is covered by n <= cap and |m + flux| <= 2 cap.  Values are snapped
    to 12 decimals, which makes the exact flux-periodicity identities
    (flux -> flux + 1, flux -> -flux) hold as floating-point multisets.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    flux = float(flux)
    beta = abs(flux - round(flux))
    vcap = (1.0 + beta) / 2.0 + count + 1.0
    m_lo = math.floor(-flux - 2.0 * vcap) - 1
    m_hi = math.ceil(-flux + 2.0 * vcap) + 1
    entries = []
    for m in range(m_lo, m_hi + 1):
        mu = abs(m + flux)
        base = (1.0 + mu) / 2.0
        n = 0
        while base + n <= vcap:
            entries.append((round(base + n, 12), n, m))
            n += 1
    entries.sort(key=lambda e: (e[0], e[1], e[2]))
    picked = entries[:count]
    levels = []
    for value, n, m in picked:
        mult = sum(1 for v, _, _ in entries if abs(v - value) <= 1e-9)
        levels.append(ABLevel(value=value, n=n, m=m, multiplicity=mult))
    return ABSpectrum(flux=flux, levels=tuple(levels))


@dataclass(frozen=True)
class AngularMode:
    """Eigenfunction of K = i d/dtheta + alpha_inf on the circle, eigenvalue m + flux."""

    m: int
    flux: float
    alpha_inf: object = None       # callable theta -> alpha_inf(theta); None = constant flux

    def _alpha_cumulative(self, theta):
        theta = np.asarray(theta, dtype=float)
        if self.alpha_inf is None:
            return self.flux * theta
        nodes, weights = np.polynomial.legendre.leggauss(48)
        flat = np.atleast_1d(theta).ravel()
        tau = 0.5 * (nodes + 1.0)[None, :] * flat[:, None]
        try:
            vals = np.asarray(self.alpha_inf(tau), dtype=float)
            if vals.shape != tau.shape:
                raise TypeError
        except TypeError:
            vals = np.array([[float(self.alpha_inf(t)) for t in row] for row in tau])
        out = 0.5 * flat * (vals @ weights)
        return out.reshape(theta.shape) if theta.shape else float(out[0])

    def eval(self, theta):
        theta = np.asarray(theta, dtype=float)
        phase = (self.m + self.flux) * theta - self._alpha_cumulative(theta)
        return np.exp(-1j * phase) / math.sqrt(2.0 * math.pi)

    @property
    def eigenvalue(self):
        return self.m + self.flux


def angular_mode(m, flux, alpha_inf=None):
    return AngularMode(m=int(m), flux=float(flux), alpha_inf=alpha_inf)


def ab_eigenfunction(n, m, flux, r, theta):
    """Unnormalized eigenfunction r^mu e^{-r^2/8} L_n^mu(r^2/4) phi_m(theta), mu = |m+flux|.

    For rotationally symmetric fields the angular factor reduces to the pure
    phase e^{-i m theta} / sqrt(2 pi).
    """
    r = np.asarray(r, dtype=float)
    mu = abs(m + flux)
    radial = r**mu * np.exp(-(r**2) / 8.0) * laguerre(n, mu, r**2 / 4.0)
    return radial * AngularMode(m, flux).eval(theta)


def ab_eigenfunction_norm(n, m, flux, r_max=40.0):
    """L2 norm of the unnormalized eigenfunction, by radial quadrature."""
    mu = abs(m + flux)

    def integrand(r):
        return (r**mu * math.exp(-r * r / 8.0) * float(laguerre(n, mu, r * r / 4.0))) ** 2 * r

    val, _ = quad(integrand, 0.0, r_max, epsabs=1e-13, epsrel=1e-12, limit=300)
    return math.sqrt(val)


def free_heat_kernel(x, xp, t):
    """Free heat kernel (4 pi t)^{-1} exp(-|x - x'|^2 / (4 t)) in the plane."""
    if t <= 0.0:
        raise ValueError(f"time must be positive, got {t}")
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)
    d2 = np.sum((x - xp) ** 2, axis=-1)
    return np.exp(-d2 / (4.0 * t)) / (4.0 * math.pi * t)


def free_gaussian_norm(t, width):
    """Exact L2 norm of the freely evolved Gaussian exp(-|x|^2 / (2 width^2)).

    Admissible widths keep the initial datum in the Gaussian-weighted space,
    i.e. amplitude decay strictly faster than exp(-|x|^2/8):  width < 2.
    """
    width = float(width)
    if not 0.0 < width < 2.0:
        raise ValueError(f"width must lie in (0, 2) for weighted-space data, got {width}")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise ValueError("time must be >= 0")
    return math.sqrt(math.pi) * width**2 / np.sqrt(width**2 + 2.0 * t)


def free_gaussian_weighted_norm(width):
    """Exact weighted norm of the same Gaussian under the weight exp(|x|^2/4)."""
    width = float(width)
    if not 0.0 < width < 2.0:
        raise ValueError(f"width must lie in (0, 2), got {width}")
    a = 1.0 / width**2 - 0.25
    return math.sqrt(math.pi / a)
