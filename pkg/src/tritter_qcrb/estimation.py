"""Two-phase QFIM, lossless QCRB, and the variational bound under photon loss.

For number-operator generators the QFIM is four times the photon-number
covariance matrix of the two signal modes.  Loss is handled through a
per-mode Kraus parametrization with transmissivity ``eta`` and loss-position
parameter ``sigma``; the bound is maximized over ``sigma``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, SingularQFIMError
from .moments import MomentSet, covariance, variance

SINGULAR_RTOL = 1e-14
SIGMA_GRID_POINTS = 41
SIGMA_XTOL = 1e-6
SIGMA_MAX_HALFWIDTH = 16.0
INV_PHI = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class QFIMatrix:
    f00: float
    f11: float
    f01: float

    @property
    def determinant(self) -> float:
        return self.f00 * self.f11 - self.f01 ** 2

    def as_array(self) -> np.ndarray:
        return np.array([[self.f00, self.f01], [self.f01, self.f11]])


@dataclass(frozen=True)
class LossModel:
    eta: float
    sigma: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.eta <= 1.0:
            raise ValueError(f"transmissivity must lie in (0, 1], got {self.eta}")

    @property
    def delta(self) -> float:
        return self.eta * (1 - self.eta) * (1 + self.sigma) ** 2

    @property
    def mu(self) -> float:
        # sqrt(delta (1-eta)/eta) = (1-eta)|1+sigma|; the Kraus operators carry
        # the signed factor (1-eta)(1+sigma), so the root takes the sign of 1+sigma
        root = math.sqrt(self.delta * (1 - self.eta) / self.eta)
        return 1.0 - math.copysign(root, 1 + self.sigma)


def xi_coefficient(eta: float, sigma: float) -> float:
    return 1 - (1 - eta) * (1 + sigma)


def qfim_from_moments(ms: MomentSet) -> QFIMatrix:
    return QFIMatrix(4 * variance(ms, 0), 4 * variance(ms, 1), 4 * covariance(ms, 0, 1))


def trace_inverse(m: np.ndarray) -> float:
    """Trace of the inverse of a symmetric 2x2 matrix, refusing near-singular input."""
    a, b, c = float(m[0, 0]), float(m[0, 1]), float(m[1, 1])
    det = a * c - b * b
    if det <= 0.0 or det < SINGULAR_RTOL * abs(a * c):
        raise SingularQFIMError(f"phases not jointly identifiable (det={det:.3e})")
    return (a + c) / det


def qcrb_lossless(f: QFIMatrix) -> float:
    """Tr(F^-1): the summed single-shot variance bound of the two phases."""
    return trace_inverse(f.as_array())


def lossy_c_matrix(ms: MomentSet, losses) -> np.ndarray:
    """Variational information matrix for per-mode ``LossModel`` pair ``losses``."""
    l0, l1 = losses
    mu = (l0.mu, l1.mu)
    delta = (l0.delta, l1.delta)
    c = np.empty((2, 2))
    for j in range(2):
        c[j, j] = 4 * (mu[j] ** 2 * variance(ms, j) + delta[j] * ms.mean[j])
    c[0, 1] = c[1, 0] = 4 * mu[0] * mu[1] * covariance(ms, 0, 1)
    return c


def qcrb_lossy_symmetric(ms: MomentSet, eta: float, sigma: float) -> float:
    """Closed-form Tr(C^-1) for identical loss on both signal modes."""
    LossModel(eta, sigma)
    if not _is_symmetric(ms):
        raise ValueError("signal-mode variances differ; use lossy_c_matrix for asymmetric scenarios")
    var0 = variance(ms, 0)
    if var0 <= 0.0:
        raise SingularQFIMError("zero photon-number variance: phases not identifiable")
    xi = xi_coefficient(eta, sigma)
    if abs(xi) < 1e-12:
        raise NumericalError(f"degenerate Kraus parametrization at sigma={sigma}")
    cov = covariance(ms, 0, 1)
    omega = 1 + eta * (1 - eta) * (1 + sigma) ** 2 / xi ** 2 * ms.mean[0] / var0
    denom = (var0 * omega) ** 2 - cov ** 2
    if denom <= SINGULAR_RTOL * (var0 * omega) ** 2:
        raise SingularQFIMError("phases not jointly identifiable")
    return var0 * omega / (2 * xi ** 2 * denom)


def golden_section_max(f, lo: float, hi: float, xtol: float = SIGMA_XTOL) -> tuple[float, float]:
    """Maximize a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    c = hi - INV_PHI * (hi - lo)
    d = lo + INV_PHI * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > xtol:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - INV_PHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + INV_PHI * (hi - lo)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def _is_symmetric(ms: MomentSet) -> bool:
    var0, var1 = variance(ms, 0), variance(ms, 1)
    return abs(var0 - var1) <= 1e-6 * max(abs(var0), abs(var1))


def _maximize_over_sigma(objective, halfwidth: float) -> tuple[float, float]:
    while True:
        grid = np.linspace(-halfwidth, halfwidth, SIGMA_GRID_POINTS)
        values = np.array([objective(s) for s in grid])
        if not np.isfinite(values).any():
            raise NumericalError("every sigma grid point is degenerate")
        k = int(np.argmax(values))
        if k in (0, len(grid) - 1) and halfwidth < SIGMA_MAX_HALFWIDTH:
            halfwidth *= 2
            continue
        lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
        sigma, best = golden_section_max(objective, lo, hi)
        if values[k] > best:
            sigma, best = float(grid[k]), float(values[k])
        return float(sigma), float(best)


def optimize_sigma(ms: MomentSet, eta: float, halfwidth: float = 2.0) -> tuple[float, float]:
    """Maximize the symmetric lossy bound over the loss-position parameter.

    Coarse 41-point grid on ``[-w, w]`` then golden-section refinement around
    the best grid point; ``w`` doubles (up to 16) while the maximizer sits on
    the boundary.  At ``eta == 1`` the bound does not depend on sigma and 0 is
    returned for it.
    """
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"transmissivity must lie in (0, 1], got {eta}")
    if eta == 1.0:
        return 0.0, qcrb_lossy_symmetric(ms, 1.0, 0.0)

    def objective(sigma):
        try:
            return qcrb_lossy_symmetric(ms, eta, sigma)
        except SingularQFIMError:
            raise
        except NumericalError:
            return -math.inf

    return _maximize_over_sigma(objective, halfwidth)


def lossy_bound(ms: MomentSet, eta: float, sigma: float | None = None) -> tuple[float, float]:
    """Bound at fixed ``sigma``, or maximized over it when ``sigma`` is None.

    Uses the closed form when the two signal modes are statistically
    equivalent and the general 2x2 matrix (same sigma on both modes)
    otherwise.  Returns ``(sigma, bound)``.
    """
    if eta == 1.0:
        return (0.0 if sigma is None else sigma), qcrb_lossless(qfim_from_moments(ms))
    if _is_symmetric(ms):
        if sigma is None:
            return optimize_sigma(ms, eta)
        return sigma, qcrb_lossy_symmetric(ms, eta, sigma)

    def objective(s):
        loss = LossModel(eta, s)
        return trace_inverse(lossy_c_matrix(ms, (loss, loss)))

    if sigma is None:
        return _maximize_over_sigma(objective, 2.0)
    return sigma, objective(sigma)
