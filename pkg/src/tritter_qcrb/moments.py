"""Photon-number moment container and zero-delay second-order correlations.

Both simulation engines reduce their output state to a :class:`MomentSet`;
everything downstream (QFIM, bounds, CSV rows) only ever sees this type.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError

PAIRS = ((0, 1), (0, 2), (1, 2))


@dataclass(frozen=True)
class MomentSet:
    """First/second photon-number moments of a three-mode state.

    ``cross`` is ordered as :data:`PAIRS`, i.e. ``<n0 n1>, <n0 n2>, <n1 n2>``.
    ``intra4[j]`` is ``<a_j^dag^2 a_j^2>``.
    """

    mean: tuple[float, float, float]
    second: tuple[float, float, float]
    cross: tuple[float, float, float]
    intra4: tuple[float, float, float]

    def cross_moment(self, j: int, k: int) -> float:
        if j == k:
            return self.second[j]
        return self.cross[PAIRS.index((min(j, k), max(j, k)))]

    def as_array(self) -> np.ndarray:
        return np.array(self.mean + self.second + self.cross + self.intra4, dtype=float)

    @classmethod
    def from_array(cls, values) -> "MomentSet":
        v = [float(x) for x in values]
        if len(v) != 12:
            raise ValueError("a MomentSet has exactly 12 entries")
        return cls(tuple(v[0:3]), tuple(v[3:6]), tuple(v[6:9]), tuple(v[9:12]))

    def violations(self, tol: float = 1e-9) -> list[str]:
        """Names of the structural invariants this set breaks (empty if valid)."""
        bad = []
        for j in range(3):
            if self.mean[j] < -tol:
                bad.append(f"mean[{j}] negative")
            if self.second[j] < self.mean[j] ** 2 - tol:
                bad.append(f"variance[{j}] negative")
            if abs(self.intra4[j] - (self.second[j] - self.mean[j])) > tol * max(1.0, self.second[j]):
                bad.append(f"intra4[{j}] != second - mean")
        for j, k in PAIRS:
            bound = math.sqrt(max(variance(self, j), 0.0) * max(variance(self, k), 0.0))
            if abs(covariance(self, j, k)) > bound + tol * max(1.0, bound):
                bad.append(f"Cauchy-Schwarz broken for ({j},{k})")
        return bad


def vacuum_moments() -> MomentSet:
    z = (0.0, 0.0, 0.0)
    return MomentSet(z, z, z, z)


def variance(ms: MomentSet, j: int) -> float:
    return ms.second[j] - ms.mean[j] ** 2


def covariance(ms: MomentSet, j: int, k: int) -> float:
    if j == k:
        raise ValueError("covariance needs two distinct modes; use variance()")
    return ms.cross_moment(j, k) - ms.mean[j] * ms.mean[k]


def g2_intra(ms: MomentSet, j: int) -> float:
    """``<a^dag^2 a^2> / <n>^2`` for mode ``j``."""
    if ms.mean[j] <= 0.0:
        raise NumericalError(f"undefined correlation: mode {j} is empty")
    return ms.intra4[j] / ms.mean[j] ** 2


def g2_inter(ms: MomentSet, j: int, k: int) -> float:
    """``<n_j n_k> / (<n_j><n_k>)``."""
    if ms.mean[j] <= 0.0 or ms.mean[k] <= 0.0:
        raise NumericalError(f"undefined correlation: mode {j} or {k} is empty")
    return ms.cross_moment(j, k) / (ms.mean[j] * ms.mean[k])


def max_rel_discrepancy(a: MomentSet, b: MomentSet, floor: float = 1e-6) -> float:
    """Largest entrywise ``|a-b| / max(|a|, |b|, floor * scale)``.

    ``scale`` is the largest magnitude in either set (at least 1).  The floor
    keeps entries that vanish in both engines (e.g. the cross moment of a
    single photon) from turning round-off into an O(1) relative error.
    """
    x, y = a.as_array(), b.as_array()
    scale = max(1.0, float(np.max(np.abs(x))), float(np.max(np.abs(y))))
    denom = np.maximum(np.maximum(np.abs(x), np.abs(y)), floor * scale)
    return float(np.max(np.abs(x - y) / denom))
