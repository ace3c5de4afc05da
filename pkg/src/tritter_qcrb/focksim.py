"""Brute-force three-mode Fock-space simulator used as the oracle for :mod:`cfpoly`.

The state is a dense ``(d, d, d)`` amplitude tensor.  Every optical element
is applied as ``exp(G) psi`` for its quadratic generator ``G``, summed as a
Taylor series on short sub-steps until the appended term is negligible.
"""
from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .cfpoly import tritter_matrix
from .errors import ConvergenceError, TruncationError
from .moments import PAIRS, MomentSet, max_rel_discrepancy
from .scenario import Scenario

log = logging.getLogger(__name__)

SERIES_TOL = 1e-14
DEFICIT_TOL = 1e-10
CUTOFF_STEP = 8
CUTOFF_CAP = 224
# generator norm allowed per Taylor sub-step
STEP_NORM = 1.0


@dataclass
class FockState3:
    """Truncated three-mode pure state; occupations ``0..cutoff-1`` per mode.

    ``amplitudes.ravel()`` is the row-major ``(n0, n1, n2)`` vector.
    ``norm_deficit`` is the probability pushed past the cutoff so far.
    """

    cutoff: int
    amplitudes: np.ndarray
    norm_deficit: float = 0.0

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (self.cutoff,) * 3:
            self.amplitudes = self.amplitudes.reshape((self.cutoff,) * 3)

    @property
    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def copy(self) -> "FockState3":
        return FockState3(self.cutoff, self.amplitudes.copy(), self.norm_deficit)

    def renormalize(self) -> "FockState3":
        self.amplitudes /= math.sqrt(self.norm_squared)
        return self


def make_fock_state(n0: int, n1: int, n2: int, cutoff: int) -> FockState3:
    if min(n0, n1, n2) < 0 or max(n0, n1, n2) >= cutoff:
        raise ValueError(f"occupation ({n0},{n1},{n2}) does not fit cutoff {cutoff}")
    amps = np.zeros((cutoff,) * 3, complex)
    amps[n0, n1, n2] = 1.0
    return FockState3(cutoff, amps)


def make_w_state(n: int, cutoff: int) -> FockState3:
    if cutoff <= n:
        raise ValueError(f"cutoff {cutoff} too small for {n} photons")
    amps = np.zeros((cutoff,) * 3, complex)
    amps[n, 0, 0] = amps[0, n, 0] = amps[0, 0, n] = 1 / math.sqrt(3.0)
    return FockState3(cutoff, amps)


def _shape_axis(k: int, length: int) -> tuple:
    shape = [1, 1, 1]
    shape[k] = length
    return tuple(shape)


def _lower(x: np.ndarray, k: int) -> np.ndarray:
    """Annihilation operator on axis ``k``; the top occupation becomes 0."""
    length = x.shape[k]
    out = np.zeros_like(x)
    src = [slice(None)] * 3
    dst = [slice(None)] * 3
    src[k] = slice(1, None)
    dst[k] = slice(0, length - 1)
    out[tuple(dst)] = x[tuple(src)] * np.sqrt(np.arange(1, length)).reshape(_shape_axis(k, length - 1))
    return out


def _raise(x: np.ndarray, k: int) -> np.ndarray:
    """Creation operator on axis ``k``, truncated at the existing length."""
    length = x.shape[k]
    out = np.zeros_like(x)
    src = [slice(None)] * 3
    dst = [slice(None)] * 3
    src[k] = slice(0, length - 1)
    dst[k] = slice(1, None)
    out[tuple(dst)] = x[tuple(src)] * np.sqrt(np.arange(1, length)).reshape(_shape_axis(k, length - 1))
    return out


def _taylor_step(apply_gen, psi: np.ndarray, max_terms: int) -> np.ndarray:
    """``sum_k G^k psi / k!`` with ``apply_gen`` already scaled by the step.

    ``apply_gen`` may grow the array; shorter partial sums are zero-padded.
    """
    total = psi.copy()
    term = psi
    for k in range(1, max_terms + 1):
        term = apply_gen(term) / k
        if term.shape != total.shape:
            total = _pad_to(total, term.shape)
        total += term
        if np.linalg.norm(term) < SERIES_TOL:
            return total
    raise ConvergenceError(f"Taylor series did not converge within {max_terms} terms")


def _pad_to(x: np.ndarray, shape) -> np.ndarray:
    return np.pad(x, [(0, s - t) for s, t in zip(shape, x.shape)])


def _is_unitary(u: np.ndarray, tol: float = 1e-12) -> bool:
    return np.allclose(u @ u.conj().T, np.eye(len(u)), atol=tol, rtol=0)


def apply_passive_unitary(state: FockState3, u) -> FockState3:
    """Evolve by exp(-i H), H = sum_jk h_jk a_j^dag a_k with h = i log(u).

    The result satisfies U^dag a U = u a for the mode vector a, so one photon
    in mode k ends up with amplitudes ``u[:, k]``.  H conserves the total
    photon number, so only the occupied sub-cube is evolved.
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (3, 3) or not _is_unitary(u):
        raise ValueError("passive transform must be a 3x3 unitary")
    h = 1j * scipy.linalg.logm(u)
    h = 0.5 * (h + h.conj().T)
    d = state.cutoff
    occ = np.arange(d)
    total = occ[:, None, None] + occ[None, :, None] + occ[None, None, :]
    support = np.abs(state.amplitudes) > 0
    n_max = int(total[support].max()) if support.any() else 0
    if n_max >= d:
        raise TruncationError(f"{n_max} photons cannot be redistributed within cutoff {d}; increase cutoff")
    steps = max(1, math.ceil(float(np.linalg.norm(h, 2)) * max(n_max, 1) / STEP_NORM))

    def gen(x):
        out = np.zeros_like(x)
        for j in range(3):
            for k in range(3):
                if h[j, k] != 0:
                    out += h[j, k] * _raise(_lower(x, k), j)
        return (-1j / steps) * out

    box = (slice(0, n_max + 1),) * 3
    psi = state.amplitudes[box].copy()
    for _ in range(steps):
        psi = _taylor_step(gen, psi, 10 * d)
    amps = np.zeros_like(state.amplitudes)
    amps[box] = psi
    return FockState3(d, amps, state.norm_deficit)


@functools.lru_cache(maxsize=64)
def squeeze_propagator(cutoff: int, r: float) -> np.ndarray:
    """Single-mode matrix of exp[(r/2)(a^dag^2 - a^2)] with per-step truncation.

    Each sub-step is summed exactly on an occupation axis that grows by two
    per Taylor term; rows at occupation >= cutoff are then discarded.  The
    result is a contraction whose norm loss is the truncation leakage.
    """
    # (r/2)||a^dag^2 - a^2|| on levels below L is about |r| L
    steps = max(1, math.ceil(abs(r) * (cutoff + 2) / STEP_NORM))
    scale = 0.5 * r / steps

    def gen(x):
        rows = x.shape[0]
        n = np.arange(rows, dtype=float)
        up = np.sqrt((n + 1) * (n + 2))
        out = np.zeros((rows + 2, x.shape[1]), complex)
        out[2:] += x * up[:rows, None]
        if rows > 2:
            out[: rows - 2] -= x[2:] * up[: rows - 2, None]
        return scale * out

    prop = np.eye(cutoff, dtype=complex)
    for _ in range(steps):
        prop = _taylor_step(gen, prop, max(10 * cutoff, 64))[:cutoff]
    prop.setflags(write=False)
    return prop


def apply_squeeze(state: FockState3, mode: int, r: float, deficit_tol: float = DEFICIT_TOL) -> FockState3:
    """Evolve mode ``mode`` by exp[(r/2)(a^dag^2 - a^2)].

    Probability pushed past the cutoff is added to ``norm_deficit``; the
    state is not renormalized.
    """
    if not math.isfinite(r):
        raise ValueError("squeeze parameter must be finite")
    if r == 0.0:
        return state.copy()
    d = state.cutoff
    prop = squeeze_propagator(d, float(r))
    psi = np.moveaxis(np.tensordot(prop, state.amplitudes, axes=([1], [mode])), 0, mode)
    lost = max(state.norm_squared - float(np.vdot(psi, psi).real), 0.0)
    if lost > deficit_tol:
        raise TruncationError(f"cutoff {d} loses {lost:.2e} probability in mode {mode}; increase cutoff")
    return FockState3(d, psi, state.norm_deficit + lost)


def apply_phase(state: FockState3, mode: int, phi: float) -> FockState3:
    """Multiply the occupation-``n`` amplitudes of ``mode`` by exp(i phi n)."""
    d = state.cutoff
    factor = np.exp(1j * phi * np.arange(d)).reshape(_shape_axis(mode, d))
    return FockState3(d, state.amplitudes * factor, state.norm_deficit)


def expectation(state: FockState3, p, q) -> complex:
    """Normally ordered ``<prod_j a_j^dag^p_j a_j^q_j>`` as <a^p psi | a^q psi>."""
    left, right = state.amplitudes, state.amplitudes
    for j in range(3):
        for _ in range(p[j]):
            left = _lower(left, j)
        for _ in range(q[j]):
            right = _lower(right, j)
    return complex(np.vdot(left, right))


def measure_moments(state: FockState3, deficit_tol: float = DEFICIT_TOL) -> MomentSet:
    if state.norm_deficit > deficit_tol:
        raise TruncationError(f"norm deficit {state.norm_deficit:.2e} exceeds {deficit_tol:.0e}")
    prob = np.abs(state.amplitudes) ** 2
    d = state.cutoff
    n = [np.arange(d, dtype=float).reshape(_shape_axis(j, d)) for j in range(3)]
    mean = tuple(float(np.sum(prob * n[j])) for j in range(3))
    second = tuple(float(np.sum(prob * n[j] ** 2)) for j in range(3))
    cross = tuple(float(np.sum(prob * n[j] * n[k])) for j, k in PAIRS)
    intra4 = tuple(float(np.sum(prob * n[j] * (n[j] - 1))) for j in range(3))
    return MomentSet(mean, second, cross, intra4)


def input_state(scenario: Scenario, cutoff: int) -> FockState3:
    if scenario.probe == "w_state":
        return make_w_state(scenario.n_photons, cutoff)
    return make_fock_state(*scenario.occupations, cutoff)


def run_pipeline(scenario: Scenario, cutoff: int, deficit_tol: float = DEFICIT_TOL) -> FockState3:
    """Tritter, per-mode OPA, then exp(-i phi0 n0 - i phi1 n1)."""
    state = apply_passive_unitary(input_state(scenario, cutoff), tritter_matrix())
    for j, r in enumerate(scenario.gains):
        if r:
            remaining = deficit_tol - state.norm_deficit
            state = apply_squeeze(state, j, r, deficit_tol=remaining)
    for j, phi in enumerate(scenario.phases):
        if phi:
            state = apply_phase(state, j, -phi)
    return state


def _try_cutoff(scenario: Scenario, cutoff: int) -> MomentSet | None:
    try:
        return measure_moments(run_pipeline(scenario, cutoff))
    except TruncationError:
        return None


def converged_run(scenario: Scenario, rel_tol: float = 1e-8, cap: int = CUTOFF_CAP) -> tuple[MomentSet, int]:
    """Moments at cutoff d+8 and the smallest tried d whose moments already agree with them."""
    if rel_tol <= 0:
        raise ValueError("rel_tol must be positive")
    d = scenario.n_photons + 1
    while d + CUTOFF_STEP <= cap:
        low = _try_cutoff(scenario, d)
        if low is not None:
            high = _try_cutoff(scenario, d + CUTOFF_STEP)
            if high is not None and max_rel_discrepancy(low, high) <= rel_tol:
                log.debug("%s converged at cutoff %d", scenario, d)
                return high, d
        d = max(d + CUTOFF_STEP, math.ceil(1.5 * d))
    raise ConvergenceError(f"no cutoff convergence below {cap} for {scenario}")


def converged_moments(scenario: Scenario, rel_tol: float = 1e-8) -> MomentSet:
    return converged_run(scenario, rel_tol)[0]
