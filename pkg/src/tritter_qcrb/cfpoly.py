"""Normally ordered characteristic functions as degree-truncated polynomials.

A characteristic function is stored as a sparse polynomial in six formal
variables ``(l0, l0*, l1, l1*, l2, l2*)``; an exponent vector
``(p0, q0, p1, q1, p2, q2)`` stands for ``l0^p0 l0*^q0 l1^p1 ...``.  The
conjugate variables are treated as independent symbols, so "derivatives at the
origin" are plain coefficient look-ups.

Optical elements act by linear substitution of the variables.  A linear
substitution maps each homogeneous degree onto itself, so truncating at
``max_degree`` never corrupts a retained coefficient.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Mapping

import numpy as np

from .errors import NumericalError, TritterError
from .moments import PAIRS, MomentSet
from .scenario import Scenario

Exponent = tuple[int, int, int, int, int, int]

NVARS = 6
PRUNE_TOL = 1e-15
OMEGA = cmath.exp(2j * math.pi / 3)

_ZERO: Exponent = (0,) * NVARS


def _unit(v: int, power: int = 1) -> Exponent:
    e = [0] * NVARS
    e[v] = power
    return tuple(e)


def _add_exp(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x + y for x, y in zip(a, b))


def _mul_terms(a: Mapping, b: Mapping, max_degree: int) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        da = sum(ea)
        for eb, cb in b.items():
            if da + sum(eb) > max_degree:
                continue
            e = _add_exp(ea, eb)
            out[e] = out.get(e, 0.0) + ca * cb
    return out


def _prune(terms: Mapping, tol: float = PRUNE_TOL) -> dict:
    return {e: c for e, c in terms.items() if e == _ZERO or abs(c) >= tol}


@dataclass(frozen=True)
class CFPoly:
    terms: Mapping[Exponent, complex]
    max_degree: int = 4

    def __post_init__(self):
        clean = {}
        for e, c in self.terms.items():
            e = tuple(int(x) for x in e)
            if len(e) != NVARS or min(e) < 0:
                raise ValueError(f"bad exponent vector {e}")
            if sum(e) <= self.max_degree:
                clean[e] = complex(c)
        object.__setattr__(self, "terms", clean)

    def coefficient(self, exponent) -> complex:
        return self.terms.get(tuple(exponent), 0j)

    @property
    def constant(self) -> complex:
        return self.coefficient(_ZERO)

    def degree_histogram(self) -> dict[int, int]:
        hist: dict[int, int] = {}
        for e in self.terms:
            hist[sum(e)] = hist.get(sum(e), 0) + 1
        return dict(sorted(hist.items()))

    def truncate(self, max_degree: int) -> "CFPoly":
        return CFPoly(self.terms, max_degree)

    def __mul__(self, other: "CFPoly") -> "CFPoly":
        deg = min(self.max_degree, other.max_degree)
        return CFPoly(_prune(_mul_terms(self.terms, other.terms, deg)), deg)

    def hermiticity_defect(self) -> float:
        """Max |c_(q,p) - conj(c_(p,q)) (-1)^(|p|+|q|)| over the term table."""
        worst = 0.0
        for e, c in self.terms.items():
            swapped = (e[1], e[0], e[3], e[2], e[5], e[4])
            expected = c.conjugate() * (-1) ** sum(e)
            worst = max(worst, abs(self.coefficient(swapped) - expected))
        return worst


@dataclass(frozen=True)
class LinearMap:
    """Substitution ``Lambda -> matrix @ Lambda`` on ``(l0, l0*, l1, l1*, l2, l2*)``."""

    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (NVARS, NVARS):
            raise ValueError("LinearMap needs a 6x6 matrix")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_mode_blocks(cls, a, b=None) -> "LinearMap":
        """Build the map ``l_j -> sum_k a[j,k] l_k + b[j,k] l_k*`` plus its conjugate rows."""
        a = np.asarray(a, dtype=complex)
        b = np.zeros((3, 3), complex) if b is None else np.asarray(b, dtype=complex)
        m = np.zeros((NVARS, NVARS), complex)
        m[0::2, 0::2] = a
        m[0::2, 1::2] = b
        m[1::2, 1::2] = a.conj()
        m[1::2, 0::2] = b.conj()
        return cls(m)

    @classmethod
    def identity(cls) -> "LinearMap":
        return cls(np.eye(NVARS))

    def conjugation_defect(self) -> float:
        m = self.matrix
        swapped = m[0::2].copy()
        swapped[:, 0::2], swapped[:, 1::2] = m[0::2, 1::2], m[0::2, 0::2]
        return float(np.max(np.abs(m[1::2] - swapped.conj())))


def tritter_matrix() -> np.ndarray:
    u = np.full((3, 3), OMEGA)
    np.fill_diagonal(u, 1.0)
    return u / math.sqrt(3.0)


def tritter_map() -> LinearMap:
    return LinearMap.from_mode_blocks(tritter_matrix().conj().T)


def squeeze_map(r0: float, r1: float, r2: float) -> LinearMap:
    r = np.array([r0, r1, r2], dtype=float)
    return LinearMap.from_mode_blocks(np.diag(np.cosh(r)), np.diag(-np.sinh(r)))


def phase_map(phi0: float, phi1: float) -> LinearMap:
    return LinearMap.from_mode_blocks(np.diag([cmath.exp(1j * phi0), cmath.exp(1j * phi1), 1.0]))


def compose(outer: LinearMap, inner: LinearMap) -> LinearMap:
    """Single map equal to substituting ``inner`` first, then ``outer``.

    ``apply(apply(p, inner), outer)(L) = p(inner @ outer @ L)``.
    """
    return LinearMap(inner.matrix @ outer.matrix)


def apply_linear_map(poly: CFPoly, lmap: LinearMap) -> CFPoly:
    m = lmap.matrix
    images = []
    for v in range(NVARS):
        images.append({_unit(w): m[v, w] for w in range(NVARS) if m[v, w] != 0})
    powers: dict[tuple[int, int], dict] = {}

    def image_power(v: int, k: int) -> dict:
        if k == 0:
            return {_ZERO: 1.0}
        if (v, k) not in powers:
            powers[v, k] = _mul_terms(image_power(v, k - 1), images[v], poly.max_degree)
        return powers[v, k]

    out: dict = {}
    for e, c in poly.terms.items():
        expanded = reduce(
            lambda acc, vk: _mul_terms(acc, image_power(*vk), poly.max_degree),
            ((v, k) for v, k in enumerate(e) if k),
            {_ZERO: c},
        )
        for ee, cc in expanded.items():
            out[ee] = out.get(ee, 0.0) + cc
    return CFPoly(_prune(out), poly.max_degree)


def _laguerre_coefficients(n: int, top: int) -> list[Fraction]:
    """Coefficients of x^m, m <= min(n, top), in L_n(x) = sum_m C(n,m) (-1)^m x^m / m!."""
    return [Fraction(math.comb(n, m) * (-1) ** m, math.factorial(m)) for m in range(min(n, top) + 1)]


def _mode_pair(j: int, m: int) -> Exponent:
    e = [0] * NVARS
    e[2 * j] = e[2 * j + 1] = m
    return tuple(e)


def make_fock_product_cf(n0: int, n1: int, n2: int, max_degree: int = 4) -> CFPoly:
    """Characteristic function of the product Fock state |n0, n1, n2>."""
    if min(n0, n1, n2) < 0:
        raise ValueError("occupations must be non-negative")
    terms: dict = {_ZERO: 1.0}
    for j, n in enumerate((n0, n1, n2)):
        factor = {_mode_pair(j, m): float(c) for m, c in enumerate(_laguerre_coefficients(n, max_degree // 2))}
        terms = _mul_terms(terms, factor, max_degree)
    return CFPoly(terms, max_degree)


def make_w_state_cf(n: int, max_degree: int = 4) -> CFPoly:
    """Characteristic function of (|n,0,0> + |0,n,0> + |0,0,n>)/sqrt(3)."""
    if n < 1:
        raise TritterError("vacuum probe: QFIM singular downstream")
    if max_degree < 2:
        raise ValueError("max_degree must be at least 2")
    terms: dict = {}
    for j in range(3):
        for m, c in enumerate(_laguerre_coefficients(n, max_degree // 2)):
            e = _mode_pair(j, m)
            terms[e] = terms.get(e, 0.0) + float(c / 3)
    if 2 * n <= max_degree:
        coherence = float(Fraction((-1) ** n, 3 * math.factorial(n)))
        for k in range(3):
            for l in range(3):
                if k != l:
                    e = [0] * NVARS
                    e[2 * k] = n
                    e[2 * l + 1] = n
                    terms[tuple(e)] = coherence
    return CFPoly(terms, max_degree)


def squeeze_envelope(r0: float, r1: float, r2: float, max_degree: int = 4) -> CFPoly:
    """Gaussian factor that restores normal order after a squeezing substitution.

    Per mode: exp[-sinh^2 r |l|^2 + (sinh r cosh r / 2)(l^2 + l*^2)].
    """
    total: dict = {_ZERO: 1.0}
    for j, r in enumerate((r0, r1, r2)):
        if r == 0.0:
            continue
        s, c = math.sinh(r), math.cosh(r)
        gen = {
            _mode_pair(j, 1): -s * s,
            _unit(2 * j, 2): 0.5 * s * c,
            _unit(2 * j + 1, 2): 0.5 * s * c,
        }
        term: dict = {_ZERO: 1.0}
        series: dict = {_ZERO: 1.0}
        for k in range(1, max_degree // 2 + 1):
            term = {e: v / k for e, v in _mul_terms(term, gen, max_degree).items()}
            for e, v in term.items():
                series[e] = series.get(e, 0.0) + v
        total = _mul_terms(total, series, max_degree)
    return CFPoly(total, max_degree)


def apply_squeeze(poly: CFPoly, gains) -> CFPoly:
    """Per-mode OPA exp[(r/2)(a^dag^2 - a^2)]: substitution followed by the normal-order envelope."""
    substituted = apply_linear_map(poly, squeeze_map(*gains))
    return substituted * squeeze_envelope(*gains, max_degree=poly.max_degree)


def extract_moment(poly: CFPoly, p, q) -> complex:
    """Normally ordered moment <prod_j a_j^dag^p_j a_j^q_j>."""
    p, q = tuple(p), tuple(q)
    if sum(p) + sum(q) > poly.max_degree:
        raise NumericalError(
            f"moment of order {sum(p) + sum(q)} exceeds max_degree={poly.max_degree}; increase max_degree"
        )
    e = (p[0], q[0], p[1], q[1], p[2], q[2])
    weight = 1
    for pj, qj in zip(p, q):
        weight *= math.factorial(pj) * math.factorial(qj) * (-1) ** qj
    return poly.coefficient(e) * weight


def _number_moment(poly: CFPoly, occupation) -> float:
    return extract_moment(poly, occupation, occupation).real


def moment_set(poly: CFPoly) -> MomentSet:
    def e(j, k=1):
        v = [0, 0, 0]
        v[j] = k
        return v

    mean = tuple(_number_moment(poly, e(j)) for j in range(3))
    intra4 = tuple(_number_moment(poly, e(j, 2)) for j in range(3))
    second = tuple(intra4[j] + mean[j] for j in range(3))
    cross = []
    for j, k in PAIRS:
        v = [0, 0, 0]
        v[j] = v[k] = 1
        cross.append(_number_moment(poly, v))
    return MomentSet(mean, second, tuple(cross), intra4)


def input_cf(scenario: Scenario, max_degree: int = 4) -> CFPoly:
    if scenario.probe == "w_state":
        return make_w_state_cf(scenario.n_photons, max_degree)
    return make_fock_product_cf(*scenario.occupations, max_degree=max_degree)


def output_cf(scenario: Scenario, max_degree: int = 4) -> CFPoly:
    """Tritter, then per-mode OPA, then phase encoding."""
    poly = apply_linear_map(input_cf(scenario, max_degree), tritter_map())
    if any(scenario.gains):
        poly = apply_squeeze(poly, scenario.gains)
    if any(scenario.phases):
        poly = apply_linear_map(poly, phase_map(*scenario.phases))
    return poly


def pipeline_moments(scenario: Scenario, max_degree: int = 4) -> MomentSet:
    return moment_set(output_cf(scenario, max_degree))


