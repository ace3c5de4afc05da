"""Sweep runner and the figure presets.

A sweep point is one (config, N, gains, engine) tuple.  Points are
independent and may run in a process pool; rows are sorted afterwards so the
output never depends on scheduling.
"""
from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import cfpoly, focksim
from .config import ScenarioConfig
from .errors import ConfigError, NumericalError, SingularQFIMError
from .estimation import lossy_bound
from .moments import MomentSet, covariance, g2_inter, g2_intra, max_rel_discrepancy, variance
from .scenario import Scenario

log = logging.getLogger(__name__)

JOBS_ENV = "TRITTER_QCRB_JOBS"

CSV_COLUMNS = (
    "scenario", "engine", "probe", "N", "r_a", "r_b", "r_c", "eta", "sigma", "qcrb",
    "mean_n0", "var_n0", "var_n1", "cov01", "g2_intra_0", "g2_inter_01", "discrepancy",
)

DESK_N_RANGE = tuple(range(1, 21))
DESK_FIXED_N = 10
R_SWEEP = tuple(round(0.05 * k, 2) for k in range(21))


@dataclass(frozen=True)
class Row:
    scenario: str
    engine: str
    probe: str
    N: int
    r_a: float
    r_b: float
    r_c: float
    eta: float
    sigma: float | None
    qcrb: float | None
    mean_n0: float
    var_n0: float
    var_n1: float
    cov01: float
    g2_intra_0: float | None
    g2_inter_01: float | None
    discrepancy: float | None = None
    diagnostic: str = ""

    def sort_key(self):
        return (self.scenario, self.engine, self.N, self.r_a, self.r_b, self.r_c)

    def values(self) -> tuple:
        return tuple(getattr(self, c) for c in CSV_COLUMNS)


def default_jobs() -> int:
    env = os.environ.get(JOBS_ENV)
    if env:
        try:
            jobs = int(env)
        except ValueError:
            raise ConfigError(f"{JOBS_ENV} must be an integer, got {env!r}") from None
        if jobs < 1:
            raise ConfigError(f"{JOBS_ENV} must be >= 1")
        return jobs
    return os.cpu_count() or 1


def engine_moments(engine: str, scenario: Scenario, rel_tol: float = 1e-8) -> MomentSet:
    if engine == "cfpoly":
        return cfpoly.pipeline_moments(scenario)
    if engine == "focksim":
        return focksim.converged_moments(scenario, rel_tol)
    raise ValueError(f"unknown engine {engine!r}")


def _maybe(fn, *args):
    try:
        return fn(*args)
    except NumericalError:
        return None


def _make_row(cfg: ScenarioConfig, engine: str, scenario: Scenario, ms: MomentSet, discrepancy) -> Row:
    sigma = cfg.sigma_value if cfg.sigma_mode == "fixed" else None
    diagnostic = ""
    try:
        sigma, qcrb = lossy_bound(ms, cfg.eta, sigma)
    except SingularQFIMError as exc:
        qcrb, diagnostic = None, str(exc)
    r_a, r_b, r_c = scenario.gains
    return Row(
        scenario=cfg.tag,
        engine=engine,
        probe=cfg.probe,
        N=scenario.n_photons,
        r_a=r_a, r_b=r_b, r_c=r_c,
        eta=cfg.eta,
        sigma=sigma,
        qcrb=qcrb,
        mean_n0=ms.mean[0],
        var_n0=variance(ms, 0),
        var_n1=variance(ms, 1),
        cov01=covariance(ms, 0, 1),
        g2_intra_0=_maybe(g2_intra, ms, 0),
        g2_inter_01=_maybe(g2_inter, ms, 0, 1),
        discrepancy=discrepancy,
        diagnostic=diagnostic,
    )


def run_point(cfg: ScenarioConfig, n: int, gains) -> list[Row]:
    scenario = Scenario(cfg.probe, n, tuple(gains))
    engines = ("cfpoly", "focksim") if cfg.engine == "both" else (cfg.engine,)
    try:
        results = {e: engine_moments(e, scenario, cfg.rel_tol) for e in engines}
    except NumericalError as exc:
        raise type(exc)(f"N={n}, gains={tuple(gains)}: {exc}") from exc
    discrepancy = None
    if cfg.engine == "both":
        discrepancy = max_rel_discrepancy(results["cfpoly"], results["focksim"])
    return [_make_row(cfg, e, scenario, ms, discrepancy) for e, ms in results.items()]


def _points(configs):
    for cfg in configs:
        for gains in cfg.gain_points:
            for n in cfg.N_range:
                yield cfg, n, gains


def _run_star(args):
    return run_point(*args)


def run_configs(configs, jobs: int | None = None) -> list[Row]:
    points = list(_points(configs))
    jobs = default_jobs() if jobs is None else jobs
    if jobs <= 1 or len(points) <= 1:
        chunks = [run_point(*p) for p in points]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_star, points))
    rows = [row for chunk in chunks for row in chunk]
    return sorted(rows, key=Row.sort_key)


def run_scenario(cfg: ScenarioConfig, jobs: int | None = 1) -> list[Row]:
    return run_configs([cfg], jobs)


def _cfg(tag, **kw) -> ScenarioConfig:
    kw.setdefault("probe", "w_state")
    kw.setdefault("N_range", DESK_N_RANGE)
    kw.setdefault("gains", (0.0, 0.0, 0.0))
    return ScenarioConfig(tag=tag, **kw)


def _fmt_r(r: float) -> str:
    return f"{r:g}"


def _uniform_gain_family(name: str) -> list[ScenarioConfig]:
    return [_cfg(f"{name}:r={_fmt_r(r)}", gains=(r, r, r)) for r in (0.0, 0.25, 0.5)]


def _fig2b():
    return [
        _cfg("fig2b:none", gains=(0.0, 0.0, 0.0)),
        _cfg("fig2b:signal_a", gains=(0.5, 0.0, 0.0)),
        _cfg("fig2b:reference_c", gains=(0.0, 0.0, 0.5)),
    ]


def _fig4a():
    return [
        _cfg(f"fig4a:{probe}:r={_fmt_r(r)}", probe=probe, gains=(r, r, r))
        for probe in ("w_state", "separable_fock")
        for r in (0.0, 0.5)
    ]


def _fig4b():
    return [
        _cfg(f"fig4b:{probe}", probe=probe, N_range=(DESK_FIXED_N,), r_sweep=R_SWEEP)
        for probe in ("w_state", "separable_fock")
    ]


def _fig5a():
    return [
        _cfg(f"fig5a:r={_fmt_r(r)}:eta={eta:g}", gains=(r, r, r), eta=eta)
        for r in (0.0, 0.5)
        for eta in (1.0, 0.7)
    ]


def _fig5b():
    return [
        _cfg(f"fig5b:eta={eta:g}", N_range=(DESK_FIXED_N,), eta=eta, r_sweep=R_SWEEP)
        for eta in (1.0, 0.6)
    ]


PRESETS = {
    "fig2a": lambda: _uniform_gain_family("fig2a"),
    "fig2b": _fig2b,
    "fig3a": lambda: _uniform_gain_family("fig3a"),
    "fig3b": lambda: _uniform_gain_family("fig3b"),
    "fig4a": _fig4a,
    "fig4b": _fig4b,
    "fig5a": _fig5a,
    "fig5b": _fig5b,
}

# which column each preset plots against N (or r for the fixed-N sweeps)
PRESET_ORDINATE = {
    "fig2a": "qcrb", "fig2b": "qcrb", "fig3a": "g2_intra_0", "fig3b": "g2_inter_01",
    "fig4a": "qcrb", "fig4b": "qcrb", "fig5a": "qcrb", "fig5b": "qcrb",
}


def figure_preset(name: str) -> list[ScenarioConfig]:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; valid presets: {', '.join(PRESETS)}")
    return PRESETS[name]()


def curves(rows: list[Row], ordinate: str) -> dict[str, tuple[np.ndarray, np.ndarray, str]]:
    """Group rows per scenario tag into ``(x, y, x_label)`` arrays for plotting."""
    grouped: dict[str, list[Row]] = {}
    for row in rows:
        grouped.setdefault(f"{row.scenario} [{row.engine}]" if row.engine != "cfpoly" else row.scenario, []).append(row)
    out = {}
    for label, group in grouped.items():
        by_r = len({r.N for r in group}) == 1 and len({r.r_a for r in group}) > 1
        xs = [r.r_a if by_r else r.N for r in group]
        ys = [getattr(r, ordinate) for r in group]
        keep = [i for i, y in enumerate(ys) if y is not None]
        out[label] = (
            np.array([xs[i] for i in keep], float),
            np.array([ys[i] for i in keep], float),
            "r" if by_r else "N",
        )
    return out
