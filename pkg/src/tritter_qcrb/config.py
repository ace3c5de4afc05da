"""Scenario configuration files.

One ``key = value`` pair per line; a line whose first non-blank character is
``#`` is a comment.  Keys are case-sensitive and unknown keys are rejected::

    # gains are r_a, r_b, r_c; sigma_mode is "optimize" or "fixed <value>"
    probe = w_state
    N_range = 1,2,3
    gains = 0.5,0.5,0.5
    eta = 0.7
    sigma_mode = optimize
    engine = cfpoly
    rel_tol = 1e-8

The optional ``r_sweep`` key lists uniform gains ``r_a = r_b = r_c`` to sweep;
when present it replaces ``gains``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import ConfigError
from .scenario import PROBES

ENGINES = ("cfpoly", "focksim", "both")
REQUIRED_KEYS = ("probe", "N_range", "gains", "eta", "sigma_mode", "engine", "rel_tol")
OPTIONAL_KEYS = ("r_sweep",)
MAX_GAIN = 2.0


@dataclass(frozen=True)
class ScenarioConfig:
    probe: str
    N_range: tuple[int, ...]
    gains: tuple[float, float, float]
    eta: float = 1.0
    sigma_mode: str = "optimize"
    sigma_value: float = 0.0
    engine: str = "cfpoly"
    rel_tol: float = 1e-8
    r_sweep: tuple[float, ...] | None = None
    tag: str = ""

    def __post_init__(self):
        validate(self)

    @property
    def gain_points(self) -> list[tuple[float, float, float]]:
        if self.r_sweep is not None:
            return [(r, r, r) for r in self.r_sweep]
        return [self.gains]

    def with_overrides(self, **changes) -> "ScenarioConfig":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def validate(cfg: ScenarioConfig) -> None:
    def fail(key, msg):
        err = ConfigError(f"{key}: {msg}")
        err.key = key
        raise err

    if cfg.probe not in PROBES:
        fail("probe", f"expected one of {', '.join(PROBES)}, got {cfg.probe!r}")
    if not cfg.N_range:
        fail("N_range", "must not be empty")
    if any(n < 1 for n in cfg.N_range):
        fail("N_range", "photon numbers must be >= 1")
    if len(cfg.gains) != 3:
        fail("gains", "expected three values r_a, r_b, r_c")
    for key, values in (("gains", cfg.gains), ("r_sweep", cfg.r_sweep or ())):
        for r in values:
            if not math.isfinite(r) or abs(r) > MAX_GAIN:
                fail(key, f"gain {r} outside [-{MAX_GAIN}, {MAX_GAIN}]")
    if cfg.r_sweep is not None and not cfg.r_sweep:
        fail("r_sweep", "must not be empty")
    if not (math.isfinite(cfg.eta) and 0.0 < cfg.eta <= 1.0):
        fail("eta", f"must lie in (0, 1], got {cfg.eta}")
    if cfg.sigma_mode not in ("fixed", "optimize"):
        fail("sigma_mode", "expected 'optimize' or 'fixed <value>'")
    if not math.isfinite(cfg.sigma_value):
        fail("sigma_mode", "sigma must be finite")
    if cfg.engine not in ENGINES:
        fail("engine", f"expected one of {', '.join(ENGINES)}, got {cfg.engine!r}")
    if not (math.isfinite(cfg.rel_tol) and cfg.rel_tol > 0):
        fail("rel_tol", "must be a positive number")


def _float(text: str, key: str, line: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{key}: malformed number {text!r}", line) from None


def _int(text: str, key: str, line: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{key}: malformed integer {text!r}", line) from None


def _list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",")]


def parse_config(text: str, tag: str = "") -> ScenarioConfig:
    raw: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"expected 'key = value', got {stripped!r}", lineno)
        key, value = (s.strip() for s in stripped.split("=", 1))
        if key not in REQUIRED_KEYS + OPTIONAL_KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in raw:
            raise ConfigError(f"duplicate key {key!r} (first on line {raw[key][1]})", lineno)
        raw[key] = (value, lineno)

    missing = [k for k in REQUIRED_KEYS if k not in raw]
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)}")

    lines = {k: ln for k, (_, ln) in raw.items()}
    n_text, n_line = raw["N_range"]
    gains_text, g_line = raw["gains"]
    gains = tuple(_float(t, "gains", g_line) for t in _list(gains_text))
    sigma_text, s_line = raw["sigma_mode"]
    parts = sigma_text.split()
    if parts == ["optimize"]:
        sigma_mode, sigma_value = "optimize", 0.0
    elif len(parts) == 2 and parts[0] == "fixed":
        sigma_mode, sigma_value = "fixed", _float(parts[1], "sigma_mode", s_line)
    else:
        raise ConfigError(f"sigma_mode: expected 'optimize' or 'fixed <value>', got {sigma_text!r}", s_line)
    r_sweep = None
    if "r_sweep" in raw:
        text, line = raw["r_sweep"]
        r_sweep = tuple(_float(t, "r_sweep", line) for t in _list(text))

    fields = dict(
        probe=raw["probe"][0],
        N_range=tuple(_int(t, "N_range", n_line) for t in _list(n_text)),
        gains=gains,
        eta=_float(raw["eta"][0], "eta", raw["eta"][1]),
        sigma_mode=sigma_mode,
        sigma_value=sigma_value,
        engine=raw["engine"][0],
        rel_tol=_float(raw["rel_tol"][0], "rel_tol", raw["rel_tol"][1]),
        r_sweep=r_sweep,
        tag=tag,
    )
    try:
        return ScenarioConfig(**fields)
    except ConfigError as exc:
        raise ConfigError(str(exc), lines.get(getattr(exc, "key", None))) from None


def format_config(cfg: ScenarioConfig) -> str:
    """Inverse of :func:`parse_config` (the tag is not part of the file)."""
    sigma = "optimize" if cfg.sigma_mode == "optimize" else f"fixed {cfg.sigma_value!r}"
    lines = [
        f"probe = {cfg.probe}",
        "N_range = " + ",".join(str(n) for n in cfg.N_range),
        "gains = " + ",".join(repr(float(r)) for r in cfg.gains),
        f"eta = {cfg.eta!r}",
        f"sigma_mode = {sigma}",
        f"engine = {cfg.engine}",
        f"rel_tol = {cfg.rel_tol!r}",
    ]
    if cfg.r_sweep is not None:
        lines.append("r_sweep = " + ",".join(repr(float(r)) for r in cfg.r_sweep))
    return "\n".join(lines) + "\n"
