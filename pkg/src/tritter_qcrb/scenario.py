from __future__ import annotations

import math
from dataclasses import dataclass

PROBES = ("w_state", "separable_fock")


@dataclass(frozen=True)
class Scenario:
    """One interferometer run: probe, photon number, per-mode OPA gains.

    ``phases`` are the encoded phases of the unitary exp(-i phi0 n0 - i phi1 n1);
    they never change photon-number moments but both engines honour them.
    """

    probe: str
    n_photons: int
    gains: tuple[float, float, float] = (0.0, 0.0, 0.0)
    phases: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.probe not in PROBES:
            raise ValueError(f"unknown probe {self.probe!r}; expected one of {PROBES}")
        if self.n_photons < 0:
            raise ValueError("photon number must be non-negative")
        if len(self.gains) != 3 or not all(math.isfinite(r) for r in self.gains):
            raise ValueError("gains must be three finite numbers")
        object.__setattr__(self, "gains", tuple(float(r) for r in self.gains))
        object.__setattr__(self, "phases", tuple(float(p) for p in self.phases))

    @property
    def occupations(self) -> tuple[int, int, int]:
        """Input occupation of the separable Fock probe (all photons in mode 0)."""
        return (self.n_photons, 0, 0)
