from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from shocklab.errors import InvalidData
from shocklab.john import radial
from shocklab.profiles import Profile1D

START_TIMES = (0.0, -0.5)


@dataclass(frozen=True)
class SliceData:
    """``(Psi, Psi_t, Psi_r)`` on the slice ``t = 0`` as functions of ``r``."""

    psi: object
    psi_t: object
    psi_r: object


@dataclass(frozen=True)
class DataSpec:
    """Spherically symmetric data ``(Psi, d_t Psi)`` posed at ``start_time``.

    With ``start_time = -1/2`` the data are carried to ``t = 0`` by the
    radial solver; the eikonal function is always initialised as ``1 - r``
    on ``t = 0``.
    """

    psi0: Profile1D
    psi0_dot: Profile1D
    support_radius: float = 1.0
    amplitude: float = 1.0
    start_time: float = 0.0
    # radial pre-evolution resolution (cells on [0, 2])
    prevolve_cells: int = 3200

    def __post_init__(self) -> None:
        if self.start_time not in START_TIMES:
            raise InvalidData(f"start_time must be one of {START_TIMES}")
        if not 0.0 < self.support_radius <= 1.0:
            raise InvalidData("support_radius must lie in (0, 1]")
        if self.start_time == -0.5 and self.support_radius > 0.5:
            raise InvalidData("data posed at t = -1/2 must vanish for r > 1/2")
        if not self.amplitude > 0.0:
            raise InvalidData("amplitude must be positive")

    def with_amplitude(self, amplitude: float) -> DataSpec:
        return DataSpec(
            self.psi0, self.psi0_dot, self.support_radius, amplitude,
            self.start_time, self.prevolve_cells,
        )

    def _masked(self, prof: Profile1D, which: str):
        R, lam = self.support_radius, self.amplitude
        f = prof.value if which == "value" else prof.derivative

        def g(r):
            r = np.asarray(r, dtype=float)
            with np.errstate(all="ignore"):
                out = lam * f(r)
            return np.where(np.abs(r) <= R, out, 0.0)

        return g

    @cached_property
    def initial(self) -> SliceData:
        psi = self._masked(self.psi0, "value")
        psi_t = self._masked(self.psi0_dot, "value")
        if self.start_time == 0.0:
            return SliceData(psi=psi, psi_t=psi_t, psi_r=self._masked(self.psi0, "derivative"))
        sl = radial.evolve(psi, psi_t, duration=-self.start_time, n=self.prevolve_cells)
        return SliceData(psi=sl.psi, psi_t=sl.psi_t, psi_r=sl.psi_r)

    def is_zero(self) -> bool:
        r = np.linspace(0.0, 1.0, 2001)
        return bool(
            np.all(self._masked(self.psi0, "value")(r) == 0.0)
            and np.all(self._masked(self.psi0_dot, "value")(r) == 0.0)
        )
