"""Geometric-coordinate solver for John's spherically symmetric equation

    -d_t^2 Psi + (1 + Psi) Delta Psi = 0.

The state lives on ``(t, u)`` with ``u`` the eikonal function; ``mu = 1/d_t u``
stays smooth up to the shock while rectangular derivatives of ``Psi`` blow
up. Time advances on the log clock ``s = ln(1 + t)`` because shock times are
of size ``exp(c / lambda)``; see :mod:`shocklab.john.kernel` for the
rescaled variables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from shocklab.errors import HyperbolicityLost, InvalidData, MuVanished, UsageError
from shocklab.john import kernel
from shocklab.john.data import DataSpec
from shocklab.john.reduced import PredictedShock, predict_shock_time

MONITOR_NAMES = (
    "r2_L_psi",
    "r_mu_Lbar_psi",
    "r_psi",
    "mu_minus_1_over_log",
    "eikonal_drift_over_log",
)
RELATION_NAME = "mu_transport_relation"
# largest admissible log-clock step; the box scheme needs ds < 1
DS_CEILING = 0.5


def _log_clock(s: float) -> float:
    """``ln(e + t)`` for ``t = expm1(s)`` without overflow."""
    return s + math.log1p((math.e - 1.0) * math.exp(-s))


def _expm1_safe(s: float) -> float:
    return math.expm1(s) if s < 709.0 else math.inf


@dataclass(frozen=True)
class GeometricGrid:
    """Uniform ``u`` nodes on ``[0, U0]`` and the time-step rule.

    Steps are ``ds = min(ds_max, kappa du (1 + t))`` on the log clock, so
    ``dt = kappa du`` while ``t << 1`` and the step is bounded in ``ln t``
    afterwards.
    """

    U0: float = 0.9
    n_u: int = 400
    kappa: float = 0.5
    ds_max: float = 0.05
    t_max: float = math.inf
    max_steps: int = 2_000_000
    mu_floor: float = 1.0e-6

    def __post_init__(self) -> None:
        if not 0.0 < self.U0 < 1.0:
            raise InvalidData("U0 must lie in (0, 1)")
        if self.n_u < 2:
            raise InvalidData("n_u must be at least 2")
        if not 0.0 < self.ds_max <= DS_CEILING:
            raise InvalidData(f"ds_max must lie in (0, {DS_CEILING}]")
        if not self.kappa > 0.0 or not self.t_max > 0.0:
            raise InvalidData("kappa and t_max must be positive")

    @property
    def du(self) -> float:
        return self.U0 / self.n_u

    @property
    def t_start(self) -> float:
        return 0.0

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.U0, self.n_u + 1)

    def log_step(self, s: float) -> float:
        if s > 700.0:
            return self.ds_max
        return min(self.ds_max, self.kappa * self.du * math.exp(s))


@dataclass(frozen=True)
class StateSlice:
    """Fields at one time level, in rescaled storage.

    ``D = r - t``, ``A = r Psi``, ``W = mu Lbar(r Psi)``,
    ``B = (1 + t)**2 L(r Psi)``; the physical fields are properties.
    """

    s: float
    u: np.ndarray
    D: np.ndarray
    A: np.ndarray
    mu: np.ndarray
    W: np.ndarray
    B: np.ndarray

    @property
    def t(self) -> float:
        return _expm1_safe(self.s)

    @property
    def log_t(self) -> float:
        """``ln t`` (``-inf`` on the initial slice)."""
        if self.s == 0.0:
            return -math.inf
        return self.s + math.log1p(-math.exp(-self.s))

    @property
    def _g(self) -> np.ndarray:
        e = math.exp(-self.s)
        return 1.0 / (1.0 + (self.D - 1.0) * e)

    @property
    def r(self) -> np.ndarray:
        return self.t + self.D

    @property
    def psi(self) -> np.ndarray:
        return self.A * math.exp(-self.s) * self._g

    @property
    def Q(self) -> np.ndarray:
        return self.B * math.exp(-2.0 * self.s)

    @property
    def sound_speed(self) -> np.ndarray:
        return np.sqrt(1.0 + self.psi)

    @property
    def P(self) -> np.ndarray:
        """``L Psi``."""
        e = math.exp(-self.s)
        g = self._g
        return e * g * (self.B * e - self.sound_speed * self.A * g) * e

    @property
    def V(self) -> np.ndarray:
        """``mu Lbar Psi``."""
        e = math.exp(-self.s)
        g = self._g
        return e * g * (self.W + self.mu * self.sound_speed * self.A * e * g)

    @property
    def scaled_V(self) -> np.ndarray:
        """``r mu Lbar Psi``; bounded for all ``t``."""
        e = math.exp(-self.s)
        return self.W + self.mu * self.sound_speed * self.A * e * self._g

    def copy(self) -> StateSlice:
        return StateSlice(
            self.s, self.u, self.D.copy(), self.A.copy(), self.mu.copy(),
            self.W.copy(), self.B.copy(),
        )


def init_state(data: DataSpec, grid: GeometricGrid) -> StateSlice:
    """Fields on ``t = 0`` with ``u = 1 - r``."""
    u = grid.nodes
    r = 1.0 - u
    sd = data.initial
    psi, psi_t, psi_r = sd.psi(r), sd.psi_t(r), sd.psi_r(r)
    if np.any(1.0 + psi <= 0.0):
        raise InvalidData("1 + Psi must be positive on the initial slice")
    c = np.sqrt(1.0 + psi)
    mu = 1.0 / c
    Q = r * psi_t + c * (psi + r * psi_r)
    W = mu * (r * psi_t - c * (psi + r * psi_r))
    return StateSlice(0.0, u, r.copy(), r * psi, mu, W, Q)


def _raise_status(status: int, s: float) -> None:
    if status == kernel.MU_VANISHED:
        raise MuVanished(f"mu reached zero near ln(1 + t) = {s:.6g}")
    if status == kernel.HYPERBOLICITY_LOST:
        raise HyperbolicityLost(f"1 + Psi <= 0 near ln(1 + t) = {s:.6g}")


def step_log(state: StateSlice, ds: float, du: float) -> StateSlice:
    """Advance by ``ds`` on the log clock."""
    if not 0.0 < ds <= DS_CEILING:
        raise UsageError(f"log-clock step must lie in (0, {DS_CEILING}]")
    n = state.D.size
    out = [np.empty(n) for _ in range(5)]
    status = kernel.heun_step(
        state.D, state.A, state.mu, state.W, state.B, state.s, ds, du, *out
    )
    _raise_status(status, state.s + ds)
    return StateSlice(state.s + ds, state.u, *out)


def step(state: StateSlice, dt: float) -> StateSlice:
    """Advance by the physical time increment ``dt``."""
    if state.u.size < 2:
        raise UsageError("state needs at least two nodes")
    du = float(state.u[1] - state.u[0])
    return step_log(state, math.log1p(dt * math.exp(-state.s)), du)


def check_constraint(state: StateSlice) -> float:
    """``max |d_u r + mu sqrt(1 + Psi)|`` over interior nodes (centred)."""
    du = state.u[1] - state.u[0]
    dr = (state.D[2:] - state.D[:-2]) / (2.0 * du)
    res = dr + state.mu[1:-1] * state.sound_speed[1:-1]
    return float(np.max(np.abs(res))) if res.size else 0.0


def diagnostics(state: StateSlice) -> dict[str, float]:
    out = np.empty(6)
    kernel.monitors(state.u, state.D, state.A, state.mu, state.W, state.B, state.s, out)
    rec = {name: float(v) for name, v in zip(MONITOR_NAMES, out[:5])}
    rec[RELATION_NAME] = float(out[5])
    return rec



def node_monitors(state: StateSlice) -> dict[str, np.ndarray]:
    """Per-node values of the quantities whose suprema :func:`diagnostics` reports."""
    e = math.exp(-state.s)
    g = state._g
    c = state.sound_speed
    log_clock = state.s + math.log1p((math.e - 1.0) * e)
    pt = state.B * e - c * state.A * g
    return {
        MONITOR_NAMES[0]: np.abs(pt / g),
        MONITOR_NAMES[1]: np.abs(state.scaled_V),
        MONITOR_NAMES[2]: np.abs(state.A),
        MONITOR_NAMES[3]: np.abs(state.mu - 1.0) / log_clock,
        MONITOR_NAMES[4]: np.abs(1.0 - state.u - state.D) / log_clock,
    }

@dataclass
class ShockReport:
    shock: bool
    lifespan: float | None
    log_lifespan: float | None
    shock_u: float | None
    mu_min_final: float
    steps: int
    final_log_clock: float
    mu_min_history: dict[str, list]
    predicted: PredictedShock | None
    bound_monitors: dict[str, float]
    # slice values at one time unit after the data were posed
    monitors_at_reference: dict[str, float] | None
    reference_time: float
    relation_sup: float
    no_return_checked: int
    no_return_violations: int
    transversal_floor: float | None
    transversal_single_sign: bool
    w_drift: float
    constraint_residual: float
    # "mu_stop", "t_max" or "max_steps"
    termination: str = "mu_stop"
    slices: list[StateSlice] = field(default_factory=list, repr=False)

    @property
    def no_shock(self) -> bool:
        return not self.shock

    def summary(self) -> dict:
        pred = None
        if self.predicted is not None:
            pred = {
                "log_lifespan": self.predicted.log_time,
                "lifespan": _finite_or_none(self.predicted.time),
                "shock_u": self.predicted.u,
            }
        return {
            "shock": self.shock,
            "no_shock": self.no_shock,
            "lifespan": _finite_or_none(self.lifespan),
            "log_lifespan": self.log_lifespan,
            "shock_u": self.shock_u,
            "mu_min_final": self.mu_min_final,
            "steps": self.steps,
            "final_log_clock": self.final_log_clock,
            "predicted": pred,
            "bound_monitors": self.bound_monitors,
            "monitors_at_reference": self.monitors_at_reference,
            "reference_time": self.reference_time,
            "relation_sup": self.relation_sup,
            "no_return_checked": self.no_return_checked,
            "no_return_violations": self.no_return_violations,
            "transversal_floor": self.transversal_floor,
            "transversal_single_sign": self.transversal_single_sign,
            "w_drift": self.w_drift,
            "constraint_residual": self.constraint_residual,
            "termination": self.termination,
        }


def _finite_or_none(x: float | None) -> float | None:
    if x is None or not math.isfinite(x):
        return None
    return float(x)


def run(
    data: DataSpec,
    grid: GeometricGrid,
    mu_stop: float = 0.01,
    *,
    keep_every: int = 0,
) -> ShockReport:
    """March until ``min mu <= mu_stop`` or ``t_max``.

    The lifespan is extrapolated linearly to ``mu = 0`` on the log clock at
    the argmin node. Monitor values are also recorded on the slice
    ``t = start_time + 1``, which the step sequence hits exactly.
    ``keep_every > 0`` stores every n-th slice.
    """
    if not 0.0 < mu_stop <= 0.25:
        raise InvalidData("mu_stop must lie in (0, 1/4]")
    state = init_state(data, grid)
    du = grid.du
    s_target = math.log1p(grid.t_max) if math.isfinite(grid.t_max) else math.inf
    W0 = state.W.copy()

    running = diagnostics(state)
    t_ref = data.start_time + 1.0
    s_ref = math.log1p(t_ref)
    at_ref: dict[str, float] | None = None
    hist_s, hist_mu, hist_u = [0.0], [float(state.mu.min())], [float(state.u[np.argmin(state.mu)])]
    checked = violations = 0
    cross_node: int | None = None
    floor = math.inf
    v_lo, v_hi = math.inf, -math.inf
    w_drift = 0.0
    slices = [state] if keep_every else []
    shock = False
    extrapolated_s = None
    steps = 0

    while steps < grid.max_steps and state.s < s_target:
        ds = min(grid.log_step(state.s), s_target - state.s)
        if state.s < s_ref:
            ds = min(ds, s_ref - state.s)
        new = step_log(state, ds, du)
        steps += 1

        hot = state.mu < 0.25
        if np.any(hot):
            checked += int(hot.sum())
            violations += int(np.count_nonzero(new.mu[hot] >= state.mu[hot]))
        hot_new = new.mu < 0.25
        if np.any(hot_new):
            vh = new.scaled_V[hot_new]
            v_lo, v_hi = min(v_lo, float(vh.min())), max(v_hi, float(vh.max()))
            if cross_node is None:
                cross_node = int(np.argmin(new.mu))
        if cross_node is not None:
            rate = kernel.transversal_rate(new.D, new.A, new.mu, new.W, new.B, new.s, cross_node)
            floor = min(floor, rate)

        rec = diagnostics(new)
        for k, v in rec.items():
            running[k] = max(running[k], v)
        if at_ref is None and new.s >= s_ref:
            at_ref = {k: v for k, v in rec.items() if k != RELATION_NAME}
        w_drift = max(w_drift, float(np.max(np.abs(new.W - W0))))

        j = int(np.argmin(new.mu))
        hist_s.append(new.s)
        hist_mu.append(float(new.mu[j]))
        hist_u.append(float(new.u[j]))
        if keep_every and steps % keep_every == 0:
            slices.append(new)

        if new.mu[j] <= mu_stop:
            slope = (new.mu[j] - state.mu[j]) / ds
            shock = True
            extrapolated_s = float(new.s - new.mu[j] / slope) if slope < 0.0 else float(new.s)
            state = new
            break
        state = new

    if keep_every and (not slices or slices[-1] is not state):
        slices.append(state)

    lifespan = log_lifespan = shock_u = None
    if shock:
        lifespan = _expm1_safe(extrapolated_s)
        log_lifespan = extrapolated_s + math.log1p(-math.exp(-extrapolated_s))
        shock_u = float(state.u[int(np.argmin(state.mu))])

    relation = running.pop(RELATION_NAME)
    return ShockReport(
        shock=shock,
        lifespan=lifespan,
        log_lifespan=log_lifespan,
        shock_u=shock_u,
        mu_min_final=float(state.mu.min()),
        steps=steps,
        final_log_clock=float(state.s),
        mu_min_history={"log_clock": hist_s, "mu_min": hist_mu, "u": hist_u},
        predicted=predict_shock_time(data, grid.U0, grid.n_u),
        bound_monitors=running,
        monitors_at_reference=at_ref,
        reference_time=t_ref,
        relation_sup=relation,
        no_return_checked=checked,
        no_return_violations=violations,
        transversal_floor=None if cross_node is None else float(floor),
        transversal_single_sign=bool(cross_node is None or v_lo * v_hi > 0.0),
        w_drift=w_drift,
        constraint_residual=check_constraint(state),
        termination="mu_stop" if shock else ("t_max" if state.s >= s_target else "max_steps"),
        slices=slices,
    )
