"""Experiment orchestration: build module inputs from a config, run, summarise.

Summaries are plain dicts rendered as key-sorted JSON with non-finite floats
mapped to ``null``; identical configs give byte-identical documents. Wall
time is kept out of the document unless explicitly requested.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from shocklab import burgers, nullcond, radiation
from shocklab.config import RunConfig, parse_config
from shocklab.errors import InvalidData, ShocklabError, UsageError
from shocklab.john import (
    DataSpec,
    GeometricGrid,
    measure_scheme_order,
    node_monitors,
    predict_shock_time,
    run,
    transversal_data_derivative,
)
from shocklab.profiles import Profile1D

ACTIONS = {
    "burgers": ("run",),
    "john": ("solve", "predict", "sweep"),
    "nullcond": ("check", "aleph", "fluid"),
    "lifespan": ("run",),
}


@dataclass
class RunSummary:
    command: str
    config: dict
    result: dict
    scheme_order: dict | None = None
    wall_time: float | None = None
    # CSV payloads keyed by a short name; not part of the JSON document
    tables: dict[str, list[dict]] = field(default_factory=dict, repr=False)

    def document(self, include_wall_time: bool = False) -> dict:
        doc = {"command": self.command, "config": self.config, "result": self.result}
        if self.scheme_order is not None:
            doc["scheme_order"] = self.scheme_order
        if include_wall_time:
            doc["wall_time"] = self.wall_time
        return doc

    def to_json(self, include_wall_time: bool = False) -> str:
        return dumps(self.document(include_wall_time))


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


# ---------------------------------------------------------------- builders


def _bounded(profile: Profile1D, radius: float) -> Profile1D:
    """Give an unbounded (expression) profile compact support ``radius``."""
    if math.isfinite(profile.support_radius):
        return profile
    v, d = profile.value, profile.derivative

    def f(x):
        x = np.asarray(x, dtype=float)
        return np.where(np.abs(x) < radius, v(x), 0.0)

    def df(x):
        x = np.asarray(x, dtype=float)
        return np.where(np.abs(x) < radius, d(x), 0.0)

    return Profile1D(f, df, support_radius=radius, name=profile.name, params=profile.params)


def data_spec(cfg: RunConfig, amplitude: float | None = None) -> DataSpec:
    return DataSpec(
        cfg.profile("psi0"),
        cfg.profile("psi0_dot"),
        support_radius=cfg["support_radius"],
        amplitude=cfg["amplitude"] if amplitude is None else amplitude,
        start_time=cfg["start_time"],
        prevolve_cells=cfg["prevolve_cells"],
    )


def geometric_grid(cfg: RunConfig) -> GeometricGrid:
    return GeometricGrid(
        U0=cfg["U0"],
        n_u=cfg["n_u"],
        kappa=cfg["kappa"],
        ds_max=cfg["dt_max"],
        t_max=cfg["t_max"],
        max_steps=cfg["max_steps"],
    )


def metric_family(cfg: RunConfig) -> nullcond.MetricFamily:
    name = cfg["metric"]
    if name in nullcond.BUILTIN_METRICS:
        return nullcond.BUILTIN_METRICS[name]()
    if name != "custom":
        raise InvalidData(f"unknown metric {name!r}; use a built-in or 'custom'")
    kind = cfg["kind"]
    if kind == nullcond.SCALAR:
        if len(cfg["G2"]) != 16:
            raise InvalidData("G2 needs 16 numbers")
        return nullcond.MetricFamily.scalar(cfg["G2"])
    if kind == nullcond.SYSTEM:
        if len(cfg["G3"]) != 64:
            raise InvalidData("G3 needs 64 numbers")
        return nullcond.MetricFamily.system(cfg["G3"])
    raise InvalidData(f"unknown metric kind {kind!r}")


def aleph_family(spec: str) -> nullcond.MetricFamily:
    """Built-in metric name or path to a ``[nullcond]`` config file."""
    if spec in nullcond.BUILTIN_METRICS:
        return nullcond.BUILTIN_METRICS[spec]()
    path = Path(spec)
    if not path.is_file():
        raise InvalidData(f"aleph {spec!r} is neither a built-in metric nor a file")
    return metric_family(parse_config(path.read_text(), "nullcond"))


# ---------------------------------------------------------------- actions


def _burgers(cfg: RunConfig) -> RunSummary:
    prof = cfg.profile("profile")
    alpha, slope = burgers.steepest_descent(prof, cfg["blowup_grid"])
    t_star = burgers.blowup_time(prof, cfg["blowup_grid"])
    rows = burgers.table(prof, cfg["t_max"], cfg["n_alpha"], cfg["n_t"])
    result = {
        "t_star": t_star,
        "blowup": t_star is not None,
        "alpha_star": alpha,
        "min_slope": slope,
        "t_star_fan": burgers.first_jacobian_zero(prof, cfg["blowup_grid"]),
        "table_rows": len(rows),
    }
    return RunSummary("burgers", cfg.echo(), result, tables={"table": rows})


def _grid_echo(grid: GeometricGrid) -> dict:
    return {
        "U0": grid.U0, "n_u": grid.n_u, "du": grid.du, "kappa": grid.kappa,
        "ds_max": grid.ds_max, "t_max": grid.t_max, "t_start": grid.t_start,
    }


def _slice_rows(slices) -> list[dict]:
    rows = []
    for st in slices:
        mon = node_monitors(st)
        t = st.t
        cols = {"psi": st.psi, "r": st.r, "mu": st.mu, "W": st.W, "Q": st.Q}
        for j, u in enumerate(st.u):
            row = {"t": t, "u": float(u)}
            row.update({k: float(v[j]) for k, v in cols.items()})
            row.update({k: float(v[j]) for k, v in mon.items()})
            rows.append(row)
    return rows


def solve_one(cfg: RunConfig, amplitude: float | None = None, keep_every: int = 0):
    data = data_spec(cfg, amplitude)
    return run(data, geometric_grid(cfg), cfg["mu_stop"], keep_every=keep_every)


def _john_solve(cfg: RunConfig) -> RunSummary:
    report = solve_one(cfg, keep_every=cfg["output_every"])
    grid = geometric_grid(cfg)
    result = report.summary()
    result["grid"] = _grid_echo(grid)
    order = None
    if cfg["measure_order"]:
        order = measure_scheme_order(
            data_spec(cfg), cfg["U0"], cfg["order_n_u"], 1.0, cfg["kappa"]
        ).as_dict()
    tables = {"slices": _slice_rows(report.slices)} if report.slices else {}
    return RunSummary("john solve", cfg.echo(), result, order, tables=tables)


def _john_predict(cfg: RunConfig) -> RunSummary:
    data = data_spec(cfg)
    pred = predict_shock_time(data, cfg["U0"], cfg["n_u"])
    u = np.linspace(0.0, cfg["U0"], cfg["n_u"] + 1)[1:]
    delta = np.atleast_1d(transversal_data_derivative(data, u))
    k = int(np.argmax(delta))
    result = {
        "shock_predicted": pred is not None,
        "log_lifespan": None if pred is None else pred.log_time,
        "lifespan": None if pred is None else pred.time,
        "shock_u": None if pred is None else pred.u,
        "max_transversal_derivative": float(delta[k]),
        "argmax_u": float(u[k]),
    }
    return RunSummary("john predict", cfg.echo(), result)


def _threads(n_jobs: int) -> int:
    env = os.environ.get("SHOCKLAB_THREADS")
    cap = os.cpu_count() or 1
    if env:
        try:
            cap = int(env)
        except ValueError:
            raise UsageError(f"SHOCKLAB_THREADS must be an integer, got {env!r}") from None
        if cap < 1:
            raise UsageError("SHOCKLAB_THREADS must be at least 1")
    return max(1, min(cap, n_jobs))


def sweep(cfg: RunConfig) -> RunSummary:
    """Independent solves over the ``lambda`` list, merged by amplitude."""
    lams = list(cfg["lambda"])
    if len(lams) < 2:
        raise UsageError("a sweep needs at least two lambda values")
    if len(set(lams)) != len(lams):
        raise UsageError("lambda values must be distinct")
    for lam in lams:
        if not lam > 0.0:
            raise UsageError("lambda values must be positive")

    def job(lam):
        try:
            return lam, solve_one(cfg, lam), None
        except ShocklabError as exc:
            return lam, None, exc

    with ThreadPoolExecutor(max_workers=_threads(len(lams))) as pool:
        outcomes = list(pool.map(job, lams))

    errors = [exc for _, rep, exc in outcomes if exc is not None]
    if len(errors) == len(lams):
        raise errors[0]

    runs, table = {}, []
    for lam, rep, exc in sorted(outcomes, key=lambda o: o[0]):
        key = repr(float(lam))
        if exc is not None:
            runs[key] = {"error": type(exc).__name__, "message": str(exc)}
            continue
        runs[key] = rep.summary()
        if rep.shock:
            table.append({
                "lambda": lam,
                "log_lifespan": rep.log_lifespan,
                "lambda_log_lifespan": lam * rep.log_lifespan,
            })
    products = [row["lambda_log_lifespan"] for row in table]
    if len(products) >= 2:
        spread = (max(products) - min(products)) / (sum(products) / len(products))
        spread_note = "relative spread (max - min) / mean over shock runs"
    else:
        spread = None
        spread_note = "undefined: fewer than two runs formed a shock"
    result = {
        "runs": runs,
        "lambda_log_lifespan": table,
        "spread": spread,
        "spread_note": spread_note,
        "failed": len(errors),
        "grid": _grid_echo(geometric_grid(cfg)),
    }
    return RunSummary("john sweep", cfg.echo(), result)


def _theta_grid(cfg: RunConfig) -> np.ndarray:
    n = cfg["theta_grid"] or cfg["n_dirs"]
    return nullcond.fibonacci_sphere(n)


def _nullcond_check(cfg: RunConfig) -> RunSummary:
    if cfg["A"] or cfg["N"]:
        A, N = cfg["A"] or None, cfg["N"] or None
        if A is not None and len(A) != 64 or N is not None and len(N) != 16:
            raise InvalidData("A needs 64 numbers and N needs 16")
        nl = nullcond.QuadraticNonlinearity.from_flat(A, N)
        source = "explicit"
        mf = None
    else:
        mf = metric_family(cfg)
        nl = nullcond.induced_nonlinearity(mf)
        source = f"metric:{cfg['metric']}"
    chk = nullcond.check_classic_null(nl, cfg["n_dirs"])
    result = {
        "source": source,
        "null_condition": chk.passes,
        "max_violation": chk.max_violation,
        "witness_theta": chk.witness.theta.tolist(),
    }
    if mf is not None:
        th = nullcond.fibonacci_sphere(cfg["n_dirs"])
        ap, am = nullcond.aleph_plus(mf, th), nullcond.aleph_minus(mf, th)
        result["aleph_plus_range"] = [float(np.min(ap)), float(np.max(ap))]
        result["aleph_minus_range"] = [float(np.min(am)), float(np.max(am))]
        result["aleph_plus_vanishes"] = bool(np.max(np.abs(ap)) <= nullcond.NULL_TOL)
    return RunSummary("nullcond check", cfg.echo(), result)


def _nullcond_aleph(cfg: RunConfig) -> RunSummary:
    mf = metric_family(cfg)
    th = _theta_grid(cfg)
    ap = np.atleast_1d(nullcond.aleph_plus(mf, th))
    am = np.atleast_1d(nullcond.aleph_minus(mf, th))
    rows = [
        {"theta1": a[0], "theta2": a[1], "theta3": a[2], "aleph_plus": p, "aleph_minus": m}
        for a, p, m in zip(th.tolist(), ap.tolist(), am.tolist())
    ]
    result = {
        "kind": mf.kind,
        "directions": int(th.shape[0]),
        "aleph_plus_min": float(ap.min()),
        "aleph_plus_max": float(ap.max()),
        "aleph_minus_min": float(am.min()),
        "aleph_minus_max": float(am.max()),
    }
    return RunSummary("nullcond aleph", cfg.echo(), result, tables={"aleph": rows})


def _nullcond_fluid(cfg: RunConfig) -> RunSummary:
    mode = cfg["derivative_mode"]
    if mode not in ("analytic", "fd"):
        raise InvalidData("derivative_mode must be 'analytic' or 'fd'")
    fl = nullcond.lagrangian_from_spec(cfg["lagrangian"], cfg["k"], analytic=mode == "analytic")
    if cfg["fd_step"] > 0.0:
        fl = nullcond.FluidLagrangian(fl.L, fl.k, fl.derivatives, cfg["fd_step"], fl.name)
    fd = nullcond.fluid_derived(fl)
    result = {
        "lagrangian": cfg["lagrangian"],
        "k": fl.k,
        "derivative_mode": fl.derivative_mode,
        "dH_dsigma_at_k2": fd.dHdsigma_at_k2,
        "exceptional": abs(fd.dHdsigma_at_k2) <= cfg["tol"],
        "positivity_ok": fd.positivity_ok,
        "eta_at_k2": fd.eta_at_k2,
        "positivity_inputs": fd.alpha_inputs,
    }
    return RunSummary("nullcond fluid", cfg.echo(), result)


def _lifespan(cfg: RunConfig, dump: bool = False) -> RunSummary:
    R = cfg["support_radius"]
    phi0 = radiation.radial_field(_bounded(cfg.profile("phi0"), R))
    phi0_dot = radiation.radial_field(_bounded(cfg.profile("phi0_dot"), R))
    mf = aleph_family(cfg["aleph"])

    def aleph(th):
        return nullcond.aleph_plus(mf, th)

    est = radiation.john_hormander_sup(phi0, phi0_dot, aleph, cfg["n_q"], cfg["n_dirs"])
    bounds = {
        repr(float(lam)): {
            "log_lifespan_bound": est.log_lifespan_bound(lam),
            "lifespan_bound": est.lifespan_bound(lam),
        }
        for lam in cfg["lambda"]
    }
    result = {
        "sup_value": est.sup_value,
        "coarse_sup": est.coarse_sup,
        "argmax_q": est.argmax[0],
        "argmax_theta": list(est.argmax[1]),
        "bounds": bounds,
    }
    tables = {}
    if dump:
        rf = radiation.radiation_field(phi0, phi0_dot, cfg["n_q"], cfg["n_dirs"])
        vals = rf.values[2:-2]
        rows = []
        for i, q in enumerate(rf.d2q_grid.tolist()):
            for j, th in enumerate(rf.theta_grid.tolist()):
                rows.append({
                    "q": q, "theta1": th[0], "theta2": th[1], "theta3": th[2],
                    "F": float(vals[i, j]), "d2F": float(rf.d2q[i, j]),
                })
        tables["radiation"] = rows
    return RunSummary("lifespan", cfg.echo(), result, tables=tables)


def run_experiment(cfg: RunConfig, action: str | None = None, *, dump: bool = False) -> RunSummary:
    """Dispatch ``cfg`` to its module; ``action`` selects the subcommand verb."""
    actions = ACTIONS[cfg.section]
    action = action or actions[0]
    if action not in actions:
        raise UsageError(f"{cfg.section} has no action {action!r}; choose from {actions}")
    start = time.perf_counter()
    if cfg.section == "burgers":
        summary = _burgers(cfg)
    elif cfg.section == "lifespan":
        summary = _lifespan(cfg, dump)
    else:
        summary = {
            "solve": _john_solve,
            "predict": _john_predict,
            "sweep": sweep,
            "check": _nullcond_check,
            "aleph": _nullcond_aleph,
            "fluid": _nullcond_fluid,
        }[action](cfg)
    summary.wall_time = time.perf_counter() - start
    return summary
