"""Acceptance criteria, one test and one reported line per criterion.

Each ``criterion_N`` returns a deterministic summary dict plus wall times.
The verdict is computed from the summary, and criterion 13 re-runs every
other criterion from scratch and compares the serialized summaries.
"""

from __future__ import annotations

import functools
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, family_data
from shocklab import burgers, nullcond, radiation
from shocklab.experiments import dumps
from shocklab.john import (
    DataSpec,
    GeometricGrid,
    init_state,
    measure_scheme_order,
    predict_shock_time,
    run,
    step_log,
)
from shocklab.profiles import cinf_bump, gaussian, zero

SCALING_LAMBDAS = (0.08, 0.04, 0.02)
REDUCED_LAMBDAS = (0.05, 0.04, 0.02)
MONITOR_FACTOR = 3.0
S_U_VALUES = tuple(round(0.1 + 0.05 * i, 2) for i in range(8))  # 0.1 .. 0.45


def record(n: int, ok: bool, detail: str) -> None:
    line = (n, "PASS" if ok else "FAIL", detail)
    ACCEPTANCE_LINES.append(line)
    print(f"criterion {n}: {line[1]}  {detail}")


def _family_solver():
    @functools.lru_cache(maxsize=None)
    def solve(lam):
        t0 = time.perf_counter()
        rep = run(family_data(lam), GeometricGrid(U0=0.9, n_u=400), mu_stop=0.01)
        return rep, time.perf_counter() - t0

    return solve


_SHARED_SOLVER = _family_solver()


# ---------------------------------------------------------------- criteria


def criterion_1(solve=None):
    t0 = time.perf_counter()
    base = gaussian()
    t_star = burgers.first_jacobian_zero(base)
    scaled = {lam: burgers.first_jacobian_zero(base.scaled(lam)) for lam in (1.0, 0.5, 0.25)}
    products = [lam * t for lam, t in scaled.items()]
    summary = {
        "t_star": t_star,
        "rel_error": abs(t_star / math.sqrt(math.e / 2) - 1),
        "lambda_t_star": products,
        "product_spread": (max(products) - min(products)) / min(products),
    }
    return summary, {"runtime": time.perf_counter() - t0}


def criterion_2(solve=None):
    grid = GeometricGrid(U0=0.9, n_u=400)
    data = DataSpec(zero(), zero(), 0.5, 1.0, 0.0)
    st = init_state(data, grid)
    dev = 0.0
    r_err = 0.0
    for _ in range(10_000):
        st = step_log(st, grid.log_step(st.s), grid.du)
    dev = max(
        float(np.max(np.abs(st.A))),
        float(np.max(np.abs(st.W))),
        float(np.max(np.abs(st.B))),
        float(np.max(np.abs(st.mu - 1.0))),
        float(np.max(np.abs(st.psi))),
        float(np.max(np.abs(st.Q))),
    )
    # r = 1 - u + (t - t_start); compare in units of the last place of r
    expected = 1.0 - st.u + (st.t - grid.t_start)
    r_err = float(np.max(np.abs(st.r - expected) / np.spacing(expected)))
    summary = {"steps": 10_000, "t_final": st.t, "max_field_deviation": dev, "r_error_ulps": r_err}
    return summary, {}


def criterion_3(solve=None):
    cases = {
        "family_0.08_start_-0.5": family_data(0.08),
        "cinf_0.3_start_0": DataSpec(zero(), cinf_bump(1.0, 0.5), 0.5, 0.3, 0.0),
    }
    out, times = {}, {}
    for name, data in cases.items():
        t0 = time.perf_counter()
        out[name] = measure_scheme_order(data, U0=0.9, n_u=100, t_end=1.0).as_dict()
        times[name] = time.perf_counter() - t0
    return out, times


def criterion_4(solve):
    rows, times = {}, {}
    for lam in SCALING_LAMBDAS:
        rep, dt = solve(lam)
        times[lam] = dt
        rows[repr(lam)] = {
            "shock": rep.shock,
            "log_lifespan": rep.log_lifespan,
            "lambda_log_lifespan": None if not rep.shock else lam * rep.log_lifespan,
        }
    prods = [r["lambda_log_lifespan"] for r in rows.values()]
    spread = None
    if all(p is not None for p in prods):
        spread = (max(prods) - min(prods)) / min(prods)
    return {"runs": rows, "spread": spread}, times


def criterion_5(solve):
    rows = {}
    for lam in REDUCED_LAMBDAS:
        rep, _ = solve(lam)
        pred = predict_shock_time(family_data(lam), 0.9, 400)
        rel = None
        if rep.shock and pred is not None:
            rel = abs(math.expm1(pred.log_time - rep.log_lifespan))
        rows[repr(lam)] = {
            "measured_log_lifespan": rep.log_lifespan,
            "predicted_log_lifespan": None if pred is None else pred.log_time,
            "relative_error_T": rel,
        }
    return {"runs": rows}, {}


def _shock_runs(solve):
    lams = sorted(set(SCALING_LAMBDAS) | set(REDUCED_LAMBDAS))
    return {repr(lam): solve(lam)[0] for lam in lams}


def criterion_6(solve):
    rows = {}
    for key, rep in _shock_runs(solve).items():
        ref = rep.monitors_at_reference
        ratios = {k: rep.bound_monitors[k] / ref[k] if ref[k] > 0 else math.inf for k in ref}
        rows[key] = {"shock": rep.shock, "reference_time": rep.reference_time, "ratios": ratios}
    return {"runs": rows}, {}


def criterion_7(solve):
    rows = {}
    for key, rep in _shock_runs(solve).items():
        rows[key] = {
            "shock": rep.shock,
            "nodes_checked": rep.no_return_checked,
            "violations": rep.no_return_violations,
        }
    return {"runs": rows}, {}


def criterion_8(solve=None):
    th = nullcond.fibonacci_sphere(nullcond.DEFAULT_DIRECTIONS)
    cases = {
        "john": (nullcond.john_metric(), -np.ones(len(th))),
        "conformal": (nullcond.conformal_metric(1.7), np.zeros(len(th))),
        "off_diagonal": (nullcond.off_diagonal_metric(), 2 * th[:, 0] * th[:, 1]),
        "divergence_source": (nullcond.divergence_source_family(), np.zeros(len(th))),
        "time_derivative_source": (nullcond.time_derivative_source_family(), np.ones(len(th))),
    }
    return {
        name: float(np.max(np.abs(nullcond.aleph_plus(mf, th) - expected)))
        for name, (mf, expected) in cases.items()
    }, {}


def criterion_9(solve=None):
    exc = {
        repr(k): nullcond.fluid_derived(nullcond.exceptional_lagrangian(k)).dHdsigma_at_k2
        for k in (0.3, 0.5, 0.9)
    }
    # symbolic chain for L = s + s^2 at s = 0.01
    s = 0.01
    F, dF = 4 / (1 + 2 * s), -8 / (1 + 2 * s) ** 2
    symbolic = (dF - F * F) / (1 + s * F) ** 2
    quad = nullcond.fluid_derived(nullcond.quadratic_lagrangian(0.1, 1.0, 1.0)).dHdsigma_at_k2
    return {"exceptional": exc, "quadratic": quad, "symbolic": symbolic}, {}


def criterion_10(solve=None):
    t0 = time.perf_counter()
    th = nullcond.fibonacci_sphere(16)
    ball, gauss = 0.0, 0.0
    R = 1.0
    for q in np.linspace(-0.95, 0.95, 11):
        for t in th:
            ball = max(ball, abs(radiation.radon(radiation.ball_indicator(R), q, t) - math.pi * (R * R - q * q)))
    for q in np.linspace(-3.0, 3.0, 11):
        for t in th:
            gauss = max(gauss, abs(radiation.radon(radiation.gaussian_field(), q, t) - math.pi * math.exp(-q * q)))
    return {"ball_max_error": ball, "gaussian_max_error": gauss}, {"runtime": time.perf_counter() - t0}


def criterion_11(solve=None):
    t0 = time.perf_counter()
    alephs = {
        "john": nullcond.john_metric(),
        "off_diagonal": nullcond.off_diagonal_metric(),
    }
    pairs = radiation.random_bump_pairs(20, seed=2024)
    out = {}
    for name, mf in alephs.items():
        sups = [
            radiation.john_hormander_sup(p, q, lambda th, mf=mf: nullcond.aleph_plus(mf, th)).sup_value
            for p, q in pairs
        ]
        out[name] = sups
    return out, {"runtime": time.perf_counter() - t0}


def criterion_12(solve=None):
    rng = np.random.default_rng(7)
    mins, negatives = [], 0
    for _ in range(50):
        k = float(rng.uniform(-0.5, 0.5))
        eta0 = float(rng.uniform(0.2, 0.9))
        c = float(rng.uniform(-1.0, 1.0))
        phi0 = radiation.from_bumps([], constant=c)  # d_r Phi0 = 0
        dot = radiation.random_bump_field(rng, nonnegative=True)
        phi0_dot = radiation.from_bumps(dot.bumps, constant=k)  # Phi0_dot - k >= 0
        vals = [radiation.christodoulou_S(phi0, phi0_dot, k, eta0, U) for U in S_U_VALUES]
        mins.append(min(vals))
        negatives += sum(v < 0.0 for v in vals)
    c, k, U = 0.7, 0.2, 0.3
    r0 = 1 - U
    closed = 4 * math.pi * (c - k) * (r0**3 + 2 * (1 - r0**3) / 3)
    S = radiation.christodoulou_S(radiation.zero_field(), radiation.from_bumps([], constant=c), k, 0.5, U)
    return {
        "min_S": min(mins),
        "negative_values": negatives,
        "constant_data_error": abs(S - closed),
    }, {}


CRITERIA = {n: globals()[f"criterion_{n}"] for n in range(1, 13)}


@functools.lru_cache(maxsize=None)
def first_pass(n):
    return CRITERIA[n](_SHARED_SOLVER)


# ---------------------------------------------------------------- tests


def test_criterion_01_burgers_blowup():
    s, t = first_pass(1)
    ok = s["rel_error"] <= 1e-3 and s["product_spread"] <= 1e-3 and t["runtime"] < 1.0
    record(1, ok, f"T*={s['t_star']:.6f} rel.err={s['rel_error']:.1e} "
                  f"lambda*T* spread={s['product_spread']:.1e} runtime={t['runtime']:.2f}s")
    assert ok


def test_criterion_02_background_exactness():
    s, _ = first_pass(2)
    ok = s["max_field_deviation"] <= 1e-13 and s["r_error_ulps"] <= 1.0
    record(2, ok, f"10^4 steps: max field deviation={s['max_field_deviation']:.1e}, "
                  f"r error={s['r_error_ulps']:.1f} ulp")
    assert ok


def test_criterion_03_scheme_order():
    s, t = first_pass(3)
    ok = all(
        3.5 <= c["ratio"] <= 4.5 and 3.5 <= c["constraint_ratio"] <= 4.5 for c in s.values()
    ) and all(v < 120 for v in t.values())
    detail = "; ".join(
        f"{k}: ratio={c['ratio']:.3f} constraint={c['constraint_ratio']:.3f} ({t[k]:.1f}s)"
        for k, c in s.items()
    )
    record(3, ok, detail)
    assert ok


def test_criterion_04_lifespan_scaling():
    s, t = first_pass(4)
    ok = s["spread"] is not None and s["spread"] <= 0.10 and t[0.02] < 600
    prods = ", ".join(
        f"{k}:{v['lambda_log_lifespan']:.3f}" for k, v in s["runs"].items() if v["shock"]
    )
    spread = "n/a" if s["spread"] is None else f"{s['spread']:.2e}"
    record(4, ok, f"lambda*lnT {prods}; spread={spread}; lambda=0.02 runtime={t[0.02]:.1f}s")
    assert ok


def test_criterion_05_reduced_model():
    s, _ = first_pass(5)
    errs = [v["relative_error_T"] for v in s["runs"].values()]
    ok = all(e is not None and e <= 0.15 for e in errs)
    record(5, ok, "T_pred/T_meas - 1: " + ", ".join(
        f"{k}:{'n/a' if e is None else f'{e:.2e}'}" for k, e in zip(s["runs"], errs)))
    assert ok


def test_criterion_06_dispersive_monitors():
    s, _ = first_pass(6)
    worst = max(max(v["ratios"].values()) for v in s["runs"].values())
    ok = all(v["shock"] for v in s["runs"].values()) and worst < MONITOR_FACTOR
    record(6, ok, f"max sup/value(t_start+1) over {len(s['runs'])} shock runs = {worst:.3f}")
    assert ok


def test_criterion_07_point_of_no_return():
    s, _ = first_pass(7)
    checked = sum(v["nodes_checked"] for v in s["runs"].values())
    bad = sum(v["violations"] for v in s["runs"].values())
    ok = all(v["shock"] and v["nodes_checked"] > 0 for v in s["runs"].values()) and bad == 0
    record(7, ok, f"{checked} node-steps with mu<1/4, {bad} with L mu >= 0")
    assert ok


def test_criterion_08_null_condition_values():
    s, _ = first_pass(8)
    ok = all(v <= 1e-12 for v in s.values())
    record(8, ok, "max deviation " + ", ".join(f"{k}={v:.1e}" for k, v in s.items()))
    assert ok


def test_criterion_09_exceptional_lagrangian():
    s, _ = first_pass(9)
    ok = (
        all(abs(v) <= 1e-10 for v in s["exceptional"].values())
        and abs(s["quadratic"] + 21.36) <= 0.01
        and abs(s["quadratic"] - s["symbolic"]) <= 1e-10 * abs(s["symbolic"])
    )
    record(9, ok, "exceptional |dH/dsigma| " + ", ".join(
        f"k={k}:{abs(v):.1e}" for k, v in s["exceptional"].items())
        + f"; quadratic dH/dsigma(0.01)={s['quadratic']:.5f} (symbolic {s['symbolic']:.5f})")
    assert ok


def test_criterion_10_radon_oracles():
    s, t = first_pass(10)
    ok = s["ball_max_error"] <= 1e-6 and s["gaussian_max_error"] <= 1e-6 and t["runtime"] < 10
    record(10, ok, f"ball err={s['ball_max_error']:.1e} gaussian err={s['gaussian_max_error']:.1e} "
                   f"runtime={t['runtime']:.2f}s")
    assert ok


def test_criterion_11_john_hormander_positivity():
    s, t = first_pass(11)
    ok = all(min(v) > radiation.POSITIVITY_FLOOR for v in s.values())
    record(11, ok, "min sup over 20 pairs " + ", ".join(f"{k}={min(v):.3f}" for k, v in s.items())
           + f" ({t['runtime']:.1f}s)")
    assert ok


def test_criterion_12_christodoulou_sign():
    s, _ = first_pass(12)
    ok = s["negative_values"] == 0 and s["constant_data_error"] <= 1e-8
    record(12, ok, f"50 data x {len(S_U_VALUES)} U: min S={s['min_S']:.3e}, "
                   f"negatives={s['negative_values']}, constant-data error={s['constant_data_error']:.1e}")
    assert ok


def test_criterion_13_determinism():
    fresh = _family_solver()
    mismatched = [n for n in CRITERIA if dumps(CRITERIA[n](fresh)[0]) != dumps(first_pass(n)[0])]
    ok = not mismatched
    record(13, ok, f"{len(CRITERIA)} criteria re-run, byte-identical JSON"
           if ok else f"differing: {mismatched}")
    assert ok


@pytest.fixture(scope="module", autouse=True)
def _warm():
    # compile the solver kernels before any timed run
    run(family_data(0.5), GeometricGrid(n_u=8, t_max=0.1))
