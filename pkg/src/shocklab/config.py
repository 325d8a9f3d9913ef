"""Flat ``key = value`` run configuration.

A config file holds one section::

    # comment
    [john]
    psi0_dot = -poly_bump:1,4,0.5
    lambda = 0.08, 0.04, 0.02

The header may be omitted when the section is implied by the command.
Every section has a fixed schema; unknown keys are rejected and missing keys
take documented defaults. Profile values are either a built-in
``name:p1,p2,...`` (optionally negated with a leading ``-``) or an
arithmetic expression in ``r``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from shocklab.errors import ConfigTypeError, ParseError, UnknownKey, UsageError
from shocklab.profiles import BUILTINS, Profile1D, from_spec


@dataclass(frozen=True)
class Key:
    kind: str  # float, int, str, bool, profile, floats
    default: object
    doc: str = ""


_PROFILE_KIND = "profile"

SCHEMAS: dict[str, dict[str, Key]] = {
    "burgers": {
        "profile": Key(_PROFILE_KIND, "gaussian:1,0,1", "initial datum psi0(x)"),
        "t_max": Key("float", 1.0, "last tabulated time"),
        "n_alpha": Key("int", 201, "launch points in the characteristic fan"),
        "n_t": Key("int", 11, "tabulated time levels"),
        "blowup_grid": Key("int", 100_000, "grid size for the global minimisation of psi0'"),
    },
    "john": {
        "psi0": Key(_PROFILE_KIND, "zero", "Psi at the start time, radial profile"),
        "psi0_dot": Key(_PROFILE_KIND, "-poly_bump:1,4,0.5", "d_t Psi at the start time"),
        "support_radius": Key("float", 0.5, "data vanish for r beyond this"),
        "amplitude": Key("float", 0.05, "amplitude lambda for solve and predict"),
        "lambda": Key("floats", (0.08, 0.04, 0.02), "amplitude list for sweep"),
        "start_time": Key("float", -0.5, "0 or -0.5"),
        "U0": Key("float", 0.9, "strip width in u"),
        "n_u": Key("int", 400, "u cells"),
        "dt_max": Key("float", 0.05, "largest step of the log clock ln(1 + t)"),
        "kappa": Key("float", 0.5, "Courant factor: dt <= kappa du for t << 1"),
        "mu_stop": Key("float", 0.01, "stop threshold for min mu"),
        "t_max": Key("float", math.inf, "final time when no shock forms"),
        "max_steps": Key("int", 2_000_000, "step cap"),
        "prevolve_cells": Key("int", 3200, "radial cells for data posed at t = -1/2"),
        "output_every": Key("int", 0, "write every n-th slice to the CSV (0: none)"),
        "measure_order": Key("bool", False, "add a grid-refinement study on t in [0, 1]"),
        "order_n_u": Key("int", 100, "coarsest u cells of the refinement study"),
    },
    "nullcond": {
        "metric": Key("str", "john", "built-in metric family or 'custom'"),
        "kind": Key("str", "scalar_gPsi", "kind of a custom metric family"),
        "G2": Key("floats", (), "custom G_{ab}, 16 numbers row-major"),
        "G3": Key("floats", (), "custom G^l_{ab}, 64 numbers row-major [l][a][b]"),
        "A": Key("floats", (), "cubic coefficients A^{abs}, 64 numbers row-major"),
        "N": Key("floats", (), "quadratic coefficients N^{ab}, 16 numbers row-major"),
        "n_dirs": Key("int", 4096, "Fibonacci directions"),
        "theta_grid": Key("int", 0, "directions in the aleph sphere map (0: n_dirs)"),
        "lagrangian": Key("str", "exceptional", "exceptional[:scale], linear, quadratic:a,b"),
        "k": Key("float", 0.5, "background constant"),
        "derivative_mode": Key("str", "analytic", "analytic or fd"),
        "fd_step": Key("float", 0.0, "finite-difference step (0: automatic)"),
        "tol": Key("float", 1.0e-10, "exceptionality tolerance"),
    },
    "lifespan": {
        "phi0": Key(_PROFILE_KIND, "zero", "radial profile of Phi at t = 0"),
        "phi0_dot": Key(_PROFILE_KIND, "poly_bump:1,4,0.5", "radial profile of d_t Phi"),
        "aleph": Key("str", "john", "built-in metric family or path to a [nullcond] file"),
        "support_radius": Key("float", 0.5, "support radius applied to expression profiles"),
        "lambda": Key("floats", (0.1, 0.05), "amplitudes for the lifespan bound"),
        "n_q": Key("int", 513, "q samples"),
        "n_dirs": Key("int", 1024, "Fibonacci directions"),
    },
}

GLOBAL_KEYS: dict[str, Key] = {"seed": Key("int", 0, "seed for randomised suites")}

_HEADER = re.compile(r"^\s*\[\s*([A-Za-z_]\w*)\s*\]\s*$")
_ASSIGN = re.compile(r"^\s*([A-Za-z_]\w*)\s*=\s*(.*?)\s*$")


@dataclass(frozen=True)
class RunConfig:
    section: str
    values: dict = field(default_factory=dict)
    seed: int = 0

    def __getitem__(self, key: str):
        return self.values[key]

    def profile(self, key: str) -> Profile1D:
        return from_spec(self.values[key])

    def replace(self, **updates) -> RunConfig:
        vals = dict(self.values)
        for k, v in updates.items():
            if k not in SCHEMAS[self.section]:
                raise UnknownKey(k, self.section)
            vals[k] = v
        return RunConfig(self.section, vals, self.seed)

    def echo(self) -> dict:
        out = {k: _jsonable(v) for k, v in sorted(self.values.items())}
        out["seed"] = self.seed
        return out


def _jsonable(v):
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    if isinstance(v, float) and not math.isfinite(v):
        return "inf" if v > 0 else "-inf" if v < 0 else "nan"
    return v


def _parse_float(text: str, line: int, key: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigTypeError(f"{key}: expected a number, got {text!r} (line {line})") from None


def convert(kind: str, text: str, key: str, line: int = 0, column: int = 1):
    """Typed value from its textual form."""
    if kind == "float":
        return _parse_float(text, line, key)
    if kind == "int":
        try:
            return int(text)
        except ValueError:
            raise ConfigTypeError(f"{key}: expected an integer, got {text!r} (line {line})") from None
    if kind == "bool":
        low = text.lower()
        if low in ("true", "yes", "1", "on"):
            return True
        if low in ("false", "no", "0", "off"):
            return False
        raise ConfigTypeError(f"{key}: expected a boolean, got {text!r} (line {line})")
    if kind == "floats":
        if not text.strip():
            return ()
        return tuple(_parse_float(t.strip(), line, key) for t in text.split(","))
    if kind == _PROFILE_KIND:
        _check_profile(text, key, line, column)
        return text
    return text


def _check_profile(text: str, key: str, line: int, column: int) -> None:
    from shocklab.expr import compile_expression

    body = text[1:] if text.startswith("-") else text
    name, _, args = body.partition(":")
    if name.strip() in BUILTINS:
        try:
            from_spec(text)
        except (TypeError, ValueError) as exc:
            raise ConfigTypeError(f"{key}: bad profile parameters in {text!r} (line {line})") from exc
        return
    try:
        compile_expression(text, line)
    except ParseError as exc:
        raise ParseError(str(exc).rsplit(" (line", 1)[0], line, column + exc.column - 1) from None


def _format(kind: str, value) -> str:
    if kind == "floats":
        return ", ".join(repr(float(v)) for v in value)
    if kind == "float":
        return repr(float(value))
    if kind == "bool":
        return "true" if value else "false"
    return str(value)


def parse_config(text: str, section: str | None = None) -> RunConfig:
    """Parse ``text``; ``section`` names the schema when the header is absent.

    Raises ``ParseError`` (with line and column), ``UnknownKey`` or
    ``ConfigTypeError``.
    """
    found: str | None = None
    raw: dict[str, tuple[str, int, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        m = _HEADER.match(line)
        if m:
            if found is not None:
                raise ParseError("only one section per config", lineno, line.index("[") + 1)
            found = m.group(1)
            if found not in SCHEMAS:
                raise UnknownKey(found)
            continue
        m = _ASSIGN.match(line)
        if not m:
            col = len(line) - len(line.lstrip()) + 1
            raise ParseError("expected 'key = value'", lineno, col)
        key, value = m.group(1), m.group(2)
        if key in raw:
            raise ParseError(f"duplicate key {key!r}", lineno, m.start(1) + 1)
        raw[key] = (value, lineno, m.start(2) + 1)

    name = found or section
    if name is None:
        raise UsageError("config has no [section] header and none was implied")
    if section is not None and found is not None and found != section:
        raise UsageError(f"config section [{found}] does not match command {section!r}")
    return _build(name, raw)


def _build(name: str, raw: dict[str, tuple[str, int, int]]) -> RunConfig:
    schema = SCHEMAS[name]
    values = {k: spec.default for k, spec in schema.items()}
    seed = GLOBAL_KEYS["seed"].default
    for key, (text, line, col) in raw.items():
        if key in GLOBAL_KEYS:
            seed = convert(GLOBAL_KEYS[key].kind, text, key, line, col)
            continue
        if key not in schema:
            raise UnknownKey(key, name)
        values[key] = convert(schema[key].kind, text, key, line, col)
    for key, spec in schema.items():
        if spec.kind == _PROFILE_KIND and key not in raw:
            _check_profile(values[key], key, 0, 1)
    return RunConfig(name, values, seed)


def with_overrides(cfg: RunConfig, overrides: dict[str, str]) -> RunConfig:
    """Apply textual overrides (from command-line flags) through the schema."""
    schema = SCHEMAS[cfg.section]
    vals = dict(cfg.values)
    seed = cfg.seed
    for key, text in overrides.items():
        if key == "seed":
            seed = convert("int", text, key)
        elif key not in schema:
            raise UnknownKey(key, cfg.section)
        else:
            vals[key] = convert(schema[key].kind, text, key)
    return RunConfig(cfg.section, vals, seed)


def serialize(cfg: RunConfig) -> str:
    schema = SCHEMAS[cfg.section]
    lines = [f"[{cfg.section}]", f"seed = {cfg.seed}"]
    for key in sorted(schema):
        lines.append(f"{key} = {_format(schema[key].kind, cfg.values[key])}")
    return "\n".join(lines) + "\n"


def describe(section: str) -> str:
    """Human-readable schema listing."""
    out = [f"[{section}]"]
    for key, spec in sorted(SCHEMAS[section].items()):
        out.append(f"{key} = {_format(spec.kind, spec.default)}    # {spec.kind}: {spec.doc}")
    return "\n".join(out)
