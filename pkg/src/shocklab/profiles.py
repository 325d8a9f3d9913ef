"""One-dimensional data profiles.

A :class:`Profile1D` bundles a vectorised evaluator with its derivative.
Built-in profiles ship analytic derivatives; user profiles get a
fourth-order central-difference derivative synthesised on construction.
Profiles are even in their argument, so they serve both as Burgers data on
the line and as radial data ``f(r)`` for spherically symmetric problems.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

Evaluator = Callable[[np.ndarray], np.ndarray]

FD_STEP = 1.0e-3


def central_difference(f: Evaluator, h: float = FD_STEP) -> Evaluator:
    """Fourth-order central difference of ``f``."""

    def df(x):
        x = np.asarray(x, dtype=float)
        return (
            -f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)
        ) / (12 * h)

    return df


@dataclass(frozen=True)
class Profile1D:
    value: Evaluator
    derivative: Evaluator | None = None
    support_radius: float = math.inf
    # search window used when the support is unbounded
    extent: float | None = None
    name: str = "custom"
    params: tuple = field(default=())

    def __post_init__(self) -> None:
        if self.derivative is None:
            object.__setattr__(self, "derivative", central_difference(self.value))
        if not self.support_radius > 0:
            raise ValueError("support_radius must be positive")

    def __call__(self, x):
        return self.value(np.asarray(x, dtype=float))

    def d(self, x):
        return self.derivative(np.asarray(x, dtype=float))

    @property
    def window(self) -> float:
        if math.isfinite(self.support_radius):
            return self.support_radius
        if self.extent is None:
            raise ValueError(f"profile {self.name!r} has no finite search window")
        return self.extent

    def scaled(self, factor: float) -> Profile1D:
        v, d = self.value, self.derivative
        return Profile1D(
            value=lambda x: factor * v(x),
            derivative=lambda x: factor * d(x),
            support_radius=self.support_radius,
            extent=self.extent,
            name=self.name,
            params=self.params + (("scale", factor),),
        )

    def spec(self) -> str:
        if not self.params:
            return self.name
        return f"{self.name}:" + ",".join(repr(p) for p in self.params)


def zero() -> Profile1D:
    return Profile1D(
        value=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        derivative=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        support_radius=math.inf,
        extent=1.0,
        name="zero",
    )


def constant(c: float) -> Profile1D:
    return Profile1D(
        value=lambda x: np.full_like(np.asarray(x, dtype=float), c),
        derivative=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        extent=1.0,
        name="constant",
        params=(c,),
    )


def linear(slope: float) -> Profile1D:
    """``slope * x``; not even, meant for Burgers tests only."""
    return Profile1D(
        value=lambda x: slope * np.asarray(x, dtype=float),
        derivative=lambda x: np.full_like(np.asarray(x, dtype=float), slope),
        extent=10.0,
        name="linear",
        params=(slope,),
    )


def gaussian(a: float = 1.0, c: float = 0.0, w: float = 1.0) -> Profile1D:
    """``a * exp(-((x - c) / w)**2)``."""

    def f(x):
        return a * np.exp(-(((x - c) / w) ** 2))

    def df(x):
        z = (x - c) / w
        return -2.0 * a * z / w * np.exp(-(z**2))

    return Profile1D(
        value=f,
        derivative=df,
        extent=abs(c) + 12.0 * w,
        name="gaussian",
        params=(a, c, w),
    )


def poly_bump(a: float = 1.0, p: int = 4, R: float = 0.5) -> Profile1D:
    """``a * (1 - (x/R)**2)**p`` on ``|x| <= R``, zero outside."""
    p = int(p)

    def f(x):
        y = 1.0 - (x / R) ** 2
        return np.where(y > 0.0, a * np.maximum(y, 0.0) ** p, 0.0)

    def df(x):
        y = 1.0 - (x / R) ** 2
        return np.where(
            y > 0.0, -2.0 * a * p * x / R**2 * np.maximum(y, 0.0) ** (p - 1), 0.0
        )

    return Profile1D(
        value=f, derivative=df, support_radius=R, name="poly_bump", params=(a, p, R)
    )


def cinf_bump(a: float = 1.0, R: float = 0.5) -> Profile1D:
    """``a * exp(-1 / (1 - (x/R)**2))`` on ``|x| < R``, zero outside."""

    def f(x):
        y = 1.0 - (x / R) ** 2
        safe = np.where(y > 0.0, y, 1.0)
        return np.where(y > 0.0, a * np.exp(-1.0 / safe), 0.0)

    def df(x):
        y = 1.0 - (x / R) ** 2
        safe = np.where(y > 0.0, y, 1.0)
        val = a * np.exp(-1.0 / safe) * (-2.0 * x / R**2) / safe**2
        return np.where(y > 0.0, val, 0.0)

    return Profile1D(
        value=f, derivative=df, support_radius=R, name="cinf_bump", params=(a, R)
    )


BUILTINS: dict[str, Callable[..., Profile1D]] = {
    "zero": zero,
    "constant": constant,
    "linear": linear,
    "gaussian": gaussian,
    "poly_bump": poly_bump,
    "cinf_bump": cinf_bump,
}


def from_spec(text: str) -> Profile1D:
    """Build a profile from ``name:p1,p2,...`` or, failing that, an expression.

    A leading ``-`` negates a named profile (``-poly_bump:1,4``).
    """
    from shocklab.expr import compile_profile

    text = text.strip()
    sign = 1.0
    body = text
    if body.startswith("-") and body[1:].split(":", 1)[0].strip() in BUILTINS:
        sign, body = -1.0, body[1:]
    name, _, args = body.partition(":")
    name = name.strip()
    if name in BUILTINS:
        params = [float(s) for s in args.split(",") if s.strip()] if args else []
        prof = BUILTINS[name](*params)
        return prof.scaled(sign) if sign != 1.0 else prof
    return compile_profile(text)
