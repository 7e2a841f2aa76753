"""Library of admissible test functions.

Each entry is a strictly positive function with a closed-form
antiderivative and the window rule under which it is admissible.
Trigonometric windows start at ``base * L + mu`` with ``L`` a natural
number; ``base`` is pi or 2 pi.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .config import WindowConfig
from .errors import WindowError

PI = math.pi


@dataclass(frozen=True)
class AdmissibleFunction:
    id: str
    f: Callable
    F: Callable
    base: Optional[float] = None
    rule: str = "any"
    delta_F: Optional[Callable] = None

    def __call__(self, t):
        return self.f(np.asarray(t, dtype=float))

    def increment(self, T: float, U: float) -> float:
        """F(T+U) - F(T)."""
        if self.delta_F is not None:
            return float(self.delta_F(T, U))
        return float(self.F(T + U) - self.F(T))

    def offset(self, T: float):
        """(L, mu) with T = base * L + mu, 0 <= mu < base."""
        if self.base is None:
            return None, None
        L = math.floor(T / self.base)
        return L, T - self.base * L

    def check_window(self, T: float, U: float, wcfg: WindowConfig = WindowConfig()):
        """Raise :class:`WindowError` unless [T, T+U] is admissible."""
        if not U > 0:
            raise WindowError(f"U must be positive, got {U!r}")
        if self.rule == "any":
            pass
        else:
            _, mu = self.offset(T)
            if mu < wcfg.mu0:
                raise WindowError(f"{self.id}: mu={mu:.6g} below mu0={wcfg.mu0:g}")
            limit = PI / 2 - wcfg.eps
            if self.rule == "pi" and 2 * mu + U > limit:
                raise WindowError(f"{self.id}: 2mu+U={2 * mu + U:.6g} exceeds pi/2-eps={limit:.6g}")
            if self.rule == "2pi" and mu + U / 2 > limit:
                raise WindowError(f"{self.id}: mu+U/2={mu + U / 2:.6g} exceeds pi/2-eps={limit:.6g}")
        grid = np.linspace(T, T + U, 33)
        vals = self(grid)
        if not np.all(np.isfinite(vals)) or np.min(vals) <= 0:
            raise WindowError(f"{self.id} is not strictly positive on [{T!r}, {T + U!r}]")


def window_start(f: AdmissibleFunction, L: int, mu: float) -> float:
    base = f.base if f.base is not None else PI
    return base * L + mu


ONE = AdmissibleFunction("one", lambda t: np.ones_like(t), lambda t: t,
                         delta_F=lambda T, U: U)

F1_SIN2 = AdmissibleFunction("f1_sin2", lambda t: np.sin(t) ** 2,
                             lambda t: t / 2 - np.sin(2 * t) / 4, base=PI, rule="pi")

F2_COS2 = AdmissibleFunction("f2_cos2", lambda t: np.cos(t) ** 2,
                             lambda t: t / 2 + np.sin(2 * t) / 4, base=PI, rule="pi")

F3_SEC2 = AdmissibleFunction("f3_sec2", lambda t: 1.0 / np.cos(t) ** 2, np.tan,
                             base=PI, rule="pi")

F4_COS = AdmissibleFunction("f4_cos", np.cos, np.sin, base=2 * PI, rule="2pi")

F5_COS = AdmissibleFunction("f5_cos", np.cos, np.sin, base=2 * PI, rule="2pi")

F5_SIN = AdmissibleFunction("f5_sin", np.sin, lambda t: -np.cos(t), base=2 * PI, rule="2pi")


def f5(variant: str = "sin") -> AdmissibleFunction:
    """The fifth library function.

    ``"cos"`` takes the function as literally stated; ``"sin"`` is the
    choice under which the printed second-level coefficient
    ``tan(mu + U/2) cos(a4) / sin(a5)`` is the ratio of the two
    mean-value rules.
    """
    if variant == "sin":
        return F5_SIN
    if variant == "cos":
        return F5_COS
    raise ValueError(f"unknown f5 variant {variant!r}")


def power_signal(delta: float, ref: float) -> AdmissibleFunction:
    """(t / ref)**delta; the scale ``ref`` cancels in H / f(alpha0)."""
    lr = math.log(ref)

    def f(t):
        return np.exp(delta * (np.log(t) - lr))

    if delta == -1:
        def F(t):
            return ref * (np.log(t) - lr)

        def dF(T, U):
            return ref * math.log1p(U / T)
    else:
        def F(t):
            return ref * np.exp((delta + 1) * (np.log(t) - lr)) / (delta + 1)

        def dF(T, U):
            scale = math.exp((delta + 1) * (math.log(T) - lr))
            return ref * scale * math.expm1((delta + 1) * math.log1p(U / T)) / (delta + 1)

    return AdmissibleFunction(f"power({delta:g})", f, F, delta_F=dF)


def library(f5_variant: str = "sin") -> dict:
    """The five trigonometric test functions keyed by id."""
    return {fn.id: fn for fn in (F1_SIN2, F2_COS2, F3_SEC2, F4_COS, f5(f5_variant))}


def lookup(fid: str, f5_variant: str = "sin") -> AdmissibleFunction:
    table = {fn.id: fn for fn in (ONE, F1_SIN2, F2_COS2, F3_SEC2, F4_COS, F5_COS, F5_SIN)}
    aliases = {"f1": F1_SIN2, "f2": F2_COS2, "f3": F3_SEC2, "f4": F4_COS, "f5": f5(f5_variant),
               "1": ONE}
    if fid in table:
        return table[fid]
    if fid in aliases:
        return aliases[fid]
    raise KeyError(f"unknown function id {fid!r}")
