"""Numerical configuration.

All tunables live in small frozen dataclasses grouped under
:class:`NumericsConfig`.  A flat ``key = value`` text format is supported
with dotted keys (``eval.t_switch = 50``).
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

EULER_GAMMA = float(np.euler_gamma)
LN_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class EvalConfig:
    """Settings for the Hardy Z evaluators.

    ``rs_error_constants[m]`` is the calibrated constant ``C`` in
    ``|Z_rs - Z| <= C * t**(-(2m+1)/4)`` on ``[50, 5000]`` for ``m``
    Riemann-Siegel correction terms.
    """

    rs_correction_terms: int = 2
    t_switch: float = 50.0
    oracle_precision: int = 30
    rs_error_constants: tuple = (1.9, 0.15, 0.066)

    def __post_init__(self):
        if self.rs_correction_terms not in (0, 1, 2):
            raise ValueError("rs_correction_terms must be 0, 1 or 2")
        if self.t_switch < 10:
            raise ValueError("t_switch must be >= 10")
        if self.oracle_precision < 20:
            raise ValueError("oracle_precision must be >= 20")

    @property
    def rs_error_constant(self) -> float:
        return self.rs_error_constants[self.rs_correction_terms]

    @property
    def rs_error_exponent(self) -> float:
        return (2 * self.rs_correction_terms + 1) / 4.0


@dataclass(frozen=True)
class QuadConfig:
    h_max: float = 0.05
    chunk: float = 10.0
    gl_order: int = 8
    table_tol: float = 1e-7
    cheb_degree: int = 12
    max_halvings: int = 6


@dataclass(frozen=True)
class HLConstants:
    c: float = EULER_GAMMA
    ln2pi: float = LN_2PI
    c0: float = 0.0

    def __post_init__(self):
        if not 0.577 < self.c < 0.578:
            raise ValueError("Euler constant out of range")


@dataclass(frozen=True)
class LadderConfig:
    T0: float = 100.0
    root_rtol: float = 1e-10
    max_bracket_expansions: int = 20
    k0: int = 5

    def __post_init__(self):
        if self.k0 < 1:
            raise ValueError("k0 must be >= 1")


@dataclass(frozen=True)
class WindowConfig:
    mu0: float = 0.01
    eps: float = 0.05


@dataclass(frozen=True)
class FactorConfig:
    d_policy: str = "smallest"
    f5_variant: str = "sin"
    scan_density: int = 64
    min_scan_points: int = 256
    zero_warn: float = 1e-6
    cov_rtol: float = 1e-11

    def __post_init__(self):
        if self.d_policy not in ("smallest", "largest"):
            raise ValueError("d_policy must be 'smallest' or 'largest'")
        if self.f5_variant not in ("sin", "cos"):
            raise ValueError("f5_variant must be 'sin' or 'cos'")


@dataclass(frozen=True)
class NumericsConfig:
    eval: EvalConfig = field(default_factory=EvalConfig)
    quad: QuadConfig = field(default_factory=QuadConfig)
    constants: HLConstants = field(default_factory=HLConstants)
    ladder: LadderConfig = field(default_factory=LadderConfig)
    window: WindowConfig = field(default_factory=WindowConfig)
    factor: FactorConfig = field(default_factory=FactorConfig)

    def __post_init__(self):
        if self.ladder.T0 < self.eval.t_switch:
            raise ValueError("ladder T0 must be >= eval t_switch")

    def flat(self) -> dict:
        """Flatten to ``{"section.field": value}``."""
        out = {}
        for sec in dataclasses.fields(self):
            sub = getattr(self, sec.name)
            for f in dataclasses.fields(sub):
                out[f"{sec.name}.{f.name}"] = getattr(sub, f.name)
        return out

    def replace(self, **overrides) -> "NumericsConfig":
        """Return a copy with dotted-key overrides applied."""
        sections = {s.name: {} for s in dataclasses.fields(self)}
        for key, value in overrides.items():
            sec, _, name = key.partition(".")
            if sec not in sections or not name:
                raise KeyError(f"unknown config key {key!r}")
            sections[sec][name] = value
        kwargs = {}
        for sec, vals in sections.items():
            sub = getattr(self, sec)
            names = {f.name: f for f in dataclasses.fields(sub)}
            for name in vals:
                if name not in names:
                    raise KeyError(f"unknown config key {sec}.{name}")
            kwargs[sec] = dataclasses.replace(sub, **vals) if vals else sub
        return NumericsConfig(**kwargs)


def _coerce(text: str, like):
    text = text.strip()
    if isinstance(like, bool):
        return text.lower() in ("1", "true", "yes", "on")
    if isinstance(like, int):
        return int(text)
    if isinstance(like, float):
        return float(text)
    if isinstance(like, tuple):
        return tuple(float(x) for x in text.split(","))
    return text


def parse_flat(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def load_config(path, base: NumericsConfig | None = None) -> NumericsConfig:
    base = base or NumericsConfig()
    raw = parse_flat(Path(path).read_text())
    return apply_overrides(base, raw)


def apply_overrides(base: NumericsConfig, raw: dict) -> NumericsConfig:
    """Apply string-valued dotted overrides, ignoring non-config keys."""
    flat = base.flat()
    typed = {k: _coerce(v, flat[k]) if isinstance(v, str) else v
             for k, v in raw.items() if k in flat}
    return base.replace(**typed)
