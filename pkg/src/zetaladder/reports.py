"""Parameter sweeps, convergence tables and report emission."""
from __future__ import annotations

import csv
import io
import json
import math
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .config import NumericsConfig, apply_overrides, parse_flat
from .factorizer import Factorizer
from .functions import PI
from .hl_integral import config_fingerprint
from .interactions import IDENTITIES, IdentityReport, evaluate
from .ladder import OMEGA_ID, admissible_U0

CSV_COLUMNS = ("identity", "L", "U", "mu", "k1", "k2", "k3", "delta", "lhs", "rhs",
               "raw_residual", "corrected_residual")

_PI_FAMILY = {"trig", "pair_cos", "pair_sin", "triple", "triple_cos", "triple_sin"}
_SPEC_KEYS = {"identities", "L", "U", "mu", "k1", "k2", "k3", "delta", "power_L",
              "placements", "output", "workers"}


def _floats(text):
    return [float(x) for x in str(text).split(",") if x.strip()]


def _ints(text, k0):
    text = str(text).strip()
    if text == "all":
        return list(range(1, k0 + 1))
    out = []
    for part in text.split(","):
        part = part.strip()
        if ":" in part:
            a, b = part.split(":")
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    return out


@dataclass(frozen=True)
class GridPoint:
    identity: str
    L: float
    U: float
    mu: float | None = None
    k1: int | None = None
    k2: int | None = None
    k3: int | None = None
    delta: float | None = None

    def key(self):
        return (self.identity, self.L, self.U, self.mu, self.k1, self.k2, self.k3, self.delta)

    def as_dict(self):
        return {"identity": self.identity, "L": self.L, "U": self.U, "mu": self.mu,
                "k1": self.k1, "k2": self.k2, "k3": self.k3, "delta": self.delta}


@dataclass
class SweepSpec:
    """Grid of identity evaluations.

    ``placements`` windows are laid per base L, at L, L+1, ...; power
    signals use ``power_L`` when given (they need much larger L than the
    ladder can reach) and L otherwise.  ``overrides`` holds dotted config
    keys.
    """

    identities: list = field(default_factory=list)
    L: list = field(default_factory=list)
    U: list = field(default_factory=lambda: [0.5])
    mu: list = field(default_factory=lambda: [0.3])
    k1: list = field(default_factory=lambda: [1])
    k2: list = field(default_factory=lambda: [1])
    k3: list = field(default_factory=lambda: [1])
    delta: list = field(default_factory=list)
    power_L: list = field(default_factory=list)
    placements: int = 1
    output: str | None = None
    workers: int = 4
    overrides: dict = field(default_factory=dict)

    @classmethod
    def from_text(cls, text: str, k0: int = 5) -> "SweepSpec":
        raw = parse_flat(text)
        unknown = [k for k in raw if k not in _SPEC_KEYS and "." not in k]
        if unknown:
            raise ValueError(f"unknown sweep keys: {', '.join(sorted(unknown))}")
        spec = cls(overrides={k: v for k, v in raw.items() if "." in k})
        if "identities" in raw:
            spec.identities = [s.strip() for s in raw["identities"].split(",") if s.strip()]
            bad = [s for s in spec.identities if s not in IDENTITIES]
            if bad:
                raise ValueError(f"unknown identities: {', '.join(bad)}")
        for name in ("L", "U", "mu", "delta", "power_L"):
            if name in raw:
                setattr(spec, name, _floats(raw[name]))
        for name in ("k1", "k2", "k3"):
            if name in raw:
                setattr(spec, name, _ints(raw[name], k0))
        if "placements" in raw:
            spec.placements = int(raw["placements"])
        if "workers" in raw:
            spec.workers = int(raw["workers"])
        spec.output = raw.get("output")
        return spec

    @classmethod
    def load(cls, path, k0: int = 5) -> "SweepSpec":
        return cls.from_text(Path(path).read_text(), k0)

    def to_dict(self):
        return {"identities": self.identities, "L": self.L, "U": self.U, "mu": self.mu,
                "k1": self.k1, "k2": self.k2, "k3": self.k3, "delta": self.delta,
                "power_L": self.power_L, "placements": self.placements,
                "overrides": dict(sorted(self.overrides.items()))}


def _reject_reason(p: GridPoint, cfg: NumericsConfig):
    w = cfg.window
    lim = PI / 2 - w.eps
    if p.identity == "power_signal":
        if not 0 < p.U < 1:
            return "power signal needs 0 < U < 1"
        if p.L <= 0:
            return "L must be positive"
        if power_guard(p.delta, p.L, p.U):
            return f"(1+U/L)^|delta| - 1 >= 0.1: L={p.L:g} below L0(delta={p.delta:g})"
        return None
    if p.identity in _PI_FAMILY:
        T = PI * p.L + p.mu
        if 2 * p.mu + p.U > lim:
            return f"2mu+U={2 * p.mu + p.U:.6g} exceeds pi/2-eps={lim:.6g}"
    else:
        T = 2 * PI * p.L + p.mu
        if p.mu + p.U / 2 > lim:
            return f"mu+U/2={p.mu + p.U / 2:.6g} exceeds pi/2-eps={lim:.6g}"
    if p.mu < w.mu0:
        return f"mu={p.mu:g} below mu0={w.mu0:g}"
    if not 0 < p.U <= admissible_U0(T):
        return f"U={p.U:g} outside (0, T/ln^2 T]"
    if T < cfg.ladder.T0:
        return f"T={T:.6g} below T0={cfg.ladder.T0:g}"
    for k in (p.k1, p.k2, p.k3):
        if k is not None and not 1 <= k <= cfg.ladder.k0:
            return f"depth {k} outside [1, k0={cfg.ladder.k0}]"
    return None


def power_guard(delta, L, U) -> bool:
    """True when (1+U/L)^|delta| - 1 >= 0.1; compared in log space."""
    return abs(delta) * math.log1p(U / L) >= math.log1p(0.1)


def expand_grid(spec: SweepSpec, cfg: NumericsConfig):
    """All grid points in a fixed order, split into accepted and rejected."""
    points = []
    for ident in spec.identities:
        for L0 in (spec.power_L or spec.L) if ident == "power_signal" else spec.L:
            if ident == "power_signal":
                for U in spec.U:
                    for d in spec.delta:
                        points.append(GridPoint(ident, L0, U, delta=d))
                continue
            for j in range(spec.placements):
                L = int(L0) + j
                for U in spec.U:
                    for mu in spec.mu:
                        if ident == "second_level":
                            ks = [(k, None, None) for k in spec.k1]
                        elif ident.startswith("triple"):
                            ks = [(a, b, c) for a in spec.k1 for b in spec.k2 for c in spec.k3]
                        else:
                            ks = [(a, b, None) for a in spec.k1 for b in spec.k2]
                        for a, b, c in ks:
                            points.append(GridPoint(ident, L, U, mu, a, b, c))
    accepted, rejected = [], []
    for p in points:
        reason = _reject_reason(p, cfg)
        (rejected if reason else accepted).append((p, reason))
    return [p for p, _ in accepted], [{"point": p.as_dict(), "reason": r} for p, r in rejected]


@dataclass
class SweepSummary:
    reports: list
    rejected: list
    failures: list
    convergence: list
    manifest: dict
    timing: dict


def convergence_table(reports):
    """Median raw and corrected residual per (identity, L)."""
    groups = {}
    for r in reports:
        base = r.params["L"]
        groups.setdefault((r.identity, base), []).append(r)
    rows = []
    for (ident, L), rs in sorted(groups.items(), key=lambda kv: (IDENTITIES.index(kv[0][0]), kv[0][1])):
        rows.append({"identity": ident, "L": L, "n": len(rs),
                     "median_raw": statistics.median(r.raw_residual for r in rs),
                     "median_corrected": statistics.median(r.corrected_residual for r in rs)})
    return rows


def placement_medians(reports, base_L, placements):
    """Median raw residual over the placements L, L+1, ... of each base L."""
    out = {}
    for L0 in base_L:
        Ls = {int(L0) + j for j in range(placements)}
        vals = [r.raw_residual for r in reports if r.params["L"] in Ls]
        out[L0] = statistics.median(vals) if vals else float("nan")
    return out


def build_manifest(spec: SweepSpec, cfg: NumericsConfig):
    return {
        "package_version": __version__,
        "spec": spec.to_dict(),
        "config": {k: list(v) if isinstance(v, tuple) else v for k, v in cfg.flat().items()},
        "config_fingerprint": config_fingerprint(cfg),
        "c0": cfg.constants.c0,
        "euler_c": cfg.constants.c,
        "omega_id": OMEGA_ID,
        "d_policy": cfg.factor.d_policy,
        "f5_variant": cfg.factor.f5_variant,
        "tolerances": {"table_tol": cfg.quad.table_tol, "cov_rtol": cfg.factor.cov_rtol,
                       "root_rtol": cfg.ladder.root_rtol},
    }


def run_sweep(spec: SweepSpec, factorizer: Factorizer, out_dir=None) -> SweepSummary:
    """Evaluate every accepted grid point. Per-point errors are recorded,
    never raised.  Results are ordered as the grid, whatever the worker
    completion order."""
    cfg = factorizer.cfg
    accepted, rejected = expand_grid(spec, cfg)
    table = factorizer.ladder.table
    span0 = table.integrated_span
    t0 = time.perf_counter()

    def one(p: GridPoint):
        return evaluate(factorizer, p.identity, p.L, p.U, p.mu,
                        p.k1 or 1, p.k2 or 1, p.k3 or 1, p.delta)

    results = [None] * len(accepted)
    errors = [None] * len(accepted)
    with ThreadPoolExecutor(max_workers=max(1, spec.workers)) as pool:
        futs = [pool.submit(one, p) for p in accepted]
        for i, fut in enumerate(futs):
            try:
                results[i] = fut.result()
            except Exception as exc:  # recorded per point
                errors[i] = f"{type(exc).__name__}: {exc}"
    reports = [r for r in results if r is not None]
    failures = [{"point": p.as_dict(), "error": e} for p, e in zip(accepted, errors) if e]
    timing = {"wall_seconds": time.perf_counter() - t0,
              "cold_start_integrated_span": table.integrated_span - span0,
              "points": len(accepted)}
    summary = SweepSummary(reports, rejected, failures, convergence_table(reports),
                           build_manifest(spec, cfg), timing)
    out_dir = out_dir or spec.output
    if out_dir is not None:
        write_outputs(summary, out_dir)
    return summary


# -- emission -----------------------------------------------------------

def _cell(v):
    return "" if v is None else repr(v)


def report_row(r: IdentityReport):
    p = r.params
    return [r.identity, p.get("L"), p.get("U"), p.get("mu"), p.get("k1"), p.get("k2"),
            p.get("k3"), p.get("delta"), r.lhs, r.rhs, r.raw_residual, r.corrected_residual]


def format_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        row = report_row(r)
        w.writerow([row[0]] + [_cell(v) for v in row[1:]])
    return buf.getvalue()


def format_jsonl(reports) -> str:
    return "".join(r.to_json() + "\n" for r in reports)


def parse_jsonl(text: str):
    return [IdentityReport.from_json(line) for line in text.splitlines() if line.strip()]


_TABLE_FMT = ("{:<17} {:>8} {:>5} {:>5} {:>2} {:>2} {:>2} {:>7} {:>13} {:>13} {:>10} {:>10}")


def _num(v, spec):
    if v is None:
        return "-"
    return format(v, spec)


def format_table(reports) -> str:
    head = _TABLE_FMT.format("identity", "L", "U", "mu", "k1", "k2", "k3", "delta",
                             "lhs", "rhs", "raw", "corrected")
    lines = [head, "-" * len(head)]
    for r in reports:
        p = r.params
        lines.append(_TABLE_FMT.format(
            r.identity[:17], _num(p.get("L"), ".0f"), _num(p.get("U"), ".3g"),
            _num(p.get("mu"), ".3g"), _num(p.get("k1"), "d"), _num(p.get("k2"), "d"),
            _num(p.get("k3"), "d"), _num(p.get("delta"), ".4g"), f"{r.lhs:.6e}",
            f"{r.rhs:.6e}", f"{r.raw_residual:.3e}", f"{r.corrected_residual:.3e}"))
    return "\n".join(lines) + "\n"


FORMATS = {"table": format_table, "csv": format_csv, "jsonl": format_jsonl}


def emit_report(reports, fmt: str, path=None) -> str:
    """Render ``reports`` in ``fmt``; write to ``path`` when given."""
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {', '.join(FORMATS)}")
    text = FORMATS[fmt](reports)
    if path is not None:
        path = Path(path)
        try:
            path.write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write report to {path}: {exc}") from exc
    return text


def plot_data(reports) -> dict:
    """``{identity: text}`` with columns L, raw_residual, corrected_residual."""
    out = {}
    for r in reports:
        out.setdefault(r.identity, ["# L raw_residual corrected_residual"]).append(
            f"{r.params['L']!r} {r.raw_residual!r} {r.corrected_residual!r}")
    return {k: "\n".join(v) + "\n" for k, v in out.items()}


def write_outputs(summary: SweepSummary, out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    emit_report(summary.reports, "jsonl", out / "reports.jsonl")
    emit_report(summary.reports, "csv", out / "reports.csv")
    emit_report(summary.reports, "table", out / "reports.txt")
    with open(out / "convergence.tsv", "w") as fh:
        fh.write("identity\tL\tn\tmedian_raw\tmedian_corrected\n")
        for row in summary.convergence:
            fh.write(f"{row['identity']}\t{row['L']!r}\t{row['n']}\t"
                     f"{row['median_raw']!r}\t{row['median_corrected']!r}\n")
    for ident, text in plot_data(summary.reports).items():
        (out / f"residual_{ident}.dat").write_text(text)
    (out / "issues.json").write_text(json.dumps(
        {"rejected": summary.rejected, "failures": summary.failures}, indent=2, sort_keys=True) + "\n")
    (out / "manifest.json").write_text(json.dumps(summary.manifest, indent=2, sort_keys=True) + "\n")
    (out / "timing.json").write_text(json.dumps(summary.timing, indent=2, sort_keys=True) + "\n")
    return out


def load_spec_and_config(path, base: NumericsConfig):
    spec = SweepSpec.load(path, base.ladder.k0)
    cfg = apply_overrides(base, spec.overrides) if spec.overrides else base
    return spec, cfg
