"""The Hardy-Littlewood integral I(T) = int_0^T Z(t)^2 dt.

Three layers:

* :func:`integrate_Z_sq` -- composite Gauss-Legendre quadrature on panels
  no wider than the local zero spacing allows, with a step-halving error
  estimate.
* :class:`IntegralCheckpointTable` -- I(t) on a fixed grid of multiples of
  ``quad.chunk``, grown incrementally and persisted as text.
* :class:`LocalIntegral` -- a piecewise Chebyshev antiderivative of Z^2 on
  a short range, for fast vectorized I(t) near a ladder segment.
"""
from __future__ import annotations

import math
import os
import threading
from pathlib import Path

import numpy as np

from .config import HLConstants, NumericsConfig
from .errors import DomainError, TableCorruption, ToleranceNotMet
from .zeta_eval import zeta_mod_sq

CHECKPOINT_ENV = "ZETALADDER_CHECKPOINT_DIR"

_DEFAULT = NumericsConfig()


def step_size(t, h_max: float = 0.05):
    """Largest admissible panel width at height ``t``."""
    return np.minimum(h_max, 2.0 * math.pi / (8.0 * np.log(np.asarray(t) / (2.0 * math.pi) + 2.0)))


def _breakpoints(a, b, cfg):
    """[a, ..., b] split at the evaluator seam and at t = 2 pi N^2, where the
    truncated Riemann-Siegel sum gains a term and jumps slightly."""
    ts = cfg.eval.t_switch
    inner = [ts] if a < ts < b else []
    lo = max(a, ts)
    if b > lo:
        n_lo = math.floor(math.sqrt(lo / (2 * math.pi))) + 1
        n_hi = math.floor(math.sqrt(b / (2 * math.pi)))
        inner += [2 * math.pi * n * n for n in range(n_lo, n_hi + 1)]
    inner = sorted(x for x in inner if a < x < b)
    return [a] + inner + [b]


def _gl_sum(a, b, n, cfg):
    """Composite Gauss-Legendre over ``n`` equal panels of [a, b]."""
    x, w = np.polynomial.legendre.leggauss(cfg.quad.gl_order)
    edges = np.linspace(a, b, n + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    total = 0.0
    block = max(1, 200_000 // x.size)
    for lo in range(0, n, block):
        sl = slice(lo, lo + block)
        nodes = mid[sl, None] + half[sl, None] * x[None, :]
        vals = zeta_mod_sq(nodes.ravel(), cfg.eval).reshape(nodes.shape)
        total += float(np.sum((vals @ w) * half[sl]))
    return total


def integrate_Z_sq_with_error(a: float, b: float, tol: float = 1e-9,
                              cfg: NumericsConfig = _DEFAULT):
    """Return ``(value, error_estimate)`` for int_a^b Z^2 dt."""
    if not (0 <= a <= b) or not math.isfinite(b):
        raise DomainError(f"integration range must satisfy 0 <= a <= b, got {a!r}, {b!r}")
    if tol <= 0:
        raise DomainError("tol must be positive")
    if a == b:
        return 0.0, 0.0
    value = 0.0
    error = 0.0
    pts = _breakpoints(a, b, cfg)
    for lo, hi in zip(pts[:-1], pts[1:]):
        h = float(step_size(hi, cfg.quad.h_max))
        n = max(1, math.ceil((hi - lo) / h))
        coarse = _gl_sum(lo, hi, n, cfg)
        for _ in range(cfg.quad.max_halvings):
            n *= 2
            fine = _gl_sum(lo, hi, n, cfg)
            err = abs(fine - coarse)
            if err <= tol * (hi - lo) / (b - a):
                break
            coarse = fine
        else:
            raise ToleranceNotMet(f"quadrature on [{lo}, {hi}] reached {err:.3e}",
                                  value + fine, error + err)
        value += fine
        error += err
    return value, error


def integrate_Z_sq(a: float, b: float, tol: float = 1e-9, cfg: NumericsConfig = _DEFAULT) -> float:
    """int_a^b Z(t)^2 dt to absolute tolerance ``tol``.

    Raises :class:`ToleranceNotMet` carrying the best estimate if the
    step-halving error estimate stays above ``tol``.
    """
    return integrate_Z_sq_with_error(a, b, tol, cfg)[0]


def hl_rhs(x, k: HLConstants = HLConstants()):
    """x ln x + (c - ln 2 pi) x + c0, the ladder representation of I."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 1):
        raise DomainError("hl_rhs requires x >= 1")
    out = x * np.log(x) + (k.c - k.ln2pi) * x + k.c0
    return out if out.ndim else float(out)


def hl_rhs_prime(x, k: HLConstants = HLConstants()):
    x = np.asarray(x, dtype=float)
    out = np.log(x) + 1.0 + k.c - k.ln2pi
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# Checkpoint table
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:.17e}"


def config_fingerprint(cfg: NumericsConfig) -> str:
    e, q = cfg.eval, cfg.quad
    return (f"rs{e.rs_correction_terms}-ts{e.t_switch:g}-h{q.h_max:g}-c{q.chunk:g}"
            f"-gl{q.gl_order}-tol{q.table_tol:g}")


class IntegralCheckpointTable:
    """I(t) at t = 0, chunk, 2*chunk, ...

    Extension is serialized by an internal lock; readers always see a
    consistent prefix.  Values depend only on the grid and config, so a
    warm table and a cold one give bit-identical results.
    """

    def __init__(self, cfg: NumericsConfig = _DEFAULT, path=None):
        self.cfg = cfg
        self.spacing = cfg.quad.chunk
        self.tol = cfg.quad.table_tol
        self.path = Path(path) if path is not None else None
        self._t = [0.0]
        self._I = [0.0]
        self._err = [0.0]
        self._lock = threading.RLock()
        self.integrated_span = 0.0
        if self.path is not None and self.path.exists():
            self._load(self.path)

    def __len__(self):
        return len(self._t)

    @property
    def last_t(self) -> float:
        return self._t[-1]

    def entries(self):
        n = len(self._t)
        return list(zip(self._t[:n], self._I[:n], self._err[:n]))

    def extend_to(self, T: float):
        """Grow the table until its last grid point is >= ``T``."""
        if T <= self._t[-1]:
            return
        with self._lock:
            chunk_tol = self.tol * 1e-3
            while self._t[-1] < T:
                a = self._t[-1]
                b = (len(self._t)) * self.spacing
                val, err = integrate_Z_sq_with_error(a, b, chunk_tol, self.cfg)
                acc = self._err[-1] + err
                if acc > self.tol:
                    raise ToleranceNotMet(f"accumulated table error {acc:.3e} exceeds {self.tol:g}",
                                          self._I[-1] + val, acc)
                self._I.append(self._I[-1] + val)
                self._err.append(acc)
                self._t.append(b)
                self.integrated_span += b - a

    def base(self, T: float):
        """Largest grid point <= T and I there."""
        j = int(math.floor(T / self.spacing))
        self.extend_to(j * self.spacing)
        return self._t[j], self._I[j]

    def save(self, path=None):
        """Write ``t<TAB>I<TAB>tol`` lines after a ``#`` header."""
        path = Path(path or self.path)
        rows = self.entries()
        lines = [f"# zetaladder checkpoint spacing={self.spacing!r} tol={self.tol!r} "
                 f"config={config_fingerprint(self.cfg)}"]
        lines += [f"{_fmt(t)}\t{_fmt(i)}\t{_fmt(e)}" for t, i, e in rows]
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text("\n".join(lines) + "\n")
        os.replace(tmp, path)

    def _load(self, path: Path):
        ts, Is, es = [], [], []
        header = None
        for lineno, line in enumerate(path.read_text().splitlines(), 1):
            if not line.strip():
                continue
            if line.startswith("#"):
                header = header or line
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise TableCorruption(f"{path}:{lineno}: expected 3 tab-separated fields")
            t, i, e = (float(p) for p in parts)
            ts.append(t)
            Is.append(i)
            es.append(e)
        if header is not None and "config=" in header:
            fp = header.split("config=", 1)[1].split()[0]
            if fp != config_fingerprint(self.cfg):
                raise TableCorruption(f"{path}: built with config {fp}, "
                                      f"need {config_fingerprint(self.cfg)}")
        self._validate(ts, Is, es, path)
        with self._lock:
            self._t, self._I, self._err = ts, Is, es

    def _validate(self, ts, Is, es, where):
        if not ts or ts[0] != 0.0 or Is[0] != 0.0:
            raise TableCorruption(f"{where}: table must start at (0, 0)")
        for j in range(1, len(ts)):
            if not ts[j] > ts[j - 1]:
                raise TableCorruption(f"{where}: t not strictly increasing at row {j}")
            if Is[j] < Is[j - 1]:
                raise TableCorruption(f"{where}: I decreasing at row {j}")
            if abs(ts[j] - j * self.spacing) > 1e-9 * ts[j]:
                raise TableCorruption(f"{where}: row {j} off the checkpoint grid")
        if any(e > self.tol for e in es):
            raise TableCorruption(f"{where}: entry tolerance above declared {self.tol:g}")


def default_table_path(cfg: NumericsConfig = _DEFAULT, directory=None) -> Path:
    """Checkpoint file location; ``$ZETALADDER_CHECKPOINT_DIR`` overrides."""
    directory = directory or os.environ.get(CHECKPOINT_ENV) or Path.home() / ".cache" / "zetaladder"
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    return directory / f"hl-{config_fingerprint(cfg)}.tsv"


def hl_I(T: float, table: IntegralCheckpointTable) -> float:
    """I(T), extending ``table`` as needed; only the tail past the last
    grid point below ``T`` is integrated afresh."""
    if T < 0:
        raise DomainError("hl_I requires T >= 0")
    t0, I0 = table.base(T)
    if T == t0:
        return I0
    return I0 + integrate_Z_sq(t0, T, table.tol * 1e-3, table.cfg)


# ---------------------------------------------------------------------------
# Local Chebyshev antiderivative
# ---------------------------------------------------------------------------

def _clenshaw(coef, x):
    """Evaluate rows of Chebyshev coefficients ``coef[i]`` at ``x[i]``."""
    b1 = np.zeros_like(x)
    b2 = np.zeros_like(x)
    for j in range(coef.shape[1] - 1, 0, -1):
        b1, b2 = 2.0 * x * b1 - b2 + coef[:, j], b1
    return x * b1 - b2 + coef[:, 0]


class LocalIntegral:
    """Vectorized I(t) for t in [a, b] from a Chebyshev model of Z^2.

    Starts at the checkpoint below ``a`` and covers ``[a, b]`` with panels
    no wider than :func:`step_size`.
    """

    def __init__(self, a: float, b: float, table: IntegralCheckpointTable):
        cfg = table.cfg
        self.cfg = cfg
        t0, I0 = table.base(a)
        self.a, self.b = a, b
        h = float(step_size(b, cfg.quad.h_max))
        n = max(1, math.ceil((b - t0) / h))
        edges = t0 + (b - t0) * np.arange(n + 1) / n
        inner = _breakpoints(t0, b, cfg)[1:-1]
        if inner:
            edges = np.union1d(edges, inner)
        self.edges = edges
        left, right = edges[:-1], edges[1:]
        self._mid = 0.5 * (left + right)
        self._half = 0.5 * (right - left)
        deg = cfg.quad.cheb_degree
        k = np.arange(deg + 1)
        x = np.cos(math.pi * (k + 0.5) / (deg + 1))
        nodes = self._mid[:, None] + self._half[:, None] * x[None, :]
        vals = zeta_mod_sq(nodes.ravel(), cfg.eval).reshape(nodes.shape)
        basis = np.cos(np.outer(k, math.pi * (k + 0.5) / (deg + 1)))
        coef = vals @ basis.T * (2.0 / (deg + 1))
        coef[:, 0] *= 0.5
        self._coef = coef
        anti = np.polynomial.chebyshev.chebint(coef, lbnd=-1, axis=1)
        self._anti = anti * self._half[:, None]
        panel = _clenshaw(self._anti, np.ones(len(left)))
        self._start = I0 + np.concatenate([[0.0], np.cumsum(panel)[:-1]])
        self.I_end = float(self._start[-1] + panel[-1])

    def _locate(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < self.edges[0] - 1e-9) or np.any(t > self.edges[-1] + 1e-9):
            raise DomainError(f"t outside local range [{self.edges[0]}, {self.edges[-1]}]")
        idx = np.clip(np.searchsorted(self.edges, t, side="right") - 1, 0, len(self._mid) - 1)
        x = (t - self._mid[idx]) / self._half[idx]
        return idx, np.clip(x, -1.0, 1.0)

    def __call__(self, t):
        """I(t)."""
        arr = np.atleast_1d(np.asarray(t, dtype=float))
        idx, x = self._locate(arr)
        out = self._start[idx] + _clenshaw(self._anti[idx], x)
        return float(out[0]) if np.ndim(t) == 0 else out

    def integrand(self, t):
        """The Chebyshev model of Z(t)^2."""
        arr = np.atleast_1d(np.asarray(t, dtype=float))
        idx, x = self._locate(arr)
        out = _clenshaw(self._coef[idx], x)
        return float(out[0]) if np.ndim(t) == 0 else out

    def solve(self, target: float) -> float:
        """t in the covered range with I(t) = ``target``."""
        from scipy.optimize import brentq

        ends = np.append(self._start, self.I_end)
        j = int(np.searchsorted(ends, target, side="right") - 1)
        if j < 0 or j >= len(self._mid):
            raise DomainError("target outside the local integral range")
        lo, hi = self.edges[j], self.edges[j + 1]
        f = lambda t: self(t) - target  # noqa: E731
        flo, fhi = f(lo), f(hi)
        if flo >= 0:
            return float(lo)
        if fhi <= 0:
            return float(hi)
        return brentq(f, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=200)
