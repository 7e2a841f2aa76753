"""Mean-value abscissae and the factorization formulas.

For an admissible ``f`` on [T, T+U] and depth k the weighted integrand

    g_k(t) = f(phi1^k(t)) * prod_{r<k} Z~^2(phi1^r(t))

on the k-th reverse-iterated segment integrates to int_T^{T+U} f.  The
mean-value abscissa d of g_k (and e of the f = 1 case) generates the
vectors alpha_r = phi1^{k-r}(d), beta_r = phi1^{k-r}(e).
"""
from __future__ import annotations

import json
import math
import threading
import warnings
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import brentq

from .config import NumericsConfig, WindowConfig
from .errors import DomainError, NoRootError, ToleranceNotMet, WindowError
from .functions import ONE, AdmissibleFunction
from .ladder import Ladder, LadderChain
from .zeta_eval import hardy_Z, zeta_mod_sq


class ZeroProximityWarning(UserWarning):
    """An abscissa lies within ``zero_warn`` of a zero of Z."""


def mean_value_H(f: AdmissibleFunction, T: float, U: float,
                 wcfg: WindowConfig = WindowConfig()) -> float:
    """(F(T+U) - F(T)) / U after checking the window."""
    f.check_window(T, U, wcfg)
    H = f.increment(T, U) / U
    if not H > 0:
        raise WindowError(f"{f.id}: mean value {H!r} not positive")
    return H


@dataclass(frozen=True)
class AbscissaSet:
    roots: tuple
    representative: float
    policy: str
    mean: float
    segment: tuple


@dataclass(frozen=True)
class FactorizationRecord:
    f_id: str
    T: float
    U: float
    k: int
    d: float
    e: float
    alpha: tuple
    beta: tuple
    H: float
    product_exact: float
    product_zeta: float
    omega_correction: float
    residual_exact: float
    residual_zeta_corrected: float
    d_roots: tuple = ()
    e_roots: tuple = ()
    d_policy: str = "smallest"
    beta_base: float = float("nan")
    f_alpha0: float = float("nan")

    @property
    def id(self) -> str:
        return f"{self.f_id}@T={self.T!r},U={self.U!r},k={self.k}"

    @property
    def target(self) -> float:
        """H / f(alpha_0)."""
        return self.H / self.f_alpha0

    @property
    def raw_ratio(self) -> float:
        """product_zeta / (H / f(alpha_0))."""
        return self.product_zeta / self.target

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("alpha", "beta", "d_roots", "e_roots"):
            d[key] = list(d[key])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "FactorizationRecord":
        d = dict(d)
        for key in ("alpha", "beta", "d_roots", "e_roots"):
            d[key] = tuple(d.get(key, ()))
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_kv(self) -> str:
        """Flat ``key = value`` block; tuples are comma separated."""
        lines = []
        for key, val in self.to_dict().items():
            if isinstance(val, list):
                val = ",".join(repr(float(v)) for v in val)
            else:
                val = repr(val)
            lines.append(f"{key} = {val}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_kv(cls, text: str) -> "FactorizationRecord":
        import ast

        out = {}
        seq = {"alpha", "beta", "d_roots", "e_roots"}
        for line in text.strip().splitlines():
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if key in seq:
                out[key] = tuple(float(v) for v in val.split(",") if v)
            elif val in ("nan", "inf", "-inf"):
                out[key] = float(val)
            else:
                out[key] = ast.literal_eval(val)
        return cls.from_dict(out)


def _gl_panels(func, a, b, n, order=16):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, n + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = mid[:, None] + half[:, None] * x[None, :]
    vals = func(nodes.ravel()).reshape(nodes.shape)
    return float(np.sum((vals @ w) * half))


class Factorizer:
    """Builds the Ĥ vectors and factorization records.

    Chains, pullbacks and the f = 1 abscissae are cached per (T, U, k), so
    beta is shared by every record at the same window and depth.
    """

    def __init__(self, ladder: Ladder | None = None, cfg: NumericsConfig | None = None):
        self.ladder = ladder or Ladder(cfg=cfg)
        self.cfg = self.ladder.cfg
        self._lock = threading.Lock()
        self._chains = {}
        self._pullbacks = {}
        self._e = {}

    # -- cached geometry ------------------------------------------------

    def chain(self, T: float, U: float, k: int) -> LadderChain:
        key = (T, U, k)
        if key not in self._chains:
            ch = self.ladder.reverse_iterates(T, U, k)
            with self._lock:
                self._chains.setdefault(key, ch)
        return self._chains[key]

    def pullback(self, T, U, k):
        key = (T, U, k)
        if key not in self._pullbacks:
            pb = self.ladder.pullback(self.chain(T, U, k))
            with self._lock:
                self._pullbacks.setdefault(key, pb)
        return self._pullbacks[key]

    # -- integrand ------------------------------------------------------

    def weighted_integrand(self, f: AdmissibleFunction, T: float, U: float, k: int):
        """g_k as a vectorized callable on the k-th iterated segment."""
        if k == 0:
            lo, hi = T, T + U

            def g0(t):
                t = np.asarray(t, dtype=float)
                if np.any(t < lo - 1e-9) or np.any(t > hi + 1e-9):
                    raise DomainError("t outside [T, T+U]")
                return f(t)
            return g0
        chain = self.chain(T, U, k)
        pb = self.pullback(T, U, k)
        lo, hi = chain.segment(k)
        tol = 1e-9 * hi

        def g(t):
            arr = np.atleast_1d(np.asarray(t, dtype=float))
            if np.any(arr < lo - tol) or np.any(arr > hi + tol):
                raise DomainError(f"t outside iterated segment [{lo!r}, {hi!r}]")
            xs = pb.points(arr)
            out = f(xs[-1]) * pb.weight(xs)
            return float(out[0]) if np.ndim(t) == 0 else out
        return g

    def integrate_weighted(self, f: AdmissibleFunction, T: float, U: float, k: int,
                           rtol: float | None = None) -> float:
        """int of g_k over the k-th segment, step-halving GL-16."""
        rtol = rtol or self.cfg.factor.cov_rtol
        g = self.weighted_integrand(f, T, U, k)
        lo, hi = (T, T + U) if k == 0 else self.chain(T, U, k).segment(k)
        n = max(4, math.ceil((hi - lo) / 0.05))
        coarse = _gl_panels(g, lo, hi, n)
        for _ in range(6):
            n *= 2
            fine = _gl_panels(g, lo, hi, n)
            if abs(fine - coarse) <= rtol * abs(fine):
                return fine
            coarse = fine
        raise ToleranceNotMet("weighted integral did not converge", fine, abs(fine - coarse))

    # -- abscissae ------------------------------------------------------

    def solve_mean_abscissae(self, f: AdmissibleFunction, T: float, U: float, k: int,
                             policy: str | None = None) -> AbscissaSet:
        """All sign-change roots of g_k - mean on the k-th segment."""
        policy = policy or self.cfg.factor.d_policy
        if not 1 <= k <= self.cfg.ladder.k0:
            raise WindowError(f"depth k={k} outside [1, k0={self.cfg.ladder.k0}]")
        H = mean_value_H(f, T, U, self.cfg.window)
        chain = self.chain(T, U, k)
        lo, hi = chain.segment(k)
        width = hi - lo
        mean = U * H / width
        g = self.weighted_integrand(f, T, U, k)
        spacing = 2 * math.pi / math.log(lo / (2 * math.pi))
        m = max(self.cfg.factor.min_scan_points,
                math.ceil(self.cfg.factor.scan_density * width / spacing))
        grid = np.linspace(lo, hi, m + 1)
        G = g(grid) - mean
        roots = []
        for i in range(m):
            if G[i] == 0:
                roots.append(float(grid[i]))
            elif G[i] * G[i + 1] < 0:
                roots.append(brentq(lambda t: g(t) - mean, grid[i], grid[i + 1],
                                    xtol=1e-13, rtol=4 * np.finfo(float).eps, maxiter=200))
        if G[m] == 0:
            roots.append(float(grid[m]))
        if not roots:
            raise NoRootError(f"no mean-value root for {f.id} on [{lo!r}, {hi!r}]; "
                              "quadrature tolerance inconsistent")
        rep = roots[0] if policy == "smallest" else roots[-1]
        return AbscissaSet(roots=tuple(roots), representative=rep, policy=policy, mean=mean,
                           segment=(lo, hi))

    def e_set(self, T: float, U: float, k: int) -> AbscissaSet:
        key = (T, U, k)
        if key not in self._e:
            es = self.solve_mean_abscissae(ONE, T, U, k, policy="smallest")
            with self._lock:
                self._e.setdefault(key, es)
        return self._e[key]

    def hat_H_operator(self, f: AdmissibleFunction, T: float, U: float, k: int,
                       policy: str | None = None):
        """(alpha_0..alpha_k, beta_1..beta_k) plus the abscissa sets."""
        ds = self.solve_mean_abscissae(f, T, U, k, policy)
        es = self.e_set(T, U, k)
        pb = self.pullback(T, U, k)
        xd = [float(x[0]) for x in pb.points(ds.representative)]
        xe = [float(x[0]) for x in pb.points(es.representative)]
        alpha = tuple(reversed(xd))
        beta_full = tuple(reversed(xe))
        return alpha, beta_full[1:], beta_full[0], ds, es

    def factorization_check(self, f: AdmissibleFunction, T: float, U: float, k: int,
                            policy: str | None = None) -> FactorizationRecord:
        """Complete record with exact and omega-corrected residuals."""
        alpha, beta, beta0, ds, es = self.hat_H_operator(f, T, U, k, policy)
        H = mean_value_H(f, T, U, self.cfg.window)
        lad = self.ladder
        ev = self.cfg.eval
        za = np.array([hardy_Z(a, ev) for a in alpha[1:]])
        zb = np.array([hardy_Z(b, ev) for b in beta])
        if np.min(np.abs(np.concatenate([za, zb]))) < self.cfg.factor.zero_warn:
            warnings.warn(f"{f.id}: abscissa within {self.cfg.factor.zero_warn:g} of a zero",
                          ZeroProximityWarning, stacklevel=2)
        om_a = np.array([lad.omega(a) for a in alpha[1:]])
        om_b = np.array([lad.omega(b) for b in beta])
        prod_exact = float(np.prod((za ** 2 / om_a) / (zb ** 2 / om_b)))
        prod_zeta = float(np.prod(zeta_mod_sq(np.array(alpha[1:]), ev)
                                  / zeta_mod_sq(np.array(beta), ev)))
        omega_corr = float(np.prod(om_a / om_b))
        fa0 = float(f(alpha[0]))
        target = H / fa0
        return FactorizationRecord(
            f_id=f.id, T=T, U=U, k=k, d=ds.representative, e=es.representative,
            alpha=alpha, beta=beta, H=H, product_exact=prod_exact, product_zeta=prod_zeta,
            omega_correction=omega_corr,
            residual_exact=abs(prod_exact - target) / target,
            residual_zeta_corrected=abs(prod_zeta / omega_corr - target) / target,
            d_roots=ds.roots, e_roots=es.roots, d_policy=ds.policy, beta_base=beta0,
            f_alpha0=fa0)
