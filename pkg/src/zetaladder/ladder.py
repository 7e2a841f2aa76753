"""Jacob's ladder phi1 and its reverse iterates.

phi1(T) is the root y of V(y) = I(T), with V(y) = y ln y + (c - ln 2 pi) y + c0.
Differentiating gives phi1'(t) = Z(t)^2 / V'(phi1(t)), so with

    omega(t) = ln phi1(t) + 1 + c - ln 2 pi,   Z~^2(t) = Z(t)^2 / omega(t)

the pullback through phi1 is an exact change of variables.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .config import NumericsConfig
from .errors import BracketError, ConvergenceError, DomainError, WindowError
from .hl_integral import IntegralCheckpointTable, LocalIntegral, hl_I, hl_rhs, hl_rhs_prime
from .zeta_eval import zeta_mod_sq

OMEGA_ID = "ln_phi1_plus_1_plus_c_minus_ln2pi"


def admissible_U0(T: float) -> float:
    """Upper bound T / ln(T)^2 on the window length."""
    return T / math.log(T) ** 2


@dataclass(frozen=True)
class LadderChain:
    """Reverse-iterated segments [lower[r], upper[r]], r = 0..k.

    ``residuals[r]`` is the relative defect of phi1 mapping stage r onto
    stage r-1 (zero at r = 0).
    """

    T: float
    U: float
    k: int
    lower: tuple
    upper: tuple
    residuals: tuple

    def segment(self, r: int):
        return self.lower[r], self.upper[r]

    def width(self, r: int) -> float:
        return self.upper[r] - self.lower[r]

    def to_dict(self):
        return {"T": self.T, "U": self.U, "k": self.k, "lower": list(self.lower),
                "upper": list(self.upper), "residuals": list(self.residuals)}


class Ladder:
    """phi1 and friends on top of a shared checkpoint table."""

    def __init__(self, table: IntegralCheckpointTable | None = None,
                 cfg: NumericsConfig | None = None):
        if table is None:
            table = IntegralCheckpointTable(cfg or NumericsConfig())
        self.table = table
        self.cfg = table.cfg
        self.k = self.cfg.constants

    # -- representation -------------------------------------------------

    def V(self, y):
        return hl_rhs(y, self.k)

    def V_prime(self, y):
        return hl_rhs_prime(y, self.k)

    def V_inverse(self, I):
        """Vectorized root of V(y) = I by Newton from the right (V is convex)."""
        I = np.asarray(I, dtype=float)
        y = np.maximum(I, 10.0)
        for _ in range(60):
            step = (self.V(y) - I) / self.V_prime(y)
            y = y - step
            if np.all(np.abs(step) <= 1e-12 * y):
                # quadratic convergence: one more step reaches rounding level
                y = y - (self.V(y) - I) / self.V_prime(y)
                break
        else:
            raise ConvergenceError("V inverse did not converge")
        return y if y.ndim else float(y)

    # -- phi1 -----------------------------------------------------------

    def _check_height(self, T):
        if T < self.cfg.ladder.T0:
            raise DomainError(f"height {T!r} below validity floor T0={self.cfg.ladder.T0}")

    def phi1(self, T: float) -> float:
        """Jacob's ladder at T: root of V(y) = I(T) bracketed in [T/2, T]."""
        self._check_height(T)
        target = hl_I(T, self.table)
        lo, hi = 0.5 * T, T
        f = lambda y: self.V(y) - target  # noqa: E731
        if not f(lo) < 0 < f(hi):
            raise BracketError("phi1 root not bracketed", (lo, hi))
        return brentq(f, lo, hi, xtol=1e-13 * T, rtol=4 * np.finfo(float).eps, maxiter=200)

    def phi1_inverse(self, y: float) -> float:
        """T with phi1(T) = y, bracketed in [y, y + 3(1-c) y / ln y] and
        widened geometrically when needed."""
        self._check_height(y)
        target = self.V(y)
        c = self.k.c
        width = 3.0 * (1.0 - c) * y / math.log(y)
        lo = y
        for _ in range(self.cfg.ladder.max_bracket_expansions + 1):
            hi = lo + width
            local = LocalIntegral(lo, hi, self.table)
            if local(lo) <= target <= local.I_end:
                return local.solve(target)
            width *= 2.0
        raise BracketError("phi1_inverse bracket expansion exhausted", (lo, hi))

    # -- weights --------------------------------------------------------

    def omega(self, t: float) -> float:
        """ln phi1(t) + 1 + c - ln 2 pi."""
        return self.V_prime(self.phi1(t))

    def z_tilde_sq(self, t: float) -> float:
        """Z(t)^2 / omega(t)."""
        return zeta_mod_sq(t, self.cfg.eval) / self.omega(t)

    # -- reverse iteration ----------------------------------------------

    def reverse_iterates(self, T: float, U: float, k: int) -> LadderChain:
        """Lift [T, T+U] k times through phi1^{-1}."""
        self._check_height(T)
        if not 0 < U <= admissible_U0(T):
            raise WindowError(f"U={U!r} outside (0, T/ln^2 T = {admissible_U0(T):.4g}]")
        if not 0 <= k <= self.cfg.ladder.k0:
            raise WindowError(f"depth k={k} outside [0, k0={self.cfg.ladder.k0}]")
        lower, upper, res = [T], [T + U], [0.0]
        for _ in range(k):
            a = self.phi1_inverse(lower[-1])
            b = self.phi1_inverse(upper[-1])
            ra = abs(self.phi1(a) - lower[-1]) / lower[-1]
            rb = abs(self.phi1(b) - upper[-1]) / upper[-1]
            lower.append(a)
            upper.append(b)
            res.append(max(ra, rb))
        return LadderChain(T=T, U=U, k=k, lower=tuple(lower), upper=tuple(upper),
                           residuals=tuple(res))

    def pullback(self, chain: LadderChain, pad: float = 1e-6) -> "Pullback":
        return Pullback(self, chain, pad)


class Pullback:
    """Vectorized phi1 iterates for points of the top segment of a chain.

    ``points(t)`` returns x_0 = t, x_1 = phi1(t), ..., x_k = phi1^k(t),
    each x_r lying in segment k - r.
    """

    def __init__(self, ladder: Ladder, chain: LadderChain, pad: float = 1e-6):
        self.ladder = ladder
        self.chain = chain
        self._local = {}
        for r in range(1, chain.k + 1):
            a, b = chain.segment(r)
            w = max(b - a, 1e-9)
            self._local[r] = LocalIntegral(a - pad * w, b + pad * w, ladder.table)

    def phi1_on(self, r: int, t):
        """phi1 for t in segment r >= 1."""
        return self.ladder.V_inverse(self._local[r](t))

    def points(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        xs = [t]
        for r in range(self.chain.k, 0, -1):
            xs.append(self.phi1_on(r, xs[-1]))
        return xs

    def weight(self, xs):
        """prod_{r<k} Z~^2(x_r), with omega(x_r) = V'(x_{r+1})."""
        ev = self.ladder.cfg.eval
        out = np.ones_like(xs[0])
        for r in range(self.chain.k):
            out = out * zeta_mod_sq(xs[r], ev) / self.ladder.V_prime(xs[r + 1])
        return out
