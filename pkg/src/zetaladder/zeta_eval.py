"""Hardy Z function, Riemann-Siegel theta and |zeta(1/2+it)|^2.

Bulk evaluation uses the Riemann-Siegel formula with up to two correction
terms above ``t_switch`` and a float64 Euler-Maclaurin sum below it.  An
independent arbitrary-precision Euler-Maclaurin oracle is provided for
verification.

All functions are pure; array arguments are evaluated elementwise.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.special import loggamma

from .config import EvalConfig
from .errors import DomainError, PrecisionError

TWO_PI = 2.0 * math.pi

_DEFAULT_EVAL = EvalConfig()


# ---------------------------------------------------------------------------
# Riemann-Siegel theta
# ---------------------------------------------------------------------------

def theta_series(t):
    """Asymptotic series for theta, accurate to ~1e-12 for t >= 50."""
    t = np.asarray(t, dtype=float)
    return (0.5 * t * np.log(t / TWO_PI) - 0.5 * t - math.pi / 8
            + 1.0 / (48.0 * t) + 7.0 / (5760.0 * t ** 3))


def theta_gamma(t):
    """theta(t) = Im log Gamma(1/4 + it/2) - (t/2) log(pi), via scipy."""
    t = np.asarray(t, dtype=float)
    return np.imag(loggamma(0.25 + 0.5j * t)) - 0.5 * t * math.log(math.pi)


def theta_oracle(t, dps: int = 30):
    """High precision theta through mpmath's log-gamma."""
    with mpmath.workdps(dps):
        t = mpmath.mpf(t)
        return mpmath.im(mpmath.loggamma(mpmath.mpf(1) / 4 + 0.5j * t)) - t / 2 * mpmath.log(mpmath.pi)


def rs_theta(t, cfg: EvalConfig = _DEFAULT_EVAL):
    """Riemann-Siegel theta function.

    Uses the asymptotic series for ``t >= cfg.t_switch`` and the
    log-gamma form below.  Raises :class:`DomainError` for ``t <= 0``.
    """
    arr = np.asarray(t, dtype=float)
    if np.any(arr <= 0):
        raise DomainError("rs_theta requires t > 0")
    out = np.where(arr >= cfg.t_switch, theta_series(np.maximum(arr, 1.0)), theta_gamma(arr))
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# Riemann-Siegel correction coefficients
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=1)
def _psi_series():
    """Taylor coefficients of Psi(p) = cos(2pi(p^2-p-1/16))/cos(2pi p) in z = p - 1/2.

    Psi(1/2 + z) = -cos(2 pi z^2 - 5 pi / 8) / cos(2 pi z); the quotient is
    entire, so the series converges on the whole of [0, 1].  Division is
    done in high precision to absorb the cancellation against the secant
    series.
    """
    deg = 90
    with mpmath.workdps(140):
        pi = mpmath.pi
        a = 5 * pi / 8
        num = [mpmath.mpf(0)] * (deg + 1)
        den = [mpmath.mpf(0)] * (deg + 1)
        # -cos(2 pi w - a) = -cos(a) cos(2 pi w) - sin(a) sin(2 pi w), w = z^2
        for j in range(deg // 2 + 1):
            c = (2 * pi) ** j / mpmath.factorial(j)
            if j % 2 == 0:
                term = -mpmath.cos(a) * c * (-1) ** (j // 2)
            else:
                term = -mpmath.sin(a) * c * (-1) ** ((j - 1) // 2)
            num[2 * j] = term
        for j in range(deg // 2 + 1):
            den[2 * j] = (-1) ** j * (2 * pi) ** (2 * j) / mpmath.factorial(2 * j)
        q = [mpmath.mpf(0)] * (deg + 1)
        for n in range(deg + 1):
            acc = num[n]
            for j in range(1, n + 1):
                if den[j]:
                    acc -= den[j] * q[n - j]
            q[n] = acc / den[0]
        coeffs = np.array([float(c) for c in q])
    keep = np.nonzero(np.abs(coeffs) * 0.5 ** np.arange(deg + 1) > 1e-22)[0]
    return coeffs[: keep[-1] + 1]


@functools.lru_cache(maxsize=1)
def _rs_polys():
    """Polynomials (in z = p - 1/2) for C0, C1, C2."""
    psi = np.polynomial.Polynomial(_psi_series())
    d2, d3, d4 = psi.deriv(2), psi.deriv(3), psi.deriv(4)
    pi2 = math.pi ** 2
    c0 = psi
    c1 = -d3 / (96.0 * pi2)
    c2 = d2 / (64.0 * pi2) + d4 / (18432.0 * pi2 * pi2)
    return c0, c1, c2


def rs_coefficients(p):
    """Return (C0, C1, C2) at fractional parts ``p`` in [0, 1]."""
    z = np.asarray(p, dtype=float) - 0.5
    return tuple(poly(z) for poly in _rs_polys())


@functools.lru_cache(maxsize=1)
def _rs_coefficient_bounds():
    grid = np.linspace(0.0, 1.0, 4001)
    return tuple(float(np.max(np.abs(c))) * 1.01 for c in rs_coefficients(grid))


def _rs_main_sum(t, theta):
    """2 * sum_{n <= tau(t)} cos(theta - t ln n) / sqrt(n), row-chunked."""
    N = np.floor(np.sqrt(t / TWO_PI)).astype(int)
    out = np.empty_like(t)
    nmax = int(N.max()) if N.size else 0
    n = np.arange(1, nmax + 1, dtype=float)
    logn = np.log(n)
    amp = 1.0 / np.sqrt(n)
    rows = max(1, 2_000_000 // max(nmax, 1))
    for lo in range(0, t.size, rows):
        sl = slice(lo, lo + rows)
        ph = theta[sl, None] - t[sl, None] * logn[None, :]
        terms = np.cos(ph) * amp[None, :]
        terms[n[None, :] > N[sl, None]] = 0.0
        out[sl] = 2.0 * terms.sum(axis=1)
    return out, N


def _rs_Z(t, m):
    theta = theta_series(t)
    main, N = _rs_main_sum(t, theta)
    if m == 0:
        return main
    a = t / TWO_PI
    p = np.sqrt(a) - N
    sign = np.where(N % 2 == 1, 1.0, -1.0)
    c0, c1, _ = rs_coefficients(p)
    corr = c0
    if m >= 2:
        corr = corr + c1 / np.sqrt(a)
    return main + sign * a ** -0.25 * corr


# ---------------------------------------------------------------------------
# Euler-Maclaurin, float64
# ---------------------------------------------------------------------------

_EM_TERMS = 30


@functools.lru_cache(maxsize=1)
def _bernoulli_ratios():
    return np.array([float(mpmath.bernoulli(2 * k) / mpmath.factorial(2 * k))
                     for k in range(1, _EM_TERMS + 1)])


def _em_cut(t):
    return (np.abs(t) / math.pi).astype(int) // 16 * 16 + 48


def em_zeta(t):
    """zeta(1/2 + it) by Euler-Maclaurin summation in complex128.

    Accurate to ~1e-12 for |t| <= 1e4; vectorized over ``t``.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty(t.shape, dtype=complex)
    cuts = _em_cut(t)
    b = _bernoulli_ratios()
    for N in np.unique(cuts):
        sel = cuts == N
        s = 0.5 + 1j * t[sel]
        n = np.arange(1, N, dtype=float)
        logn = np.log(n)
        head = (np.exp(-np.outer(s, logn))).sum(axis=1)
        lnN = math.log(N)
        NmS = np.exp(-s * lnN)
        total = head + N * NmS / (s - 1.0) + 0.5 * NmS
        P = s * NmS / N
        for k in range(1, _EM_TERMS + 1):
            if k > 1:
                P = P * (s + 2 * k - 3) * (s + 2 * k - 2) / (N * N)
            total = total + b[k - 1] * P
        out[sel] = total
    return out


def _em_Z(t):
    theta = theta_gamma(np.maximum(t, 0.0)) if np.all(t >= 0) else theta_gamma(t)
    return np.real(np.exp(1j * theta) * em_zeta(t))


# ---------------------------------------------------------------------------
# Public evaluators
# ---------------------------------------------------------------------------

def hardy_Z(t, cfg: EvalConfig = _DEFAULT_EVAL):
    """Hardy's function Z(t) = exp(i theta(t)) zeta(1/2 + it).

    Riemann-Siegel with ``cfg.rs_correction_terms`` corrections for
    ``t >= cfg.t_switch``; Euler-Maclaurin below.  Requires ``t >= 0``.
    """
    arr = np.asarray(t, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise DomainError("hardy_Z requires finite t >= 0")
    out = np.empty_like(arr)
    hi = arr >= cfg.t_switch
    if np.any(hi):
        out[hi] = _rs_Z(arr[hi], cfg.rs_correction_terms)
    if np.any(~hi):
        out[~hi] = _em_Z(arr[~hi])
    return float(out[0]) if scalar else out.reshape(np.shape(t))


def zeta_mod_sq(t, cfg: EvalConfig = _DEFAULT_EVAL):
    """|zeta(1/2 + it)|^2 as Z(t)^2."""
    z = hardy_Z(t, cfg)
    return z * z


def riemann_siegel_Z(t, m: int = 2):
    """Riemann-Siegel Z with ``m`` correction terms and no low-t switch."""
    arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(arr < TWO_PI):
        raise DomainError("Riemann-Siegel path requires t >= 2 pi")
    out = _rs_Z(arr, m)
    return float(out[0]) if np.ndim(t) == 0 else out


# ---------------------------------------------------------------------------
# Arbitrary precision oracle
# ---------------------------------------------------------------------------

def _em_mp(t, dps):
    with mpmath.workdps(dps + 10):
        t = mpmath.mpf(t)
        s = mpmath.mpc(0.5, t)
        # the tail's smallest term is ~exp(-2 pi N); keep it below 10**-(dps+5)
        N = int(abs(t) / math.pi) + max(20, int(0.4 * dps) + 10)
        head = mpmath.fsum(mpmath.power(n, -s) for n in range(1, N))
        NmS = mpmath.power(N, -s)
        total = head + N * NmS / (s - 1) + NmS / 2
        P = s * NmS / N
        eps = mpmath.mpf(10) ** (-(dps + 5))
        for k in range(1, 400):
            if k > 1:
                P = P * (s + 2 * k - 3) * (s + 2 * k - 2) / (N * N)
            term = mpmath.bernoulli(2 * k) / mpmath.factorial(2 * k) * P
            total += term
            if abs(term) < eps * max(abs(total), 1):
                break
        else:
            raise PrecisionError("Euler-Maclaurin tail did not converge")
        return +total


def em_zeta_oracle(t, precision: int | None = None, escalate: bool = True):
    """zeta(1/2 + it) as an ``mpmath.mpc`` at ``precision`` digits.

    With ``escalate`` the value is recomputed at double precision and a
    :class:`PrecisionError` is raised unless the two agree to
    ``10**(-precision/2)``.
    """
    prec = precision or _DEFAULT_EVAL.oracle_precision
    if not np.isfinite(t):
        raise DomainError("oracle requires finite t")
    z = _em_mp(t, prec)
    if escalate:
        z2 = _em_mp(t, 2 * prec)
        with mpmath.workdps(2 * prec):
            if abs(z2 - z) >= mpmath.mpf(10) ** (-prec / 2):
                raise PrecisionError(f"oracle unstable at t={t!r}")
        z = z2
    with mpmath.workdps(prec):
        return +z


def Z_oracle(t, precision: int | None = None, escalate: bool = False):
    """Hardy Z from the oracle; returns (real value, imaginary residue)."""
    prec = precision or _DEFAULT_EVAL.oracle_precision
    z = em_zeta_oracle(t, prec, escalate=escalate)
    with mpmath.workdps(prec + 10):
        w = mpmath.expj(theta_oracle(t, prec + 10)) * z
        return float(mpmath.re(w)), float(mpmath.im(w))


def calibrate_rs_constant(ts, m: int, precision: int = 25):
    """max |Z_rs - Z_oracle| * t**((2m+1)/4) over the heights ``ts``."""
    ts = np.asarray(ts, dtype=float)
    rs = riemann_siegel_Z(ts, m)
    ref = np.array([Z_oracle(t, precision)[0] for t in ts])
    return float(np.max(np.abs(rs - ref) * ts ** ((2 * m + 1) / 4.0)))


# ---------------------------------------------------------------------------
# Local oscillator spectrum
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OscillatorBank:
    """Riemann oscillators linearized at a base point ``x``.

    ``reconstruct`` evaluates sum_n (2/sqrt n) cos(t w_n + psi) for
    ``t`` in ``[x, x + V]``.
    """

    x: float
    V: float
    tau: float
    psi: float
    n: np.ndarray
    amplitude: np.ndarray
    frequency: np.ndarray
    remainder_bound: float

    def reconstruct(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        ph = t[:, None] * self.frequency[None, :] + self.psi
        return (np.cos(ph) * self.amplitude[None, :]).sum(axis=1)


def local_spectrum(x: float, V: float, cfg: EvalConfig = _DEFAULT_EVAL) -> OscillatorBank:
    """Oscillator bank reproducing Z on ``[x, x + V]``, ``0 < V < x**(1/4)``.

    ``remainder_bound`` is an explicit sup bound on the gap to
    :func:`hardy_Z`: the phase linearization error times the total
    amplitude, plus the Riemann-Siegel correction terms, plus any
    oscillator entering the sum inside the window.
    """
    if x < TWO_PI:
        raise DomainError("local_spectrum requires x >= 2 pi")
    if not 0 < V < x ** 0.25:
        raise DomainError(f"window V={V!r} must lie in (0, x**0.25)")
    tau = math.sqrt(x / TWO_PI)
    N = int(math.floor(tau))
    n = np.arange(1, N + 1, dtype=float)
    amp = 2.0 / np.sqrt(n)
    freq = math.log(tau) - np.log(n)
    psi = -x / 2.0 - math.pi / 8.0

    phase_err = V * V / (4 * x) + 1.0 / (47.0 * x) + V / (48.0 * x * x)
    b0, b1, _ = _rs_coefficient_bounds()
    a = x / TWO_PI
    corr = 0.0
    if cfg.rs_correction_terms >= 1:
        corr += a ** -0.25 * b0
    if cfg.rs_correction_terms >= 2:
        corr += a ** -0.75 * b1
    n_end = int(math.floor(math.sqrt((x + V) / TWO_PI)))
    entering = sum(2.0 / math.sqrt(k) for k in range(N + 1, n_end + 1))
    bound = float(amp.sum() * phase_err + corr + entering)
    return OscillatorBank(x=x, V=V, tau=tau, psi=psi, n=n.astype(int), amplitude=amp,
                          frequency=freq, remainder_bound=bound)
