"""Interaction formulas between oscillating systems.

Each evaluator builds the factorization records it needs, forms the
identity's two sides from the raw zeta products P = prod |zeta(a)/zeta(b)|^2
and reports two residuals:

* ``raw_residual``: the asymptotic form taken at face value.  It differs
  from zero by the factor Omega = prod omega(alpha_r)/omega(beta_r).
* ``corrected_residual``: every P replaced by P / Omega, which turns the
  relation into an identity up to quadrature and root tolerances.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import CoefficientBlowUp, SharedBetaError, WindowError
from .factorizer import Factorizer, FactorizationRecord
from .functions import F1_SIN2, F2_COS2, F3_SEC2, F4_COS, PI, f5
from .zeta_eval import zeta_mod_sq

IDENTITIES = ("trig", "pair_cos", "pair_sin", "triple", "triple_cos", "triple_sin",
              "second_level_pair", "second_level", "power_signal")

PARAM_KEYS = ("L", "U", "mu", "k1", "k2", "k3", "delta")


@dataclass(frozen=True)
class IdentityReport:
    identity: str
    params: dict
    lhs: float
    rhs: float
    raw_residual: float
    corrected_residual: float
    records: tuple = ()
    extras: dict = field(default_factory=dict)

    def param(self, key):
        return self.params.get(key)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["records"] = list(self.records)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "IdentityReport":
        d = dict(d)
        d["records"] = tuple(d.get("records", ()))
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "IdentityReport":
        return cls.from_dict(json.loads(text))

    def to_kv(self) -> str:
        lines = [f"identity = {self.identity}"]
        lines += [f"{k} = {v!r}" for k, v in self.params.items()]
        for key in ("lhs", "rhs", "raw_residual", "corrected_residual"):
            lines.append(f"{key} = {getattr(self, key)!r}")
        lines.append("records = " + ";".join(self.records))
        lines += [f"extras.{k} = {v!r}" for k, v in sorted(self.extras.items())]
        return "\n".join(lines) + "\n"


def _params(**kw):
    return {k: kw.get(k) for k in PARAM_KEYS}


def _P(rec: FactorizationRecord) -> float:
    return rec.product_zeta


def _Pc(rec: FactorizationRecord) -> float:
    return rec.product_zeta / rec.omega_correction


def _check_shared(records, k_by_record):
    """Records of equal depth must carry the same beta (to 1e-8)."""
    by_k = {}
    for rec, k in zip(records, k_by_record):
        by_k.setdefault(k, []).append(rec)
    for k, group in by_k.items():
        b0 = np.array(group[0].beta)
        for rec in group[1:]:
            b = np.array(rec.beta)
            if b.shape != b0.shape or np.max(np.abs(b - b0) / b0) > 1e-8:
                raise SharedBetaError(f"beta mismatch at depth {k}: {group[0].id} vs {rec.id}")


def _pi_window(L, U, mu):
    return PI * L + mu


# -- two systems: sin^2 and cos^2 --------------------------------------

def _pair_records(fz: Factorizer, L, U, mu, k1, k2):
    T = _pi_window(L, U, mu)
    r1 = fz.factorization_check(F1_SIN2, T, U, k1)
    r2 = fz.factorization_check(F2_COS2, T, U, k2)
    _check_shared((r1, r2), (k1, k2))
    return r1, r2


def trig_identity(fz: Factorizer, L: int, U: float, mu: float, k1: int = 1,
                  k2: int = 1) -> IdentityReport:
    """cos^2(a2) P2 + sin^2(a1) P1 ~ 1 on the window [pi L + mu, pi L + mu + U]."""
    r1, r2 = _pair_records(fz, L, U, mu, k1, k2)
    s1 = math.sin(r1.alpha[0]) ** 2
    c2 = math.cos(r2.alpha[0]) ** 2
    lhs = c2 * _P(r2) + s1 * _P(r1)
    corr = c2 * _Pc(r2) + s1 * _Pc(r1)
    return IdentityReport(
        "trig", _params(L=L, U=U, mu=mu, k1=k1, k2=k2), lhs, 1.0, abs(lhs - 1.0),
        abs(corr - 1.0), (r1.id, r2.id),
        {"P1": _P(r1), "P2": _P(r2), "Omega1": r1.omega_correction,
         "Omega2": r2.omega_correction, "sin2_a1": s1, "cos2_a2": c2})


def pairwise_interaction(fz: Factorizer, L: int, U: float, mu: float, k1: int = 1,
                         k2: int = 1, direction: str = "cos") -> IdentityReport:
    """P2 expressed through P1 (``"cos"``) or P1 through P2 (``"sin"``)."""
    r1, r2 = _pair_records(fz, L, U, mu, k1, k2)
    s1 = math.sin(r1.alpha[0]) ** 2
    c2 = math.cos(r2.alpha[0]) ** 2
    if direction == "cos":
        def form(p1, p2):
            return p2, 1.0 / c2 - s1 / c2 * p1
    elif direction == "sin":
        def form(p1, p2):
            return p1, 1.0 / s1 - c2 / s1 * p2
    else:
        raise ValueError(f"direction must be 'cos' or 'sin', got {direction!r}")
    lhs, rhs = form(_P(r1), _P(r2))
    lc, rc = form(_Pc(r1), _Pc(r2))
    return IdentityReport(
        f"pair_{direction}", _params(L=L, U=U, mu=mu, k1=k1, k2=k2), lhs, rhs,
        abs(lhs - rhs), abs(lc - rc), (r1.id, r2.id),
        {"sin2_a1": s1, "cos2_a2": c2})


# -- three systems ------------------------------------------------------

def triple_denominator(U: float, mu: float, eps: float) -> float:
    """cos(2mu+U) cos(mu+U) cos(mu), refusing factors below sin(eps)."""
    factors = (math.cos(2 * mu + U), math.cos(mu + U), math.cos(mu))
    floor = math.sin(eps)
    for name, val in zip(("cos(2mu+U)", "cos(mu+U)", "cos(mu)"), factors):
        if val < floor:
            raise CoefficientBlowUp(f"{name}={val:.3e} below sin(eps)={floor:.3e}")
    return factors[0] * factors[1] * factors[2]


def triple_interaction(fz: Factorizer, L: int, U: float, mu: float, k1: int = 1,
                       k2: int = 1, k3: int = 1, form: str = "triple") -> IdentityReport:
    """P3 against the sin^2/cos^2 pair, or one of the two rearrangements.

    ``form`` is ``"triple"`` (P3 alone on the left), ``"triple_cos"`` (P2)
    or ``"triple_sin"`` (P1).  The extras carry all three residuals and
    the closure defect of the third order diagram.
    """
    if form not in ("triple", "triple_cos", "triple_sin"):
        raise ValueError(f"unknown triple form {form!r}")
    wcfg = fz.cfg.window
    if 2 * mu + U > PI / 2 - wcfg.eps:
        raise WindowError(f"2mu+U={2 * mu + U:.6g} exceeds pi/2-eps")
    D = triple_denominator(U, mu, wcfg.eps)
    r1, r2 = _pair_records(fz, L, U, mu, k1, k2)
    r3 = fz.factorization_check(F3_SEC2, _pi_window(L, U, mu), U, k3)
    _check_shared((r1, r2, r3), (k1, k2, k3))
    s1 = math.sin(r1.alpha[0]) ** 2
    c2 = math.cos(r2.alpha[0]) ** 2
    c3 = math.cos(r3.alpha[0]) ** 2

    def sides(p1, p2, p3):
        return {
            "triple": (p3, c2 * c3 / D * p2 - s1 * c3 / D * p1),
            "triple_cos": (p2, s1 / c2 * p1 + D / (c2 * c3) * p3),
            "triple_sin": (p1, c2 / s1 * p2 - D / (s1 * c3) * p3),
        }

    raw = sides(_P(r1), _P(r2), _P(r3))
    cor = sides(_Pc(r1), _Pc(r2), _Pc(r3))
    res = {key: abs(a - b) for key, (a, b) in raw.items()}
    # each rearrangement is the first scaled by a known factor
    scale = {"triple": 1.0, "triple_cos": D / (c2 * c3), "triple_sin": D / (s1 * c3)}
    closure = max(abs(res[key] / scale[key] - res["triple"]) for key in res)
    lhs, rhs = raw[form]
    lc, rcor = cor[form]
    extras = {"D": D, "sin2_a1": s1, "cos2_a2": c2, "cos2_a3": c3, "closure": closure}
    extras.update({f"raw_{key}": val for key, val in res.items()})
    return IdentityReport(
        form, _params(L=L, U=U, mu=mu, k1=k1, k2=k2, k3=k3), lhs, rhs, res[form],
        abs(lc - rcor), (r1.id, r2.id, r3.id), extras)


# -- second-level elimination ------------------------------------------

def _second_records(fz: Factorizer, L, U, mu, k1, k2):
    T = 2 * PI * L + mu
    fn5 = f5(fz.cfg.factor.f5_variant)
    r4 = fz.factorization_check(F4_COS, T, U, k1)
    r5 = fz.factorization_check(fn5, T, U, k2)
    _check_shared((r4, r5), (k1, k2))
    return fn5, r4, r5


def _ratio_coefficient(fn5, r4, r5):
    """(H5 / f5(a5)) / (H4 / f4(a4)) and the printed tan form."""
    general = (r5.H / float(fn5(r5.alpha[0]))) / (r4.H / math.cos(r4.alpha[0]))
    mu = r4.T - 2 * PI * math.floor(r4.T / (2 * PI))
    printed = math.tan(mu + r4.U / 2) * math.cos(r4.alpha[0]) / math.sin(r5.alpha[0])
    return general, printed


def second_level_pair(fz: Factorizer, L: int, U: float, mu: float, k1: int = 1,
                      k2: int = 1) -> IdentityReport:
    """P5 (depth k2) against the coefficient times P4 (depth k1)."""
    fn5, r4, r5 = _second_records(fz, L, U, mu, k1, k2)
    coef, printed = _ratio_coefficient(fn5, r4, r5)
    lhs, rhs = _P(r5), coef * _P(r4)
    return IdentityReport(
        "second_level_pair", _params(L=L, U=U, mu=mu, k1=k1, k2=k2), lhs, rhs,
        abs(lhs - rhs), abs(_Pc(r5) - coef * _Pc(r4)), (r4.id, r5.id),
        {"f5_variant": fz.cfg.factor.f5_variant, "coefficient": coef,
         "printed_coefficient": printed,
         "printed_residual": abs(lhs - printed * _P(r4))})


def second_level(fz: Factorizer, L: int, U: float, mu: float, k: int = 1) -> IdentityReport:
    """prod |zeta(a5_r)/zeta(a4_r)|^2 after the shared beta products cancel."""
    fn5, r4, r5 = _second_records(fz, L, U, mu, k, k)
    ev = fz.cfg.eval
    a4 = np.array(r4.alpha[1:])
    a5 = np.array(r5.alpha[1:])
    lhs = float(np.prod(zeta_mod_sq(a5, ev) / zeta_mod_sq(a4, ev)))
    beta_ratio = float(np.prod(zeta_mod_sq(np.array(r5.beta), ev))
                       / np.prod(zeta_mod_sq(np.array(r4.beta), ev)))
    # the quotient of the two factorization products must equal lhs
    quotient = _P(r5) / _P(r4)
    omega = r5.omega_correction / r4.omega_correction
    coef, printed = _ratio_coefficient(fn5, r4, r5)
    return IdentityReport(
        "second_level", _params(L=L, U=U, mu=mu, k1=k, k2=k), lhs, coef,
        abs(lhs - coef), abs(lhs / omega - coef), (r4.id, r5.id),
        {"f5_variant": fz.cfg.factor.f5_variant, "beta_cancellation": beta_ratio,
         "quotient_defect": abs(quotient - lhs) / lhs, "Omega": omega,
         "printed_coefficient": printed, "printed_residual": abs(lhs - printed)})


# -- power signals ------------------------------------------------------

def power_ratio(delta: float, L: float, U: float, alpha0: float) -> float:
    """H(L, U; t^delta) / alpha0^delta, evaluated in log space."""
    if delta == 0:
        return 1.0
    x = U / L
    shift = math.log1p((alpha0 - L) / L)
    if delta == -1:
        return math.exp(shift) * L * math.log1p(x) / U
    d1 = delta + 1
    grow = math.expm1(d1 * math.log1p(x))
    # (L^(d+1) / alpha0^d) = L * exp(-d * shift)
    return L / U * math.exp(-delta * shift) * grow / d1


def power_bound(delta: float, L: float, U: float) -> float:
    """(1 + U/L)^|delta| - 1, saturating at inf."""
    x = abs(delta) * math.log1p(U / L)
    return math.expm1(x) if x < 700 else math.inf


def zt_power_signal(delta: float, L: float, U: float, alpha0: float | None = None) -> IdentityReport:
    """Transform of t^delta on [L, L+U].

    With ``alpha0`` unset the ratio is taken at whichever window endpoint
    is farther from 1, so the reported value bounds every admissible
    mean-value abscissa.
    """
    if not 0 < U < 1:
        raise WindowError(f"power signals need 0 < U < 1, got {U!r}")
    if not L > 0:
        raise WindowError("L must be positive")
    bound = power_bound(delta, L, U)
    if alpha0 is None:
        ends = [power_ratio(delta, L, U, L), power_ratio(delta, L, U, L + U)]
        lhs = max(ends, key=lambda v: abs(v - 1.0))
        extras = {"ratio_at_L": ends[0], "ratio_at_L_plus_U": ends[1]}
    else:
        if not L <= alpha0 <= L + U:
            raise WindowError("alpha0 outside [L, L+U]")
        lhs = power_ratio(delta, L, U, alpha0)
        extras = {"alpha0": alpha0}
    extras["bound"] = bound
    extras["within_bound"] = abs(lhs - 1.0) <= bound
    res = abs(lhs - 1.0)
    return IdentityReport("power_signal", _params(L=L, U=U, delta=delta), lhs, 1.0, res, res,
                          (), extras)


def evaluate(fz: Factorizer, identity: str, L, U, mu=None, k1=1, k2=1, k3=1, delta=None):
    """Dispatch by identity id."""
    if identity == "trig":
        return trig_identity(fz, L, U, mu, k1, k2)
    if identity in ("pair_cos", "pair_sin"):
        return pairwise_interaction(fz, L, U, mu, k1, k2, identity.split("_")[1])
    if identity in ("triple", "triple_cos", "triple_sin"):
        return triple_interaction(fz, L, U, mu, k1, k2, k3, form=identity)
    if identity == "second_level_pair":
        return second_level_pair(fz, L, U, mu, k1, k2)
    if identity == "second_level":
        return second_level(fz, L, U, mu, k1)
    if identity == "power_signal":
        return zt_power_signal(delta, L, U)
    raise KeyError(f"unknown identity {identity!r}; expected one of {', '.join(IDENTITIES)}")
