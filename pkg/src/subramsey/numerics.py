"""Parameter system of the size-Ramsey argument, evaluated in log space.

Natural logarithms throughout.  With ``c3 = 6D + 14`` and ``alpha = 1/c3``:

    ln c1 = ln c3 + 6 c3 ln(c3) ln r          (c1 = c3 r^{-6 ln(alpha)/alpha})
    c2    = 4 D^2 ln(c3) r^2 ln^2 r
    delta = sqrt(7 L / (c2 c3)),  L = ln(c1/c3)
    lambda = -alpha / (3 ln alpha)

``c1`` overflows a double for moderate ``r`` and ``D``, so it is only ever
carried as ``ln c1``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

from .bigraph import as_fraction

LN2 = math.log(2.0)


@dataclass(frozen=True)
class RamseyParams:
    r: int
    D: int
    n: int
    c3: int
    c1_log: float
    c2: float

    @property
    def alpha(self) -> float:
        return 1.0 / self.c3

    @property
    def alpha_exact(self) -> Fraction:
        return Fraction(1, self.c3)

    @property
    def L(self) -> float:
        """``ln(c1 / c3)``."""
        return self.c1_log - math.log(self.c3)

    @property
    def lam(self) -> float:
        return lambda_of(self.alpha)

    @property
    def delta(self) -> float:
        L = self.L
        if L < 0:
            return math.nan
        if L == 0:
            return 0.0
        return math.exp(0.5 * (math.log(7.0) + math.log(L) - math.log(self.c2) - math.log(self.c3)))

    @property
    def N_log(self) -> float:
        return self.c1_log + math.log(self.n)

    @property
    def p(self) -> float:
        return self.c2 / self.n

    def to_json(self) -> dict:
        out = asdict(self)
        out.update(alpha=self.alpha, L=self.L, lam=self.lam, delta=self.delta, N_log=self.N_log, p=self.p)
        out["c1_log2"] = self.c1_log / LN2
        out["exponent"] = 6 * self.c3 * math.log(self.c3)
        return out


def lambda_of(alpha) -> float:
    alpha = float(alpha)
    return -alpha / (3.0 * math.log(alpha))


def compute_params(r: int, D: int, n: int = 1) -> RamseyParams:
    if r < 2:
        raise ValueError("r must be at least 2")
    if D < 2:
        raise ValueError("D must be at least 2")
    if n < 1:
        raise ValueError("n must be positive")
    c3 = 6 * D + 14
    ln_c3 = math.log(c3)
    ln_r = math.log(r)
    c1_log = ln_c3 + 6 * c3 * ln_c3 * ln_r
    c2 = 4 * D * D * ln_c3 * r * r * ln_r * ln_r
    return RamseyParams(r, D, n, c3, c1_log, c2)


@dataclass(frozen=True)
class DeltaWindow:
    ok: bool
    upper_ok: bool
    lower_ok: bool
    delta: float
    lower_bound: float
    upper_margin: float
    lower_margin: float
    L: float

    def __bool__(self):
        return self.ok

    def to_json(self):
        return asdict(self)


def check_delta_window(params: RamseyParams) -> DeltaWindow:
    """``3/2 >= delta > sqrt(6 ln(c1 e / c3) / (c2 c3))``.

    With ``delta^2 = 7L/(c2 c3)`` the lower side is ``7L > 6(L + 1)``,
    i.e. ``L > 6``; that reduction is re-checked against the direct
    comparison on every call.
    """
    L = params.L
    delta = params.delta
    scale = math.log(params.c2) + math.log(params.c3)
    if L + 1 > 0:
        lower = math.exp(0.5 * (math.log(6.0) + math.log(L + 1) - scale))
    else:
        lower = math.nan
    lower_ok = bool(delta > lower) if not math.isnan(delta) else False
    upper_ok = bool(delta <= 1.5)
    reduced = 7 * L - 6 * (L + 1)
    if abs(reduced - (L - 6)) > 1e-9 * max(1.0, abs(L)):
        raise AssertionError(f"lower-side reduction drifted: {reduced} vs {L - 6}")
    if not math.isnan(delta) and abs(L - 6) > 1e-9 * max(1.0, abs(L)) and lower_ok != (L > 6):
        raise AssertionError("direct lower-side comparison disagrees with L > 6")
    return DeltaWindow(
        upper_ok and lower_ok, upper_ok, lower_ok, delta, lower, 1.5 - delta, delta - lower, L
    )


def f_minus_one(alpha, lam=None) -> float:
    """``f(alpha) - 1`` without cancellation.

    ``f = (1-a)^{2-lam} + 2 a^{1-lam} - 2 a^{2-lam}``; for the canonical
    ``lam = -a/(3 ln a)`` the identity ``a^{-lam} = e^{a/3}`` is used.
    """
    a = float(alpha)
    if not 0 < a < 1:
        raise ValueError("alpha must lie in (0, 1)")
    canonical = lam is None
    if canonical:
        lam = lambda_of(a)
    first = math.expm1((2 - lam) * math.log1p(-a))
    scale = math.exp(a / 3) if canonical else a ** (-lam)
    return first + 2 * a * (1 - a) * scale


def f_alpha(alpha, lam=None) -> float:
    return 1.0 + f_minus_one(alpha, lam)


def taylor_gap(alpha) -> float:
    """``|f(a) - (1 - a^2/3 - a^2/(3 ln a))|``."""
    a = float(alpha)
    if not 0 < a <= 1 / 26:
        raise ValueError("alpha must lie in (0, 1/26]")
    approx = -(a * a) / 3 - (a * a) / (3 * math.log(a))
    return abs(f_minus_one(a) - approx)


def _ratio(n, N_prime, params: RamseyParams) -> Fraction:
    """``n / (alpha N')`` exactly."""
    return Fraction(n) * params.c3 / as_fraction(N_prime)


def _log_fraction(q: Fraction) -> float:
    return math.log(q.numerator) - math.log(q.denominator)


def induction_bracket(n, N_prime, params: RamseyParams) -> float:
    """``1 - (n/(alpha N'))^lambda``; exactly 0 at ``N' = n/alpha``."""
    q = _ratio(n, N_prime, params)
    if q == 1:
        return 0.0
    return -math.expm1(params.lam * _log_fraction(q))


def induction_rhs(n, N_prime, params: RamseyParams) -> float:
    """``(1-delta)(1-(n/(alpha N'))^lambda) p N'^2``; negative when ``N' < n/alpha``."""
    if N_prime < 1:
        raise ValueError("N' must be at least 1")
    bracket = induction_bracket(n, N_prime, params)
    if bracket == 0:
        return 0.0
    Np = float(as_fraction(N_prime))
    return (1 - params.delta) * bracket * (params.c2 / n) * Np * Np


def induction_rhs_log(n, N_prime_log: float, params: RamseyParams):
    """``(sign, ln|rhs|)`` for ``N'`` given by its natural log."""
    t = params.lam * (math.log(n) + math.log(params.c3) - N_prime_log)
    if t == 0:
        return 0, -math.inf
    bracket = -math.expm1(t)
    sign = (1 if bracket > 0 else -1) * (1 if params.delta < 1 else -1)
    mag = math.log(abs(1 - params.delta)) + math.log(abs(bracket)) + math.log(params.c2 / n) + 2 * N_prime_log
    return sign, mag


@dataclass(frozen=True)
class Contradiction:
    r: int
    n: float
    achieved: float
    lower: float
    upper: float
    limit_upper: float
    achieves_lower: bool
    contradiction: bool
    limit_contradiction: bool

    def to_json(self):
        return asdict(self)


def check_contradiction(params: RamseyParams, n=None) -> Contradiction:
    """Evaluate the closing chain at finite parameters and report each side.

    ``achieved = (1-delta)(1-(n/(alpha N))^lambda)`` at ``N = c1 n``;
    ``lower = (1-1/(r ln r))(1-1/r^2)``; ``upper = (1-1/r)(1+n^{-1/4})``.
    ``n = math.inf`` gives the limiting upper side ``1 - 1/r``.
    """
    r = params.r
    n = params.n if n is None else n
    achieved = (1 - params.delta) * -math.expm1(-params.lam * params.L)
    lower = (1 - 1 / (r * math.log(r))) * (1 - 1 / r**2)
    tail = 0.0 if n == math.inf else float(n) ** -0.25
    upper = (1 - 1 / r) * (1 + tail)
    limit = 1 - 1 / r
    return Contradiction(r, float(n), achieved, lower, upper, limit, achieved >= lower, lower > upper, lower > limit)


def size_bound_log2(r, D, n) -> float:
    """``log2(r^{400 D ln D} n)``."""
    if r < 2 or D < 2:
        raise ValueError("need r >= 2 and D >= 2")
    return 400 * D * math.log(D) * math.log2(r) + math.log2(n)


@dataclass(frozen=True)
class SizeBound:
    edges_log2: float
    bound_log2: float
    margin: float
    ok: bool

    def to_json(self):
        return asdict(self)


def size_bound_check(r, D, n) -> SizeBound:
    """Compare ``log2((1+n^{-1/4}) p N^2)`` with ``size_bound_log2``.

    ``p N^2 = c2 c1^2 n``; ``margin = bound - edges`` (negative means the
    claimed bound is exceeded at these parameters).
    """
    params = compute_params(r, D, 1)
    edges = math.log2(1 + float(n) ** -0.25) + math.log2(params.c2) + 2 * params.c1_log / LN2 + math.log2(n)
    bound = size_bound_log2(r, D, n)
    return SizeBound(edges, bound, bound - edges, edges <= bound)


def verify_numerics(D_values, r_values, n: int = 10**6) -> list[dict]:
    """One row per ``(D, r)``: f, Taylor gap, delta window, contradiction chain, size bound."""
    rows = []
    for D in D_values:
        alpha = 1 / (6 * D + 14)
        fm1 = f_minus_one(alpha)
        gap = taylor_gap(alpha)
        for r in r_values:
            P = compute_params(r, D, n)
            win = check_delta_window(P)
            con = check_contradiction(P)
            sb = size_bound_check(r, D, n)
            rows.append({
                "D": D,
                "r": r,
                "alpha": alpha,
                "lambda": P.lam,
                "f_alpha": 1 + fm1,
                "one_minus_f": -fm1,
                "f_lt_1": fm1 < 0,
                "taylor_gap": gap,
                "gap_bound": 10 * alpha**3,
                "gap_ok": gap <= 10 * alpha**3,
                "c1_log": P.c1_log,
                "c2": P.c2,
                "delta": P.delta,
                "delta_lower": win.lower_bound,
                "delta_window_ok": win.ok,
                "achieved": con.achieved,
                "chain_lower": con.lower,
                "chain_upper": con.upper,
                "contradiction": con.contradiction,
                "edges_log2": sb.edges_log2,
                "size_bound_log2": sb.bound_log2,
                "size_bound_ok": sb.ok,
            })
    return rows
