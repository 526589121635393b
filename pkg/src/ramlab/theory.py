"""Closed-form mixing predictions and bounds for d-regular graphs.

Houses the cutoff location t_star = (d/(d-2)) log_{d-1} n with its Gaussian
profile, the L^p cutoff locations via the relative-entropy optimization, the
tree-based L^p lower bounds, diameter bounds, and the bipartite/weakly
adjusted times.

Logarithm conventions: spectral formulas use natural logs; the log n inside
the additive 3 log_{d-1} log n window terms is base 10, which pins the
threshold time at 9 for (n, d) = (12180, 6).
"""

import math
from dataclasses import dataclass

from . import walk_engine
from .errors import AlphaDegenerate, LambdaOutOfRange, POutOfRange

_CEIL_SLACK = 1e-9


def _iceil(x: float) -> int:
    """Ceiling with a tiny slack absorbing float representation error."""
    return math.ceil(x - _CEIL_SLACK)


def _log_base(x: float, base: float) -> float:
    return math.log(x) / math.log(base)


@dataclass(frozen=True)
class CutoffPrediction:
    """Total-variation cutoff location, window, and profile constants."""

    n: int
    d: int
    t_star: float
    window: float
    c_d: float
    rho: float


def cutoff_prediction(n: int, d: int) -> CutoffPrediction:
    if d < 3 or n < 2:
        raise ValueError(f"need d >= 3 and n >= 2, got d={d}, n={n}")
    log_n = _log_base(n, d - 1)
    return CutoffPrediction(
        n=n,
        d=d,
        t_star=d / (d - 2) * log_n,
        window=math.sqrt(log_n),
        c_d=(d - 2) ** 1.5 / (2 * math.sqrt(d * (d - 1))),
        rho=2 * math.sqrt(d - 1) / d,
    )


def profile_value(s: float, d: int) -> float:
    """Gaussian cutoff profile: P(Z > c_d * s) for standard normal Z."""
    c_d = cutoff_prediction(2, d).c_d
    return 0.5 * math.erfc(c_d * s / math.sqrt(2))


def relative_entropy(beta: float, alpha: float, base: float) -> float:
    """H_base(beta || alpha) with the 0 log 0 = 0 convention."""
    if not (0 <= beta <= 1 and 0 <= alpha <= 1):
        raise ValueError("beta and alpha must lie in [0, 1]")
    if base <= 1:
        raise ValueError("base must exceed 1")
    if alpha in (0.0, 1.0):
        if beta != alpha:
            raise AlphaDegenerate(f"alpha={alpha} with beta={beta}")
        return 0.0
    log_b = math.log(base)
    h = 0.0
    if beta > 0:
        h += beta * math.log(beta / alpha)
    if beta < 1:
        h += (1 - beta) * math.log((1 - beta) / (1 - alpha))
    return h / log_b


def _frac(p: float, which: str) -> float:
    """(p-1)/p, p/(p-1) or (p-2)/p with the p = inf limits."""
    if math.isinf(p):
        return 1.0
    if which == "pm1_over_p":
        return (p - 1) / p
    if which == "p_over_pm1":
        return p / (p - 1)
    return (p - 2) / p


@dataclass(frozen=True)
class LpPrediction:
    """L^p cutoff location and the entropy-optimization data behind it."""

    d: int
    p: float
    n: int
    beta_star: float
    c_dp: float
    location: float

    def objective(self, beta: float) -> float:
        """f(beta) = ((p-1)/p)(2 beta - 1) + H_{d-1}(beta || (d-1)/d)."""
        return (_frac(self.p, "pm1_over_p") * (2 * beta - 1)
                + relative_entropy(beta, (self.d - 1) / self.d, self.d - 1))


def lp_prediction(p: float, d: int, n: int) -> LpPrediction:
    """Closed-form minimizer beta*, the constant c_{d,p}, and the cutoff
    location: c_{d,p} log_{d-1} n for p in (1,2], ((p-1)/p) log_{1/rho} n
    for p in [2, inf]."""
    p = float(p)
    if not (p > 1):
        raise POutOfRange(f"p must lie in (1, inf], got {p}")
    if d < 3:
        raise ValueError(f"need d >= 3, got {d}")
    beta_star = max(1.0 / ((d - 1) ** _frac(p, "pm2_over_p") + 1.0), 0.5)
    h = relative_entropy(beta_star, (d - 1) / d, d - 1)
    c_dp = 1.0 / ((2 * beta_star - 1) + _frac(p, "p_over_pm1") * h)
    if p <= 2:
        location = c_dp * _log_base(n, d - 1)
    else:
        rho = 2 * math.sqrt(d - 1) / d
        location = _frac(p, "pm1_over_p") * _log_base(n, 1 / rho)
    return LpPrediction(d=d, p=p, n=n, beta_star=beta_star, c_dp=c_dp,
                        location=location)


def beta_star_grid(p: float, d: int, tol: float = 1e-8) -> float:
    """Brute-force grid minimizer of the L^p entropy objective over
    [1/2, (d-1)/d], refined until the grid spacing drops below tol."""
    pred = lp_prediction(p, d, 2)
    lo, hi = 0.5, (d - 1) / d
    while True:
        m = 2000
        step = (hi - lo) / m
        values = [pred.objective(lo + i * step) for i in range(m + 1)]
        i_best = min(range(m + 1), key=values.__getitem__)
        if step < tol:
            return lo + i_best * step
        lo, hi = (max(0.5, lo + (i_best - 1) * step),
                  min((d - 1) / d, lo + (i_best + 1) * step))


def lp_lower_bound(n: int, d: int, p: float, t: int) -> float:
    """Rigorous tree lower bound on D_p(t): n^((p-1)/p) ||Q^t(root,.)||_p - 1,
    with the tree norm taken from the exact radial DP."""
    if t < 1:
        raise ValueError("t must be >= 1")
    row = walk_engine.tree_distance_row(d, t)
    norm = walk_engine.tree_lp_norm(d, row, p)
    return n ** _frac(p, "pm1_over_p") * norm - 1.0


def srw_lower_profile(n: int, d: int, eps: float, s: float) -> dict:
    """Confinement lower bound: at time t - s*window the TV distance is at
    least 1 - eps - P(Z > c_d s), with t = (d/(d-2)) log_{d-1}(eps*n/d)."""
    if not 0 < eps < 1:
        raise ValueError(f"eps must be in (0,1), got {eps}")
    pred = cutoff_prediction(n, d)
    t = d / (d - 2) * _log_base(eps * n / d, d - 1)
    return {
        "t": t,
        "eval_time": t - s * pred.window,
        "bound": 1 - eps - profile_value(s, d),
    }


def nbrw_tmix_lower(n: int, d: int, eps: float) -> int:
    """Counting lower bound on NBRW t_mix(1 - eps):
    ceil(log_{d-1}(d n)) - ceil(log_{d-1}(1/eps))."""
    if not 0 < eps <= 1:
        raise ValueError(f"eps must be in (0,1], got {eps}")
    return _iceil(_log_base(d * n, d - 1)) - _iceil(_log_base(1 / eps, d - 1))


def diameter_bounds(n: int, d: int, lam: float) -> dict:
    """Diameter upper bounds from the nontrivial spectral radius lam:
    Alon-Milman, Chung, and the Chebyshev-polynomial (CFM) bound."""
    if not 0 < lam < d:
        raise LambdaOutOfRange(f"need 0 < lambda < d, got lambda={lam}, d={d}")
    x = d / lam
    if x < 1 + 1e-12:
        raise LambdaOutOfRange("lambda too close to d; cosh bound degenerates")
    acosh = lambda y: math.log(y + math.sqrt(y * y - 1))  # noqa: E731
    return {
        "alon_milman": 2 * math.sqrt(2 * d / (d - lam)) * math.log2(n),
        "chung": _iceil(_log_base(n - 1, x)),
        "cfm": math.floor(acosh(n - 1) / acosh(x) + _CEIL_SLACK) + 1,
    }


def nbrw_threshold_time(n: int, d: int) -> int:
    """ceil(log_{d-1} n + 3 log_{d-1} log n), the time at which the NBRW
    squared L^2 distance is provably O(1/log n)."""
    return weakly_adjusted_time(n, d, 0.0)


def weakly_adjusted_time(n: int, d: int, delta: float) -> int:
    """ceil((1 + 5 sqrt(delta)) log_{d-1} n + 3 log_{d-1} log n); at
    delta=0 this is the Ramanujan threshold time."""
    if delta < 0:
        raise ValueError("delta must be >= 0")
    main = (1 + 5 * math.sqrt(delta)) * _log_base(n, d - 1)
    window = 3 * _log_base(math.log10(n), d - 1)
    return _iceil(main + window)


def l1_l2_gap(d: float) -> dict:
    """f(d) = ((d-2)/d) log(d-1) - 2 log(d/(2 sqrt(d-1))) > 0 for d > 2, and
    the n-free ratio of the L^2 to L^1 cutoff locations (always > 1)."""
    if d <= 2:
        raise ValueError(f"need d > 2, got {d}")
    rho = 2 * math.sqrt(d - 1) / d
    f = (d - 2) / d * math.log(d - 1) - 2 * math.log(d / (2 * math.sqrt(d - 1)))
    ratio = (d - 2) * math.log(d - 1) / (2 * d * math.log(1 / rho))
    return {"f": f, "location_ratio": ratio}


def predictions_json(n: int, d: int, p: float | None = None,
                     lam: float | None = None, eps: float | None = None,
                     delta: float | None = None) -> dict:
    """All applicable predictions keyed by formula anchor, for export."""
    pred = cutoff_prediction(n, d)
    out = {
        "n": n,
        "d": d,
        "t_star": pred.t_star,
        "window": pred.window,
        "c_d": pred.c_d,
        "rho": pred.rho,
        "l2_location": 0.5 * _log_base(n, 1 / pred.rho),
        "threshold_time": nbrw_threshold_time(n, d),
        "f_gap": l1_l2_gap(d)["f"],
        "location_ratio": l1_l2_gap(d)["location_ratio"],
    }
    if p is not None:
        lp = lp_prediction(p, d, n)
        out["p"] = lp.p
        out["beta_star"] = lp.beta_star
        out["c_dp"] = lp.c_dp
        out["lp_location"] = lp.location
    if lam is not None:
        out["diameter_bounds"] = diameter_bounds(n, d, lam)
    if eps is not None:
        out["nbrw_tmix_lower"] = nbrw_tmix_lower(n, d, eps)
        out["eps"] = eps
    if delta is not None:
        out["weakly_time"] = weakly_adjusted_time(n, d, delta)
        out["delta"] = delta
    return out
