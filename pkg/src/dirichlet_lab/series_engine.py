"""Per-vector series weights, shell and dyadic partial sums, and a
convergence/divergence verdict for the weighted criterion series.

The weight of a nonzero integer vector u is

    gamma(u) = min_j f(x_j) * x_j**((1-m)n) * t(u)**((n-j+1) beta_j - B_j),

with x_j = t(u)**(-beta_j) / |u| and B_j = beta_j + ... + beta_n. The
series of interest is sum over u of gamma(u) |u|**n; shells of constant
sup norm are summed in ascending order with a fixed within-shell order
so partial totals are reproducible bit for bit.

A finite computation cannot decide convergence. The verdict fits the
tail exponent of the shell sums over the top two dyadic blocks and
reports "undetermined" inside a +-0.1 margin around the critical
exponent -1; that honesty is part of the contract.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core_model import (
    POWER,
    POWER_LOG,
    ApproxFunction,
    DimensionFunction,
    IntegerVector,
    WeightVector,
    _visibility,
    abs_patterns,
    f_bracket,
    f_eval,
    f_preceq,
    prec_f,
    psi_eval,
    psi_eval_extended,
)
from .errors import BracketError, DomainError

VERDICT_MARGIN = 0.1

CONVERGES = "converges"
DIVERGES = "diverges"
UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class SeriesParams:
    """Validated bundle (psi, alpha, beta, f) for the series operations."""

    psi: ApproxFunction
    alpha: WeightVector
    beta: WeightVector
    f: DimensionFunction

    def __post_init__(self) -> None:
        if self.alpha.side != "alpha" or self.beta.side != "beta":
            raise DomainError("weight vectors must carry their proper sides")
        if self.f.ambient != self.m * self.n:
            raise DomainError(
                f"dimension function ambient {self.f.ambient} != m*n = {self.m * self.n}"
            )
        f_bracket(self.f, self.m, self.n)  # validates n >= 2 and the bracket

    @property
    def m(self) -> int:
        return self.alpha.dim

    @property
    def n(self) -> int:
        return self.beta.dim


@dataclass(frozen=True)
class GammaTerm:
    u: IntegerVector
    t_u: float
    gamma: float
    argmin_j: int  # 1-based direction attaining the min
    t_clamped: bool
    lower_bound_ok: bool  # gamma > prod_j t**(-beta_j)/|u| = 1/(t |u|**n)


def gamma_u(psi: ApproxFunction, alpha: WeightVector, beta: WeightVector,
            f: DimensionFunction, u: IntegerVector) -> GammaTerm:
    """Series weight of a single integer vector."""
    m, n = alpha.dim, beta.dim
    if u.dim != m:
        raise DomainError("integer vector dimension must match alpha")
    f_bracket(f, m, n)
    t, clamped = _visibility(psi, alpha, [abs(e) for e in u.entries])
    norm = float(u.sup_norm)
    tail = [0.0] * n  # B_j = sum_{l >= j} beta_l
    acc = 0.0
    for j in range(n - 1, -1, -1):
        acc += beta[j]
        tail[j] = acc
    best = math.inf
    best_j = 1
    for j in range(1, n + 1):
        bj = beta[j - 1]
        x_j = t ** (-bj) / norm
        value = (
            f_eval(f, x_j)
            * x_j ** ((1 - m) * n)
            * t ** ((n - j + 1) * bj - tail[j - 1])
        )
        if value < best:
            best = value
            best_j = j
    lb = 1.0 / (t * norm ** n)
    return GammaTerm(u, t, best, best_j, clamped, best > lb)


def _patterns_array(m: int, r: int) -> tuple[np.ndarray, np.ndarray]:
    """Absolute-value patterns with max exactly r, lexicographic, with
    sign multiplicities."""
    if m == 1:
        return np.array([[r]], dtype=np.int64), np.array([2], dtype=np.int64)
    if m == 2:
        a = np.arange(0, r, dtype=np.int64)
        block1 = np.column_stack([a, np.full(r, r, dtype=np.int64)])
        b = np.arange(0, r + 1, dtype=np.int64)
        block2 = np.column_stack([np.full(r + 1, r, dtype=np.int64), b])
        pats = np.concatenate([block1, block2])
    else:
        pats = np.array([p for p, _ in abs_patterns(m, r)], dtype=np.int64)
    mult = 2 ** np.count_nonzero(pats, axis=1)
    return pats, mult.astype(np.int64)


def _log_f(f: DimensionFunction, log_x: np.ndarray) -> np.ndarray:
    if f.family == POWER or f.tau == 0.0:
        return f.s * log_x
    cut = f.r_cut
    log_cut = math.log(cut)
    below = log_x <= log_cut
    out = np.empty_like(log_x)
    out[below] = f.s * log_x[below] + f.tau * np.log(-log_x[below])
    top = f.s * log_cut + f.tau * math.log(-log_cut)
    out[~below] = top + f.s * (log_x[~below] - log_cut)
    return out


@dataclass(frozen=True)
class ShellGammas:
    """Vectorized weights over one shell's absolute-value patterns."""

    r: int
    patterns: np.ndarray        # (N, m) int64, lexicographic
    multiplicity: np.ndarray    # (N,) sign choices per pattern
    gamma: np.ndarray           # (N,)
    log_gamma: np.ndarray       # (N,)
    log_t: np.ndarray           # (N,)
    clamped: np.ndarray         # (N,) bool
    argmin_j: np.ndarray        # (N,) 1-based
    lower_bound_ok: np.ndarray  # (N,) bool


def shell_gammas(params: SeriesParams, r: int) -> ShellGammas:
    """Weights over one shell, computed in log space on pattern arrays.

    Requires the power approximating family; callers fall back to the
    scalar path otherwise.
    """
    psi, alpha, beta, f = params.psi, params.alpha, params.beta, params.f
    if psi.family != POWER:
        raise DomainError("vectorized shell path requires the power family")
    m, n = params.m, params.n
    pats, mult = _patterns_array(m, r)
    inv_alpha = np.array([1.0 / a for a in alpha.weights])
    with np.errstate(divide="ignore"):
        logs = np.where(pats > 0, np.log(pats.astype(np.float64)), -np.inf)
    log_m = np.max(logs * inv_alpha, axis=1)
    log_t = (math.log(psi.c) + log_m) / psi.sigma
    floor = math.log(psi.t0)
    clamped = log_t < floor
    log_t = np.maximum(log_t, floor)

    log_norm = math.log(r)
    tail = np.cumsum(np.array(beta.weights)[::-1])[::-1]
    best = np.full(len(pats), np.inf)
    best_j = np.ones(len(pats), dtype=np.int64)
    for j in range(1, n + 1):
        bj = beta[j - 1]
        log_x = -bj * log_t - log_norm
        log_val = (
            _log_f(f, log_x)
            + (1 - m) * n * log_x
            + ((n - j + 1) * bj - tail[j - 1]) * log_t
        )
        better = log_val < best
        best = np.where(better, log_val, best)
        best_j = np.where(better, j, best_j)
    lb_ok = best > -(log_t + n * log_norm)
    return ShellGammas(r, pats, mult, np.exp(best), best, log_t, clamped, best_j, lb_ok)


def shell_sum(r: int, params: SeriesParams) -> float:
    """Sum of gamma(u) * r**n over the sup-norm-r shell."""
    if r < 1:
        raise DomainError("shell radius must be >= 1")
    rn = float(r) ** params.n
    if params.psi.family == POWER:
        sg = shell_gammas(params, r)
        return float(np.sum(sg.multiplicity * sg.gamma) * rn)
    total = 0.0
    for pat, mult in abs_patterns(params.m, r):
        term = gamma_u(params.psi, params.alpha, params.beta, params.f,
                       IntegerVector(pat))
        total += mult * term.gamma
    return total * rn


@dataclass(frozen=True)
class SeriesReport:
    shell_sums: dict[int, float]
    dyadic_sums: dict[int, float]
    partial_total: float
    tail_exponent_fit: float
    verdict: str


def series_verdict(params: SeriesParams, r_max: int) -> SeriesReport:
    """Fit the tail exponent of the shell sums and classify the series.

    The fit runs over the top two dyadic blocks of radii; the verdict is
    "converges" when the exponent sits below -1 - margin, "diverges"
    above -1 + margin, "undetermined" in between.
    """
    if r_max < 256:
        raise DomainError("series verdict requires r_max >= 256")
    shells: dict[int, float] = {}
    for r in range(1, r_max + 1):
        shells[r] = shell_sum(r, params)
    top = r_max.bit_length() - 1  # floor(log2 r_max)
    if top + 1 < 4:
        raise DomainError("insufficient data: fewer than 4 dyadic blocks")
    dyadic: dict[int, float] = {}
    for ell in range(0, top + 1):
        lo, hi = 2 ** ell, min(2 ** (ell + 1) - 1, r_max)
        dyadic[ell] = math.fsum(shells[r] for r in range(lo, hi + 1))
    fit_rs = [r for r in range(2 ** (top - 1), r_max + 1)]
    xs = np.log(np.array(fit_rs, dtype=np.float64))
    ys = np.log(np.array([shells[r] for r in fit_rs]))
    slope, _ = np.polyfit(xs, ys, 1)
    slope = float(slope)
    if slope < -1.0 - VERDICT_MARGIN:
        verdict = CONVERGES
    elif slope > -1.0 + VERDICT_MARGIN:
        verdict = DIVERGES
    else:
        verdict = UNDETERMINED
    total = math.fsum(shells[r] for r in range(1, r_max + 1))
    return SeriesReport(shells, dyadic, total, slope, verdict)


def dyadic_spread(report: SeriesReport) -> float:
    """Largest max/min ratio of shell sums inside one dyadic block."""
    worst = 1.0
    rs = sorted(report.shell_sums)
    for ell in range(rs[-1].bit_length()):
        block = [report.shell_sums[r] for r in rs if 2 ** ell <= r < 2 ** (ell + 1)]
        if len(block) >= 2:
            worst = max(worst, max(block) / min(block))
    return worst


def lower_bound_onset(params: SeriesParams, r_max: int) -> int | None:
    """First shell radius at which every vector satisfies the crude
    product lower bound gamma(u) > prod_j t**(-beta_j)/|u|."""
    for r in range(1, r_max + 1):
        if params.psi.family == POWER:
            if bool(np.all(shell_gammas(params, r).lower_bound_ok)):
                return r
        else:
            ok = True
            for pat, _ in abs_patterns(params.m, r):
                term = gamma_u(params.psi, params.alpha, params.beta, params.f,
                               IntegerVector(pat))
                if not term.lower_bound_ok:
                    ok = False
                    break
            if ok:
                return r
    return None


def khintchine_groshev_partial(psi: ApproxFunction, m: int, n: int, Q: int) -> float:
    """Partial sum of q**(n-1) psi(q)**m up to Q.

    psi is evaluated by its parametric formula on the natural domain;
    terms where the formula is undefined (the log factor at q = 1) are
    skipped.
    """
    if Q < 1:
        raise DomainError("Q must be >= 1")
    terms = []
    for q in range(1, Q + 1):
        if psi.family == POWER_LOG and q <= 1:
            continue
        terms.append(q ** (n - 1) * psi_eval_extended(psi, float(q)) ** m)
    return math.fsum(terms)


def jarnik_partial(psi: ApproxFunction, f: DimensionFunction, m: int, n: int,
                   Q: int) -> float:
    """Partial sum of f(psi(q)/q) (psi(q)/q)**(m(1-n)) q**(m+n-1) up to Q."""
    if Q < 1:
        raise DomainError("Q must be >= 1")
    if not prec_f(float(m * (n - 1)), f):
        raise BracketError(
            f"bracket violation: r**{m * (n - 1)} must strictly precede f"
        )
    if not f_preceq(f, float(m * n)):
        raise BracketError(f"bracket violation: f preceq r**{m * n} fails")
    terms = []
    for q in range(1, Q + 1):
        if psi.family == POWER_LOG and q <= 1:
            continue
        ratio = psi_eval_extended(psi, float(q)) / q
        terms.append(f_eval(f, ratio) * ratio ** (m * (1 - n)) * q ** (m + n - 1))
    return math.fsum(terms)
