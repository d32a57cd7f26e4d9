"""The divergence-side construction: ladder indices, width profiles,
coprime hyperplane neighborhoods, radius selection, Monte Carlo measure
estimation and the inner-rectangle content bound.

For each integer vector u at distance ||u.b||_Z > eps_b the geometric
ladder

    L(k) = (w_k)**k * prod_{j>k} w_j,    w_j = c_tilde t(u)**(-beta_j) / |u|,

is non-decreasing in k, and gamma(u) selects the unique bracket index
k(u) with L(k) <= gamma(u) < L(k+1) (right test void at k = n; the
boundary conventions are applied verbatim). The profile widths are

    phi_j(u) = |u| * varpi(u)      for j <= k,
    phi_j(u) = c_tilde t(u)**(-beta_j)  for j > k,

with varpi(u) = (gamma(u) / prod_{j>k} w_j)**(1/k), so that
prod_j phi_j(u) = gamma(u) |u|**n exactly. Inactive vectors (distance
at most eps_b) carry the all-zero profile.

Monte Carlo estimates use counter-based randomness: sample block i of a
run draws from Philox keyed by the seed with counter i * 2**70, so the
result depends only on (seed, samples), never on worker scheduling.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import product as iter_product
from typing import Callable, Sequence

import numpy as np

from .content_engine import Hyperrectangle, rect_content_closed
from .core_model import (
    POWER,
    ApproxFunction,
    DimensionFunction,
    IntegerVector,
    WeightVector,
    _visibility,
    abs_patterns,
    f_eval,
    shell,
)
from .errors import (
    ConstructionError,
    DomainError,
    NoValidKError,
)
from .series_engine import SeriesParams, _log_f, gamma_u, shell_gammas
from .transference_lab import (
    TransferConstants,
    dot,
    nearest_int_dist,
    transfer_constants,
)

MC_BLOCK = 4096
MC_MIN_SAMPLES = 10 ** 4


@dataclass(frozen=True)
class LimsupParams:
    """Series parameters plus the shift b and its transfer constants."""

    series: SeriesParams
    b: tuple[float, ...]
    constants: TransferConstants

    @classmethod
    def build(cls, psi: ApproxFunction, alpha: WeightVector, beta: WeightVector,
              f: DimensionFunction, b) -> "LimsupParams":
        series = SeriesParams(psi, alpha, beta, f)
        bb = tuple(float(x) for x in b)
        if len(bb) != alpha.dim:
            raise DomainError("shift vector must have length m")
        return cls(series, bb, transfer_constants(psi, alpha, beta, bb))

    @property
    def psi(self) -> ApproxFunction:
        return self.series.psi

    @property
    def alpha(self) -> WeightVector:
        return self.series.alpha

    @property
    def beta(self) -> WeightVector:
        return self.series.beta

    @property
    def f(self) -> DimensionFunction:
        return self.series.f

    @property
    def m(self) -> int:
        return self.series.m

    @property
    def n(self) -> int:
        return self.series.n

    @property
    def eps_b(self) -> float:
        return self.constants.eps_b

    @property
    def c_tilde(self) -> float:
        return self.constants.c_tilde


def _ladder_levels(params: LimsupParams, u: IntegerVector) -> tuple[list[float], float, float]:
    """Widths w_j = c_tilde t**(-beta_j)/|u| plus (t, gamma) at u."""
    term = gamma_u(params.psi, params.alpha, params.beta, params.f, u)
    norm = float(u.sup_norm)
    w = [params.c_tilde * term.t_u ** (-bj) / norm for bj in params.beta]
    return w, term.t_u, term.gamma


def k_of_u(u: IntegerVector, params: LimsupParams) -> int:
    """Bracket index of gamma(u) on the geometric ladder.

    Implemented as the largest k with L(k) <= gamma(u), which matches
    the displayed two-sided bracket (left <=, right <) and stays
    well-defined when equal beta entries collapse the ladder.
    """
    w, _, gamma = _ladder_levels(params, u)
    n = params.n
    k = 0
    bottom = math.prod(w)  # L(1) = product of all widths
    level = bottom
    for cand in range(1, n + 1):
        if level <= gamma:
            k = cand
        if cand < n:
            level *= (w[cand] / w[cand - 1]) ** cand  # L(k+1) = L(k) (w_{k+1}/w_k)**k
    if k == 0:
        raise NoValidKError(
            f"gamma(u) = {gamma} falls below the full ladder product {bottom}; "
            "the crude lower bound fails at this u (finitely many such vectors)"
        )
    return k


def varpi_u(u: IntegerVector, params: LimsupParams) -> float:
    """Common width of the first k(u) profile entries, divided by |u|."""
    k = k_of_u(u, params)
    w, _, gamma = _ladder_levels(params, u)
    rest = math.prod(w[k:]) if k < params.n else 1.0
    return (gamma / rest) ** (1.0 / k)


@dataclass(frozen=True)
class PhiProfile:
    u: IntegerVector
    k: int                     # 0 for inactive profiles
    varpi: float
    phi: tuple[float, ...]
    active: bool


def phi_profile(u: IntegerVector, params: LimsupParams) -> PhiProfile:
    """Width profile of u; all-zero when ||u.b||_Z <= eps_b."""
    if nearest_int_dist(dot(u, params.b)) <= params.eps_b:
        return PhiProfile(u, 0, 0.0, tuple(0.0 for _ in range(params.n)), False)
    k = k_of_u(u, params)
    w, t, gamma = _ladder_levels(params, u)
    rest = math.prod(w[k:]) if k < params.n else 1.0
    varpi = (gamma / rest) ** (1.0 / k)
    norm = float(u.sup_norm)
    phi = tuple(
        norm * varpi if j <= k else params.c_tilde * t ** (-params.beta[j - 1])
        for j in range(1, params.n + 1)
    )
    return PhiProfile(u, k, varpi, phi, True)


def delta_membership(x: Sequence[float], u: IntegerVector, v_j: int,
                     delta: float) -> bool:
    """Is x within (normalized) distance delta of the hyperplane
    x.u = v_j?  Membership applies the unnormalized bound delta * |u|.
    """
    if delta <= 0.0:
        raise DomainError("delta must be positive")
    return abs(dot(x, u) - v_j) < delta * u.sup_norm


def _gcd_all(u: IntegerVector) -> int:
    g = 0
    for e in u:
        g = math.gcd(g, abs(e))
    return g


def rprime_membership(A: Sequence[Sequence[float]], u: IntegerVector,
                      deltas: Sequence[float]) -> bool:
    """Does the point A (an m x n matrix in [0,1]^{mn}) lie in the
    coprime neighborhood R'(u, deltas)?

    True when every column satisfies |A_{*,j}.u - v_j| < delta_j for some
    integer v_j with gcd(u_1,...,u_m,v_j) = 1. Deltas below 1/2 make the
    nearest integer the only candidate, so the search is closed form.
    """
    if any(d < 0.0 for d in deltas):
        raise DomainError("deltas must be non-negative")
    if any(d >= 0.5 for d in deltas):
        raise DomainError("deltas must stay below 1/2 (nearest-integer reduction)")
    m = u.dim
    n = len(deltas)
    if len(A) != m or any(len(row) != n for row in A):
        raise DomainError("matrix shape must match u and deltas")
    g = _gcd_all(u)
    for j in range(n):
        y = math.fsum(A[i][j] * ui for i, ui in enumerate(u))
        v = round(y)
        if not abs(y - v) < deltas[j]:
            return False
        if math.gcd(g, abs(int(v))) != 1:
            return False
    return True


def gamma_set(r: int, params: LimsupParams) -> list[IntegerVector]:
    """Antipodally reduced set of shell-r vectors at good distance.

    Keeps u with ||u.b||_Z > eps_b and retains the lexicographically
    larger of each pair {u, -u} (so the first nonzero entry of every
    member is positive).
    """
    out = []
    for u in shell(params.m, r):
        first = next(e for e in u if e != 0)
        if first < 0:
            continue
        if nearest_int_dist(dot(u, params.b)) > params.eps_b:
            out.append(u)
    return out


def totient_sieve(limit: int) -> np.ndarray:
    """Euler totients 0..limit by a multiplicative sieve."""
    if limit < 1:
        raise DomainError("sieve limit must be >= 1")
    phi = np.arange(limit + 1, dtype=np.int64)
    for p in range(2, limit + 1):
        if phi[p] == p:  # p prime
            phi[p::p] -= phi[p::p] // p
    return phi


def totient_density(a: float, limit: int) -> float:
    """Fraction of u <= limit with phi(u)/u >= 1/a.

    Intended for a >= 2 and limit >= 1e3, but smaller arguments are
    accepted (a = 1 isolates u = 1, which only phi(1)/1 = 1 satisfies).
    """
    if a <= 0.0:
        raise DomainError("threshold parameter a must be positive")
    if limit < 1:
        raise DomainError("limit must be >= 1")
    phi = totient_sieve(limit)
    u = np.arange(1, limit + 1, dtype=np.float64)
    good = a * phi[1:].astype(np.float64) >= u
    return float(np.count_nonzero(good)) / limit


# ---------------------------------------------------------------------------
# shell scans


@dataclass(frozen=True)
class ShellStats:
    """Aggregates of one shell's profiles, used by scans and the CLI."""

    r: int
    signed_count: int
    active_count: int
    no_k_count: int
    clamped_count: int
    gamma_full: float          # sum of gamma over the whole shell
    gamma_good: float          # sum over vectors at good distance
    shell_sum: float           # gamma_full * r**n
    max_product_dev: float     # |prod phi / (gamma |u|**n) - 1|, worst active
    chain_ok: bool             # profile widths non-decreasing, strict at k
    sandwich_ok: bool          # w_k <= varpi < w_{k+1}
    phi_max: float             # largest width seen among active profiles
    min_content_ratio: float   # min content(inner rect)/varpi**(mn); nan if none


def _sign_combos(m: int) -> list[tuple[int, ...]]:
    return list(iter_product((1, -1), repeat=m))


def _scan_shell_vectorized(params: LimsupParams, r: int, content: bool) -> ShellStats:
    sp = params.series
    sg = shell_gammas(sp, r)
    n, m = params.n, params.m
    mn = m * n
    pats = sg.patterns
    N = len(pats)
    log_norm = math.log(r)
    log_ct = math.log(params.c_tilde)
    betas = np.array(params.beta.weights)
    # w_log[:, j] = log of c_tilde * t**(-beta_j) / |u|
    w_log = log_ct - np.outer(sg.log_t, betas) - log_norm
    suffix = np.concatenate(
        [np.cumsum(w_log[:, ::-1], axis=1)[:, ::-1], np.zeros((N, 1))], axis=1
    )  # suffix[:, k] = sum_{j >= k+1 (0-based k)} w_log
    ks = np.arange(1, n + 1, dtype=np.float64)
    ladder = ks[None, :] * w_log + suffix[:, 1:]  # log L(k), k = 1..n
    k_arr = np.sum(ladder <= sg.log_gamma[:, None], axis=1).astype(np.int64)
    valid = k_arr >= 1
    no_k = int(np.count_nonzero(~valid))
    k_safe = np.maximum(k_arr, 1)
    rest = np.take_along_axis(suffix, k_safe[:, None], axis=1)[:, 0]
    log_varpi = (sg.log_gamma - rest) / k_safe

    cols = np.arange(1, n + 1)
    log_phi = np.where(
        cols[None, :] <= k_arr[:, None],
        (log_norm + log_varpi)[:, None],
        w_log + log_norm,
    )
    prod_dev = np.abs(np.expm1(np.sum(log_phi, axis=1) - sg.log_gamma - n * log_norm))

    # activity per signed vector
    b = np.array(params.b)
    eps = params.eps_b
    zeros = (m - np.count_nonzero(pats, axis=1)).astype(np.int64)
    combo_hits = np.zeros(N, dtype=np.int64)
    for signs in _sign_combos(m):
        vals = pats @ (np.array(signs) * b)
        dist = np.abs(vals - np.rint(vals))
        combo_hits += (dist > eps).astype(np.int64)
    active_signed = combo_hits >> zeros
    active = valid & (active_signed > 0)

    chain_ok = True
    sandwich_ok = True
    if np.any(valid):
        rows = np.where(valid)[0]
        kk = k_arr[rows] - 1  # 0-based index of w_k
        w_at_k = np.take_along_axis(w_log[rows], kk[:, None], axis=1)[:, 0]
        sandwich_ok = bool(np.all(w_at_k <= log_varpi[rows] + 1e-12))
        inner = rows[k_arr[rows] < n]
        if len(inner):
            kk2 = k_arr[inner]  # 0-based index of w_{k+1}
            w_next = np.take_along_axis(w_log[inner], kk2[:, None], axis=1)[:, 0]
            sandwich_ok = sandwich_ok and bool(
                np.all(log_varpi[inner] < w_next)
            )
            phi_k = log_norm + log_varpi[inner]
            phi_next = np.take_along_axis(log_phi[inner], kk2[:, None], axis=1)[:, 0]
            chain_ok = bool(np.all(phi_k < phi_next))
        diffs = np.diff(log_phi[rows], axis=1)
        chain_ok = chain_ok and bool(np.all(diffs >= -1e-12))

    gamma_full = float(np.sum(sg.multiplicity * sg.gamma))
    gamma_good = float(np.sum(active_signed * sg.gamma))

    min_ratio = math.nan
    if content and np.any(active):
        ratios = []
        for k in range(1, n + 1):
            rows = np.where(active & (k_arr == k))[0]
            if not len(rows):
                continue
            # sides sorted non-increasing: varpi (mn-k times), then w_k..w_1
            side_logs = np.concatenate(
                [
                    np.repeat(log_varpi[rows, None], mn - k, axis=1),
                    w_log[rows, :k][:, ::-1],
                ],
                axis=1,
            )
            prefix = np.concatenate(
                [np.zeros((len(rows), 1)), np.cumsum(side_logs, axis=1)[:, :-1]],
                axis=1,
            )
            idx = np.arange(mn, dtype=np.float64)
            branch = _log_f(params.f, side_logs) + prefix - idx[None, :] * side_logs
            content_log = np.min(branch, axis=1)
            ratios.append(np.min(content_log - mn * log_varpi[rows]))
        if ratios:
            min_ratio = float(math.exp(min(ratios)))

    phi_max = float(np.exp(np.max(log_phi[active]))) if np.any(active) else 0.0
    dev = float(np.max(prod_dev[active])) if np.any(active) else 0.0
    return ShellStats(
        r=r,
        signed_count=int(np.sum(sg.multiplicity)),
        active_count=int(np.sum(active_signed)),
        no_k_count=no_k,
        clamped_count=int(np.sum(sg.multiplicity[sg.clamped])),
        gamma_full=gamma_full,
        gamma_good=gamma_good,
        shell_sum=gamma_full * float(r) ** n,
        max_product_dev=dev,
        chain_ok=chain_ok,
        sandwich_ok=sandwich_ok,
        phi_max=phi_max,
        min_content_ratio=min_ratio,
    )


def _scan_shell_scalar(params: LimsupParams, r: int, content: bool) -> ShellStats:
    n, m = params.n, params.m
    mn = m * n
    signed = 0
    active_count = 0
    no_k = 0
    clamped_count = 0
    gamma_full = 0.0
    gamma_good = 0.0
    dev = 0.0
    chain_ok = True
    sandwich_ok = True
    phi_max = 0.0
    min_ratio = math.inf
    seen_ratio = False
    for pat, mult in abs_patterns(m, r):
        u0 = IntegerVector(pat)
        term = gamma_u(params.psi, params.alpha, params.beta, params.f, u0)
        signed += mult
        gamma_full += mult * term.gamma
        if term.t_clamped:
            clamped_count += mult
        # count active sign choices of this pattern
        zeros = sum(1 for a in pat if a == 0)
        hits = 0
        for signs in _sign_combos(m):
            val = sum(s * a * bb for s, a, bb in zip(signs, pat, params.b))
            if nearest_int_dist(val) > params.eps_b:
                hits += 1
        act = hits >> zeros
        if act == 0:
            continue
        gamma_good += act * term.gamma
        try:
            prof = phi_profile(_first_active_signed(pat, params), params)
        except NoValidKError:
            no_k += act
            continue
        active_count += act
        norm = float(r)
        dev = max(dev, abs(math.prod(prof.phi) / (term.gamma * norm ** n) - 1.0))
        w, _, _ = _ladder_levels(params, u0)
        k = prof.k
        if not (w[k - 1] <= prof.varpi * (1.0 + 1e-12)):
            sandwich_ok = False
        if k < n and not (prof.varpi < w[k]):
            sandwich_ok = False
        for j in range(n - 1):
            if prof.phi[j] > prof.phi[j + 1] * (1.0 + 1e-12):
                chain_ok = False
        if k < n and not (prof.phi[k - 1] < prof.phi[k]):
            chain_ok = False
        phi_max = max(phi_max, max(prof.phi))
        if content:
            rect = inner_rectangle(prof.u, params)
            est = rect_content_closed(params.f, rect)
            min_ratio = min(min_ratio, est.value / prof.varpi ** mn)
            seen_ratio = True
    return ShellStats(
        r=r,
        signed_count=signed,
        active_count=active_count,
        no_k_count=no_k,
        clamped_count=clamped_count,
        gamma_full=gamma_full,
        gamma_good=gamma_good,
        shell_sum=gamma_full * float(r) ** n,
        max_product_dev=dev,
        chain_ok=chain_ok,
        sandwich_ok=sandwich_ok,
        phi_max=phi_max,
        min_content_ratio=min_ratio if seen_ratio else math.nan,
    )


def _first_active_signed(pat, params: LimsupParams) -> IntegerVector:
    for signs in _sign_combos(len(pat)):
        entries = tuple(s * a for s, a in zip(signs, pat))
        if all(e == 0 for e in entries):
            continue
        if nearest_int_dist(dot(entries, params.b)) > params.eps_b:
            return IntegerVector(entries)
    raise DomainError("pattern has no active sign choice")


def scan_shell(params: LimsupParams, r: int, content: bool = True) -> ShellStats:
    """Aggregate the profile invariants and content ratios over shell r."""
    if params.psi.family == POWER and params.m <= 3:
        return _scan_shell_vectorized(params, r, content)
    return _scan_shell_scalar(params, r, content)


def active_representatives(params: LimsupParams, r: int, count: int) -> list[IntegerVector]:
    """First few antipodally reduced active vectors of shell r."""
    out = []
    for u in gamma_set(r, params):
        out.append(u)
        if len(out) >= count:
            break
    return out


# ---------------------------------------------------------------------------
# radius selection


@dataclass(frozen=True)
class LambdaSelection:
    members: tuple[int, ...]
    density: float             # |Lambda| / r_max
    totient_a: float
    totient_density: float     # density of the totient condition alone
    phi_sum: float             # sum over r in Lambda, u in Gamma(r) of prod phi
    series_partial: float      # sum over r <= r_max of shell sums
    ratio: float               # phi_sum / series_partial


def lambda_selection(params: LimsupParams, r_max: int, a: float,
                     c0: float = 0.25) -> LambdaSelection:
    """Radii passing both the totient and good-distance mass conditions.

    A radius r joins Lambda when phi(r)/r >= 1/a and the gamma mass of
    the good-distance part of shell r is at least c0 times the full
    shell mass. Raises ConstructionError when the selection is empty;
    finite-range emptiness is an inconclusive outcome, not a refutation.
    """
    if r_max < 1:
        raise DomainError("r_max must be >= 1")
    if a <= 0.0:
        raise DomainError("threshold parameter a must be positive")
    phi = totient_sieve(r_max)
    members = []
    phi_sum = 0.0
    series_partial = 0.0
    tot_good = 0
    for r in range(1, r_max + 1):
        stats = scan_shell(params, r, content=False)
        series_partial += stats.shell_sum
        tot_ok = a * phi[r] >= r
        if tot_ok:
            tot_good += 1
        if tot_ok and stats.gamma_good >= c0 * stats.gamma_full:
            members.append(r)
            # prod phi = gamma |u|**n summed over the reduced set Gamma(r)
            phi_sum += 0.5 * stats.gamma_good * float(r) ** params.n
    if not members:
        raise ConstructionError(
            f"no radius up to {r_max} passes the selection (a = {a}, c0 = {c0})"
        )
    return LambdaSelection(
        members=tuple(members),
        density=len(members) / r_max,
        totient_a=a,
        totient_density=tot_good / r_max,
        phi_sum=phi_sum,
        series_partial=series_partial,
        ratio=phi_sum / series_partial if series_partial > 0 else math.nan,
    )


# ---------------------------------------------------------------------------
# Monte Carlo measure estimation


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    samples: int
    seed: int


def _check_seed(seed: int) -> None:
    if not (0 <= seed < 2 ** 64):
        raise DomainError("seed must be a 64-bit unsigned integer")


def mc_measure(region: Callable[[np.ndarray], np.ndarray], dim: int,
               samples: int, seed: int, workers: int = 1) -> McEstimate:
    """Monte Carlo estimate of the Lebesgue measure of a region in [0,1]**dim.

    ``region`` receives a (k, dim) array and returns a boolean vector.
    Sampling is blocked and counter-based, so the estimate is a pure
    function of (seed, samples) no matter how many workers execute the
    blocks.
    """
    _check_seed(seed)
    if samples < MC_MIN_SAMPLES:
        raise DomainError(f"samples must be >= {MC_MIN_SAMPLES}")
    if dim < 1:
        raise DomainError("dimension must be >= 1")
    nblocks = (samples + MC_BLOCK - 1) // MC_BLOCK

    def block_hits(i: int) -> int:
        size = min(MC_BLOCK, samples - i * MC_BLOCK)
        rng = np.random.Generator(np.random.Philox(key=seed, counter=i * 2 ** 70))
        pts = rng.random((size, dim))
        return int(np.count_nonzero(region(pts)))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(block_hits, range(nblocks)))
    else:
        hits = sum(block_hits(i) for i in range(nblocks))
    p = hits / samples
    stderr = math.sqrt(p * (1.0 - p) / (samples - 1))
    return McEstimate(p, stderr, samples, seed)


def rprime_region(u: IntegerVector, deltas: Sequence[float]) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized indicator of R'(u, deltas) over flattened points.

    Points arrive as (k, m*n) arrays, interpreted row-major as m x n
    matrices (entry (i, j) at column i*n + j).
    """
    if any(d >= 0.5 for d in deltas) or any(d < 0.0 for d in deltas):
        raise DomainError("deltas must lie in [0, 1/2)")
    m = u.dim
    n = len(deltas)
    uv = np.array(u.entries, dtype=np.float64)
    g = _gcd_all(u)
    dl = np.array(deltas)

    def indicator(points: np.ndarray) -> np.ndarray:
        mats = points.reshape(len(points), m, n)
        y = np.einsum("kij,i->kj", mats, uv)
        v = np.rint(y)
        near = np.abs(y - v) < dl[None, :]
        cop = np.gcd(np.abs(v).astype(np.int64), g) == 1
        return np.all(near & cop, axis=1)

    return indicator


# ---------------------------------------------------------------------------
# exact interval machinery (m = 1)


def coprime_intervals(u: int, delta: float) -> list[tuple[float, float]]:
    """Intervals {x in [0,1] : |x u - v| < delta, gcd(u, v) = 1} for a
    positive integer u (negative u gives the same set by symmetry)."""
    u = abs(int(u))
    if u < 1:
        raise DomainError("u must be a nonzero integer")
    if not (0.0 <= delta < 0.5):
        raise DomainError("delta must lie in [0, 1/2)")
    if delta == 0.0:
        return []
    out = []
    for v in range(0, u + 1):
        if math.gcd(u, v) != 1:
            continue
        lo = max(0.0, (v - delta) / u)
        hi = min(1.0, (v + delta) / u)
        if hi > lo:
            out.append((lo, hi))
    return out


def interval_measure(intervals: list[tuple[float, float]]) -> float:
    return math.fsum(hi - lo for lo, hi in intervals)


def interval_intersection(a: list[tuple[float, float]],
                          b: list[tuple[float, float]]) -> list[tuple[float, float]]:
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        lo = max(a[i][0], b[j][0])
        hi = min(a[i][1], b[j][1])
        if hi > lo:
            out.append((lo, hi))
        if a[i][1] <= b[j][1]:
            i += 1
        else:
            j += 1
    return out


def rprime_exact_measure(u: IntegerVector, deltas: Sequence[float]) -> float:
    """Exact measure of R'(u, deltas) for m = 1 by interval unions."""
    if u.dim != 1:
        raise DomainError("exact measures require m = 1")
    total = 1.0
    for d in deltas:
        total *= interval_measure(coprime_intervals(u.entries[0], d))
    return total


def rprime_exact_intersection(u1: IntegerVector, d1: Sequence[float],
                              u2: IntegerVector, d2: Sequence[float]) -> float:
    """Exact measure of the intersection of two m = 1 neighborhoods."""
    if u1.dim != 1 or u2.dim != 1:
        raise DomainError("exact measures require m = 1")
    total = 1.0
    for a, b in zip(d1, d2):
        ia = coprime_intervals(u1.entries[0], a)
        ib = coprime_intervals(u2.entries[0], b)
        total *= interval_measure(interval_intersection(ia, ib))
    return total


# ---------------------------------------------------------------------------
# quasi-independence


@dataclass(frozen=True)
class QiRecord:
    u1: IntegerVector
    u2: IntegerVector
    measure1: float
    measure2: float
    intersection: float
    ratio: float
    method: str


@dataclass(frozen=True)
class QiReport:
    records: tuple[QiRecord, ...]
    max_ratio: float
    skipped: int


def qi_pair(u1: IntegerVector, d1: Sequence[float], u2: IntegerVector,
            d2: Sequence[float], samples: int, seed: int,
            workers: int = 1) -> QiRecord:
    """Marginals, intersection and correlation ratio of one pair.

    Exact interval arithmetic at m = 1, Monte Carlo otherwise (three
    independent counter-based streams derived from the seed).
    """
    m = u1.dim
    n = len(d1)
    if m == 1:
        m1 = rprime_exact_measure(u1, d1)
        m2 = rprime_exact_measure(u2, d2)
        inter = rprime_exact_intersection(u1, d1, u2, d2)
        method = "exact"
    else:
        dim = m * n
        i1 = rprime_region(u1, d1)
        i2 = rprime_region(u2, d2)
        m1 = mc_measure(i1, dim, samples, seed % 2 ** 64, workers).mean
        m2 = mc_measure(i2, dim, samples, (seed + 1) % 2 ** 64, workers).mean
        inter = mc_measure(lambda p: i1(p) & i2(p), dim, samples,
                           (seed + 2) % 2 ** 64, workers).mean
        method = "mc"
    denom = m1 * m2
    ratio = inter / denom if denom > 0.0 else math.inf
    return QiRecord(u1, u2, m1, m2, inter, ratio, method)


def quasi_independence_scan(params: LimsupParams, pairs, samples: int,
                            seed: int, workers: int = 1) -> QiReport:
    """Correlation ratios over pairs of active vectors.

    Pairs with u1 = +-u2 are rejected. Pairs whose profile is inactive,
    has no ladder index, carries a width at or above 1/2, or has a zero
    marginal are skipped and counted.
    """
    records = []
    skipped = 0
    for idx, (u1, u2) in enumerate(pairs):
        if u1.entries == u2.entries or u1.entries == (-u2).entries:
            raise DomainError("pairs must satisfy u1 != +-u2")
        try:
            p1 = phi_profile(u1, params)
            p2 = phi_profile(u2, params)
        except NoValidKError:
            skipped += 1
            continue
        if not (p1.active and p2.active):
            skipped += 1
            continue
        if max(p1.phi) >= 0.5 or max(p2.phi) >= 0.5:
            skipped += 1
            continue
        rec = qi_pair(u1, p1.phi, u2, p2.phi, samples,
                      (seed + 7919 * idx) % 2 ** 64, workers)
        if rec.measure1 <= 0.0 or rec.measure2 <= 0.0:
            skipped += 1
            continue
        records.append(rec)
    max_ratio = max((r.ratio for r in records), default=0.0)
    return QiReport(tuple(records), max_ratio, skipped)


# ---------------------------------------------------------------------------
# inner rectangles


def inner_rectangle(u: IntegerVector, params: LimsupParams) -> Hyperrectangle:
    """Hyperrectangle inscribed in a profile ball intersected with the
    scaled neighborhood: one side c_tilde t**(-beta_j)/|u| for each
    j <= k, m-1 widths varpi after each, then m(n-k) trailing widths.
    """
    prof = phi_profile(u, params)
    if not prof.active:
        raise DomainError("inner rectangle requires an active profile")
    w, _, _ = _ladder_levels(params, u)
    m, n, k = params.m, params.n, prof.k
    sides: list[float] = []
    for j in range(k):
        sides.append(w[j])
        sides.extend([prof.varpi] * (m - 1))
    sides.extend([prof.varpi] * (m * (n - k)))
    assert len(sides) == m * n
    return Hyperrectangle.from_sides(sides)
