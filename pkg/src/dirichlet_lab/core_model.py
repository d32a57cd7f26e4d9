"""Weight vectors, approximating functions, dimension functions and
integer-shell enumeration.

Approximating functions are restricted to two parametric families,

    power:      psi(t) = c * t**(-sigma)
    power_log:  psi(t) = c * t**(-sigma) * (log t)**(-rho)

certified strictly decreasing on [t0, oo) with psi(t) -> 0. Dimension
functions follow the same pattern,

    f(r) = r**s * (log(1/r))**tau    for r <= r_cut,
    f(r) = f(r_cut) * (r/r_cut)**s   for r > r_cut,

with r_cut chosen so f is continuous, non-decreasing and f(0) = 0.
Restricting to these families keeps every hypothesis the engines rely on
(monotonicity, halving decay, comparability brackets) decidable by
closed-form exponent tests instead of numerical guessing.

Comparability between a dimension function f and an exponent s0 is the
usual order: f <= s0 ("f preceq s0") means f(r)/r**s0 is non-increasing,
s0 <= f means it is non-decreasing, and the strict variants additionally
require the limit of f(r)/r**s0 at 0 to be infinite resp. zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

from .errors import BracketError, CertificationError, DomainError

POWER = "power"
POWER_LOG = "power_log"

#: relative tolerance used by the bisection inverse
_INV_RTOL = 1e-12


@dataclass(frozen=True)
class WeightVector:
    """Positive weights summing to 1; beta-side vectors are non-increasing."""

    weights: tuple[float, ...]
    side: str  # "alpha" or "beta"

    def __post_init__(self) -> None:
        if self.side not in ("alpha", "beta"):
            raise DomainError(f"weight side must be 'alpha' or 'beta', got {self.side!r}")
        if not self.weights:
            raise DomainError("weight vector must be non-empty")
        if any(w <= 0.0 for w in self.weights):
            raise DomainError("weights must be strictly positive")
        if abs(sum(self.weights) - 1.0) > 1e-12:
            raise DomainError(f"weights must sum to 1 (got {sum(self.weights)!r})")
        if self.side == "beta":
            for a, b in zip(self.weights, self.weights[1:]):
                if a < b:
                    raise DomainError("beta weights must be non-increasing")

    @classmethod
    def alpha(cls, weights) -> "WeightVector":
        return cls(tuple(float(w) for w in weights), "alpha")

    @classmethod
    def beta(cls, weights) -> "WeightVector":
        return cls(tuple(float(w) for w in weights), "beta")

    @property
    def dim(self) -> int:
        return len(self.weights)

    def __iter__(self):
        return iter(self.weights)

    def __getitem__(self, i: int) -> float:
        return self.weights[i]


@dataclass(frozen=True)
class ApproxFunction:
    """Parametric decreasing approximating function.

    ``sigma == 0`` is constructible (needed to exercise decay-certificate
    failures) but then ``rho`` must be positive so the function still
    decreases strictly.
    """

    family: str
    c: float = 1.0
    sigma: float = 1.0
    rho: float = 0.0
    t0: float = 2.0

    def __post_init__(self) -> None:
        if self.family not in (POWER, POWER_LOG):
            raise DomainError(f"unknown approximating family {self.family!r}")
        if self.c <= 0.0:
            raise DomainError("coefficient c must be positive")
        if self.sigma < 0.0 or self.rho < 0.0:
            raise DomainError("exponents must be non-negative")
        if self.family == POWER and self.rho != 0.0:
            raise DomainError("power family takes rho = 0")
        if self.family == POWER and self.sigma == 0.0:
            raise DomainError("power family needs sigma > 0 to decrease")
        if self.sigma == 0.0 and self.rho == 0.0:
            raise DomainError("constant function is not strictly decreasing")
        if self.t0 < 2.0:
            raise DomainError("domain floor t0 must be >= 2")

    @classmethod
    def power(cls, c: float = 1.0, sigma: float = 1.0, t0: float = 2.0) -> "ApproxFunction":
        return cls(POWER, c, sigma, 0.0, t0)

    @classmethod
    def power_log(cls, c: float = 1.0, sigma: float = 1.0, rho: float = 1.0,
                  t0: float = 2.0) -> "ApproxFunction":
        return cls(POWER_LOG, c, sigma, rho, t0)


def psi_eval(psi: ApproxFunction, t: float) -> float:
    """Evaluate psi at t >= t0."""
    if t < psi.t0:
        raise DomainError(f"t = {t} below domain floor t0 = {psi.t0}")
    return psi_eval_extended(psi, t)


def psi_eval_extended(psi: ApproxFunction, t: float) -> float:
    """Evaluate the parametric formula on its natural domain, ignoring t0.

    The classical benchmark series start at q = 1, below the certified
    floor; the power family is perfectly well defined there. The log
    factor needs t > 1.
    """
    if t <= 0.0:
        raise DomainError("psi requires t > 0")
    value = psi.c * t ** (-psi.sigma)
    if psi.family == POWER_LOG:
        if t <= 1.0:
            raise DomainError("power_log formula requires t > 1")
        value *= math.log(t) ** (-psi.rho)
    return value


def psi_inverse(psi: ApproxFunction, y: float) -> float:
    """Return t with psi(t) = y, for 0 < y <= psi(t0).

    Closed form for the power family, bisection (relative tolerance
    1e-12, verified by re-evaluation) otherwise.
    """
    if y <= 0.0:
        raise DomainError("psi_inverse requires y > 0")
    top = psi_eval(psi, psi.t0)
    if y > top:
        raise DomainError(f"y = {y} above psi(t0) = {top}")
    if psi.family == POWER:
        return (psi.c / y) ** (1.0 / psi.sigma)

    lo = psi.t0
    hi = max(2.0 * psi.t0, 4.0)
    while psi_eval(psi, hi) > y:
        hi *= 2.0
        if hi > 1e300:
            raise DomainError("psi_inverse: no finite preimage found")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if psi_eval(psi, mid) > y:
            lo = mid
        else:
            hi = mid
        if hi - lo <= _INV_RTOL * hi:
            break
    t = 0.5 * (lo + hi)
    if abs(psi_eval(psi, t) - y) > 64.0 * _INV_RTOL * y:
        raise DomainError("psi_inverse bisection failed to verify")
    return t


def validate_lambda_decay(psi: ApproxFunction, dyadic_steps: int = 48) -> float:
    """Certify the halving-decay constant lambda = inf_t psi(t)/psi(2t).

    For both families the ratio equals 2**sigma times a factor
    ((log 2t)/(log t))**rho >= 1 that decreases to 1, so the infimum is
    exactly 2**sigma. The claim is cross-checked on the dyadic grid
    t = t0 * 2**k before being returned.
    """
    lam = 2.0 ** psi.sigma
    if lam <= 1.0 + 1e-9:
        raise CertificationError(
            f"halving-decay certificate fails: inf psi(t)/psi(2t) = {lam} <= 1"
        )
    t = psi.t0
    for _ in range(dyadic_steps):
        ratio = psi_eval(psi, t) / psi_eval(psi, 2.0 * t)
        if ratio < lam * (1.0 - 1e-12):
            raise CertificationError(
                f"halving-decay cross-check failed at t = {t}: ratio {ratio} < {lam}"
            )
        t *= 2.0
    return lam


_LOG_CUT = math.exp(-1.0)


def _dim_cut(s: float, tau: float) -> float:
    # below the cut the log factor is >= 1 and f is non-decreasing
    if tau > 0.0:
        return min(_LOG_CUT, math.exp(-tau / s))
    return _LOG_CUT


@dataclass(frozen=True)
class DimensionFunction:
    """Parametric dimension function r**s * (log 1/r)**tau with ambient
    dimension metadata.

    Strict domination below the ambient power (needed by the series and
    limsup engines) is enforced where it is used, not at construction;
    the content engine legitimately evaluates volume-like functions with
    s equal to the ambient dimension.
    """

    family: str
    s: float
    tau: float = 0.0
    ambient: int = 1

    def __post_init__(self) -> None:
        if self.family not in (POWER, POWER_LOG):
            raise DomainError(f"unknown dimension family {self.family!r}")
        if self.s <= 0.0:
            raise DomainError("exponent s must be positive")
        if self.family == POWER and self.tau != 0.0:
            raise DomainError("power family takes tau = 0")
        if self.ambient < 1:
            raise DomainError("ambient dimension must be >= 1")

    @classmethod
    def power(cls, s: float, ambient: int) -> "DimensionFunction":
        return cls(POWER, s, 0.0, ambient)

    @classmethod
    def power_log(cls, s: float, tau: float, ambient: int) -> "DimensionFunction":
        return cls(POWER_LOG, s, tau, ambient)

    @property
    def r_cut(self) -> float:
        if self.family == POWER:
            return 1.0
        return _dim_cut(self.s, self.tau)

    @property
    def log_floor(self) -> float:
        """log(1/r_cut), the smallest log factor seen on the log piece."""
        if self.family == POWER:
            return 1.0
        return math.log(1.0 / self.r_cut)


def f_eval(f: DimensionFunction, r: float) -> float:
    """Evaluate the dimension function; continuous with f(0) = 0."""
    if r < 0.0:
        raise DomainError("dimension functions take r >= 0")
    if r == 0.0:
        return 0.0
    if f.family == POWER:
        return r ** f.s
    cut = f.r_cut
    if r <= cut:
        return r ** f.s * math.log(1.0 / r) ** f.tau
    return (cut ** f.s * math.log(1.0 / cut) ** f.tau) * (r / cut) ** f.s


def f_preceq(f: DimensionFunction, s0: float) -> bool:
    """Does f(r)/r**s0 decrease as r grows (f preceq s0)?"""
    if f.family == POWER or f.tau == 0.0:
        return f.s <= s0
    if f.tau > 0.0:
        return f.s <= s0
    return f.s <= s0 + f.tau / f.log_floor


def preceq_f(s0: float, f: DimensionFunction) -> bool:
    """Does f(r)/r**s0 increase as r grows (s0 preceq f)?"""
    if f.family == POWER or f.tau == 0.0:
        return f.s >= s0
    if f.tau > 0.0:
        return f.s >= s0 + f.tau / f.log_floor
    return f.s >= s0


def f_prec(f: DimensionFunction, s0: float) -> bool:
    """f preceq s0 with f(r)/r**s0 -> oo at 0 (strict domination)."""
    if not f_preceq(f, s0):
        return False
    return f.s < s0 or (f.s == s0 and f.tau > 0.0)


def prec_f(s0: float, f: DimensionFunction) -> bool:
    """s0 preceq f with f(r)/r**s0 -> 0 at 0."""
    if not preceq_f(s0, f):
        return False
    return f.s > s0 or (f.s == s0 and f.tau < 0.0)


def f_bracket(f: DimensionFunction, m: int, n: int) -> int:
    """Return the unique a in [1, n-1] with (mn-a) preceq f preceq (mn-a+1).

    Requires n >= 2 (the bracket is vacuous otherwise) and strict
    domination f below r**(mn). Returns the smallest valid a when the
    exponent sits exactly on an integer boundary. For f = r**s this is
    ceil(mn - s).
    """
    if n < 2:
        raise DomainError("bracket requires n >= 2; n = 1 systems are unsupported")
    mn = m * n
    if not f_prec(f, float(mn)):
        raise BracketError(
            f"f must be strictly dominated by r**{mn}: "
            f"f(r)/r**{mn} does not tend to infinity at 0"
        )
    for a in range(1, n):
        lower_ok = preceq_f(float(mn - a), f)
        upper_ok = f_preceq(f, float(mn - a + 1))
        if lower_ok and upper_ok:
            return a
    # diagnose which side fails at the nearest candidate
    a_guess = min(max(1, math.ceil(mn - f.s)), n - 1)
    if not preceq_f(float(mn - a_guess), f):
        raise BracketError(
            f"no bracket index in [1, {n - 1}]: "
            f"r**{mn - a_guess} preceq f fails (f(r)/r**{mn - a_guess} not non-decreasing)"
        )
    raise BracketError(
        f"no bracket index in [1, {n - 1}]: "
        f"f preceq r**{mn - a_guess + 1} fails (f(r)/r**{mn - a_guess + 1} not non-increasing)"
    )


def comparability_bracket(f: DimensionFunction, d: int) -> int:
    """Return the smallest k in [0, d-1] with k preceq f preceq k+1."""
    for k in range(0, d):
        if preceq_f(float(k), f) and f_preceq(f, float(k + 1)):
            return k
    if not f_preceq(f, float(d)):
        raise BracketError(
            f"no bracket index in [0, {d - 1}]: f preceq r**{d} fails "
            f"(exponent {f.s} too large for dimension {d})"
        )
    raise BracketError(f"no bracket index in [0, {d - 1}] for exponent {f.s}, tau {f.tau}")


@dataclass(frozen=True)
class IntegerVector:
    """A nonzero integer vector with its sup norm."""

    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise DomainError("integer vector must be non-empty")
        if all(e == 0 for e in self.entries):
            raise DomainError("integer vector must be nonzero")
        if any(not isinstance(e, int) for e in self.entries):
            raise DomainError("entries must be integers")

    @property
    def sup_norm(self) -> int:
        return max(abs(e) for e in self.entries)

    @property
    def dim(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __neg__(self) -> "IntegerVector":
        return IntegerVector(tuple(-e for e in self.entries))


def _log_sup_quasinorm(alpha: WeightVector, abs_entries) -> float:
    # log of max_i |u_i|**(1/alpha_i); zero entries impose no constraint
    best = 0.0
    for a, w in zip(abs_entries, alpha.weights):
        if a > 0:
            best = max(best, math.log(a) / w)
    return best


def _visibility(psi: ApproxFunction, alpha: WeightVector, abs_entries) -> tuple[float, bool]:
    log_m = _log_sup_quasinorm(alpha, abs_entries)
    y = math.exp(-log_m)  # the level psi must drop below
    if y > psi_eval(psi, psi.t0):
        return psi.t0, True
    if psi.family == POWER:
        # single rounding of the combined exponent keeps boundary cases stable
        return math.exp((math.log(psi.c) + log_m) / psi.sigma), False
    return psi_inverse(psi, y), False


def t_of_u(psi: ApproxFunction, alpha: WeightVector, u: IntegerVector) -> float:
    """First time t at which every |u_i| drops below psi(t)**(-alpha_i).

    Equals psi^{-1}(1/M) with M = max_i |u_i|**(1/alpha_i). When even
    t0 already satisfies the condition the value clamps to t0; use
    :func:`t_of_u_clamped` to detect that case.
    """
    if u.dim != alpha.dim:
        raise DomainError("integer vector and alpha dimension mismatch")
    t, _ = _visibility(psi, alpha, [abs(e) for e in u.entries])
    return t


def t_of_u_clamped(psi: ApproxFunction, alpha: WeightVector, u: IntegerVector) -> bool:
    """True when the visibility time falls below the domain floor t0."""
    if u.dim != alpha.dim:
        raise DomainError("integer vector and alpha dimension mismatch")
    _, clamped = _visibility(psi, alpha, [abs(e) for e in u.entries])
    return clamped


def shell_count(m: int, r: int) -> int:
    """Number of integer vectors in Z**m with sup norm exactly r."""
    if r < 1:
        raise DomainError("shell radius must be >= 1")
    return (2 * r + 1) ** m - (2 * r - 1) ** m


def shell(m: int, r: int) -> Iterator[IntegerVector]:
    """Yield every u in Z**m with sup norm exactly r, in lexicographic order."""
    if m < 1:
        raise DomainError("dimension must be >= 1")
    if r < 1:
        raise DomainError("shell radius must be >= 1")

    def rec(prefix: list[int], hit_max: bool, depth: int):
        if depth == m:
            if hit_max:
                yield IntegerVector(tuple(prefix))
            return
        remaining = m - depth - 1
        for e in range(-r, r + 1):
            hits = hit_max or abs(e) == r
            if not hits and remaining == 0:
                continue
            prefix.append(e)
            yield from rec(prefix, hits, depth + 1)
            prefix.pop()

    yield from rec([], False, 0)


def abs_patterns(m: int, r: int) -> Iterator[tuple[tuple[int, ...], int]]:
    """Yield (|u_1|,...,|u_m|) patterns with max exactly r and their
    multiplicities (number of sign choices), covering the shell once.
    """
    if r < 1:
        raise DomainError("shell radius must be >= 1")

    def rec(prefix: list[int], hit_max: bool, depth: int):
        if depth == m:
            if hit_max:
                nonzero = sum(1 for a in prefix if a > 0)
                yield tuple(prefix), 2 ** nonzero
            return
        remaining = m - depth - 1
        for a in range(0, r + 1):
            hits = hit_max or a == r
            if not hits and remaining == 0:
                continue
            prefix.append(a)
            yield from rec(prefix, hits, depth + 1)
            prefix.pop()

    yield from rec([], False, 0)
