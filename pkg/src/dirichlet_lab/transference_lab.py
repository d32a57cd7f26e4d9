"""Transference between the affine approximation problem and the dual
problem over integer row vectors, plus direct solvability tests by
lattice enumeration.

The two-sided transfer inequality links solvability of

    ||A q + b||_{Z,alpha} <= c,   |q|_beta <= t        (primal)

to smallness of ||A_{*,j} . u||_Z against ||u . b||_Z over dual vectors
u. The derived constants used by the limsup construction live here:
eps_b (a quarter of the smallest nonzero coordinate distance of b),
the distance-dependent shift tau(b, u), its uniform bound c_b attained
at distance exactly eps_b, the factorial-threshold shift tau, and the
combined scale c_tilde.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .core_model import (
    ApproxFunction,
    IntegerVector,
    WeightVector,
    psi_eval,
    shell,
    t_of_u,
    validate_lambda_decay,
)
from .errors import BudgetError, DomainError, InvariantViolation

LATTICE_BUDGET = 10 ** 7


def nearest_int_dist(x: float) -> float:
    """Distance from x to the nearest integer, in [0, 0.5]."""
    return abs(x - round(x))


def dot(u, v) -> float:
    return math.fsum(a * b for a, b in zip(u, v))


@dataclass(frozen=True)
class AffineSystem:
    """An m x n matrix in the unit cube with an inhomogeneous shift b."""

    A: tuple[tuple[float, ...], ...]  # m rows, n columns
    b: tuple[float, ...]
    alpha: WeightVector
    beta: WeightVector

    def __post_init__(self) -> None:
        m, n = self.alpha.dim, self.beta.dim
        if len(self.A) != m or any(len(row) != n for row in self.A):
            raise DomainError(f"matrix must be {m} x {n}")
        if len(self.b) != m:
            raise DomainError(f"shift vector must have length {m}")
        if any(not (0.0 <= e <= 1.0) for row in self.A for e in row):
            raise DomainError("matrix entries must lie in [0, 1]")

    @property
    def m(self) -> int:
        return self.alpha.dim

    @property
    def n(self) -> int:
        return self.beta.dim

    def column_dot(self, j: int, u) -> float:
        """A_{*,j} . u for a 0-based column index."""
        return math.fsum(self.A[i][j] * ui for i, ui in enumerate(u))

    def residual(self, q) -> list[float]:
        """A q + b."""
        return [math.fsum(self.A[i][j] * qj for j, qj in enumerate(q)) + self.b[i]
                for i in range(self.m)]


def epsilon_b(b) -> float:
    """A quarter of the smallest nonzero coordinate distance of b to Z."""
    dists = [nearest_int_dist(x) for x in b]
    positive = [d for d in dists if d > 0.0]
    if not positive:
        raise DomainError("b is integral; the homogeneous case is out of scope")
    return min(positive) / 4.0


def epsilon_anchor_index(b) -> int:
    """0-based index of the coordinate achieving epsilon_b (smallest wins ties)."""
    eps = epsilon_b(b)
    for i, x in enumerate(b):
        d = nearest_int_dist(x)
        if d > 0.0 and d / 4.0 == eps:
            return i
    raise DomainError("unreachable: epsilon_b without an anchor")


def _smallest_tau_strict(dist: float, lam: float, alpha: WeightVector,
                         m: int, n: int) -> int:
    # smallest integer tau with lam**(-tau * alpha_i) < dist/(m+n) for all i
    target = dist / (m + n)
    if target <= 0.0:
        raise DomainError("distance must be positive")
    need = max(math.log(1.0 / target) / (a * math.log(lam)) for a in alpha)
    tau = math.floor(need) + 1
    # guard the floor against float edges, then verify strictly
    while any(lam ** (-tau * a) >= target for a in alpha):
        tau += 1
    while tau > 1 and all(lam ** (-(tau - 1) * a) < target for a in alpha):
        tau -= 1
    return tau


def tau_b_u(b, u: IntegerVector, lam: float, alpha: WeightVector,
            m: int, n: int) -> int:
    """Smallest integer tau with lam**(-tau alpha_i) < ||u.b||_Z/(m+n) for all i."""
    if lam <= 1.0:
        raise DomainError("decay constant must exceed 1")
    if len(b) != m or alpha.dim != m:
        raise DomainError("dimension mismatch between b, alpha and m")
    d = nearest_int_dist(dot(u, b))
    if d == 0.0:
        raise DomainError("u.b is integral; tau(b, u) is undefined")
    return _smallest_tau_strict(d, lam, alpha, m, n)


def tau_const(lam: float, alpha: WeightVector, m: int, n: int) -> int:
    """Smallest integer tau with lam**(tau alpha_i) >= ((m+n)!)**2 for all i."""
    if lam <= 1.0:
        raise DomainError("decay constant must exceed 1")
    threshold = float(math.factorial(m + n)) ** 2
    need = max(math.log(threshold) / (a * math.log(lam)) for a in alpha)
    tau = max(1, math.ceil(need))
    while any(lam ** (tau * a) < threshold for a in alpha):
        tau += 1
    while tau > 1 and all(lam ** ((tau - 1) * a) >= threshold for a in alpha):
        tau -= 1
    return tau


@dataclass(frozen=True)
class TransferConstants:
    eps_b: float
    c_b: int
    tau_const: int
    c_tilde: float
    lam: float


def transfer_constants(psi: ApproxFunction, alpha: WeightVector, beta: WeightVector,
                       b) -> TransferConstants:
    """Derive the constants the divergence construction runs on.

    c_b is computed, not abstract: it is the shift needed at distance
    exactly eps_b, which bounds tau(b, u) for every u whose distance
    exceeds eps_b. The norm |beta| in the exponent of c_tilde is read as
    the sup norm beta_1 (an assumption, recorded here).
    """
    lam = validate_lambda_decay(psi)
    eps = epsilon_b(b)
    m, n = alpha.dim, beta.dim
    c_b = _smallest_tau_strict(eps, lam, alpha, m, n)
    tau = tau_const(lam, alpha, m, n)
    c_tilde = eps * 2.0 ** (-c_b * beta[0]) / (m + n)
    return TransferConstants(eps, c_b, tau, c_tilde, lam)


def _ordered_range(limit: int):
    # 0, 1, -1, 2, -2, ...: magnitude first, positive before negative
    yield 0
    for k in range(1, limit + 1):
        yield k
        yield -k


def _strict_limit(x: float) -> int:
    # largest integer strictly below x
    t = math.floor(x)
    if t == x:
        t -= 1
    return int(t)


def _enumerate_q(limits: list[int], budget: int):
    count = 1
    for T in limits:
        count *= 2 * T + 1
    if count > budget:
        raise BudgetError(
            f"enumeration of {count} lattice points exceeds budget {budget}"
        )
    for q in itertools.product(*[list(_ordered_range(T)) for T in limits]):
        if any(q):
            yield q


def is_dirichlet_at_t(sys: AffineSystem, psi: ApproxFunction, t: float,
                      budget: int = LATTICE_BUDGET):
    """Test solvability of ||A q + b||_{Z,alpha} < psi(t), |q|_beta < t.

    Enumerates q in magnitude-then-sign order (so the reported witness
    is the smallest solution under that order) and applies the strict
    inequalities verbatim. Raises BudgetError rather than silently
    truncating when the search box is too large.
    """
    if t < psi.t0:
        raise DomainError(f"t must be at least the domain floor {psi.t0}")
    level = psi_eval(psi, t)
    thresholds = [level ** a for a in sys.alpha]
    limits = [_strict_limit(t ** bj) for bj in sys.beta]
    if any(T < 0 for T in limits):
        return False, None
    for q in _enumerate_q(limits, budget):
        res = sys.residual(q)
        if all(nearest_int_dist(x) < thr for x, thr in zip(res, thresholds)):
            return True, IntegerVector(tuple(q))
    return False, None


def exists_approx_solution(sys: AffineSystem, c: float, t: float,
                           budget: int = LATTICE_BUDGET):
    """Witness q (possibly zero) for ||A q + b||_{Z,alpha} <= c, |q|_beta <= t."""
    thresholds = [c ** a for a in sys.alpha]
    limits = [int(math.floor(t ** bj)) for bj in sys.beta]
    count = 1
    for T in limits:
        count *= 2 * T + 1
    if count > budget:
        raise BudgetError(
            f"enumeration of {count} lattice points exceeds budget {budget}"
        )
    for q in itertools.product(*[list(_ordered_range(T)) for T in limits]):
        res = sys.residual(q)
        if all(nearest_int_dist(x) <= thr for x, thr in zip(res, thresholds)):
            return q
    return None


def forward_transfer_gap(sys: AffineSystem, c: float, t: float, u: IntegerVector,
                         budget: int = LATTICE_BUDGET):
    """Slack in the forward transfer inequality, or None when the primal
    system has no solution (the hypothesis is empty).

    When some q solves the primal system, every integral u must satisfy

        ||u.b||_Z <= (m+n) max{ max_j t**beta_j ||A_{*,j}.u||_Z,
                                max_i c**alpha_i |u_i| }.

    Returns rhs - lhs, which a correct implementation never sees
    negative.
    """
    q = exists_approx_solution(sys, c, t, budget)
    if q is None:
        return None
    m, n = sys.m, sys.n
    lhs = nearest_int_dist(dot(u, sys.b))
    col = max(t ** sys.beta[j] * nearest_int_dist(sys.column_dot(j, u))
              for j in range(n))
    row = max(c ** sys.alpha[i] * abs(ui) for i, ui in enumerate(u))
    rhs = (m + n) * max(col, row)
    return rhs - lhs


def dual_condition(sys: AffineSystem, psi: ApproxFunction, u: IntegerVector,
                   c: float, t_scale: float) -> bool:
    """||A_{*,j}.u||_Z < c * (t_scale * t(u))**(-beta_j) for every column j."""
    t = t_of_u(psi, sys.alpha, u)
    for j in range(sys.n):
        if not nearest_int_dist(sys.column_dot(j, u)) < c * (t_scale * t) ** (-sys.beta[j]):
            return False
    return True


def cassels_backward_scan(sys: AffineSystem, c: float, t: float, u_range: int):
    """Scan the backward-transfer hypothesis over all 1 <= |u| <= u_range.

    The hypothesis asks, for every integral u,

        ||u.b||_Z <= 2**(m+n-1) ((m+n)!)**(-2) max{...}

    with the same max as the forward inequality. A finite scan can
    refute it (returning the first counterexample) but never confirm
    it; the boolean is range-limited by construction.
    """
    if u_range < 1:
        raise DomainError("u_range must be >= 1")
    m, n = sys.m, sys.n
    const = 2.0 ** (m + n - 1) / float(math.factorial(m + n)) ** 2
    for r in range(1, u_range + 1):
        for u in shell(m, r):
            lhs = nearest_int_dist(dot(u, sys.b))
            col = max(t ** sys.beta[j] * nearest_int_dist(sys.column_dot(j, u))
                      for j in range(n))
            row = max(c ** sys.alpha[i] * abs(ui) for i, ui in enumerate(u))
            if lhs > const * max(col, row):
                return False, u
    return True, None


def dirichlet_uniform_witness(A, t: float, budget: int = LATTICE_BUDGET):
    """Witness for the classical uniform statement, non-strict variant:
    some nonzero q with ||A q||_Z**m <= 1/t and |q|**n < t.
    """
    if t <= 1.0:
        raise DomainError("t must exceed 1")
    m = len(A)
    n = len(A[0])
    level = (1.0 / t) ** (1.0 / m)
    T = _strict_limit(t ** (1.0 / n))
    if T < 0:
        return None
    count = (2 * T + 1) ** n
    if count > budget:
        raise BudgetError(f"enumeration of {count} lattice points exceeds budget")
    for q in itertools.product(*[list(_ordered_range(T)) for _ in range(n)]):
        if not any(q):
            continue
        ok = True
        for i in range(m):
            x = math.fsum(A[i][j] * qj for j, qj in enumerate(q))
            if nearest_int_dist(x) > level:
                ok = False
                break
        if ok:
            return IntegerVector(tuple(q))
    return None


def epsilon_good_shift(u: IntegerVector, b) -> IntegerVector:
    """Return u itself or its shift by the anchor basis vector, whichever
    has distance ||q.b||_Z above eps_b.

    At most one of u, u + e_i can sit at distance <= eps_b: their dot
    products with b differ by exactly b_i, whose distance to Z is four
    times eps_b at the anchor index.
    """
    eps = epsilon_b(b)
    if nearest_int_dist(dot(u, b)) > eps:
        return u
    i = epsilon_anchor_index(b)
    shifted = list(u.entries)
    shifted[i] += 1
    # u = -e_i cannot reach this branch: its distance is 4*eps > eps
    q = IntegerVector(tuple(shifted))
    if nearest_int_dist(dot(q, b)) <= eps:
        raise InvariantViolation(
            "both u and its anchor shift sit at small distance; "
            "the anchor bound ||b_i|| = 4 eps_b rules this out"
        )
    return q
