"""Failure-probability bounds for sparse recovery from random samples.

Two bounds are implemented.  The fixed-support bound depends on the sparsity
only through moment polynomials whose coefficients are associated Stirling
numbers of the second kind.  The random-support bound replaces the worst-case
moment count with census-weighted aggregates computed from the exact
partition rank censuses, at the price of needing those censuses (available
for moment orders up to 4).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product as _iproduct
from typing import Mapping

from . import partitions as _pt

__all__ = [
    "assoc_stirling2",
    "assoc_stirling2_explicit",
    "moment_polynomial",
    "moment_ratio",
    "min2_partition_count",
    "FixedSupportParams",
    "RandomSupportParams",
    "BoundReport",
    "fixed_support_bound",
    "w_aggregate",
    "z_aggregate",
    "CensusSet",
    "random_support_bound",
    "block_exponents",
    "kappa_at_equality",
    "optimize_bound",
    "moment_order_for_oversampling",
    "estimate_sample_constant",
]


@lru_cache(maxsize=None)
def assoc_stirling2(n: int, k: int) -> int:
    """Number of partitions of ``{1..n}`` into ``k`` blocks of size >= 2
    (associated Stirling number of the second kind), exact.

    Recursion: ``S(n, k) = k S(n-1, k) + (n-1) S(n-2, k-1)``, from extending a
    partition either by inserting ``n`` into an existing block or by pairing
    ``n`` with one of the ``n-1`` smaller elements.
    """
    if n < 0 or k < 0:
        raise ValueError("need n, k >= 0")
    if n == 0 and k == 0:
        return 1
    if k == 0 or n == 0 or 2 * k > n:
        return 0
    return k * assoc_stirling2(n - 1, k) + (n - 1) * assoc_stirling2(n - 2, k - 1)


def assoc_stirling2_explicit(n: int, k: int) -> int:
    """Closed-form evaluation of the same count, valid for ``n >= 2k >= 2``.

    Independent of the recursion; used to cross-check it.
    """
    if k < 1 or n < 2 * k:
        raise ValueError("explicit formula requires n >= 2k >= 2")
    total = k**n
    for j in range(1, k):
        inner = 0
        for ell in range(j + 1):
            inner += (
                math.comb(j, ell)
                * (math.factorial(n) // math.factorial(n - ell))
                * (k - j) ** (n - ell)
            )
        total += (-1) ** j * math.comb(k, j) * inner
    q, r = divmod(total, math.factorial(k))
    if r:
        raise ArithmeticError("explicit formula did not divide evenly")
    return q


def moment_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients ``(c_1, .., c_{n//2})`` of the degree-``n//2`` moment
    polynomial ``sum_k c_k y**k`` with ``c_k`` the min-2 partition counts.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    return tuple(assoc_stirling2(n, k) for k in range(1, n // 2 + 1))


def moment_ratio(n: int, theta: float) -> float:
    """``theta**-n * sum_k c_k theta**k`` for the moment polynomial of order
    ``n``, evaluated stably in log space (the coefficients overflow doubles
    well before n = 40).
    """
    if theta <= 0:
        raise ValueError("theta must be positive")
    coeffs = moment_polynomial(n)
    logs = [
        math.log(c) + (k - n) * math.log(theta)
        for k, c in enumerate(coeffs, start=1)
        if c
    ]
    if not logs:
        return 0.0
    peak = max(logs)
    if peak > 700.0:
        return math.inf
    return math.exp(peak) * sum(math.exp(v - peak) for v in logs)


def min2_partition_count(n: int) -> int:
    """Total number of partitions of ``{1..n}`` with all blocks of size >= 2."""
    return sum(moment_polynomial(n)) if n >= 1 else 0


# ---------------------------------------------------------------------------
# parameter sets


@dataclass(frozen=True)
class FixedSupportParams:
    """Parameters of the fixed-support (worst case over supports of size
    ``sparsity``) failure bound.

    ``order`` is the moment order, ``powers`` the per-term moment exponents
    (one per term, length ``order``).  Validity requires the geometric sum
    ``a`` below 1 and ``kappa`` within the sparsity-dependent budget.
    """

    sparsity: int
    samples: int
    dimension: int
    order: int
    beta: float
    kappa: float
    powers: tuple[int, ...]

    def geometric_sum(self) -> float:
        return sum(self.beta ** (self.order / k) for k in self.powers)

    def valid(self) -> bool:
        if not (0 < self.beta < 1 and 0 < self.kappa < 1):
            return False
        if self.sparsity < 1 or self.samples < 1 or len(self.powers) != self.order:
            return False
        a = self.geometric_sum()
        if a >= 1:
            return False
        budget = (1 - a) / (1 + a) * self.sparsity ** (-1.5)
        return self.kappa / (1 - self.kappa) <= budget


@dataclass(frozen=True)
class RandomSupportParams:
    """Parameters of the random-support failure bound.

    ``expected_support`` is the mean number of active coefficients; ``alpha``
    controls the support-size tail term.  The kappa budget now depends on
    ``(alpha + 1) * expected_support`` instead of the worst-case sparsity.
    """

    expected_support: float
    samples: int
    dimension: int
    order: int
    alpha: float
    beta: float
    kappa: float
    powers: tuple[int, ...]

    def geometric_sum(self) -> float:
        return sum(self.beta ** (self.order / k) for k in self.powers)

    def valid(self) -> bool:
        if not (0 < self.beta < 1 and 0 < self.kappa < 1 and self.alpha > 0):
            return False
        if self.expected_support < 1 or self.samples < 1 or len(self.powers) != self.order:
            return False
        a = self.geometric_sum()
        if a >= 1:
            return False
        budget = (1 - a) / (1 + a) * ((self.alpha + 1) * self.expected_support) ** (-1.5)
        return self.kappa / (1 - self.kappa) <= budget


@dataclass
class BoundReport:
    """A failure-probability bound with its additive term breakdown.

    ``failure_bound`` is the exact sum of ``term_breakdown`` values and is
    reported verbatim even when it exceeds 1 (a trivial bound).  When the
    parameters violate their validity conditions the bound is the trivial 1.
    """

    failure_bound: float
    term_breakdown: dict[str, float]
    params_valid: bool
    params: object | None = None


def _invalid_report(params) -> BoundReport:
    return BoundReport(1.0, {"trivial": 1.0}, False, params)


def fixed_support_bound(params: FixedSupportParams) -> BoundReport:
    """Failure bound for recovering any polynomial of sparsity ``sparsity``
    from ``samples`` random samples in dimension ``dimension``.

    Two terms: a union bound over off-support indices and a Frobenius moment
    term for the support Gram deviation, both expressed through moment
    ratios at oversampling ``theta = samples / sparsity``.
    """
    if not params.valid():
        return _invalid_report(params)
    theta = params.samples / params.sparsity
    offsupport = (
        params.dimension
        * params.beta ** (-2 * params.order)
        * sum(moment_ratio(2 * m * k, theta) for m, k in enumerate(params.powers, 1))
    )
    gram = params.sparsity * params.kappa**-2 * moment_ratio(2 * params.order, theta)
    breakdown = {"offsupport": offsupport, "gram": gram, "tail": 0.0}
    return BoundReport(offsupport + gram, breakdown, True, params)


# ---------------------------------------------------------------------------
# census-weighted aggregates


def _falling(n: int, t: int) -> float:
    out = 1.0
    for i in range(t):
        out *= n - i
    return out


def w_aggregate(order: int, samples: int, expected_support: float, dimension: float,
                census: _pt.RankCensus) -> float:
    """Census-weighted Gram-moment aggregate for moment order ``order``.

    Sums, over block counts ``t`` and coincidence classes ``s``, the falling
    factorial of the sample count times ``expected_support**s`` times the
    rank census weighted by ``dimension**-R``; the rank sum stops below
    ``min(t, s)`` because the cycle matrices have deficient rank.  Missing
    census entries count as zero.
    """
    if census.kind != "cycle" or census.n != 2 * order:
        raise ValueError(f"need a cycle census on {2 * order} elements")
    n, N = order, samples
    total = 0.0
    for t in range(1, min(n, N) + 1):
        ssum = 0.0
        for s in range(2, 2 * n + 1):
            rsum = sum(
                census.count(t, s, r) * float(dimension) ** -r
                for r in range(min(t, s))
            )
            ssum += expected_support**s * rsum
        total += _falling(N, t) * ssum
    return total / float(N) ** (2 * n)


def z_aggregate(power: int, depth: int, samples: int, expected_support: float,
                dimension: float, census: _pt.RankCensus) -> float:
    """Census-weighted off-support moment aggregate.

    ``power`` and ``depth`` are the moment exponent and operator depth; the
    census must be the grid census on ``2*power`` columns and ``depth`` rows.
    The rank sum runs through ``min(t, s)`` inclusive (grid matrices can
    reach full rank).
    """
    if census.kind != "grid" or (census.cols, census.rows) != (2 * power, depth):
        raise ValueError(f"need a grid census of shape {2 * power}x{depth}")
    km, N = power * depth, samples
    total = 0.0
    for t in range(1, min(km, N) + 1):
        ssum = 0.0
        for s in range(1, 2 * km + 1):
            rsum = sum(
                census.count(t, s, r) * float(dimension) ** -r
                for r in range(min(t, s) + 1)
            )
            ssum += expected_support**s * rsum
        total += _falling(N, t) * ssum
    return total / float(N) ** (2 * km)


def block_exponents(order: int) -> tuple[int, ...]:
    """The standard exponent choice: ``max(1, round(order / m))`` for term m,
    which keeps ``m * K_m`` near ``order`` for every term.
    """
    return tuple(max(1, math.floor(order / m + 0.5)) for m in range(1, order + 1))


@dataclass
class CensusSet:
    """The rank censuses a random-support bound evaluation needs.

    ``cycle`` maps element counts to cycle censuses, ``grid`` maps
    ``(cols, rows)`` to grid censuses.
    """

    cycle: dict[int, _pt.RankCensus] = field(default_factory=dict)
    grid: dict[tuple[int, int], _pt.RankCensus] = field(default_factory=dict)

    @classmethod
    def for_orders(cls, orders=(2, 3, 4), workers: int = 1) -> "CensusSet":
        """Compute every census needed to evaluate the random-support bound
        at the given moment orders with the standard exponent choice.
        """
        out = cls()
        for n in orders:
            out.cycle[2 * n] = _pt.rank_census(2 * n, workers=workers)
            for m, k in enumerate(block_exponents(n), start=1):
                key = (2 * k, m)
                if key not in out.grid:
                    out.grid[key] = _pt.grid_rank_census(*key, workers=workers)
        return out

    def cycle_table(self, n_elements: int) -> _pt.RankCensus:
        if n_elements not in self.cycle:
            raise KeyError(f"cycle census on {n_elements} elements not loaded")
        return self.cycle[n_elements]

    def grid_table(self, cols: int, rows: int) -> _pt.RankCensus:
        if (cols, rows) not in self.grid:
            raise KeyError(f"grid census {cols}x{rows} not loaded")
        return self.grid[(cols, rows)]


_MAX_RANDOM_SUPPORT_ORDER = 4


def random_support_bound(params: RandomSupportParams, censuses: CensusSet) -> BoundReport:
    """Failure bound under the random support model.

    Three terms: the census-weighted Gram moment, the census-weighted
    off-support union bound, and an exponential tail for the support size
    exceeding ``(alpha + 1)`` times its mean.  Supported for moment orders
    up to 4; larger orders would need censuses beyond feasible computation.
    """
    if params.order > _MAX_RANDOM_SUPPORT_ORDER:
        raise _pt.CapacityError(
            f"random-support bound supports order <= {_MAX_RANDOM_SUPPORT_ORDER}; "
            f"the required censuses for order {params.order} are not computable here"
        )
    if not params.valid():
        return _invalid_report(params)
    n, N = params.order, params.samples
    et, D = params.expected_support, params.dimension
    gram = params.kappa**-2 * w_aggregate(n, N, et, D, censuses.cycle_table(2 * n))
    offsupport = (
        params.beta ** (-2 * n)
        * D
        * sum(
            z_aggregate(k, m, N, et, D, censuses.grid_table(2 * k, m))
            for m, k in enumerate(params.powers, start=1)
        )
    )
    tail = math.exp(-3 * params.alpha**2 / (6 + 2 * params.alpha) * et)
    breakdown = {"offsupport": offsupport, "gram": gram, "tail": tail}
    return BoundReport(offsupport + gram + tail, breakdown, True, params)


# ---------------------------------------------------------------------------
# parameter optimization


def kappa_at_equality(geometric_sum: float, scale: float) -> float:
    """The kappa making its budget inequality an equality:
    ``kappa / (1 - kappa) = (1 - a) / (1 + a) / scale``.
    """
    rhs = (1 - geometric_sum) / (1 + geometric_sum) / scale
    return rhs / (1 + rhs)


_BETA_GRID = tuple(round(0.40 + 0.01 * i, 2) for i in range(21))
_ALPHA_GRID = tuple(10 ** (-1.0 + 2.5 * i / 25) for i in range(26))


def optimize_bound(theorem: int, size, samples: int, dimension: int,
                   orders=None, censuses: CensusSet | None = None,
                   beta_grid=_BETA_GRID, alpha_grid=_ALPHA_GRID) -> BoundReport:
    """Grid-search the free parameters and return the smallest failure bound.

    ``theorem`` selects the bound: 1 for fixed support (``size`` = sparsity),
    2 for random support (``size`` = expected support size; ``censuses``
    required).  The moment order ranges over ``orders`` (default 3..7 for the
    fixed-support bound, 2..4 for the random-support one), ``beta`` over a
    hundredth-step grid around one half, ``kappa`` is set to equality in its
    budget, and for the random-support bound ``alpha`` is searched over a
    logarithmic grid.
    """
    if theorem == 1:
        orders = tuple(orders) if orders is not None else tuple(range(3, 8))
        candidates = _optimize_fixed(size, samples, dimension, orders, beta_grid)
    elif theorem == 2:
        if censuses is None:
            raise ValueError("the random-support bound needs precomputed censuses")
        orders = tuple(orders) if orders is not None else (2, 3, 4)
        candidates = _optimize_random(
            size, samples, dimension, orders, beta_grid, alpha_grid, censuses
        )
    else:
        raise ValueError("theorem must be 1 or 2")
    best = None
    for report in candidates:
        if best is None or report.failure_bound < best.failure_bound:
            best = report
    return best if best is not None else _invalid_report(None)


def _optimize_fixed(sparsity, samples, dimension, orders, beta_grid):
    for n in orders:
        powers = block_exponents(n)
        for beta in beta_grid:
            a = sum(beta ** (n / k) for k in powers)
            if a >= 1:
                continue
            kappa = kappa_at_equality(a, sparsity**1.5)
            params = FixedSupportParams(
                sparsity, samples, dimension, n, beta, kappa, powers
            )
            report = fixed_support_bound(params)
            if report.params_valid:
                yield report


def _optimize_random(et, samples, dimension, orders, beta_grid, alpha_grid, censuses):
    for n in orders:
        powers = block_exponents(n)
        for beta in beta_grid:
            a = sum(beta ** (n / k) for k in powers)
            if a >= 1:
                continue
            for alpha in alpha_grid:
                kappa = kappa_at_equality(a, ((alpha + 1) * et) ** 1.5)
                params = RandomSupportParams(
                    et, samples, dimension, n, alpha, beta, kappa, powers
                )
                report = random_support_bound(params, censuses)
                if report.params_valid:
                    yield report


def moment_order_for_oversampling(theta: float, beta: float) -> int:
    """The moment order ``floor(beta**3 * theta / 8)`` used to derive the
    sample-complexity corollary from the fixed-support bound.
    """
    if theta <= 0 or not 0 < beta < 1:
        raise ValueError("need theta > 0 and beta in (0, 1)")
    return math.floor(beta**3 * theta / 8)


def estimate_sample_constant(
    sparsities=(5, 10, 20),
    dimensions=(1000, 10_000, 100_000),
    epsilons=(1e-1, 1e-2, 1e-3),
    orders=range(2, 11),
    c_values=range(1, 61),
) -> float:
    """Empirical estimate of the constant ``C`` such that
    ``samples >= C * sparsity * (ln(dimension) + ln(1/eps))`` drives the
    optimized fixed-support bound below ``eps`` across the whole grid.

    Returns the largest per-cell minimal ``C`` (infinity if some grid cell
    never succeeds within ``c_values``).
    """
    worst = 0.0
    for M, D, eps in _iproduct(sparsities, dimensions, epsilons):
        scale = M * (math.log(D) + math.log(1 / eps))
        needed = math.inf
        for c in c_values:
            N = math.ceil(c * scale)
            report = optimize_bound(1, M, N, D, orders=orders)
            if report.params_valid and report.failure_bound <= eps:
                needed = float(c)
                break
        worst = max(worst, needed)
    return worst
