"""Closed-form lower bound on the probability that a random network is localizable.

The unit square is split into M = b*b cells (b >= 3) and cell counts follow
Binomial(n, 1/M).  With connectivity radius r = 2*sqrt(2)/b, the probability
that the resulting unit-disk graph admits a spanning trilateration is at
least

    P(C.,0) * P(k=0) + sum_{i=1..u} s^i * P(C.,i) * P(k=i) * prod_{j<i} (1 - 4j/(M-j))

where k is the number of empty cells, u = floor(M/5) - 1, s is the
probability that an empty cell is densely surrounded, and P(C.,i) lower
bounds the probability of a 3-point non-corner cell given i empties.

All binomial terms are evaluated in log space via log-gamma: quantities like
C(n, i) * (1/M)**i underflow in double precision once n reaches the
thousands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

__all__ = [
    "BoundInputs",
    "BoundReport",
    "MinRadiusResult",
    "prob_clique_noncorner",
    "prob_empty_count",
    "prob_densely_surrounded",
    "localizability_lower_bound",
    "min_radius_for_target",
    "aspnes_radius",
    "bound_curve",
]


@dataclass(frozen=True)
class BoundInputs:
    """Point count n and grid resolution b (d = 2, M = b*b).

    radius defaults to 2*sqrt(2)/b, the smallest value the derivation
    supports; passing anything smaller marks the report not applicable.
    """

    n: int
    b: int
    radius: float | None = None

    def __post_init__(self):
        if self.b < 3:
            raise ValueError("b must be at least 3")
        if self.n < 1:
            raise ValueError("n must be positive")

    @property
    def M(self) -> int:
        return self.b * self.b

    @property
    def alpha(self) -> float:
        return math.sqrt(self.n / self.M)

    @property
    def default_radius(self) -> float:
        return 2.0 * math.sqrt(2.0) / self.b

    @property
    def r(self) -> float:
        return self.default_radius if self.radius is None else self.radius


@dataclass(frozen=True)
class BoundReport:
    n: int
    M: int
    clique_noncorner_prob: float      # chance of a 3-point non-corner cell
    empty_cell_prob: float            # chance one given cell is empty
    densely_surrounded_prob: float    # chance an empty cell is densely surrounded
    max_empty_cells: int              # largest empty-cell count kept in the sum
    terms: np.ndarray                 # per-i contributions, i = 0..max_empty_cells
    lower_bound: float
    clamped: bool                     # True when a negative surrounded-prob was floored
    applicable: bool                  # False when the radius is below 2*cell_edge*sqrt(2)


@dataclass(frozen=True)
class MinRadiusResult:
    M: int
    b: int
    alpha: float
    r: float
    report: BoundReport


def _log_pmf(n: int, M: int, j) -> np.ndarray:
    """log of C(n, j) * (1/M)**j * (1 - 1/M)**(n - j)."""
    j = np.asarray(j, dtype=float)
    log_p = -math.log(M)
    log_q = math.log1p(-1.0 / M)
    return (
        gammaln(n + 1)
        - gammaln(j + 1)
        - gammaln(n - j + 1)
        + j * log_p
        + (n - j) * log_q
    )


def prob_clique_noncorner(n: int, M: int) -> float:
    """Probability that at least one of the M - 4 non-corner cells holds >= 3 points."""
    if M < 5:
        raise ValueError("need M >= 5 so that non-corner cells exist")
    if n < 3:
        return 0.0
    log_q = float(logsumexp(_log_pmf(n, M, [0, 1, 2])))
    log_q = min(log_q, 0.0)
    return float(-np.expm1((M - 4) * log_q))


def prob_empty_count(n: int, M: int, i: int) -> float:
    """Probability that exactly i of the M cells are empty, treating cells as
    independent with per-cell empty probability (1 - 1/M)**n."""
    if not 0 <= i <= M:
        raise ValueError(f"i must be in [0, {M}]")
    log_p0 = n * math.log1p(-1.0 / M)
    p0 = math.exp(log_p0)
    log_c = float(gammaln(M + 1) - gammaln(i + 1) - gammaln(M - i + 1))
    if p0 >= 1.0:
        return 1.0 if i == M else 0.0
    total = log_c + i * log_p0
    if M - i > 0:
        total += (M - i) * math.log1p(-p0)
    return float(math.exp(total))


def prob_densely_surrounded(n: int, M: int) -> float:
    """Probability that the four edge-sharing neighbors of an empty cell all
    hold >= 2 points with at least one holding >= 3.

    Computed as P(all four >= 2)  -  P(all four exactly 2).  The difference
    can go negative for very small n; callers floor it with a diagnostic.
    """
    if M < 2:
        raise ValueError("need M >= 2")
    log_q1 = float(logsumexp(_log_pmf(n, M, [0, 1])))
    at_least_two = -np.expm1(min(log_q1, 0.0))
    first = float(at_least_two**4) if at_least_two > 0 else 0.0
    log_pmf2 = float(_log_pmf(n, M, 2))
    second = float(math.exp(4.0 * log_pmf2)) if n >= 2 else 0.0
    return first - second


def localizability_lower_bound(inputs: BoundInputs) -> BoundReport:
    """Evaluate every term of the lower bound for the given (n, b)."""
    n, M = inputs.n, inputs.M
    u = M // 5 - 1
    if u < 0:
        raise ValueError("M too small for the empty-cell expansion")

    log_q = float(logsumexp(_log_pmf(n, M, [0, 1, 2])))
    log_q = min(log_q, 0.0)
    p_clique = float(-np.expm1((M - 4) * log_q)) if n >= 3 else 0.0
    p_empty = float(math.exp(n * math.log1p(-1.0 / M)))
    p_surrounded = prob_densely_surrounded(n, M)

    applicable = inputs.r >= inputs.default_radius - 1e-15

    terms = np.zeros(u + 1)
    clamped = False
    terms[0] = p_clique * prob_empty_count(n, M, 0)
    if p_surrounded > 0:
        log_s = math.log(p_surrounded)
        separation = 1.0  # prod_{j=1..i-1} (1 - 4j/(M-j))
        for i in range(1, u + 1):
            if i >= 2:
                separation *= 1.0 - 4.0 * (i - 1) / (M - (i - 1))
            p_clique_i = float(-np.expm1((M - 4 - i) * log_q)) if n >= 3 else 0.0
            terms[i] = (
                math.exp(i * log_s) * p_clique_i * prob_empty_count(n, M, i) * separation
            )
    elif u >= 1:
        clamped = True  # negative surrounded-probability: those terms floor at 0

    return BoundReport(
        n=n,
        M=M,
        clique_noncorner_prob=p_clique,
        empty_cell_prob=p_empty,
        densely_surrounded_prob=p_surrounded,
        max_empty_cells=u,
        terms=terms,
        lower_bound=float(terms.sum()),
        clamped=clamped,
        applicable=applicable,
    )


def min_radius_for_target(n: int, target: float, b_max: int | None = None):
    """Smallest supported radius whose bound reaches the target probability.

    Scans b = 3, 4, ... with M = b*b and keeps the largest M whose lower
    bound is >= target; the radius 2*sqrt(2)/b shrinks as M grows.  Returns
    None when no resolution works.  The scan treats n and M as independent
    (the n = 2M+1 coupling is just one point on the curve).
    """
    if n < 19:
        raise ValueError("need n >= 19 (the coarsest grid with coupled n)")
    if not 0 < target <= 1:
        raise ValueError("target must be in (0, 1]")
    if b_max is None:
        b_max = max(3, int(math.isqrt(n)) + 2)

    best = None
    for b in range(3, b_max + 1):
        report = localizability_lower_bound(BoundInputs(n=n, b=b))
        if report.lower_bound >= target:
            best = MinRadiusResult(
                M=b * b,
                b=b,
                alpha=math.sqrt(n / (b * b)),
                r=2.0 * math.sqrt(2.0) / b,
                report=report,
            )
    return best


def aspnes_radius(n) -> float:
    """Reference radius 2*sqrt(2)*sqrt(log n)/sqrt(n) for d = 2 (natural log)."""
    if n < 2:
        raise ValueError("n must be at least 2")
    return float(2.0 * math.sqrt(2.0) * math.sqrt(math.log(n)) / math.sqrt(n))


def bound_curve(n_values, target: float):
    """Rows (n, b, M, alpha, r, lower_bound, aspnes_r) for each n with a
    feasible resolution, ordered by (n, b).  n values without a feasible b
    are skipped."""
    rows = []
    for n in sorted(int(v) for v in n_values):
        res = min_radius_for_target(n, target)
        if res is None:
            continue
        rows.append(
            {
                "n": n,
                "b": res.b,
                "M": res.M,
                "alpha": res.alpha,
                "r": res.r,
                "lower_bound": res.report.lower_bound,
                "aspnes_r": aspnes_radius(n),
            }
        )
    return rows
