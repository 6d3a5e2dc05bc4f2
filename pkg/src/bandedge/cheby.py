"""Chebyshev machinery for non-backtracking moments.

Chebyshev polynomials of the second kind U_n (U_n(cos t) =
sin((n+1)t)/sin t, with U_{-2} = U_{-1} = 0) underlie the
non-backtracking operators

    M_n = q^{n/2} [ U_n(H / (2 sqrt(q))) - q^{-1} U_{n-2}(H / (2 sqrt(q))) ],
    q = 2W - 1,

whose entries count signed non-backtracking paths.  Equivalently, and
as implemented here,

    M_1 = H,  M_2 = H^2 - 2W I,  M_{n+1} = H M_n - (2W - 1) M_{n-1}  (n >= 2):

the first step leaves 2W directions, every later step 2W - 1.  Note the
scale 2 sqrt(2W - 1) of the moment machinery differs from the edge
statistics scale 2 sqrt(2W); conversion helpers live in
:mod:`bandedge.sampler`.  These identities assume the band does not
wrap (2W <= N - 1), where the vertex degree equals 2W.

The module also provides trace evaluation (dense and stochastic), the
product-linearisation identity U_k U_l = sum U_{|l-k|+2m}, the Wigner
semicircle distribution function, spectral-measure coefficients, and an
Erdos-Turan-type distance bound expressed through those coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetError
from .sampler import BandMatrix, SeedSpec

DENSE_TRACE_BUDGET = 4096
PRODUCT_BUDGET = 4_000_000


def chebyshev_u(n: int, x):
    """U_n(x) by the three-term recurrence; scalar or ndarray x.

    U_0 = 1, U_1 = 2x, U_{n+1} = 2x U_n - U_{n-1}; n = -1, -2 give 0.
    """
    if n <= -1:
        if n < -2:
            raise ValueError("degree below -2 is not defined")
        return np.zeros_like(np.asarray(x, dtype=float)) if np.ndim(x) else 0.0
    x = np.asarray(x, dtype=float) if np.ndim(x) else float(x)
    prev = np.ones_like(x) if np.ndim(x) else 1.0
    if n == 0:
        return prev
    cur = 2.0 * x
    for _ in range(n - 1):
        prev, cur = cur, 2.0 * x * cur - prev
    return cur


@dataclass
class ChebExpansion:
    """Finitely supported expansion sum_k c_k U_k with integer degrees."""

    coefficients: dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        self.coefficients = {
            int(k): float(v) for k, v in self.coefficients.items() if v != 0.0
        }
        if any(k < 0 for k in self.coefficients):
            raise ValueError("expansion degrees must be nonnegative")

    def evaluate(self, x: float) -> float:
        return sum(c * chebyshev_u(k, x) for k, c in self.coefficients.items())

    def degree(self) -> int:
        return max(self.coefficients, default=0)


def linearize_pair(k: int, l: int) -> ChebExpansion:
    """Expansion of the product U_k * U_l.

    U_k U_l = sum_{m=0}^{min(k,l)} U_{|l-k| + 2m}; all coefficients one.
    """
    if k < 0 or l < 0:
        raise ValueError("degrees must be nonnegative")
    return ChebExpansion({abs(l - k) + 2 * m: 1.0 for m in range(min(k, l) + 1)})


def expand_chebyshev_product(factors: list[int], budget: int = PRODUCT_BUDGET) -> ChebExpansion:
    """Expansion of prod_j U_{factors[j]} by repeated linearisation."""
    size = 1
    for d in factors:
        if d < 0:
            raise ValueError("degrees must be nonnegative")
        size *= d + 1
    if size > budget:
        raise BudgetError(f"expand_chebyshev_product: state size {size} exceeds budget {budget}")
    if not factors:
        return ChebExpansion({0: 1.0})
    coeffs = {factors[0]: 1.0}
    for d in factors[1:]:
        nxt: dict[int, float] = {}
        for deg, c in coeffs.items():
            for m in range(min(deg, d) + 1):
                key = abs(deg - d) + 2 * m
                nxt[key] = nxt.get(key, 0.0) + c
        coeffs = nxt
    return ChebExpansion(coeffs)


def _first_step_weight(h: BandMatrix) -> int:
    return 2 * h.params.half_bandwidth


def nb_moment_traces(h: BandMatrix, n_max: int, budget: int = DENSE_TRACE_BUDGET) -> np.ndarray:
    """Exact traces tr M_0 .. tr M_{n_max} of the non-backtracking operators.

    Dense recursion, cost O(n_max * N^3); tr M_0 = N and tr M_1 = 0 hold
    identically, tr M_2 = 0 because (H^2)_{uu} = 2W.
    """
    n = h.n_sites
    if n > budget:
        raise BudgetError(f"nb_moment_traces: N = {n} exceeds dense budget {budget}")
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    traces = np.empty(n_max + 1)
    traces[0] = float(n)
    if n_max == 0:
        return traces
    a = h.to_dense()
    prev = np.eye(n, dtype=a.dtype)
    cur = a
    traces[1] = float(np.trace(cur).real)
    w2 = _first_step_weight(h)
    for k in range(2, n_max + 1):
        c = w2 if k == 2 else w2 - 1
        prev, cur = cur, a @ cur - c * prev
        traces[k] = float(np.trace(cur).real)
    return traces


def hn_apply(h: BandMatrix, n: int, x: np.ndarray) -> np.ndarray:
    """M_n @ x through the coupled two-vector recursion, O(n*N*W)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    x = np.asarray(x)
    if x.shape != (h.n_sites,):
        raise ValueError(f"dimension mismatch: expected ({h.n_sites},), got {x.shape}")
    if n == 0:
        return x.copy()
    prev = x
    cur = h.matvec(x)
    w2 = _first_step_weight(h)
    for k in range(2, n + 1):
        c = w2 if k == 2 else w2 - 1
        prev, cur = cur, h.matvec(cur) - c * prev
    return cur


@dataclass(frozen=True)
class TraceEstimate:
    estimate: float
    std_error: float


def hutchinson_trace(h: BandMatrix, n: int, probes: int, seed: SeedSpec) -> TraceEstimate:
    """Stochastic estimate of tr M_n from Rademacher probes.

    Each probe z has independent +-1 entries and contributes z . (M_n z),
    an unbiased sample of the trace; probe p draws from the sub-stream
    seed.rng(p), so the result does not depend on evaluation order.
    """
    if probes < 2:
        raise ValueError("need at least 2 probes for a standard error")
    samples = np.empty(probes)
    for p in range(probes):
        z = seed.rng(p).integers(0, 2, h.n_sites).astype(np.float64) * 2.0 - 1.0
        samples[p] = float(np.real(np.dot(z, hn_apply(h, n, z))))
    return TraceEstimate(
        estimate=float(samples.mean()),
        std_error=float(samples.std(ddof=1) / math.sqrt(probes)),
    )


def wigner_cdf(alpha):
    """Distribution function of the semicircle density (2/pi) sqrt(1-x^2).

    Closed form 1/2 + (alpha sqrt(1-alpha^2) + arcsin alpha)/pi on [-1,1],
    clamped to 0 and 1 outside.
    """
    a = np.clip(np.asarray(alpha, dtype=float), -1.0, 1.0)
    out = 0.5 + (a * np.sqrt(1.0 - a * a) + np.arcsin(a)) / np.pi
    return float(out) if np.ndim(alpha) == 0 else out


@dataclass
class SpectralMeasure:
    """Discrete measure: sorted support points with positive weights."""

    support_points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.support_points = np.asarray(self.support_points, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.support_points.shape != self.weights.shape:
            raise ValueError("points and weights must have matching shapes")
        if np.any(self.weights <= 0):
            raise ValueError("weights must be positive")
        if np.any(np.diff(self.support_points) < 0):
            raise ValueError("support points must be sorted ascending")

    @classmethod
    def empirical(cls, points) -> "SpectralMeasure":
        """Probability measure putting mass 1/n on each point."""
        pts = np.sort(np.asarray(points, dtype=float))
        return cls(pts, np.full(pts.shape, 1.0 / len(pts)))

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())


def measure_cheb_coeff(mu: SpectralMeasure, n: int) -> float:
    """n-th Chebyshev coefficient integral U_n d mu."""
    return float(np.sum(mu.weights * chebyshev_u(n, mu.support_points)))


def erdos_turan_gap_bound(mu_hat: list[float], alpha: float, s: int) -> float:
    """Bound on |mu(alpha) - Wigner(alpha)| from the first s coefficients.

    With rho(alpha; s) = max(1 - |alpha|, s^-2), returns

        rho/s + sqrt(rho) * sum_{n=1}^{s} |mu_hat(n)| / n.

    The inequality holds up to an absolute constant which is not
    quantified anywhere; it is taken as 1 here, so the returned value is
    a diagnostic scale rather than a certified bound.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    if len(mu_hat) != s:
        raise ValueError(f"expected {s} coefficients, got {len(mu_hat)}")
    rho = max(1.0 - abs(alpha), s**-2)
    tail = sum(abs(c) / n for n, c in enumerate(mu_hat, start=1))
    return rho / s + math.sqrt(rho) * tail
