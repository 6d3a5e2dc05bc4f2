"""Monte Carlo spectral-edge experiments.

Eigenvalues throughout are those of H / (2 sqrt(2W)), the normalisation
under which the empirical spectral measure converges to the semicircle
on [-1, 1].  Two edge scalings coexist:

  rmt      right: 2 N^{2/3} (alpha_max - 1), counting threshold
           1 - lambda / (2 N^{2/3}); raw eigenvalue counts.
  poisson  right: 2 W^{4/5} (1 - alpha_max), counting threshold
           1 - lambda / (2 W^{4/5}); counts carry the factor W^{6/5}/N.

Counting intervals use a strict lower endpoint on the right edge (count
of eigenvalues > threshold) and its mirror image on the left.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from multiprocessing import get_context

import numpy as np

from .errors import BudgetError, NumericError
from .sampler import BandMatrix, BandParams, SeedSpec, edge_normalization, sample_band_matrix

DENSE_EIGEN_BUDGET = 4096

REGIMES = ("rmt", "poisson")


def eigenvalues(h: BandMatrix, budget: int = DENSE_EIGEN_BUDGET, verify: bool = False) -> np.ndarray:
    """Ascending eigenvalues of H / (2 sqrt(2W)) by dense eigensolve.

    Sizes above ``budget`` are rejected rather than silently
    approximated.  With ``verify`` the extreme eigenpairs are recomputed
    with eigenvectors and their residuals checked against 1e-8 * ||H||.
    """
    n = h.n_sites
    if n > budget:
        raise BudgetError(f"eigenvalues: N = {n} exceeds dense budget {budget}")
    scale = edge_normalization(h.params.half_bandwidth)
    dense = h.to_dense()
    try:
        vals = np.linalg.eigvalsh(dense / scale)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigensolve failed to converge: {exc}") from exc
    if verify:
        _check_extreme_residuals(h, dense, vals, scale)
    if abs(vals.sum()) > 1e-8 * n:
        raise NumericError(f"trace residual {vals.sum():.3e} (zero diagonal demands zero trace)")
    return vals


def _check_extreme_residuals(h: BandMatrix, dense: np.ndarray, vals: np.ndarray, scale: float):
    w, v = np.linalg.eigh(dense / scale)
    norm_h = abs(vals[-1]) * scale if vals[-1] else 1.0
    for idx in (0, len(vals) - 1):
        residual = np.linalg.norm(dense @ v[:, idx] - w[idx] * scale * v[:, idx])
        if residual > 1e-8 * max(norm_h, 1.0):
            raise NumericError(f"extreme eigenpair residual {residual:.3e} too large")


def eigen_system(h: BandMatrix, budget: int = DENSE_EIGEN_BUDGET) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and eigenvectors of the normalised matrix."""
    n = h.n_sites
    if n > budget:
        raise BudgetError(f"eigen_system: N = {n} exceeds dense budget {budget}")
    scale = edge_normalization(h.params.half_bandwidth)
    return np.linalg.eigh(h.to_dense() / scale)


@dataclass
class EdgeSample:
    """Eigenvalues of one replicate plus the extreme values."""

    params: BandParams
    seed: SeedSpec
    eigenvalues: np.ndarray
    alpha_max: float
    alpha_min: float

    @classmethod
    def compute(cls, params: BandParams, seed: SeedSpec, budget: int = DENSE_EIGEN_BUDGET) -> "EdgeSample":
        h = sample_band_matrix(params, seed)
        vals = eigenvalues(h, budget=budget)
        return cls(params=params, seed=seed, eigenvalues=vals,
                   alpha_max=float(vals[-1]), alpha_min=float(vals[0]))


@dataclass(frozen=True)
class ScaledExtremes:
    right: float
    left: float


def _check_regime(regime: str):
    if regime not in REGIMES:
        raise ValueError(f"regime must be one of {REGIMES}, got {regime!r}")


def _edge_scale(params: BandParams, regime: str) -> float:
    if regime == "rmt":
        return 2.0 * params.n_sites ** (2.0 / 3.0)
    return 2.0 * params.half_bandwidth ** (4.0 / 5.0)


def scaled_extremes(sample: EdgeSample, regime: str) -> ScaledExtremes:
    """Edge fluctuations in the units of the requested regime.

    rmt:     right = 2 N^{2/3} (alpha_max - 1),  left = -2 N^{2/3} (alpha_min + 1)
    poisson: right = 2 W^{4/5} (1 - alpha_max),  left =  2 W^{4/5} (1 + alpha_min)
    """
    _check_regime(regime)
    s = _edge_scale(sample.params, regime)
    if regime == "rmt":
        return ScaledExtremes(right=s * (sample.alpha_max - 1.0), left=-s * (sample.alpha_min + 1.0))
    return ScaledExtremes(right=s * (1.0 - sample.alpha_max), left=s * (1.0 + sample.alpha_min))


@dataclass
class CountingCurve:
    """Edge-counting measure sampled on an ascending lambda grid."""

    lambda_grid: np.ndarray
    values: np.ndarray
    regime: str
    side: str

    def __post_init__(self):
        self.lambda_grid = np.asarray(self.lambda_grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        _check_regime(self.regime)
        if self.side not in ("right", "left"):
            raise ValueError("side must be 'right' or 'left'")
        if np.any(np.diff(self.lambda_grid) <= 0):
            raise ValueError("lambda grid must be strictly ascending")
        if np.any(np.diff(self.values) < -1e-12):
            raise ValueError("counting curve must be nondecreasing")


def _edge_counts(vals: np.ndarray, grid: np.ndarray, scale: float) -> tuple[np.ndarray, np.ndarray]:
    """Raw counts beyond the sliding right/left thresholds."""
    thr_r = 1.0 - grid / scale
    thr_l = -1.0 + grid / scale
    n = len(vals)
    counts_r = n - np.searchsorted(vals, thr_r, side="right")   # eigenvalues > threshold
    counts_l = np.searchsorted(vals, thr_l, side="right")       # eigenvalues <= threshold
    return counts_r.astype(float), counts_l.astype(float)


def counting_curves(sample: EdgeSample, regime: str, lambda_grid) -> tuple[CountingCurve, CountingCurve]:
    """Right and left counting curves of one replicate."""
    _check_regime(regime)
    grid = np.asarray(lambda_grid, dtype=float)
    counts_r, counts_l = _edge_counts(sample.eigenvalues, grid, _edge_scale(sample.params, regime))
    if regime == "poisson":
        factor = sample.params.half_bandwidth ** 1.2 / sample.params.n_sites
        counts_r = counts_r * factor
        counts_l = counts_l * factor
    return (
        CountingCurve(grid, counts_r, regime, "right"),
        CountingCurve(grid, counts_l, regime, "left"),
    )


@dataclass
class EnsembleConfig:
    params: BandParams
    replicates: int
    regime: str
    lambda_grid: np.ndarray
    master_seed: int
    threads: int = 1
    eigen_budget: int = DENSE_EIGEN_BUDGET

    def __post_init__(self):
        _check_regime(self.regime)
        if self.replicates < 1:
            raise ValueError("need at least one replicate")
        self.lambda_grid = np.asarray(self.lambda_grid, dtype=float)


@dataclass
class EnsembleSummary:
    """Per-replicate edge statistics plus aggregate curves."""

    params: BandParams
    regime: str
    replicate_count: int
    lambda_grid: np.ndarray
    alpha_max_samples: np.ndarray
    alpha_min_samples: np.ndarray
    scaled_max_samples: np.ndarray
    scaled_min_samples: np.ndarray
    norm_ratios: np.ndarray
    mean_curve_R: CountingCurve = field(repr=False)
    mean_curve_L: CountingCurve = field(repr=False)
    curve_std_R: np.ndarray = field(repr=False)


def _replicate_worker(args):
    n_sites, w, beta, master_seed, r, grid, regime_scale, budget = args
    params = BandParams(n_sites, w, beta)
    sample = EdgeSample.compute(params, SeedSpec(master_seed, r), budget=budget)
    counts_r, counts_l = _edge_counts(sample.eigenvalues, np.asarray(grid), regime_scale)
    norm = max(abs(sample.alpha_max), abs(sample.alpha_min))
    return r, sample.alpha_max, sample.alpha_min, counts_r, counts_l, norm


def ensemble_run(config: EnsembleConfig) -> EnsembleSummary:
    """Run the replicates and aggregate order-independently.

    Replicate r draws from SeedSpec(master_seed, r), so the summary is a
    pure function of the configuration regardless of thread count or
    completion order.
    """
    params = config.params
    grid = config.lambda_grid
    regime_scale = _edge_scale(params, config.regime)
    jobs = [
        (params.n_sites, params.half_bandwidth, params.beta,
         config.master_seed, r, tuple(grid), regime_scale, config.eigen_budget)
        for r in range(config.replicates)
    ]
    results = [None] * config.replicates
    if config.threads > 1:
        with ProcessPoolExecutor(max_workers=config.threads, mp_context=get_context("spawn")) as pool:
            for res in pool.map(_replicate_worker, jobs):
                results[res[0]] = res
    else:
        for job in jobs:
            res = _replicate_worker(job)
            results[res[0]] = res

    alpha_max = np.array([res[1] for res in results])
    alpha_min = np.array([res[2] for res in results])
    counts_r = np.vstack([res[3] for res in results])
    counts_l = np.vstack([res[4] for res in results])
    norms = np.array([res[5] for res in results])

    if config.regime == "rmt":
        scaled_max = regime_scale * (alpha_max - 1.0)
        scaled_min = -regime_scale * (alpha_min + 1.0)
        factor = 1.0
    else:
        scaled_max = regime_scale * (1.0 - alpha_max)
        scaled_min = regime_scale * (1.0 + alpha_min)
        factor = params.half_bandwidth ** 1.2 / params.n_sites

    mean_r = counts_r.mean(axis=0) * factor
    mean_l = counts_l.mean(axis=0) * factor
    std_r = (counts_r * factor).std(axis=0, ddof=1) if config.replicates > 1 else np.zeros_like(mean_r)
    return EnsembleSummary(
        params=params,
        regime=config.regime,
        replicate_count=config.replicates,
        lambda_grid=grid,
        alpha_max_samples=alpha_max,
        alpha_min_samples=alpha_min,
        scaled_max_samples=scaled_max,
        scaled_min_samples=scaled_min,
        norm_ratios=norms,
        mean_curve_R=CountingCurve(grid, mean_r, config.regime, "right"),
        mean_curve_L=CountingCurve(grid, mean_l, config.regime, "left"),
        curve_std_R=std_r,
    )


def ks_distance(a, b) -> float:
    """Sup distance between the empirical distribution functions of two samples."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if len(a) == 0 or len(b) == 0:
        raise ValueError("samples must be nonempty")
    both = np.concatenate([a, b])
    fa = np.searchsorted(a, both, side="right") / len(a)
    fb = np.searchsorted(b, both, side="right") / len(b)
    return float(np.max(np.abs(fa - fb)))


@dataclass(frozen=True)
class TailFit:
    exponent: float
    coefficient: float


def tail_fit(curve: CountingCurve, lambda_range: tuple[float, float]) -> TailFit:
    """Least-squares power-law fit log sigma = exponent * log lambda + const.

    Uses grid points inside ``lambda_range`` with positive curve values;
    requires at least five of them.
    """
    lo, hi = lambda_range
    mask = (curve.lambda_grid >= lo) & (curve.lambda_grid <= hi) & (curve.values > 0) & (curve.lambda_grid > 0)
    if mask.sum() < 5:
        raise ValueError(f"tail_fit: only {int(mask.sum())} usable grid points in [{lo}, {hi}]")
    x = np.log(curve.lambda_grid[mask])
    y = np.log(curve.values[mask])
    slope, intercept = np.polyfit(x, y, 1)
    return TailFit(exponent=float(slope), coefficient=float(math.exp(intercept)))


def survival_consistency(summary: EnsembleSummary) -> float:
    """Sup deviation between the empirical survival function of the scaled
    maximum and exp{-(N / W^{6/5}) sigma_R(lambda)} on the grid.

    Only meaningful for narrow-band ensembles where the edge eigenvalues
    decorrelate; requires a poisson-regime summary.
    """
    if summary.regime != "poisson":
        raise ValueError("survival_consistency requires a poisson-regime summary")
    n = summary.params.n_sites
    w65 = summary.params.half_bandwidth ** 1.2
    model = np.exp(-(n / w65) * summary.mean_curve_R.values)
    grid = summary.lambda_grid
    samples = summary.scaled_max_samples
    empirical = np.array([np.mean(samples >= lam) for lam in grid])
    return float(np.max(np.abs(empirical - model)))


def norm_statistic(h: BandMatrix, budget: int = DENSE_EIGEN_BUDGET) -> float:
    """Operator norm of H / (2 sqrt(2W)) via the extreme eigenvalues."""
    vals = eigenvalues(h, budget=budget)
    return float(max(abs(vals[0]), abs(vals[-1])))


def ipr(eigvec) -> float:
    """Inverse participation ratio sum |v|^4 / (sum |v|^2)^2.

    Scale-invariant; 1/N for a flat vector, 1 for a basis vector.
    """
    v = np.asarray(eigvec)
    norm2 = float(np.sum(np.abs(v) ** 2))
    if norm2 == 0.0:
        raise ValueError("zero vector has no participation ratio")
    return float(np.sum(np.abs(v) ** 4) / norm2**2)
