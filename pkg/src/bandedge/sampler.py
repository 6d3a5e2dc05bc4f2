"""Sampling and exhaustive enumeration of random periodic band matrices.

Matrices are Hermitian, indexed by Z/NZ, with zero diagonal and
independent unit-modulus entries on the circular band
0 < |u-v|_N <= W.  Symmetry class beta=1 draws signs +-1 (real
symmetric), beta=2 draws phases exp(2 pi i t) (complex Hermitian).

Storage is by band offset: for each offset d the entry H[u, u+d mod N]
lives in a length-N array (length N/2 for the antipodal offset d = N/2
of an even N, whose pairs would otherwise be stored twice).  That keeps
memory and matvec cost at O(N*W).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import BudgetError

SIGNS = 1   # beta = 1, random-sign real symmetric class
PHASES = 2  # beta = 2, random-phase complex Hermitian class

ENUMERATION_EDGE_BUDGET = 24


@dataclass(frozen=True)
class BandParams:
    """Ensemble description: size N, half-bandwidth W, symmetry class beta."""

    n_sites: int
    half_bandwidth: int
    beta: int = SIGNS

    def __post_init__(self):
        n, w = self.n_sites, self.half_bandwidth
        if n < 2:
            raise ValueError(f"n_sites must be >= 2, got {n}")
        if not 1 <= w <= n // 2:
            raise ValueError(f"half_bandwidth must satisfy 1 <= W <= N/2, got W={w}, N={n}")
        if self.beta not in (SIGNS, PHASES):
            raise ValueError(f"beta must be 1 (signs) or 2 (phases), got {self.beta}")

    def band_offsets(self) -> tuple[list[int], bool]:
        """Paired offsets 1..min(W, (N-1)//2), plus an antipodal flag for
        the self-paired offset N/2 of an even N."""
        n, w = self.n_sites, self.half_bandwidth
        paired = list(range(1, min(w, (n - 1) // 2) + 1))
        antipodal = n % 2 == 0 and w >= n // 2
        return paired, antipodal

    @property
    def degree(self) -> int:
        paired, antipodal = self.band_offsets()
        return 2 * len(paired) + (1 if antipodal else 0)

    @property
    def n_edges(self) -> int:
        """Number of independent band entries (graph edges)."""
        paired, antipodal = self.band_offsets()
        return self.n_sites * len(paired) + (self.n_sites // 2 if antipodal else 0)


@dataclass(frozen=True)
class SeedSpec:
    """Deterministic per-replicate randomness: the stream is a pure
    function of (master_seed, replicate_index)."""

    master_seed: int
    replicate_index: int = 0

    RNG_NAME = "numpy:PCG64/SeedSequence(master_seed, replicate_index, *tags)"

    def __post_init__(self):
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if self.replicate_index < 0:
            raise ValueError("replicate_index must be >= 0")

    def rng(self, *tags: int) -> np.random.Generator:
        """Generator for this replicate; extra integer tags derive
        independent sub-streams (e.g. per probe)."""
        entropy = (self.master_seed, self.replicate_index) + tuple(tags)
        return np.random.default_rng(np.random.SeedSequence(entropy))


class BandMatrix:
    """Hermitian periodic band matrix with zero diagonal.

    ``bands`` maps each positive offset d to the array of stored upper
    entries c_d with c_d[u] = H[u, (u+d) % N]; the conjugate entries are
    implied.  Instances are immutable after construction.
    """

    def __init__(self, params: BandParams, bands: dict[int, np.ndarray]):
        self.params = params
        paired, antipodal = params.band_offsets()
        expected = {d: params.n_sites for d in paired}
        if antipodal:
            expected[params.n_sites // 2] = params.n_sites // 2
        if set(bands) != set(expected):
            raise ValueError(f"band offsets {sorted(bands)} do not match params {sorted(expected)}")
        store = {}
        for d, arr in bands.items():
            arr = np.asarray(arr)
            if arr.shape != (expected[d],):
                raise ValueError(f"offset {d}: expected length {expected[d]}, got {arr.shape}")
            arr = arr.astype(np.float64 if params.beta == SIGNS else np.complex128)
            arr.setflags(write=False)
            store[d] = arr
        self.bands = store

    @property
    def n_sites(self) -> int:
        return self.params.n_sites

    def entry(self, u: int, v: int):
        """H[u, v] (0 on the diagonal and outside the band)."""
        n = self.n_sites
        u, v = u % n, v % n
        if u == v:
            return 0.0 if self.params.beta == SIGNS else 0.0 + 0.0j
        d = (v - u) % n
        if d in self.bands:
            arr = self.bands[d]
            return arr[u] if len(arr) == n else arr[u % len(arr)]
        d = (u - v) % n
        if d in self.bands:
            arr = self.bands[d]
            val = arr[v] if len(arr) == n else arr[v % len(arr)]
            return np.conj(val) if self.params.beta == PHASES else val
        return 0.0 if self.params.beta == SIGNS else 0.0 + 0.0j

    def band_items(self) -> Iterator[tuple[int, int, complex]]:
        """Stored entries as (u, v, value) with v = u + d mod N."""
        n = self.n_sites
        for d in sorted(self.bands):
            arr = self.bands[d]
            for u in range(len(arr)):
                yield u, (u + d) % n, arr[u]

    def to_dense(self) -> np.ndarray:
        n = self.n_sites
        dtype = np.float64 if self.params.beta == SIGNS else np.complex128
        h = np.zeros((n, n), dtype=dtype)
        u = np.arange(n)
        for d, arr in self.bands.items():
            if len(arr) == n:
                v = (u + d) % n
                h[u, v] = arr
                h[v, u] = np.conj(arr) if self.params.beta == PHASES else arr
            else:  # antipodal offset, stored once
                uu = np.arange(n // 2)
                vv = uu + n // 2
                h[uu, vv] = arr
                h[vv, uu] = np.conj(arr) if self.params.beta == PHASES else arr
        return h

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """Banded product H @ x in O(N*W)."""
        n = self.n_sites
        x = np.asarray(x)
        if x.shape != (n,):
            raise ValueError(f"dimension mismatch: expected ({n},), got {x.shape}")
        dtype = np.result_type(x.dtype, np.float64 if self.params.beta == SIGNS else np.complex128)
        y = np.zeros(n, dtype=dtype)
        for d, arr in self.bands.items():
            if len(arr) == n:
                y += arr * np.roll(x, -d)
                conj = np.conj(arr) if self.params.beta == PHASES else arr
                y += np.roll(conj * x, d)
            else:
                full = np.concatenate([arr, np.conj(arr) if self.params.beta == PHASES else arr])
                y += full * np.roll(x, -(n // 2))
        return y


def sample_band_matrix(params: BandParams, seed: SeedSpec) -> BandMatrix:
    """Draw a matrix of the ensemble; deterministic given (params, seed).

    Entries are drawn offset by offset in ascending offset order, one
    vectorised draw per offset.  beta=1 entries are uniform on {+1,-1};
    beta=2 entries are exp(2 pi i t) with t uniform on [0,1), which
    avoids any angle-wrapping bias.
    """
    rng = seed.rng()
    paired, antipodal = params.band_offsets()
    n = params.n_sites
    bands: dict[int, np.ndarray] = {}
    offsets = paired + ([n // 2] if antipodal else [])
    for d in offsets:
        size = n // 2 if (antipodal and d == n // 2) else n
        if params.beta == SIGNS:
            bands[d] = rng.integers(0, 2, size).astype(np.float64) * 2.0 - 1.0
        else:
            bands[d] = np.exp(2j * np.pi * rng.random(size))
    return BandMatrix(params, bands)


def matvec(h: BandMatrix, x: np.ndarray) -> np.ndarray:
    """Banded Hermitian product H @ x (see :meth:`BandMatrix.matvec`)."""
    return h.matvec(x)


def validate(target, params: BandParams | None = None) -> list[str]:
    """Check every structural invariant; returns human-readable violations.

    Accepts either a :class:`BandMatrix` (checks stored entries) or a
    dense square array together with ``params`` (checks zero diagonal,
    Hermitian symmetry, band support, and entry modulus), so corrupted
    matrices can be diagnosed too.  An empty list means valid.
    """
    if isinstance(target, BandMatrix):
        return _validate_bands(target)
    if params is None:
        raise ValueError("params is required when validating a dense array")
    return _validate_dense(np.asarray(target), params)


def _unit_violations(label: str, values: np.ndarray, beta: int) -> list[str]:
    out = []
    if beta == SIGNS:
        bad = np.nonzero(values * values != 1.0)[0]
        for i in bad[:10]:
            out.append(f"{label}: entry {i} = {values[i]} not in {{+1,-1}}")
    else:
        bad = np.nonzero(np.abs(np.abs(values) - 1.0) > 1e-12)[0]
        for i in bad[:10]:
            out.append(f"{label}: entry {i} has |value| = {abs(values[i])} != 1")
    return out


def _validate_bands(h: BandMatrix) -> list[str]:
    violations = []
    for d in sorted(h.bands):
        violations += _unit_violations(f"offset {d}", h.bands[d], h.params.beta)
    return violations


def _validate_dense(m: np.ndarray, params: BandParams) -> list[str]:
    n = params.n_sites
    w = params.half_bandwidth
    violations = []
    if m.shape != (n, n):
        return [f"shape {m.shape} does not match n_sites {n}"]
    diag = np.diagonal(m)
    for u in np.nonzero(diag != 0)[0][:10]:
        violations.append(f"diagonal violation at {u}: H[{u},{u}] = {diag[u]} != 0")
    asym = m - m.conj().T
    if np.max(np.abs(asym)) > 1e-12:
        uv = np.unravel_index(np.argmax(np.abs(asym)), asym.shape)
        violations.append(f"hermitian violation at {uv}: residual {np.max(np.abs(asym)):.3e}")
    u_idx, v_idx = np.nonzero(m)
    circ = np.minimum((u_idx - v_idx) % n, (v_idx - u_idx) % n)
    out_of_band = (circ > w) & (u_idx != v_idx)
    for i in np.nonzero(out_of_band)[0][:10]:
        violations.append(f"band violation at ({u_idx[i]},{v_idx[i]}): |u-v|_N = {circ[i]} > {w}")
    in_band = (circ <= w) & (circ > 0) & (u_idx < v_idx)
    vals = m[u_idx[in_band], v_idx[in_band]]
    violations += _unit_violations("in-band", vals, params.beta)
    return violations


def enumerate_sign_assignments(
    params: BandParams, max_edges: int = ENUMERATION_EDGE_BUDGET
) -> Iterator[BandMatrix]:
    """Yield every sign matrix of the beta=1 ensemble exactly once.

    The stream has length 2**n_edges; bit j of the enumeration index
    sets the j-th stored entry in (ascending offset, ascending u) order.
    Exact-expectation oracle for small ensembles.
    """
    if params.beta != SIGNS:
        raise ValueError("exhaustive enumeration is only defined for beta=1 (signs)")
    e = params.n_edges
    if e > max_edges:
        raise BudgetError(f"enumerate_sign_assignments: {e} edges exceed budget {max_edges}")
    paired, antipodal = params.band_offsets()
    n = params.n_sites
    offsets = paired + ([n // 2] if antipodal else [])
    sizes = [n // 2 if (antipodal and d == n // 2) else n for d in offsets]
    for idx in range(1 << e):
        bands = {}
        bit = 0
        for d, size in zip(offsets, sizes):
            arr = np.empty(size)
            for j in range(size):
                arr[j] = 1.0 if (idx >> bit) & 1 else -1.0
                bit += 1
            bands[d] = arr
        yield BandMatrix(params, bands)


def dump_band_entries(h: BandMatrix, path) -> None:
    """Write the stored band entries as CSV rows u,v,re,im."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["u", "v", "re", "im"])
        for u, v, val in h.band_items():
            c = complex(val)
            writer.writerow([u, v, f"{c.real:.17g}", f"{c.imag:.17g}"])


def load_band_entries(path, params: BandParams) -> BandMatrix:
    """Inverse of :func:`dump_band_entries`."""
    paired, antipodal = params.band_offsets()
    n = params.n_sites
    bands = {
        d: np.zeros(n, dtype=np.complex128) for d in paired
    }
    if antipodal:
        bands[n // 2] = np.zeros(n // 2, dtype=np.complex128)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            u, v = int(row["u"]), int(row["v"])
            val = float(row["re"]) + 1j * float(row["im"])
            d = (v - u) % n
            if d not in bands:
                raise ValueError(f"entry ({u},{v}) lies outside the stored band")
            bands[d][u] = val
    if params.beta == SIGNS:
        bands = {d: arr.real for d, arr in bands.items()}
    return BandMatrix(params, bands)


def moment_normalization(w: int) -> float:
    """Scale 2*sqrt(2W-1) used by the non-backtracking moment machinery."""
    return 2.0 * math.sqrt(2 * w - 1)


def edge_normalization(w: int) -> float:
    """Scale 2*sqrt(2W) used by the edge-statistics theorems."""
    return 2.0 * math.sqrt(2 * w)
