"""Shared oracles for the test suite."""

import numpy as np

from bandedge.cheby import nb_moment_traces
from bandedge.sampler import BandParams, SeedSpec, enumerate_sign_assignments


def exhaustive_trace_table(params: BandParams, n_max: int) -> np.ndarray:
    """tr M_0..tr M_{n_max} for every sign assignment, one row per matrix.

    Entries are integer-valued and exact (all magnitudes stay far below
    2**53, so float arithmetic on them is lossless).
    """
    rows = [nb_moment_traces(m, n_max) for m in enumerate_sign_assignments(params)]
    return np.array(rows)


def exhaustive_joint_moment(table: np.ndarray, lengths) -> int:
    """Exact ensemble average of prod_j tr M_{n(j)} from a trace table."""
    prod = np.ones(len(table))
    for n in lengths:
        prod = prod * table[:, n]
    total = float(prod.sum())
    count = len(table)
    assert total == int(total), "trace products should be exact integers"
    total = int(total)
    assert total % count == 0, "ensemble sum should be divisible by the ensemble size"
    return total // count


def batched_phase_traces(
    params: BandParams, n_max: int, n_samples: int, seed: SeedSpec, chunk: int = 20_000
) -> np.ndarray:
    """tr M_0..tr M_{n_max} for ``n_samples`` random phase matrices.

    Vectorised over the ensemble: samples the independent band entries
    for a whole chunk at once and runs the operator recursion on stacked
    matrices.
    """
    assert params.beta == 2
    n = params.n_sites
    paired, antipodal = params.band_offsets()
    out = np.empty((n_samples, n_max + 1))
    pos = 0
    block = 0
    eye = np.eye(n)
    while pos < n_samples:
        b = min(chunk, n_samples - pos)
        rng = seed.rng(block)
        h = np.zeros((b, n, n), dtype=np.complex128)
        u = np.arange(n)
        for d in paired:
            c = np.exp(2j * np.pi * rng.random((b, n)))
            h[:, u, (u + d) % n] = c
            h[:, (u + d) % n, u] = np.conj(c)
        if antipodal:
            uu = np.arange(n // 2)
            c = np.exp(2j * np.pi * rng.random((b, n // 2)))
            h[:, uu, uu + n // 2] = c
            h[:, uu + n // 2, uu] = np.conj(c)
        prev = np.broadcast_to(eye, (b, n, n)).astype(np.complex128)
        cur = h.copy()
        out[pos : pos + b, 0] = n
        if n_max >= 1:
            out[pos : pos + b, 1] = np.einsum("bii->b", cur).real
        w2 = 2 * params.half_bandwidth
        for k in range(2, n_max + 1):
            c = w2 if k == 2 else w2 - 1
            prev, cur = cur, np.matmul(h, cur) - c * prev
            out[pos : pos + b, k] = np.einsum("bii->b", cur).real
        pos += b
        block += 1
    return out
