"""Exhaustive combinatorial ground truth for trace moments.

A k-path is a k-tuple of closed non-backtracking walks on the circulant
band graph.  For the sign ensemble (beta=1) the expected product of
non-backtracking traces E prod_j tr M_{n(j)} equals the number of
k-paths in which every unordered edge is traversed an even number of
times; for the phase ensemble (beta=2) the traversal counts of the two
directions of every edge must agree.  This module enumerates those
k-paths directly (depth-first, with parity/balance and reachability
pruning), computes the joint moments and their cumulants, evaluates
single entries of M_n as signed path sums, and classifies each k-path's
topology by its quotient multigraph.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from .errors import BudgetError, DiagramError
from .sampler import BandMatrix, BandParams, PHASES, SIGNS

JOINT_LENGTH_BUDGET = 10
JOINT_SITES_BUDGET = 12
ENTRY_LENGTH_BUDGET = 12

KPath = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class KPathSpec:
    """Sorted tuple of closed-path lengths plus the symmetry class."""

    lengths: tuple[int, ...]
    beta: int = SIGNS

    def __post_init__(self):
        if not self.lengths:
            raise ValueError("need at least one path length")
        if any(n < 1 for n in self.lengths):
            raise ValueError("path lengths must be positive")
        if self.beta not in (SIGNS, PHASES):
            raise ValueError("beta must be 1 or 2")
        object.__setattr__(self, "lengths", tuple(sorted(self.lengths)))

    @property
    def k(self) -> int:
        return len(self.lengths)

    @property
    def total_length(self) -> int:
        return sum(self.lengths)


@dataclass(frozen=True)
class DiagramClass:
    """Numeric topology data of a k-path: genus s and quotient counts."""

    s: int
    k: int
    vertex_count: int
    edge_count: int

    def __post_init__(self):
        if self.vertex_count != 2 * self.s:
            raise DiagramError(f"vertex count {self.vertex_count} != 2s = {2 * self.s}")
        if self.edge_count != 3 * self.s - self.k:
            raise DiagramError(f"edge count {self.edge_count} != 3s-k = {3 * self.s - self.k}")
        if self.s < self.k:
            raise DiagramError(f"genus {self.s} below path count {self.k}")


def _check_budget(params: BandParams, spec: KPathSpec, budget: int):
    if spec.total_length > budget:
        raise BudgetError(f"total path length {spec.total_length} exceeds budget {budget}")
    if params.n_sites > JOINT_SITES_BUDGET:
        raise BudgetError(f"n_sites {params.n_sites} exceeds enumeration budget {JOINT_SITES_BUDGET}")


def _circ(n: int, a: int, b: int) -> int:
    d = (a - b) % n
    return min(d, n - d)


def _neighbor_table(params: BandParams) -> list[list[int]]:
    n = params.n_sites
    paired, antipodal = params.band_offsets()
    table = []
    for u in range(n):
        out = set()
        for d in paired:
            out.add((u + d) % n)
            out.add((u - d) % n)
        if antipodal:
            out.add((u + n // 2) % n)
        table.append(sorted(out))
    return table


def iter_kpaths(params: BandParams, spec: KPathSpec, budget: int = JOINT_LENGTH_BUDGET) -> Iterator[KPath]:
    """Yield every k-path satisfying the on-graph, non-backtracking,
    closedness, and edge-parity/balance conditions.

    Each path is reported as its full vertex sequence u_0 .. u_n with
    u_n = u_0.  Enumeration is depth-first over the k walks in order,
    sharing one directed-traversal ledger; branches are cut when the
    walk cannot return to its start in the remaining steps or when the
    outstanding edge imbalance exceeds the number of steps left.
    """
    _check_budget(params, spec, budget)
    n_sites = params.n_sites
    w = params.half_bandwidth
    balanced = spec.beta == PHASES
    neighbors = _neighbor_table(params)
    lengths = spec.lengths
    k = len(lengths)
    remaining_after = [sum(lengths[j + 1 :]) for j in range(k)]

    # ledger over unordered pairs: traversal-count parity (beta=1) or the
    # signed forward-minus-backward difference (beta=2); ``cost`` tracks
    # the minimum number of further steps needed to clear it.
    ledger: dict[tuple[int, int], int] = {}
    cost = 0
    finished: list[tuple[int, ...]] = []

    def update(u: int, v: int, sign: int) -> None:
        nonlocal cost
        key = (u, v) if u < v else (v, u)
        old = ledger.get(key, 0)
        if balanced:
            new = old + sign * (1 if u < v else -1)
            cost += abs(new) - abs(old)
        else:
            new = old ^ 1
            cost += 1 if new else -1
        ledger[key] = new

    def walk(j: int, path: list[int], steps_left: int) -> Iterator[KPath]:
        start = path[0]
        cur = path[-1]
        if steps_left == 0:
            if cur != start:
                return
            finished.append(tuple(path))
            yield from next_path(j + 1)
            finished.pop()
            return
        budget_left = steps_left - 1 + remaining_after[j]
        prev = path[-2] if len(path) >= 2 else None
        for v in neighbors[cur]:
            if v == prev:
                continue
            if steps_left == 1 and v != start:
                continue
            if _circ(n_sites, v, start) > w * (steps_left - 1):
                continue
            update(cur, v, +1)
            if cost <= budget_left:
                path.append(v)
                yield from walk(j, path, steps_left - 1)
                path.pop()
            update(cur, v, -1)

    def next_path(j: int) -> Iterator[KPath]:
        if j == k:
            if cost == 0:
                yield tuple(finished)
            return
        for start in range(n_sites):
            yield from walk(j, [start], lengths[j])

    yield from next_path(0)


def joint_moment_paths(params: BandParams, spec: KPathSpec, budget: int = JOINT_LENGTH_BUDGET) -> int:
    """Number of k-paths satisfying all four conditions.

    Equals E prod_j tr M_{n(j)} exactly, for either symmetry class.
    """
    return sum(1 for _ in iter_kpaths(params, spec, budget))


def _set_partitions(items: tuple[int, ...]) -> Iterator[list[tuple[int, ...]]]:
    """All partitions of ``items`` into nonempty blocks."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [(first,) + part[i]] + part[i + 1 :]
        yield [(first,)] + part


def cumulant_T(params: BandParams, spec: KPathSpec, budget: int = JOINT_LENGTH_BUDGET) -> int:
    """Joint cumulant of the non-backtracking traces.

    Defined by subtracting, over every nontrivial partition of the index
    set, the products of lower-order cumulants from the joint moment.
    Counts exactly the k-paths whose traversed edge set is connected.
    """
    _check_budget(params, spec, budget)

    @lru_cache(maxsize=None)
    def joint(lengths: tuple[int, ...]) -> int:
        return joint_moment_paths(params, KPathSpec(lengths, spec.beta), budget)

    @lru_cache(maxsize=None)
    def cumulant(lengths: tuple[int, ...]) -> int:
        total = joint(lengths)
        idx = tuple(range(len(lengths)))
        for part in _set_partitions(idx):
            if len(part) == 1:
                continue  # the trivial partition is the cumulant itself
            prod = 1
            for block in part:
                prod *= cumulant(tuple(sorted(lengths[i] for i in block)))
            total -= prod
        return total

    return cumulant(spec.lengths)


def hn_entry_via_paths(h: BandMatrix, u: int, v: int, n: int, budget: int = ENTRY_LENGTH_BUDGET):
    """Entry (M_n)_{uv} as the signed/phased sum over non-backtracking paths.

    For beta=1 the result is an exact integer-valued float; for beta=2 a
    complex sum of unit phases.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > budget:
        raise BudgetError(f"path length {n} exceeds budget {budget}")
    params = h.params
    n_sites = params.n_sites
    if n_sites > 2 * JOINT_SITES_BUDGET:
        raise BudgetError(f"n_sites {n_sites} too large for path summation")
    w = params.half_bandwidth
    neighbors = _neighbor_table(params)
    u, v = u % n_sites, v % n_sites
    total = 0.0 if params.beta == SIGNS else 0.0 + 0.0j

    def rec(prev, cur, depth, product):
        nonlocal total
        if depth == n:
            if cur == v:
                total += product
            return
        steps_left = n - depth
        for nxt in neighbors[cur]:
            if nxt == prev:
                continue
            if _circ(n_sites, nxt, v) > w * (steps_left - 1):
                continue
            rec(cur, nxt, depth + 1, product * h.entry(cur, nxt))

    rec(None, u, 0, 1.0 if params.beta == SIGNS else 1.0 + 0.0j)
    return total


class _Multigraph:
    """Mutable multigraph; loops are listed twice in the adjacency."""

    def __init__(self):
        self.edges: dict[int, tuple] = {}
        self.adjacency: dict = {}
        self._next = 0

    def ensure_vertex(self, v):
        self.adjacency.setdefault(v, [])

    def add_edge(self, a, b) -> int:
        eid = self._next
        self._next += 1
        self.edges[eid] = (a, b)
        self.adjacency.setdefault(a, []).append(eid)
        self.adjacency.setdefault(b, []).append(eid)
        return eid

    def remove_edge(self, eid):
        a, b = self.edges.pop(eid)
        self.adjacency[a].remove(eid)
        self.adjacency[b].remove(eid)

    def degree(self, v) -> int:
        return len(self.adjacency[v])

    def other_end(self, eid, v):
        a, b = self.edges[eid]
        return b if a == v else a


def _is_tail(v) -> bool:
    return isinstance(v, tuple) and len(v) == 2 and v[0] == "tail"


def classify_diagram(kpath: KPath, beta: int = SIGNS) -> DiagramClass:
    """Topological class data (genus, vertex and edge counts) of a k-path.

    Construction: one multigraph edge per traversal pair; a degree-1
    tail vertex marks each walk's start; interior degree-2 vertices are
    suppressed into chains; vertices of degree four or more are resolved
    into trivalent chains, splitting the two ends of a loop apart first
    so that a balanced k-path never acquires an avoidable loop.  The
    result must have the tails at degree 1 and every other vertex at
    degree 3, with 2s vertices and 3s-k edges in total; any deviation
    raises :class:`DiagramError` and signals an enumeration bug.
    """
    k = len(kpath)
    if k < 1:
        raise ValueError("empty k-path")
    for path in kpath:
        if path[0] != path[-1]:
            raise DiagramError("paths must be closed")

    counts: dict[tuple[int, int], int] = {}
    for path in kpath:
        for a, b in zip(path, path[1:]):
            key = (a, b) if a < b else (b, a)
            counts[key] = counts.get(key, 0) + 1

    g = _Multigraph()
    for (a, b), t in counts.items():
        if t % 2:
            raise DiagramError(f"edge {{{a},{b}}} traversed an odd number of times ({t})")
        for _ in range(t // 2):
            g.add_edge(a, b)
    for j, path in enumerate(kpath):
        g.ensure_vertex(path[0])
        g.add_edge(("tail", j), path[0])

    # suppress interior chain vertices (degree 2, not a start marker)
    changed = True
    while changed:
        changed = False
        for v in list(g.adjacency):
            if _is_tail(v) or v not in g.adjacency or g.degree(v) != 2:
                continue
            e1, e2 = g.adjacency[v]
            if e1 == e2:
                raise DiagramError(f"isolated doubled cycle at vertex {v}")
            a = g.other_end(e1, v)
            b = g.other_end(e2, v)
            g.remove_edge(e1)
            g.remove_edge(e2)
            del g.adjacency[v]
            g.add_edge(a, b)
            changed = True

    # resolve vertices of degree >= 4 into chains of trivalent vertices
    for v in list(g.adjacency):
        if _is_tail(v):
            continue
        d = g.degree(v)
        if d <= 3:
            continue
        groups = d - 2
        capacity = [2] + [1] * (groups - 2) + [2]
        new_vertices = [("split", v, i) for i in range(groups)]
        incident = sorted(set(g.adjacency[v]))
        loops = [eid for eid in incident if g.edges[eid] == (v, v)]
        assignment: dict[tuple[int, int], int] = {}
        remaining = capacity[:]
        for eid in loops:
            order = sorted(range(groups), key=lambda i: -remaining[i])
            g1 = order[0]
            g2 = next((i for i in order[1:] if remaining[i] > 0), g1)
            assignment[(eid, 0)] = g1
            assignment[(eid, 1)] = g2
            remaining[g1] -= 1
            remaining[g2] -= 1
        for eid in incident:
            if eid in loops:
                continue
            i = next(i for i in range(groups) if remaining[i] > 0)
            assignment[(eid, 0)] = i
            remaining[i] -= 1
        for eid in incident:
            a, b = g.edges.pop(eid)
            g.adjacency[v] = [x for x in g.adjacency[v] if x != eid]
            if a == v and b == v:
                na = new_vertices[assignment[(eid, 0)]]
                nb = new_vertices[assignment[(eid, 1)]]
            elif a == v:
                na, nb = new_vertices[assignment[(eid, 0)]], b
                g.adjacency[b].remove(eid)
            else:
                na, nb = a, new_vertices[assignment[(eid, 0)]]
                g.adjacency[a].remove(eid)
            g.edges[eid] = (na, nb)
            g.adjacency.setdefault(na, []).append(eid)
            g.adjacency.setdefault(nb, []).append(eid)
        del g.adjacency[v]
        for i in range(groups - 1):
            g.add_edge(new_vertices[i], new_vertices[i + 1])

    for v in g.adjacency:
        d = g.degree(v)
        if _is_tail(v):
            if d != 1:
                raise DiagramError(f"start marker {v} has degree {d} != 1")
        elif d != 3:
            raise DiagramError(f"vertex {v} has degree {d} != 3")
    if beta == PHASES:
        for a, b in g.edges.values():
            if a == b:
                raise DiagramError("loop present in a balanced (beta=2) diagram")

    vertex_count = len(g.adjacency)
    edge_count = len(g.edges)
    if vertex_count % 2:
        raise DiagramError(f"odd vertex count {vertex_count}")
    return DiagramClass(s=vertex_count // 2, k=k, vertex_count=vertex_count, edge_count=edge_count)


def diagram_census(params: BandParams, spec: KPathSpec, budget: int = JOINT_LENGTH_BUDGET) -> dict[int, int]:
    """Count enumerated k-paths by genus s."""
    census: dict[int, int] = {}
    for kpath in iter_kpaths(params, spec, budget):
        s = classify_diagram(kpath, spec.beta).s
        census[s] = census.get(s, 0) + 1
    return census


def kpath_connected(kpath: KPath) -> bool:
    """True when the union of traversed edges forms a connected graph."""
    parent: dict[int, int] = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        parent[find(a)] = find(b)

    for path in kpath:
        for a, b in zip(path, path[1:]):
            union(a, b)
    roots = {find(path[0]) for path in kpath}
    return len(roots) <= 1
