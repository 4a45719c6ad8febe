"""Combinatorial recovery of a sparse signal from its autocorrelation.

The pipeline reads the set of realized lags off the autocorrelation, locates
the extreme pairwise distances, intersects shifted copies of the lag set to
reconstruct the support, then solves for the values on a graph whose edges
are the distances realized by exactly one support pair.  Every candidate is
verified against the input autocorrelation before it is returned, so the
routine either produces a signal whose autocorrelation matches or raises a
:class:`~phaseret.errors.RecoveryError` subclass.
"""

import math
from collections import Counter, deque
from dataclasses import dataclass

import numpy as np

from .errors import (
    Disconnected,
    NegativeSquare,
    NoCandidate,
    NoOddCycle,
    SupportInconsistent,
    TooSmall,
    VerificationFailed,
)
from .signals import (
    Autocorrelation,
    Signal,
    SupportSet,
    autocorrelation,
    canonical_sign,
    default_zero_tol,
)

__all__ = [
    "LagSet",
    "ExtremeDistances",
    "GoodPairGraph",
    "lag_set",
    "extract_extremes",
    "recover_support",
    "build_good_pair_graph",
    "solve_graph",
    "recover_signal",
]


@dataclass(frozen=True)
class LagSet:
    """Set of nonnegative lags at which the autocorrelation is nonzero."""

    lags: frozenset

    def __post_init__(self):
        vals = frozenset(int(l) for l in self.lags)
        if any(l < 0 for l in vals):
            raise ValueError("lags must be nonnegative")
        object.__setattr__(self, "lags", vals)

    @property
    def sorted(self) -> tuple:
        return tuple(sorted(self.lags))


@dataclass(frozen=True)
class ExtremeDistances:
    """Extreme pairwise distances read off a lag set.

    ``d_1k`` is the largest lag (the support span), ``d_2k`` the second
    largest, ``d_12 = d_1k - d_2k`` the gap at one end, ``d_1k_minus_1``
    the span of the support with the far endpoint dropped, and
    ``d_k_minus_1_k = d_1k - d_1k_minus_1`` the gap at the other end.
    """

    d_1k: int
    d_2k: int
    d_12: int
    d_1k_minus_1: int
    d_k_minus_1_k: int

    def __post_init__(self):
        if self.d_12 != self.d_1k - self.d_2k:
            raise ValueError("d_12 must equal d_1k - d_2k")
        if self.d_k_minus_1_k != self.d_1k - self.d_1k_minus_1:
            raise ValueError("d_k_minus_1_k must equal d_1k - d_1k_minus_1")
        if not (0 < self.d_2k < self.d_1k):
            raise ValueError("need 0 < d_2k < d_1k")

    @property
    def d_2k_minus_1(self) -> int:
        return self.d_2k - self.d_k_minus_1_k


@dataclass(frozen=True)
class GoodPairGraph:
    """Support positions joined by distances realized exactly once.

    Edges are ``(i, j, w)`` with ``i < j`` support positions and ``w`` the
    autocorrelation value at lag ``j - i``, which for a uniquely realized
    distance equals the product of the two signal values.
    """

    vertices: SupportSet
    edges: tuple

    def __post_init__(self):
        for i, j, w in self.edges:
            if i >= j:
                raise ValueError("edges must be ordered pairs i < j")
            if w == 0.0:
                raise ValueError("edge weights must be nonzero")


def lag_set(a: Autocorrelation, tol: float = None) -> LagSet:
    """Lags where ``|a|`` exceeds ``tol`` (default ``1e-9 * a_0``)."""
    if tol is None:
        tol = default_zero_tol(a)
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    idx = np.flatnonzero(np.abs(a.lags) > tol)
    if idx.size == 0:
        return LagSet(frozenset())
    return LagSet(frozenset(int(l) for l in idx) | {0})


def extract_extremes(lags: LagSet) -> ExtremeDistances:
    """Locate the extreme distances of the generating support.

    The two largest lags give the span and the gap at one end.  The span of
    the support minus its far endpoint is then the largest remaining lag
    ``t`` for which ``d_2k - t`` is not itself a lag; lags produced by
    interior points never have that property.

    Raises
    ------
    TooSmall
        Fewer than three positive lags.
    NoCandidate
        Every candidate ``t`` fails the membership test.
    """
    positive = [l for l in lags.sorted if l > 0]
    if len(positive) < 3:
        raise TooSmall(
            f"need at least 3 positive lags, got {len(positive)}"
        )
    member = lags.lags
    d_1k, d_2k = positive[-1], positive[-2]
    candidate = None
    for t in reversed(positive[:-2]):
        if (d_2k - t) not in member:
            candidate = t
            break
    if candidate is None:
        raise NoCandidate(
            "no lag t < d_2k with d_2k - t outside the lag set"
        )
    return ExtremeDistances(
        d_1k=d_1k,
        d_2k=d_2k,
        d_12=d_1k - d_2k,
        d_1k_minus_1=candidate,
        d_k_minus_1_k=d_1k - candidate,
    )


def _pairwise_distances(support) -> frozenset:
    pos = np.asarray(support, dtype=int)
    gaps = np.abs(pos[None, :] - pos[:, None])
    return frozenset(int(g) for g in gaps.ravel())


def _reconstruct(member: frozenset, span: int, gap_left: int, gap_right: int):
    """One orientation of the shifted-intersection support reconstruction."""
    d_2k = span - gap_left
    d_2k_minus_1 = d_2k - gap_right
    shifted_left = {t - gap_left for t in member}
    shifted_right = {t - gap_right for t in member}
    inner_left = member & shifted_left
    inner_right = member & shifted_right
    mirrored = {d_2k_minus_1 - t for t in inner_right}
    survivors = sorted(b for b in (inner_left & mirrored) if b > 0)
    support = sorted({0, gap_left, *(gap_left + b for b in survivors), span})
    if len(support) >= 3 and support[-2] != span - gap_right:
        return None
    if _pairwise_distances(support) != member:
        return None
    return support


def _canonical_orientation(support, span):
    """Pick the lexicographically smaller of the support and its mirror."""
    forward = tuple(support)
    backward = tuple(sorted(span - d for d in support))
    return min(forward, backward)


def recover_support(a: Autocorrelation, tol: float = None) -> SupportSet:
    """Reconstruct the support of a signal from its autocorrelation.

    Returns the support anchored at index 0 and orientation-normalized, so
    the original signal, its reversal and its translates all map to the
    same result.  When the primary orientation fails its consistency checks
    the mirrored assignment of the two end gaps is tried once.
    """
    lags = lag_set(a, tol)
    extremes = extract_extremes(lags)
    member = lags.lags
    span = extremes.d_1k
    for gap_left, gap_right in (
        (extremes.d_12, extremes.d_k_minus_1_k),
        (extremes.d_k_minus_1_k, extremes.d_12),
    ):
        support = _reconstruct(member, span, gap_left, gap_right)
        if support is not None:
            canonical = _canonical_orientation(support, span)
            return SupportSet(a.n, canonical)
    raise SupportInconsistent(
        "no orientation of the extreme gaps yields a support whose "
        "pairwise distances reproduce the lag set"
    )


def build_good_pair_graph(
    support: SupportSet, a: Autocorrelation, tol: float = None
) -> GoodPairGraph:
    """Graph of support pairs whose distance is realized exactly once.

    For such a pair the autocorrelation at their distance is the bare
    product of the two signal values, so it becomes an edge weight.  Pairs
    sharing a distance with another pair are dropped.
    """
    if tol is None:
        tol = default_zero_tol(a)
    pos = support.indices
    counts = Counter(
        pos[j] - pos[i]
        for i in range(len(pos))
        for j in range(i + 1, len(pos))
    )
    edges = []
    for i in range(len(pos)):
        for j in range(i + 1, len(pos)):
            d = pos[j] - pos[i]
            if counts[d] != 1:
                continue
            w = float(a.lags[d])
            if abs(w) <= tol:
                continue
            edges.append((pos[i], pos[j], w))
    return GoodPairGraph(vertices=support, edges=tuple(edges))


def _adjacency(graph: GoodPairGraph):
    adj = {v: {} for v in graph.vertices.indices}
    for i, j, w in graph.edges:
        adj[i][j] = w
        adj[j][i] = w
    return adj


def _find_odd_cycle(adj):
    """Shortest-first odd cycle: triangles, then a bipartiteness conflict."""
    verts = sorted(adj)
    for i, j in sorted((u, v) for u in verts for v in adj[u] if u < v):
        common = sorted(set(adj[i]) & set(adj[j]))
        if common:
            return [i, j, common[0]]
    # 2-color; a conflict edge closes an odd cycle through the BFS tree
    color = {verts[0]: 0}
    parent = {verts[0]: None}
    queue = deque([verts[0]])
    while queue:
        u = queue.popleft()
        for v in sorted(adj[u]):
            if v not in color:
                color[v] = color[u] ^ 1
                parent[v] = u
                queue.append(v)
            elif color[v] == color[u]:
                path_u, path_v = [u], [v]
                while parent[path_u[-1]] is not None:
                    path_u.append(parent[path_u[-1]])
                while parent[path_v[-1]] is not None:
                    path_v.append(parent[path_v[-1]])
                common = set(path_u) & set(path_v)
                trim_u = next(i for i, w in enumerate(path_u) if w in common)
                trim_v = next(i for i, w in enumerate(path_v) if w in common)
                lca = path_u[trim_u]
                up = path_u[: trim_u + 1]          # u .. lca
                down = path_v[:trim_v][::-1]       # just below lca .. v
                return up + down
    return None


def solve_graph(graph: GoodPairGraph) -> Signal:
    """Solve for the signal values from the uniquely-realized distances.

    An odd cycle fixes one squared value via an alternating weight ratio;
    the remaining values follow by dividing edge weights along a spanning
    tree.  The sign of the returned signal is canonical (first nonzero
    entry positive).

    Raises
    ------
    Disconnected
        Some support position is not reachable through graph edges.
    NoOddCycle
        The graph is bipartite, so squared values cannot be isolated.
    NegativeSquare
        The alternating cycle ratio is not strictly positive.
    """
    verts = graph.vertices.indices
    if not verts:
        raise Disconnected("graph has no vertices")
    adj = _adjacency(graph)
    seen = {verts[0]}
    queue = deque([verts[0]])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    if len(seen) != len(verts):
        raise Disconnected(
            f"only {len(seen)} of {len(verts)} support positions are connected"
        )
    cycle = _find_odd_cycle(adj)
    if cycle is None:
        raise NoOddCycle("graph of uniquely-realized distances is bipartite")
    numerator, denominator = 1.0, 1.0
    for idx in range(len(cycle)):
        w = adj[cycle[idx]][cycle[(idx + 1) % len(cycle)]]
        if idx % 2 == 0:
            numerator *= w
        else:
            denominator *= w
    ratio = numerator / denominator
    if ratio <= 0:
        raise NegativeSquare(
            f"odd-cycle ratio {ratio:.3e} is not a positive square"
        )
    values = {cycle[0]: math.sqrt(ratio)}
    queue = deque([cycle[0]])
    while queue:
        u = queue.popleft()
        for v, w in adj[u].items():
            if v not in values:
                values[v] = w / values[u]
                queue.append(v)
    dense = np.zeros(graph.vertices.n)
    for v, val in values.items():
        dense[v] = val
    return Signal(graph.vertices.n, canonical_sign(dense))


def _two_point_signal(a: Autocorrelation, gap: int, tol: float) -> Signal:
    """Closed form for a support of size two: {0, gap}."""
    a0 = float(a.lags[0])
    ad = float(a.lags[gap])
    disc = a0 * a0 - 4.0 * ad * ad
    if disc < 0:
        if disc < -tol * max(1.0, a0):
            raise VerificationFailed(
                "two-point closed form has negative discriminant"
            )
        disc = 0.0
    big = 0.5 * (a0 + math.sqrt(disc))
    if big <= 0:
        raise VerificationFailed("two-point closed form is degenerate")
    values = np.zeros(a.n)
    values[0] = math.sqrt(big)
    values[gap] = ad / values[0]
    return Signal(a.n, canonical_sign(values))


def recover_signal(a: Autocorrelation, tol: float = None) -> Signal:
    """Recover a sparse signal whose autocorrelation is ``a``.

    Composes :func:`lag_set`, :func:`recover_support`,
    :func:`build_good_pair_graph` and :func:`solve_graph`, with closed
    forms for supports of size at most two.  The result is anchored at
    index 0, orientation-normalized, and has a positive first nonzero
    entry; its autocorrelation is verified against ``a`` before returning.

    An all-zero autocorrelation yields the all-zero (empty) signal.
    """
    zero_tol = default_zero_tol(a) if tol is None else float(tol)
    if zero_tol < 0:
        raise ValueError("tol must be nonnegative")
    a0 = float(a.lags[0])
    if abs(a0) <= zero_tol:
        return Signal(a.n, np.zeros(a.n))
    lags = lag_set(a, zero_tol)
    positive = [l for l in lags.sorted if l > 0]
    if len(positive) == 0:
        values = np.zeros(a.n)
        values[0] = math.sqrt(a0)
        candidate = Signal(a.n, values)
    elif len(positive) == 1:
        candidate = _two_point_signal(a, positive[0], zero_tol)
    else:
        support = recover_support(a, zero_tol)
        graph = build_good_pair_graph(support, a, zero_tol)
        candidate = solve_graph(graph)
    check = autocorrelation(candidate)
    err = float(np.max(np.abs(check.lags - a.lags)))
    allowed = max(zero_tol, 1e-12 * max(1.0, abs(a0)))
    if err > allowed:
        raise VerificationFailed(
            f"candidate autocorrelation deviates by {err:.3e} "
            f"(allowed {allowed:.3e})"
        )
    return Signal(a.n, canonical_sign(candidate.values))
