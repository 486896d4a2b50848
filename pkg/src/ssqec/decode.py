"""Matching decoders for surface-code syndromes.

A local check matrix whose columns all have weight 1 or 2 defines a matching
graph: checks are nodes, each qubit is an edge between the two checks it
flips (or between its single check and a shared boundary node).  Decoding is
exact minimum-weight perfect matching of the defect set using geodesic graph
distances.

Repeated noisy measurement rounds are decoded on the space-time product of
that graph with a path graph in time; with uniform weights the product
metric factorizes as d((u,s),(v,t)) = d(u,v) + |s-t|, so the product graph
never needs to be materialized.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from ._blossom import min_weight_perfect_matching
from .codes import SingleShotBasis
from .errors import (
    ContractViolationError,
    InvalidSyndromeError,
    UnsupportedMatrixError,
    UnsupportedSizeError,
)
from .gf2 import BitMatrix, mat_vec_mul

BRUTE_FORCE_CAP = 14


@dataclass(frozen=True)
class MatchingGraph:
    """Precomputed decoding graph for one check matrix.

    ``edges`` lists every qubit as (node_a, node_b, weight, fault_id),
    including parallel edges (possible at L=2); ``boundary`` is the shared
    boundary node id or None.  ``dist``/``pred`` cover all nodes including
    the boundary slot.  ``edge_qubit[u, v]`` is the fault id used when a
    matched path crosses (u, v); for parallel edges it is the lowest qubit
    id — the alternatives differ from it by a stabilizer.
    """

    n_nodes: int
    n_qubits: int
    boundary: int | None
    edges: tuple[tuple[int, int, int, int], ...]
    dist: np.ndarray
    pred: np.ndarray
    edge_qubit: np.ndarray
    n_interior_edges: int
    n_boundary_edges: int

    @property
    def has_boundary(self) -> bool:
        return self.boundary is not None


@dataclass(frozen=True)
class SpaceTimeGraph:
    """Matching graph repeated over measurement rounds.

    Nodes are (check, round) pairs; time-like edges connect (c, t)-(c, t+1).
    Uniform unit weights are the default (measurement and data errors are
    equally likely in the models simulated here).
    """

    base: MatchingGraph
    rounds: int
    time_edge_weight: int = 1
    space_edge_weight: int = 1


def build_matching_graph(H: BitMatrix) -> MatchingGraph:
    """Build the matching graph of a local check matrix.

    Every column of H must have weight 1 (boundary edge) or 2 (interior
    edge).  Check matrices with higher-weight columns (e.g. single-shot
    check bases) are decoded by mapping their syndromes back to local form,
    never by direct matching.
    """
    dense = H.to_dense()
    col_w = dense.sum(axis=0)
    bad = np.flatnonzero((col_w == 0) | (col_w > 2))
    if bad.size:
        raise UnsupportedMatrixError(
            f"column {int(bad[0])} has weight {int(col_w[bad[0]])}; "
            "matching graphs need every qubit in 1 or 2 checks"
        )
    n_checks = H.rows
    has_boundary = bool((col_w == 1).any())
    n_v = n_checks + (1 if has_boundary else 0)

    edge_qubit = np.full((n_v, n_v), -1, dtype=np.int64)
    adj = np.zeros((n_v, n_v), dtype=np.uint8)
    edges: list[tuple[int, int, int, int]] = []
    n_interior = 0
    n_bound = 0
    for q in range(H.cols):
        rr = np.flatnonzero(dense[:, q])
        if rr.size == 2:
            u, v = int(rr[0]), int(rr[1])
            n_interior += 1
        else:
            u, v = int(rr[0]), n_checks
            n_bound += 1
        edges.append((u, v, 1, q))
        if edge_qubit[u, v] == -1:
            edge_qubit[u, v] = q
            edge_qubit[v, u] = q
            adj[u, v] = adj[v, u] = 1

    d, pred = shortest_path(
        csr_matrix(adj), method="D", unweighted=True, return_predecessors=True
    )
    if not np.isfinite(d).all():
        raise UnsupportedMatrixError("check graph is disconnected")
    return MatchingGraph(
        n_nodes=n_checks,
        n_qubits=H.cols,
        boundary=n_checks if has_boundary else None,
        edges=tuple(edges),
        dist=d.astype(np.int64),
        pred=pred,
        edge_qubit=edge_qubit,
        n_interior_edges=n_interior,
        n_boundary_edges=n_bound,
    )


def _xor_path(graph: MatchingGraph, a: int, b: int, acc: np.ndarray) -> None:
    """XOR the qubits of the geodesic a -> b into the boolean accumulator."""
    cur = b
    while cur != a:
        prv = int(graph.pred[a, cur])
        acc[graph.edge_qubit[prv, cur]] ^= True
        cur = prv


def _match_with_boundary(
    real_dist: np.ndarray, bdist: np.ndarray
) -> np.ndarray:
    """Perfect matching of defects that may individually match a boundary.

    Augments each of the k defects with a private virtual node: defect i and
    virtual i are joined at the boundary cost, virtual nodes are mutually
    free, and cross defect/virtual pairs are priced out.  Returns the mate
    array of the 2k-node problem.
    """
    k = real_dist.shape[0]
    big = int(real_dist.sum()) + 2 * int(bdist.sum()) + 1
    mat = np.full((2 * k, 2 * k), big, dtype=np.int64)
    mat[:k, :k] = real_dist
    mat[k:, k:] = 0
    for i in range(k):
        mat[i, k + i] = mat[k + i, i] = int(bdist[i])
    np.fill_diagonal(mat, 0)
    return min_weight_perfect_matching(mat)


def mwpm_match(graph: MatchingGraph, defects: Iterable[int]) -> np.ndarray:
    """Exact minimum-weight perfect matching of a defect set.

    Returns the sorted fault ids (qubits) of the induced correction; applying
    them reproduces the defect syndrome exactly.  On a closed graph the
    defect count must be even; with a boundary, any defect may additionally
    match the boundary (duplicates allowed).
    """
    dd = sorted({int(x) for x in defects})
    if dd and (dd[0] < 0 or dd[-1] >= graph.n_nodes):
        raise InvalidSyndromeError(f"defect out of range: {dd[0]}..{dd[-1]}")
    k = len(dd)
    if k == 0:
        return np.zeros(0, dtype=np.int64)
    acc = np.zeros(graph.n_qubits, dtype=bool)
    didx = np.asarray(dd, dtype=np.int64)
    if graph.boundary is None:
        if k % 2:
            raise InvalidSyndromeError(
                f"{k} defects cannot be paired on a closed graph"
            )
        mate = min_weight_perfect_matching(graph.dist[np.ix_(didx, didx)])
        for i in range(k):
            j = int(mate[i])
            if j > i:
                _xor_path(graph, dd[i], dd[j], acc)
    else:
        bnd = graph.boundary
        mate = _match_with_boundary(
            graph.dist[np.ix_(didx, didx)], graph.dist[didx, bnd]
        )
        for i in range(k):
            j = int(mate[i])
            if j < k and j > i:
                _xor_path(graph, dd[i], dd[j], acc)
            elif j == k + i:
                _xor_path(graph, dd[i], bnd, acc)
    return np.flatnonzero(acc).astype(np.int64)


def brute_force_matching(
    defects: Iterable[int], distance: Callable[[int, int], float]
) -> tuple[list[tuple[int, int]], float]:
    """Exhaustive minimum-weight pairing; test oracle for mwpm_match.

    Enumerates all (k-1)!! perfect pairings of the defect set and returns
    one of minimum total weight along with that weight.
    """
    dd = sorted({int(x) for x in defects})
    k = len(dd)
    if k > BRUTE_FORCE_CAP:
        raise UnsupportedSizeError(
            f"{k} defects exceeds the brute-force cap of {BRUTE_FORCE_CAP}"
        )
    if k % 2:
        raise InvalidSyndromeError(f"cannot pair {k} defects")
    if k == 0:
        return [], 0
    best_w: float | None = None
    best_pairs: list[tuple[int, int]] = []

    def rec(rem: list[int], acc: float, pairs: list[tuple[int, int]]) -> None:
        nonlocal best_w, best_pairs
        if not rem:
            if best_w is None or acc < best_w:
                best_w = acc
                best_pairs = pairs.copy()
            return
        a = rem[0]
        for idx in range(1, len(rem)):
            b = rem[idx]
            pairs.append((a, b))
            rec(rem[1:idx] + rem[idx + 1 :], acc + distance(a, b), pairs)
            pairs.pop()

    rec(dd, 0, [])
    assert best_w is not None
    return best_pairs, best_w


def parity_repair(syndrome: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Restore even syndrome parity by flipping one uniformly random bit.

    Redundant (closed-graph) check sets need even parity before matching;
    when a measurement error breaks it, the cheapest repair is a blind
    single-bit flip.  Even-parity input is returned unchanged (as a copy).
    """
    syndrome = np.asarray(syndrome, dtype=np.uint8).copy()
    if int(syndrome.sum()) % 2:
        pos = int(rng.integers(syndrome.shape[0]))
        syndrome[pos] ^= 1
    return syndrome


def map_syndrome_to_local(
    basis: SingleShotBasis, observed: np.ndarray
) -> np.ndarray:
    """Map an observed single-shot syndrome back to local-check form.

    The tracked elimination satisfies T·H_local = [checks; 0], so the local
    syndrome is T⁻¹·[observed; 0].  A single measurement flip e_i maps to
    the local syndrome of a data error on designated_qubit[i], which keeps
    the mapped syndrome matchable (and parity-even on the torus).
    """
    observed = np.asarray(observed, dtype=np.uint8)
    if observed.shape != (basis.n_checks,):
        raise ContractViolationError(
            f"expected syndrome of length {basis.n_checks}, "
            f"got shape {observed.shape}"
        )
    m0 = basis.elimination.inverse.cols
    padded = np.zeros(m0, dtype=np.uint8)
    padded[: basis.n_checks] = observed
    return mat_vec_mul(basis.elimination.inverse, padded)


def decode_single_shot_round(
    basis: SingleShotBasis, graph: MatchingGraph, observed: np.ndarray
) -> np.ndarray:
    """Decode one round of single-shot check measurements.

    Maps the (possibly noisy) observed syndrome to local form, extracts
    defects, matches, and returns the correction as a qubit bit-vector.
    """
    local = map_syndrome_to_local(basis, observed)
    fault_ids = mwpm_match(graph, np.flatnonzero(local))
    correction = np.zeros(graph.n_qubits, dtype=np.uint8)
    correction[fault_ids] = 1
    return correction


def decode_repeated_rounds(
    graph: SpaceTimeGraph, syndromes: np.ndarray | Sequence[np.ndarray]
) -> np.ndarray:
    """Decode a history of noisy syndromes plus one final noiseless one.

    ``syndromes`` holds rounds+1 per-round local syndromes of the evolving
    error.  Consecutive XORs give detection events; events are matched in
    space-time (time-like steps carry no qubit), and the space-like
    projection of the matching is returned as a correction bit-vector.
    """
    base = graph.base
    syn = np.asarray(syndromes, dtype=np.uint8)
    if syn.ndim != 2 or syn.shape[1] != base.n_nodes:
        raise ContractViolationError(
            f"expected (rounds+1, {base.n_nodes}) syndromes, got {syn.shape}"
        )
    if syn.shape[0] != graph.rounds + 1:
        raise ContractViolationError(
            f"expected {graph.rounds + 1} syndrome rounds, got {syn.shape[0]}"
        )
    events = syn.copy()
    events[1:] ^= syn[:-1]
    tt, nodes = np.nonzero(events)
    k = tt.shape[0]
    if k == 0:
        return np.zeros(base.n_qubits, dtype=np.uint8)
    acc = np.zeros(base.n_qubits, dtype=bool)
    nodes = nodes.astype(np.int64)
    spatial = base.dist[np.ix_(nodes, nodes)] * graph.space_edge_weight
    temporal = (
        np.abs(tt[:, None].astype(np.int64) - tt[None, :])
        * graph.time_edge_weight
    )
    full = spatial + temporal
    if base.boundary is None:
        if k % 2:
            raise InvalidSyndromeError(
                f"{k} detection events cannot be paired on a closed graph"
            )
        mate = min_weight_perfect_matching(full)
        for i in range(k):
            j = int(mate[i])
            if j > i:
                _xor_path(base, int(nodes[i]), int(nodes[j]), acc)
    else:
        bnd = base.boundary
        bdist = base.dist[nodes, bnd] * graph.space_edge_weight
        mate = _match_with_boundary(full, bdist)
        for i in range(k):
            j = int(mate[i])
            if j < k and j > i:
                _xor_path(base, int(nodes[i]), int(nodes[j]), acc)
            elif j == k + i:
                _xor_path(base, int(nodes[i]), bnd, acc)
    return acc.astype(np.uint8)
