"""SIMD thread extraction: disjoint isomorphic subgraphs of a DAG.

A graph that contains many node-disjoint, pairwise-isomorphic fragments
can run one thread per fragment in lockstep. p_threads is the size of the
largest such family found; thread efficiency at p processors is
min(p_threads, p) / p.

Fragments are compared on internal structure plus each node's external
in/out arity, so a fragment embedded differently in the host graph gets a
different label. Labels are exact canonical forms up to 8 nodes
(class-refined permutation minimization) and neighborhood-refinement
hashes above that; the two namespaces never collide.
"""

from __future__ import annotations

import hashlib
import itertools
import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import FragmentTooLarge, GraphTooLargeForOracle
from .graph import ValidatedGraph, node_levels

logger = logging.getLogger(__name__)

EXACT_LIMIT = 8
HARD_CAP = 64


@dataclass(frozen=True)
class Fragment:
    """An induced subgraph with boundary arity annotations.

    nodes[i] = (op_kind, external_in, external_out); edges are internal,
    as local index pairs. node_ids preserves the host-graph identity of
    each local index.
    """

    nodes: tuple[tuple[str, int, int], ...]
    edges: frozenset[tuple[int, int]]
    node_ids: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.nodes)


def extract_fragment(vg: ValidatedGraph, node_ids: Sequence[str]) -> Fragment:
    """Induce a fragment on the given host-graph node ids."""
    ids = tuple(node_ids)
    members = set(ids)
    local = {nid: i for i, nid in enumerate(ids)}
    annotated: list[tuple[str, int, int]] = []
    edges: set[tuple[int, int]] = set()
    for nid in ids:
        node = vg.node(nid)
        ext_in = sum(1 for ref in node.inputs if ref not in members)
        ext_out = sum(1 for succ in vg.successors(nid) if succ not in members)
        annotated.append((node.op_kind, ext_in, ext_out))
        for ref in node.inputs:
            if ref in members:
                edges.add((local[ref], local[nid]))
    return Fragment(tuple(annotated), frozenset(edges), ids)


def _exact_signature(frag: Fragment) -> tuple:
    """Lexicographically minimal (annotations, edges) over admissible
    relabelings; two fragments are isomorphic iff signatures are equal."""
    n = len(frag)
    order = sorted(range(n), key=lambda i: frag.nodes[i])
    classes: list[list[int]] = []
    for i in order:
        if classes and frag.nodes[classes[-1][0]] == frag.nodes[i]:
            classes[-1].append(i)
        else:
            classes.append([i])
    sorted_annot = tuple(frag.nodes[i] for i in order)

    best_edges: tuple[tuple[int, int], ...] | None = None
    for parts in itertools.product(*(itertools.permutations(cls) for cls in classes)):
        layout = [i for part in parts for i in part]  # position -> original index
        position = {orig: pos for pos, orig in enumerate(layout)}
        edges = tuple(sorted((position[u], position[v]) for u, v in frag.edges))
        if best_edges is None or edges < best_edges:
            best_edges = edges
    return (sorted_annot, best_edges)


def _wl_hash(frag: Fragment) -> str:
    """Iterative neighborhood refinement; equal hashes are isomorphic in
    practice but not guaranteed (used above EXACT_LIMIT only)."""
    n = len(frag)
    preds: list[list[int]] = [[] for _ in range(n)]
    succs: list[list[int]] = [[] for _ in range(n)]
    for u, v in frag.edges:
        succs[u].append(v)
        preds[v].append(u)
    labels = [repr(annot) for annot in frag.nodes]
    for _round in range(n):
        labels = [
            hashlib.blake2b(
                (labels[i] + "|" + ",".join(sorted(labels[j] for j in preds[i]))
                 + "|" + ",".join(sorted(labels[j] for j in succs[i]))).encode(),
                digest_size=16,
            ).hexdigest()
            for i in range(n)
        ]
    summary = f"{n};{len(frag.edges)};" + ",".join(sorted(labels))
    return hashlib.blake2b(summary.encode(), digest_size=16).hexdigest()


def canonical_label(frag: Fragment) -> str:
    """Stable text label; equal labels mean isomorphic fragments (exactly
    so for fragments of <= 8 nodes). Raises FragmentTooLarge above 64."""
    if len(frag) > HARD_CAP:
        raise FragmentTooLarge(f"fragment has {len(frag)} nodes, cap is {HARD_CAP}")
    if len(frag) <= EXACT_LIMIT:
        digest = hashlib.blake2b(repr(_exact_signature(frag)).encode(),
                                 digest_size=16).hexdigest()
        return "x" + digest
    return "h" + _wl_hash(frag)


def isomorphic(a: Fragment, b: Fragment) -> bool:
    """Exact isomorphism test via a permutation search (small fragments)."""
    if len(a) != len(b) or len(a.edges) != len(b.edges):
        return False
    if sorted(a.nodes) != sorted(b.nodes):
        return False
    if len(a) > EXACT_LIMIT:
        raise FragmentTooLarge(f"exact verification capped at {EXACT_LIMIT} nodes")
    return _exact_signature(a) == _exact_signature(b)


@dataclass(frozen=True)
class PartitionResult:
    """Families of disjoint isomorphic fragments plus an unmatched residual."""

    families: tuple[tuple[str, tuple[Fragment, ...]], ...]
    residual: frozenset[str]
    p_threads: int
    granularity: int


def _verify_families(families: Iterable[tuple[str, tuple[Fragment, ...]]]) -> None:
    for label, members in families:
        if len(members) < 2 or len(members[0]) > EXACT_LIMIT:
            continue
        head = members[0]
        for other in members[1:]:
            if not isomorphic(head, other):
                raise AssertionError(
                    f"family {label} contains non-isomorphic members")


def partition_isomorphic(vg: ValidatedGraph, granularity: int) -> PartitionResult:
    """Greedy level-aligned tiling into connected fragments of exactly
    `granularity` nodes, grouped by canonical label.

    Undersized leftovers go to the residual. Families of <= 8-node
    fragments are verified pairwise with the exact isomorphism test.
    """
    if granularity < 1:
        raise ValueError("granularity must be >= 1")
    levels = node_levels(vg)
    order = sorted(vg.topo_order, key=lambda nid: (levels[nid], nid))
    assigned: set[str] = set()
    fragments: list[Fragment] = []
    residual: set[str] = set()

    for seed in order:
        if seed in assigned:
            continue
        members = [seed]
        member_set = {seed}
        while len(members) < granularity:
            candidates: set[str] = set()
            for nid in members:
                for nb in vg.predecessors(nid) + vg.successors(nid):
                    if nb not in assigned and nb not in member_set:
                        candidates.add(nb)
            if not candidates:
                break
            pick = min(candidates, key=lambda nid: (levels[nid], nid))
            members.append(pick)
            member_set.add(pick)
        assigned |= member_set
        if len(members) == granularity:
            fragments.append(extract_fragment(vg, sorted(members, key=order.index)))
        else:
            residual |= member_set

    grouped: dict[str, list[Fragment]] = {}
    for frag in fragments:
        grouped.setdefault(canonical_label(frag), []).append(frag)
    families = tuple(sorted(
        ((label, tuple(members)) for label, members in grouped.items()),
        key=lambda item: (-len(item[1]), item[0]),
    ))
    _verify_families(families)
    p_threads = max((len(members) for _label, members in families), default=1)
    return PartitionResult(
        families=families,
        residual=frozenset(residual),
        p_threads=max(p_threads, 1),
        granularity=granularity,
    )


def _connected_subsets(vg: ValidatedGraph, size: int) -> list[tuple[str, ...]]:
    """All weakly connected node subsets of the given size."""
    neighbors = {nid: set(vg.predecessors(nid)) | set(vg.successors(nid))
                 for nid in vg.topo_order}
    order = list(vg.topo_order)
    rank = {nid: i for i, nid in enumerate(order)}
    found: set[frozenset[str]] = set()

    def grow(current: frozenset[str], frontier: set[str], min_rank: int) -> None:
        if len(current) == size:
            found.add(current)
            return
        for nb in sorted(frontier, key=lambda nid: rank[nid]):
            if rank[nb] <= min_rank:
                continue
            new_frontier = (frontier | neighbors[nb]) - current - {nb}
            grow(current | {nb}, new_frontier, min_rank)

    for seed in order:
        grow(frozenset([seed]), set(neighbors[seed]), rank[seed])
    return [tuple(sorted(s, key=lambda nid: rank[nid])) for s in sorted(
        found, key=lambda s: sorted(rank[nid] for nid in s))]


def _max_disjoint(members: list[frozenset[str]]) -> list[int]:
    """Indices of a maximum pairwise-disjoint subfamily (branch and bound)."""
    best: list[int] = []

    def search(start: int, chosen: list[int], used: frozenset[str]) -> None:
        nonlocal best
        if len(chosen) + (len(members) - start) <= len(best):
            return
        if start == len(members):
            if len(chosen) > len(best):
                best = list(chosen)
            return
        if not (members[start] & used):
            chosen.append(start)
            search(start + 1, chosen, used | members[start])
            chosen.pop()
        search(start + 1, chosen, used)

    search(0, [], frozenset())
    return best


ORACLE_CAP = 12


def brute_force_partition(vg: ValidatedGraph, granularity: int) -> PartitionResult:
    """Exhaustive reference: the true maximum family of disjoint isomorphic
    connected fragments of the given size. Graphs above 12 nodes raise
    GraphTooLargeForOracle."""
    if len(vg) > ORACLE_CAP:
        raise GraphTooLargeForOracle(f"oracle capped at {ORACLE_CAP} nodes, got {len(vg)}")
    if granularity < 1:
        raise ValueError("granularity must be >= 1")

    by_label: dict[str, list[Fragment]] = {}
    for subset in _connected_subsets(vg, granularity):
        frag = extract_fragment(vg, subset)
        by_label.setdefault(canonical_label(frag), []).append(frag)

    best_label = None
    best_members: list[Fragment] = []
    for label in sorted(by_label):
        frags = by_label[label]
        chosen = _max_disjoint([frozenset(f.node_ids) for f in frags])
        if len(chosen) > len(best_members):
            best_label = label
            best_members = [frags[i] for i in chosen]

    if best_label is None:
        return PartitionResult(families=(), residual=frozenset(vg.topo_order),
                               p_threads=1, granularity=granularity)
    covered = {nid for f in best_members for nid in f.node_ids}
    families = ((best_label, tuple(best_members)),)
    _verify_families(families)
    return PartitionResult(
        families=families,
        residual=frozenset(set(vg.topo_order) - covered),
        p_threads=len(best_members),
        granularity=granularity,
    )


def thread_efficiency(pr: PartitionResult, p: int) -> float:
    """Fraction of p processors the extracted threads keep busy."""
    if not isinstance(p, int) or p < 1:
        raise ValueError(f"p must be an integer >= 1, got {p!r}")
    return min(pr.p_threads, p) / p
