"""Directed acyclic graphs on labeled nodes 0..n-1, their relabelings, and
the deterministic pattern (skeleton + immoralities) oracle for Markov
equivalence and model isomorphism.

All types are immutable values; every operation returns fresh objects.
Node ids are 0-based throughout the library (rendered 1-based only in
human-facing strings).
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Optional, Tuple

TopoOrder = Tuple[int, ...]


class DagError(ValueError):
    """Invalid graph input."""


class CycleError(DagError):
    """The edge set contains a directed cycle."""


@dataclass(frozen=True)
class Dag:
    """A DAG on ``n`` nodes with directed edges (parent, child).

    Invariants enforced at construction: node ids in range, no self-loops,
    no duplicate edges, no directed cycles.
    """

    n: int
    edges: FrozenSet[Tuple[int, int]]

    def __init__(self, n: int, edges: Iterable[Tuple[int, int]] = ()):
        object.__setattr__(self, "n", int(n))
        object.__setattr__(
            self, "edges", frozenset((int(u), int(v)) for u, v in edges))
        self._validate()

    def _validate(self):
        if self.n < 1:
            raise DagError(f"node count must be >= 1, got {self.n}")
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise DagError(f"edge ({u},{v}) out of range for n={self.n}")
            if u == v:
                raise DagError(f"self-loop at node {u}")
        topo_sort(self)  # raises CycleError on a cycle

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def parent_sets(self) -> Tuple[FrozenSet[int], ...]:
        pa: List[set] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            pa[v].add(u)
        return tuple(frozenset(s) for s in pa)

    def child_sets(self) -> Tuple[FrozenSet[int], ...]:
        ch: List[set] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            ch[u].add(v)
        return tuple(frozenset(s) for s in ch)

    def skeleton(self) -> FrozenSet[Tuple[int, int]]:
        """Undirected edge set as pairs (a, b) with a < b."""
        return frozenset((min(u, v), max(u, v)) for u, v in self.edges)

    def skeleton_degrees(self) -> Tuple[int, ...]:
        deg = [0] * self.n
        for a, b in self.skeleton():
            deg[a] += 1
            deg[b] += 1
        return tuple(deg)

    def sorted_edges(self) -> List[Tuple[int, int]]:
        return sorted(self.edges)

    def to_json_dict(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.sorted_edges()]}

    @classmethod
    def from_json_dict(cls, d: dict, one_based: bool = False) -> "Dag":
        try:
            n = d["n"]
            edges = d["edges"]
        except (KeyError, TypeError) as exc:
            raise DagError(f"DAG JSON needs keys 'n' and 'edges': {exc}")
        if one_based:
            edges = [(u - 1, v - 1) for u, v in edges]
        return cls(n, [(u, v) for u, v in edges])


@dataclass(frozen=True)
class Permutation:
    """A bijection of 0..n-1, stored as the image tuple: i -> mapping[i]."""

    mapping: Tuple[int, ...]

    def __init__(self, mapping: Iterable[int]):
        m = tuple(int(x) for x in mapping)
        if sorted(m) != list(range(len(m))):
            raise DagError(f"not a permutation of 0..{len(m) - 1}: {m}")
        object.__setattr__(self, "mapping", m)

    @property
    def n(self) -> int:
        return len(self.mapping)

    def __call__(self, i: int) -> int:
        return self.mapping[i]

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, x in enumerate(self.mapping):
            inv[x] = i
        return Permutation(inv)

    def compose(self, first: "Permutation") -> "Permutation":
        """self after first: i -> self(first(i))."""
        return Permutation(tuple(self.mapping[x] for x in first.mapping))

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(range(n))


@dataclass(frozen=True)
class Pattern:
    """Skeleton plus immoralities; a complete Markov-equivalence invariant.

    An immorality is stored as (i, k, j) with i < j, meaning i -> k <- j
    with i, j nonadjacent in the skeleton.
    """

    n: int
    skeleton: FrozenSet[Tuple[int, int]]
    immoralities: FrozenSet[Tuple[int, int, int]]

    def __init__(self, n: int, skeleton, immoralities):
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "skeleton",
                           frozenset((min(a, b), max(a, b))
                                     for a, b in skeleton))
        object.__setattr__(self, "immoralities",
                           frozenset((min(i, j), k, max(i, j))
                                     for i, k, j in immoralities))
        skel = self.skeleton
        for i, k, j in self.immoralities:
            if (min(i, k), max(i, k)) not in skel \
                    or (min(j, k), max(j, k)) not in skel:
                raise DagError(f"immorality ({i},{k},{j}) legs not in skeleton")
            if (i, j) in skel:
                raise DagError(f"immorality ({i},{k},{j}) has adjacent tips")

    def degrees(self) -> Tuple[int, ...]:
        deg = [0] * self.n
        for a, b in self.skeleton:
            deg[a] += 1
            deg[b] += 1
        return tuple(deg)


def topo_sort(g: Dag) -> TopoOrder:
    """Topological order of ``g``, smallest node id first among ready nodes.

    Raises CycleError if the edge set has a directed cycle, which makes
    this double as the acyclicity check at construction.
    """
    indeg = [0] * g.n
    children: List[List[int]] = [[] for _ in range(g.n)]
    for u, v in g.edges:
        indeg[v] += 1
        children[u].append(v)
    ready = [i for i in range(g.n) if indeg[i] == 0]
    heapq.heapify(ready)
    order: List[int] = []
    while ready:
        u = heapq.heappop(ready)
        order.append(u)
        for v in children[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                heapq.heappush(ready, v)
    if len(order) != g.n:
        raise CycleError("edge set contains a directed cycle")
    return tuple(order)


def descendants(g: Dag, i: int) -> FrozenSet[int]:
    """All j != i reachable from i by a directed path."""
    ch = g.child_sets()
    seen = set()
    stack = [i]
    while stack:
        u = stack.pop()
        for v in ch[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    seen.discard(i)
    return frozenset(seen)


def nondescendants(g: Dag, i: int) -> FrozenSet[int]:
    """All j != i with no directed path i -> ... -> j."""
    if not (0 <= i < g.n):
        raise DagError(f"node {i} out of range")
    desc = descendants(g, i)
    return frozenset(j for j in range(g.n) if j != i and j not in desc)


def apply_permutation(g: Dag, p: Permutation) -> Dag:
    """Relabel nodes: edge (u, v) becomes (p(u), p(v))."""
    if p.n != g.n:
        raise DagError("permutation size does not match node count")
    return Dag(g.n, ((p(u), p(v)) for u, v in g.edges))


def pattern(g: Dag) -> Pattern:
    """Skeleton and immoralities of ``g`` (the Verma-Pearl invariant)."""
    skel = g.skeleton()
    pa = g.parent_sets()
    imms = []
    for k in range(g.n):
        ps = sorted(pa[k])
        for a, b in itertools.combinations(ps, 2):
            if (a, b) not in skel:
                imms.append((a, k, b))
    return Pattern(g.n, skel, imms)


def markov_equivalent(g1: Dag, g2: Dag) -> bool:
    """Same compatible distributions without relabeling: equal patterns."""
    return pattern(g1) == pattern(g2)


def pattern_isomorphic(p1: Pattern, p2: Pattern) -> Optional[Permutation]:
    """First permutation (in lexicographic order) carrying p1 onto p2.

    Returns a Permutation q with q(skeleton(p1)) = skeleton(p2) and
    q(immoralities(p1)) = immoralities(p2), or None. Candidate images are
    pruned by skeleton degree only; directed-degree pruning would be
    unsound for model isomorphism (a chain and a fork differ in
    out-degrees yet are isomorphic).
    """
    if p1.n != p2.n or len(p1.skeleton) != len(p2.skeleton) \
            or len(p1.immoralities) != len(p2.immoralities):
        return None
    n = p1.n
    deg1, deg2 = p1.degrees(), p2.degrees()
    if sorted(deg1) != sorted(deg2):
        return None
    adj1 = _adjacency(p1)
    adj2 = _adjacency(p2)

    mapping: List[int] = []
    used = [False] * n

    def extend(u: int) -> bool:
        if u == n:
            return _immoralities_match(p1, p2, mapping)
        for v in range(n):
            if used[v] or deg1[u] != deg2[v]:
                continue
            ok = True
            for w in range(u):
                if (w in adj1[u]) != (mapping[w] in adj2[v]):
                    ok = False
                    break
            if not ok:
                continue
            mapping.append(v)
            used[v] = True
            if extend(u + 1):
                return True
            used[v] = False
            mapping.pop()
        return False

    if extend(0):
        return Permutation(mapping)
    return None


def _adjacency(p: Pattern) -> List[set]:
    adj: List[set] = [set() for _ in range(p.n)]
    for a, b in p.skeleton:
        adj[a].add(b)
        adj[b].add(a)
    return adj


def _immoralities_match(p1: Pattern, p2: Pattern, mapping: List[int]) -> bool:
    mapped = frozenset((min(mapping[i], mapping[j]), mapping[k],
                        max(mapping[i], mapping[j]))
                       for i, k, j in p1.immoralities)
    return mapped == p2.immoralities


def relabel_pattern(p: Pattern, q: Permutation) -> Pattern:
    return Pattern(
        p.n,
        ((q(a), q(b)) for a, b in p.skeleton),
        ((q(i), q(k), q(j)) for i, k, j in p.immoralities),
    )
