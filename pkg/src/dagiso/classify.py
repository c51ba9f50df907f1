"""Enumeration of directed tree models and their isomorphism classes.

Labeled trees come from Prüfer sequences, orientations from edge bitmasks
(orientations of a forest are automatically acyclic), so the stream has
exactly n^(n-2) * 2^(n-1) members for n >= 2. Classification first merges
identical labeled patterns (equal models outright), then buckets by cheap
isomorphism invariants, and resolves each bucket either with a canonical
form of the pattern (oracle mode) or with the randomized isomorphism test
(randomized mode); cross-check mode runs both and insists they agree.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple

from .dag import Dag, Pattern, pattern
from .fields import MERSENNE31
from .randomized import IsoParams, isomorphism_test
from .points import _derive_seed

ENUMERATION_GUARD = 8
CANONICAL_GUARD = 10
CLASSIFY_GUARD = 7


class ClassifyError(ValueError):
    """Invalid classification request."""


class CrossCheckError(RuntimeError):
    """Oracle and randomized modes disagreed; carries the offending pair."""

    def __init__(self, message: str, pair: Tuple[Dag, Dag]):
        super().__init__(message)
        self.pair = pair


@dataclass(frozen=True)
class ClassReport:
    """Partition of all labeled directed trees on n nodes into model-
    isomorphism classes. representatives[k] is the lexicographically least
    member of class k; class_sizes[k] counts its labeled members."""

    n: int
    mode: str
    class_count: int
    representatives: Tuple[Dag, ...]
    class_sizes: Tuple[int, ...]
    total: int

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "mode": self.mode,
            "class_count": self.class_count,
            "total_labeled_trees": self.total,
            "class_sizes": list(self.class_sizes),
            "representatives": [d.to_json_dict() for d in self.representatives],
        }


def _prufer_decode(seq: Tuple[int, ...], n: int) -> List[Tuple[int, int]]:
    """Edges (a, b) with a < b of the labeled tree encoded by ``seq``."""
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    import heapq
    leaves = [i for i in range(n) if degree[i] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((min(leaf, x), max(leaf, x)))
        degree[leaf] -= 1
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    u = heapq.heappop(leaves)
    v = heapq.heappop(leaves)
    edges.append((min(u, v), max(u, v)))
    return edges


def enumerate_tree_dags(n: int) -> Iterator[Dag]:
    """All labeled directed trees on n nodes, in deterministic order:
    Prüfer sequences lexicographically, then orientation bitmasks (bit b
    set reverses the b-th edge of the sorted undirected tree)."""
    if not 1 <= n <= ENUMERATION_GUARD:
        raise ClassifyError(
            f"tree enumeration needs 1 <= n <= {ENUMERATION_GUARD}, got {n}")
    if n == 1:
        yield Dag(1)
        return
    for seq in itertools.product(range(n), repeat=n - 2):
        base = sorted(_prufer_decode(seq, n))
        for mask in range(2 ** (n - 1)):
            edges = [(b, a) if (mask >> idx) & 1 else (a, b)
                     for idx, (a, b) in enumerate(base)]
            yield Dag(n, edges)


def labeled_tree_count(n: int) -> int:
    return 1 if n == 1 else n ** (n - 2) * 2 ** (n - 1)


# ---------------------------------------------------------------------------
# Canonical form of a pattern under relabeling: color refinement plus
# individualization, minimizing the relabeled encoding over the leaves of
# the search tree. Equal byte strings iff the patterns are isomorphic.

def _refine(adj: List[set], colors: List[int]) -> List[int]:
    n = len(colors)
    while True:
        sigs = [(colors[v], tuple(sorted(colors[u] for u in adj[v])))
                for v in range(n)]
        ranking = {s: r for r, s in enumerate(sorted(set(sigs)))}
        new = [ranking[s] for s in sigs]
        if new == colors:
            return colors
        colors = new


def _pattern_encoding(p: Pattern, position: List[int]) -> tuple:
    skel = tuple(sorted((min(position[a], position[b]),
                         max(position[a], position[b]))
                        for a, b in p.skeleton))
    imms = tuple(sorted((min(position[i], position[j]), position[k],
                         max(position[i], position[j]))
                        for i, k, j in p.immoralities))
    return (skel, imms)


def canonical_pattern_of(p: Pattern) -> bytes:
    n = p.n
    if n > CANONICAL_GUARD:
        raise ClassifyError(
            f"canonical form needs n <= {CANONICAL_GUARD}, got {n}")
    if not p.skeleton:
        # every relabeling encodes identically
        return repr((n, (), ())).encode()
    adj: List[set] = [set() for _ in range(n)]
    for a, b in p.skeleton:
        adj[a].add(b)
        adj[b].add(a)
    center = [0] * n
    tip = [0] * n
    for i, k, j in p.immoralities:
        center[k] += 1
        tip[i] += 1
        tip[j] += 1
    init = [(len(adj[v]), center[v], tip[v]) for v in range(n)]
    ranking = {s: r for r, s in enumerate(sorted(set(init)))}
    colors = _refine(adj, [ranking[s] for s in init])

    best: Optional[tuple] = None

    def search(colors: List[int]):
        nonlocal best
        groups: Dict[int, List[int]] = {}
        for v, c in enumerate(colors):
            groups.setdefault(c, []).append(v)
        target = None
        for c in sorted(groups):
            if len(groups[c]) > 1:
                target = groups[c]
                break
        if target is None:
            position = colors  # discrete: color rank is the new label
            cand = _pattern_encoding(p, position)
            if best is None or cand < best:
                best = cand
            return
        for v in target:
            # individualize v: give it a fresh color below its class
            branched = [2 * c + (0 if u == v else 1) if c == colors[v]
                        else 2 * c for u, c in zip(range(n), colors)]
            ranking = {s: r for r, s in enumerate(sorted(set(branched)))}
            search(_refine(adj, [ranking[s] for s in branched]))

    search(colors)
    return repr((n, best[0], best[1])).encode()


def canonical_pattern(g: Dag) -> bytes:
    """Canonical byte string of the pattern of ``g`` under relabeling:
    equal strings exactly when the models are isomorphic."""
    return canonical_pattern_of(pattern(g))


# ---------------------------------------------------------------------------

@dataclass
class _Entry:
    """One distinct labeled pattern: a witness member and its multiplicity."""

    member: Dag
    member_key: Tuple[Tuple[int, int], ...]
    pat: Pattern
    count: int


def _collect_entries(n: int) -> List[_Entry]:
    index: Dict[tuple, _Entry] = {}
    for g in enumerate_tree_dags(n):
        p = pattern(g)
        key = (tuple(sorted(p.skeleton)), tuple(sorted(p.immoralities)))
        member_key = tuple(g.sorted_edges())
        entry = index.get(key)
        if entry is None:
            index[key] = _Entry(g, member_key, p, 1)
        else:
            entry.count += 1
            if member_key < entry.member_key:
                entry.member = g
                entry.member_key = member_key
    return [index[k] for k in sorted(index)]


def _bucket_key(e: _Entry) -> tuple:
    """Cheap exact invariants of the isomorphism class.

    The leading components (sorted skeleton degree sequence, immorality
    count) do the coarse split; the degree profiles of immorality centers
    and tips refine it so buckets rarely mix classes, which keeps the
    randomized mode's pairwise testing affordable.
    """
    deg = e.pat.degrees()
    centers = sorted(deg[k] for _, k, _ in e.pat.immoralities)
    tips = sorted((min(deg[i], deg[j]), max(deg[i], deg[j]))
                  for i, _, j in e.pat.immoralities)
    return (tuple(sorted(deg)), len(e.pat.immoralities),
            tuple(centers), tuple(tips))


def _classify_oracle(entries: List[_Entry]) -> List[List[_Entry]]:
    classes: Dict[tuple, List[_Entry]] = {}
    for e in entries:
        key = (_bucket_key(e), canonical_pattern_of(e.pat))
        classes.setdefault(key, []).append(e)
    return [classes[k] for k in sorted(classes)]


def _classify_randomized(entries: List[_Entry], q: int, m: int,
                         seed: int) -> List[List[_Entry]]:
    buckets: Dict[tuple, List[_Entry]] = {}
    for e in entries:
        buckets.setdefault(_bucket_key(e), []).append(e)
    classes: List[List[_Entry]] = []
    counter = 0
    for key in sorted(buckets):
        reps: List[List[_Entry]] = []
        for e in buckets[key]:
            placed = False
            for group in reps:
                counter += 1
                params = IsoParams(
                    m=m, q=q,
                    d_bound=e.member.num_edges + group[0].member.num_edges
                    + 2 * e.member.n,
                    seed=_derive_seed("classify", seed, counter))
                if isomorphism_test(e.member, group[0].member, params).accepted:
                    group.append(e)
                    placed = True
                    break
            if not placed:
                reps.append([e])
        classes.extend(reps)
    return classes


def _report(n: int, mode: str, classes: List[List[_Entry]]) -> ClassReport:
    packed = []
    for group in classes:
        rep = min(group, key=lambda e: e.member_key)
        size = sum(e.count for e in group)
        packed.append((rep.member_key, rep.member, size))
    packed.sort()
    return ClassReport(
        n=n, mode=mode, class_count=len(packed),
        representatives=tuple(p[1] for p in packed),
        class_sizes=tuple(p[2] for p in packed),
        total=sum(p[2] for p in packed))


def classify_trees(n: int, mode: str = "oracle", q: int = MERSENNE31,
                   m: int = 3, seed: int = 0) -> ClassReport:
    """Partition all labeled directed trees on n nodes into isomorphism
    classes.

    mode 'oracle' dedupes by canonical pattern; 'randomized' merges within
    invariant buckets by the randomized isomorphism test; 'cross-check'
    runs both and raises CrossCheckError (with the offending pair) on any
    disagreement.
    """
    if not 1 <= n <= CLASSIFY_GUARD:
        raise ClassifyError(
            f"classification needs 1 <= n <= {CLASSIFY_GUARD}, got {n}")
    if mode not in ("oracle", "randomized", "cross-check"):
        raise ClassifyError(f"unknown mode {mode!r}")
    entries = _collect_entries(n)
    if mode == "oracle":
        return _report(n, mode, _classify_oracle(entries))
    if mode == "randomized":
        return _report(n, mode, _classify_randomized(entries, q, m, seed))
    oracle_classes = _classify_oracle(entries)
    rand_classes = _classify_randomized(entries, q, m, seed)
    _assert_same_partition(oracle_classes, rand_classes)
    report = _report(n, "cross-check", oracle_classes)
    return report


def _assert_same_partition(a: List[List[_Entry]], b: List[List[_Entry]]):
    def as_sets(classes):
        return {frozenset(e.member_key for e in group): group
                for group in classes}

    sa, sb = as_sets(a), as_sets(b)
    if set(sa) == set(sb):
        return
    # locate a concrete offending pair for the error report
    for key in set(sa) - set(sb):
        group = sa[key]
        for other_key, other in sb.items():
            members = {e.member_key for e in other}
            if members & key and members != key:
                inside = next(e for e in group if e.member_key in members)
                outside = next(e for e in group
                               if e.member_key not in members)
                raise CrossCheckError(
                    "oracle and randomized classifications disagree on "
                    f"{inside.member.to_json_dict()} vs "
                    f"{outside.member.to_json_dict()}",
                    (inside.member, outside.member))
    raise CrossCheckError("oracle and randomized classifications disagree",
                          (a[0][0].member, b[0][0].member))
