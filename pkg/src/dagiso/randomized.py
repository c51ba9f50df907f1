"""Randomized isomorphism and Markov-equivalence tests with exact
failure-probability certificates.

Per round, a fresh point is sampled from each graph's variety over F_q and
each point is tested for membership in the other variety, after a
permutation of indices (isomorphism) or directly (equivalence). Membership
of a variety point in the wrong variety requires hitting the root set of a
nonzero polynomial, so the tests are one-sided: graphs that really are
isomorphic (equivalent) are never rejected, and the false-accept
probability decays with the modulus and the round count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence, Tuple

from .ci import imposed_minors
from .dag import Dag, DagError, Permutation
from .fields import MERSENNE31, FieldArithmeticError, PrimeField, _det_mod
from .points import SymPoint, _derive_seed, sample_point

ISO_NODE_GUARD = 10  # factorial witness search; equivalence has no such cap


class ParameterError(ValueError):
    """Unusable test parameters."""


@dataclass(frozen=True)
class IsoParams:
    """Round count m, prime modulus q, degree surrogate, master seed."""

    m: int
    q: int
    d_bound: int
    seed: int

    def __post_init__(self):
        if self.m < 1:
            raise ParameterError(f"need m >= 1, got {self.m}")
        if self.q <= self.d_bound:
            raise ParameterError(
                f"need q > d_bound, got q={self.q}, d_bound={self.d_bound}")


@dataclass(frozen=True)
class IsoVerdict:
    """Outcome of a randomized test, with its audit trail.

    ``witnesses`` holds one (forward, backward) permutation pair per round
    on a yes answer; ``refuting_round`` is the 1-based failing round on a
    no answer (0 when a deterministic precheck refuted before sampling).
    ``failure_bound`` is the exact rational certificate on the false-accept
    probability; it is heuristic in that the degree entering it is a
    documented surrogate, and it is flagged vacuous when >= 1.
    """

    answer: str
    mode: str
    n: int
    rounds_run: int
    witnesses: Optional[Tuple[Tuple[Permutation, Permutation], ...]]
    refuting_round: Optional[int]
    failure_bound: Fraction
    params: IsoParams

    @property
    def accepted(self) -> bool:
        return self.answer == "yes"

    @property
    def bound_vacuous(self) -> bool:
        return self.failure_bound >= 1

    def to_json_dict(self) -> dict:
        return {
            "answer": self.answer,
            "mode": self.mode,
            "n": self.n,
            "rounds_run": self.rounds_run,
            "witnesses": None if self.witnesses is None else [
                {"forward": list(f.mapping), "backward": list(b.mapping)}
                for f, b in self.witnesses],
            "refuting_round": self.refuting_round,
            "certificate": {
                "failure_bound": f"{self.failure_bound.numerator}"
                                 f"/{self.failure_bound.denominator}",
                "failure_bound_float": float(self.failure_bound),
                "vacuous": self.bound_vacuous,
                "heuristic": True,
            },
            "params": {"m": self.params.m, "q": self.params.q,
                       "d_bound": self.params.d_bound,
                       "seed": self.params.seed},
        }


def degree_surrogate(g: Dag, g2: Dag) -> int:
    """Conservative stand-in for the degree of the sampler's excluded
    locus: the total degree of both graphs' conditioning-set principal
    minors (= parent-set sizes summed = edge counts) plus 2n slack for
    the completion denominators.
    """
    return g.num_edges + g2.num_edges + 2 * g.n


def default_params(g: Dag, g2: Dag, m: int = 3, q: int = MERSENNE31,
                   seed: int = 0) -> IsoParams:
    return IsoParams(m=m, q=q, d_bound=degree_surrogate(g, g2), seed=seed)


def failure_bound(n: int, d_bound: int, q: int, m: int,
                  with_permutations: bool = True) -> Fraction:
    """Exact false-accept certificate (n! (n+2d-1) / (q-d))^m, without the
    n! factor for the permutation-free equivalence variant."""
    if q <= d_bound:
        raise ParameterError(f"need q > d_bound, got q={q}, d_bound={d_bound}")
    if m < 1:
        raise ParameterError(f"need m >= 1, got {m}")
    num = n + 2 * d_bound - 1
    if with_permutations:
        num *= math.factorial(n)
    return Fraction(num, q - d_bound) ** m


def choose_params(n: int, edges: int, target_eps: Fraction,
                  q: int = MERSENNE31, seed: int = 0) -> IsoParams:
    """Smallest round count m whose certificate meets ``target_eps`` at
    modulus q, with the degree surrogate for two graphs of the given size."""
    eps = Fraction(target_eps)
    if eps <= 0:
        raise ParameterError(f"target_eps must be positive, got {eps}")
    d = 2 * edges + 2 * n
    if eps >= 1:
        return IsoParams(m=1, q=q, d_bound=d, seed=seed)
    base = failure_bound(n, d, q, 1)
    if base >= 1:
        raise ParameterError(
            f"single-round bound {base} >= 1 at q={q}; pick a larger modulus")
    m = 1
    bound = base
    while bound > eps:
        m += 1
        bound *= base
    return IsoParams(m=m, q=q, d_bound=d, seed=seed)


def _compatible_perms(src_deg: Sequence[int],
                      tgt_deg: Sequence[int]) -> Iterator[List[int]]:
    """All permutations with tgt_deg[pi[i]] == src_deg[i], lexicographically."""
    n = len(src_deg)
    used = [False] * n
    image = [0] * n

    def rec(i: int) -> Iterator[List[int]]:
        if i == n:
            yield image[:]
            return
        for v in range(n):
            if not used[v] and tgt_deg[v] == src_deg[i]:
                used[v] = True
                image[i] = v
                yield from rec(i + 1)
                used[v] = False

    yield from rec(0)


def _lands_on(z: SymPoint, inv: Sequence[int],
              minors, q: int) -> bool:
    """Whether the relabeled point (via inverse index map) kills all minors."""
    mat = z.mat
    for rows, cols in minors:
        sub = [[mat[inv[r]][inv[c]] for c in cols] for r in rows]
        if _det_mod(sub, q):
            return False
    return True


def perm_witness(z: SymPoint, target: Dag,
                 source_degrees: Optional[Sequence[int]] = None
                 ) -> Optional[Permutation]:
    """First permutation (deterministic lexicographic order) whose action
    on the rows/columns of ``z`` lands on the variety of ``target``.

    When ``source_degrees`` (skeleton degrees of the graph ``z`` was
    sampled from) is given, candidates are restricted to skeleton-degree
    compatible maps; this prunes the n! search without changing answers.
    """
    n = target.n
    if z.n != n:
        raise DagError("point size does not match target node count")
    if z.field is None:
        raise FieldArithmeticError("witness search expects a finite-field point")
    q = z.field.q
    minors = [(m.rows, m.cols) for m in imposed_minors(target)]
    minors.sort(key=lambda rc: len(rc[0]))  # cheap minors refute first
    if source_degrees is None:
        candidates = _compatible_perms([0] * n, [0] * n)  # all permutations
    else:
        tgt = target.skeleton_degrees()
        if sorted(source_degrees) != sorted(tgt):
            return None
        candidates = _compatible_perms(list(source_degrees), tgt)
    inv = [0] * n
    for image in candidates:
        for i, v in enumerate(image):
            inv[v] = i
        if _lands_on(z, inv, minors, q):
            return Permutation(image)
    return None


def _structural_no(mode: str, g: Dag, params: IsoParams) -> IsoVerdict:
    return IsoVerdict(
        answer="no", mode=mode, n=g.n, rounds_run=0, witnesses=None,
        refuting_round=0,
        failure_bound=failure_bound(g.n, params.d_bound, params.q, params.m,
                                    with_permutations=(mode == "isomorphism")),
        params=params)


def isomorphism_test(g: Dag, g2: Dag,
                     params: Optional[IsoParams] = None) -> IsoVerdict:
    """Randomized model-isomorphism decision.

    Prechecks: unequal node counts refute immediately; unequal edge counts
    refute because the varieties then differ in dimension. Per round, a
    fresh point is sampled from each graph and a permutation witness is
    searched in both directions; a yes answer requires every round to
    produce both witnesses. Isomorphic inputs always answer yes.
    """
    if params is None:
        params = default_params(g, g2)
    mode = "isomorphism"
    if g.n != g2.n:
        return _structural_no(mode, g, params)
    if g.n > ISO_NODE_GUARD:
        raise ParameterError(
            f"isomorphism test searches permutations; needs n <= {ISO_NODE_GUARD}")
    if g.num_edges != g2.num_edges:
        return _structural_no(mode, g, params)
    field = PrimeField(params.q)
    deg_g = g.skeleton_degrees()
    deg_g2 = g2.skeleton_degrees()
    witnesses = []
    for r in range(1, params.m + 1):
        z_g = sample_point(g, field, _derive_seed(params.seed, r, "a"))
        z_g2 = sample_point(g2, field, _derive_seed(params.seed, r, "b"))
        fwd = perm_witness(z_g, g2, source_degrees=deg_g)
        if fwd is None:
            return IsoVerdict(answer="no", mode=mode, n=g.n, rounds_run=r,
                              witnesses=None, refuting_round=r,
                              failure_bound=failure_bound(
                                  g.n, params.d_bound, params.q, params.m),
                              params=params)
        bwd = perm_witness(z_g2, g, source_degrees=deg_g2)
        if bwd is None:
            return IsoVerdict(answer="no", mode=mode, n=g.n, rounds_run=r,
                              witnesses=None, refuting_round=r,
                              failure_bound=failure_bound(
                                  g.n, params.d_bound, params.q, params.m),
                              params=params)
        witnesses.append((fwd, bwd))
    return IsoVerdict(answer="yes", mode=mode, n=g.n, rounds_run=params.m,
                      witnesses=tuple(witnesses), refuting_round=None,
                      failure_bound=failure_bound(
                          g.n, params.d_bound, params.q, params.m),
                      params=params)


def equivalence_test(g: Dag, g2: Dag,
                     params: Optional[IsoParams] = None) -> IsoVerdict:
    """Randomized Markov-equivalence decision: the permutation-free
    variant (identity relabeling only), with no factorial component, so it
    scales to hundreds of nodes. Equivalent inputs always answer yes.
    """
    if params is None:
        params = default_params(g, g2)
    mode = "equivalence"
    if g.n != g2.n:
        return _structural_no(mode, g, params)
    field = PrimeField(params.q)
    minors_g = [(m.rows, m.cols) for m in imposed_minors(g)]
    minors_g2 = [(m.rows, m.cols) for m in imposed_minors(g2)]
    identity = list(range(g.n))
    ident_perm = Permutation(identity)
    witnesses = []
    for r in range(1, params.m + 1):
        z_g = sample_point(g, field, _derive_seed(params.seed, r, "a"))
        z_g2 = sample_point(g2, field, _derive_seed(params.seed, r, "b"))
        ok = (_lands_on(z_g, identity, minors_g2, params.q)
              and _lands_on(z_g2, identity, minors_g, params.q))
        if not ok:
            return IsoVerdict(answer="no", mode=mode, n=g.n, rounds_run=r,
                              witnesses=None, refuting_round=r,
                              failure_bound=failure_bound(
                                  g.n, params.d_bound, params.q, params.m,
                                  with_permutations=False),
                              params=params)
        witnesses.append((ident_perm, ident_perm))
    return IsoVerdict(answer="yes", mode=mode, n=g.n, rounds_run=params.m,
                      witnesses=tuple(witnesses), refuting_round=None,
                      failure_bound=failure_bound(
                          g.n, params.d_bound, params.q, params.m,
                          with_permutations=False),
                      params=params)
