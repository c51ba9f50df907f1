"""Points of the unit-diagonal DAG variety.

Covariance construction from structural-equation parameters, the
finite-field point sampler (draw edge entries, then solve each imposed
minor relation, which is linear in its one unknown non-edge entry),
exact membership checks, and the rank-based Gaussian CI test.

A note on normalization: rescaling a matrix by a nonzero diagonal,
sigma -> D sigma D, multiplies every minor |sigma_{RC}| by nonzero
factors, so vanishing of the generators and all ranks are unchanged.
Exact rational SEM covariances are therefore kept un-normalized (unit
diagonal would require square roots) and membership is tested on them
directly; sampled finite-field points have an exact unit diagonal.
"""

from __future__ import annotations

import hashlib
import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .ci import CiError, MinorSpec, TreeRelation, imposed_minors
from .dag import Dag, DagError, Permutation, topo_sort
from .fields import (
    Element,
    FieldArithmeticError,
    PrimeField,
    SingularPivotError,
    _det_frac,
    _det_mod,
    _rank_frac,
    solve_univariate_linear,
)

PRINCIPAL_MINOR_GUARD = 14  # full 2^n - 1 principal-minor check up to here
RESAMPLE_BUDGET = 64


class SamplerError(RuntimeError):
    """Rejection budget exhausted (modulus too small for the node count)."""


@dataclass(frozen=True)
class SymPoint:
    """A symmetric matrix over F_q (field set) or over Q (field None).

    Sampled points have unit diagonal (points of the normalized variety);
    rational SEM covariances keep their true positive diagonal, which is
    equivalent for every check in this package (see module docstring).
    """

    field: Optional[PrimeField]
    mat: Tuple[Tuple[Element, ...], ...]

    def __init__(self, field: Optional[PrimeField], mat):
        rows = [list(r) for r in mat]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise FieldArithmeticError("point matrix must be square")
        if field is not None:
            q = field.q
            rows = [[int(x) % q for x in r] for r in rows]
        else:
            rows = [[Fraction(x) for x in r] for r in rows]
        for i in range(n):
            if rows[i][i] == 0:
                raise FieldArithmeticError(f"zero diagonal entry at {i}")
            for j in range(i + 1, n):
                if rows[i][j] != rows[j][i]:
                    raise FieldArithmeticError(
                        f"matrix not symmetric at ({i},{j})")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "mat", tuple(tuple(r) for r in rows))

    @property
    def n(self) -> int:
        return len(self.mat)

    def is_unit_diagonal(self) -> bool:
        one = 1 if self.field is not None else Fraction(1)
        return all(self.mat[i][i] == one for i in range(self.n))

    def relabel(self, p: Permutation) -> "SymPoint":
        """Row/column relabeling: new[p(i)][p(j)] = old[i][j]."""
        if p.n != self.n:
            raise DagError("permutation size does not match point size")
        inv = p.inverse()
        return SymPoint(self.field,
                        [[self.mat[inv(a)][inv(b)] for b in range(self.n)]
                         for a in range(self.n)])

    def to_json_dict(self) -> dict:
        if self.field is not None:
            return {"q": self.field.q, "mat": [list(r) for r in self.mat]}
        return {"q": "rational",
                "mat": [[str(x) for x in r] for r in self.mat]}


@dataclass(frozen=True)
class SemParams:
    """Structural-equation parameters on a DAG.

    ``alpha`` assigns the edge coefficient to every edge (u, v), read as
    the weight of parent u in the equation for child v; ``omega`` assigns
    a nonzero innovation scale to every node.
    """

    g: Dag
    alpha: Dict[Tuple[int, int], Fraction]
    omega: Dict[int, Fraction]

    def __init__(self, g: Dag, alpha, omega):
        alpha = {(int(u), int(v)): Fraction(a) for (u, v), a in alpha.items()}
        omega = {int(i): Fraction(w) for i, w in omega.items()}
        if set(alpha) != set(g.edges):
            raise DagError("alpha must be supported exactly on the edges")
        if set(omega) != set(range(g.n)):
            raise DagError("omega must assign a value to every node")
        if any(w == 0 for w in omega.values()):
            raise DagError("omega entries must be nonzero")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "omega", omega)


def minor_eval(p: SymPoint, m: MinorSpec) -> Element:
    """Exact determinant of the specified submatrix of ``p``."""
    if any(not (0 <= r < p.n) for r in m.rows) \
            or any(not (0 <= c < p.n) for c in m.cols):
        raise CiError(f"minor indices out of range for n={p.n}")
    mat = p.mat
    rows = [[mat[r][c] for c in m.cols] for r in m.rows]
    if p.field is not None:
        return _det_mod(rows, p.field.q)
    return _det_frac(rows)


def relation_eval(p: SymPoint, rel: TreeRelation) -> Element:
    """Value of a reduced tree generator at ``p``."""
    mat = p.mat
    if rel.kind == "linear":
        return mat[rel.i][rel.j]
    val = mat[rel.i][rel.j] - mat[rel.i][rel.k] * mat[rel.k][rel.j]
    return val % p.field.q if p.field is not None else val


def sem_covariance(params: SemParams) -> SymPoint:
    """Exact rational covariance of the linear SEM given by ``params``.

    With A the edge-coefficient matrix and W the diagonal of innovation
    scales, this is (I - A)^-1 W^2 (I - A)^-T. The diagonal is left
    un-normalized; every membership check used downstream is invariant
    under the diagonal rescaling that would make it 1 (see module
    docstring), so no square roots are needed.
    """
    g = params.g
    n = g.n
    # rows of (I - A); A[child][parent] = alpha
    m = [[Fraction(1) if i == j else Fraction(0) for j in range(n)]
         for i in range(n)]
    for (u, v), a in params.alpha.items():
        m[v][u] -= a
    b = _invert_frac(m)
    w2 = [params.omega[i] ** 2 for i in range(n)]
    sigma = [[sum(b[i][k] * w2[k] * b[j][k] for k in range(n))
              for j in range(n)] for i in range(n)]
    return SymPoint(None, sigma)


def _invert_frac(m: List[List[Fraction]]) -> List[List[Fraction]]:
    n = len(m)
    aug = [list(m[i]) + [Fraction(1) if j == i else Fraction(0)
                         for j in range(n)] for i in range(n)]
    for c in range(n):
        piv = next((r for r in range(c, n) if aug[r][c]), None)
        if piv is None:
            raise FieldArithmeticError("singular matrix")
        aug[c], aug[piv] = aug[piv], aug[c]
        pv = aug[c][c]
        aug[c] = [x / pv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]


def _derive_seed(*parts) -> int:
    """Stable stream split: independent child streams from one master seed."""
    text = "/".join(str(p) for p in parts)
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:16], "big")


def complete_point(g: Dag, edge_values: Dict[Tuple[int, int], int],
                   field: PrimeField) -> SymPoint:
    """Fill in all non-edge entries of a unit-diagonal point from given
    edge entries by solving each imposed minor relation for its single
    unknown.

    Nodes are visited in topological order; within node i, earlier nodes j
    in increasing topological position. The relation |sigma_{iK,jK}| = 0
    with K = pa(i) is linear in sigma_ij with coefficient |sigma_KK|, so a
    vanishing |sigma_KK| raises SingularPivotError (callers resample).
    """
    q = field.q
    n = g.n
    if set(edge_values) != set(g.edges):
        raise CiError("edge_values must be keyed exactly by the edges")
    order = topo_sort(g)
    pa = g.parent_sets()
    mat = [[0] * n for _ in range(n)]
    for i in range(n):
        mat[i][i] = 1
    for (u, v) in g.edges:
        val = edge_values[(u, v)] % q
        mat[u][v] = val
        mat[v][u] = val
    for pos, i in enumerate(order):
        k = sorted(pa[i])
        for j in order[:pos]:
            if j in pa[i]:
                continue
            rows = [i] + k
            cols = [j] + k
            sub = [[mat[r][c] for c in cols] for r in rows]
            sub[0][0] = 0  # unknown cell sigma_ij
            d0 = _det_mod(sub, q)
            coeff = _det_mod([[mat[r][c] for c in k] for r in k], q)
            x = solve_univariate_linear(coeff, -d0 % q, field)
            mat[i][j] = x
            mat[j][i] = x
    return SymPoint(field, mat)


def principal_minors_nonzero(p: SymPoint) -> bool:
    """Whether all 2^n - 1 principal minors of ``p`` are nonzero.

    Guarded to n <= 14; the exponential enumeration is the point (it pins
    the locus where the variety is smooth and the sampler operates).
    """
    n = p.n
    if n > PRINCIPAL_MINOR_GUARD:
        raise FieldArithmeticError(
            f"principal-minor enumeration needs n <= {PRINCIPAL_MINOR_GUARD}")
    mat = p.mat
    if p.field is not None:
        q = p.field.q
        for size in range(1, n + 1):
            for idx in itertools.combinations(range(n), size):
                if _det_mod([[mat[r][c] for c in idx] for r in idx], q) == 0:
                    return False
        return True
    for size in range(1, n + 1):
        for idx in itertools.combinations(range(n), size):
            if _det_frac([[mat[r][c] for c in idx] for r in idx]) == 0:
                return False
    return True


def sample_point(g: Dag, field: PrimeField, seed: int) -> SymPoint:
    """A random unit-diagonal point of the variety of ``g`` over F_q.

    Edge entries are drawn uniformly from F_q, non-edge entries are forced
    by the imposed relations, and the draw is rejected unless the result
    has nonzero principal minors: all 2^n - 1 of them for n <= 14, and for
    larger n the conditioning-set minors |sigma_KK| that appear as solve
    pivots (the product of those is an equally valid saturation locus).
    Deterministic given ``seed``.
    """
    rng = random.Random(_derive_seed("edges", seed))
    q = field.q
    edges = g.sorted_edges()
    check_all = g.n <= PRINCIPAL_MINOR_GUARD
    for _ in range(RESAMPLE_BUDGET):
        values = {e: rng.randrange(q) for e in edges}
        try:
            point = complete_point(g, values, field)
        except SingularPivotError:
            continue
        if not check_all or principal_minors_nonzero(point):
            return point
    raise SamplerError(
        f"no admissible point in {RESAMPLE_BUDGET} draws over F_{q} "
        f"(modulus too small for n={g.n}?)")


def on_variety(p: SymPoint, g: Dag) -> bool:
    """Whether every imposed minor of ``g`` vanishes at ``p``."""
    if p.n != g.n:
        raise CiError("point size does not match node count")
    zero = 0 if p.field is not None else Fraction(0)
    for m in imposed_minors(g):
        if minor_eval(p, m) != zero:
            return False
    return True


def gaussian_ci(sigma: Sequence[Sequence[Element]], a: Iterable[int],
                b: Iterable[int], c: Iterable[int] = ()) -> bool:
    """Rank-based CI test on an exact symmetric rational matrix.

    True iff rank(sigma_{A+C, B+C}) equals rank(sigma_CC). Valid for
    singular (PSD) covariance matrices; positive semidefiniteness itself
    is assumed, not checked.
    """
    a, b, c = (sorted(int(x) for x in s) for s in (a, b, c))
    n = len(sigma)
    all_idx = a + b + c
    if len(set(a) | set(b) | set(c)) != len(a) + len(b) + len(c):
        raise CiError("A, B, C must be pairwise disjoint")
    if any(not (0 <= x < n) for x in all_idx):
        raise CiError(f"index out of range for n={n}")
    rows = a + c
    cols = b + c
    sub = [[Fraction(sigma[r][c_]) for c_ in cols] for r in rows]
    cc = [[Fraction(sigma[r][c_]) for c_ in c] for r in c]
    return _rank_frac(sub) == _rank_frac(cc)
