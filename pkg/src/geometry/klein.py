"""The model of P(R) on the Klein quadric of PG(5, K).

Points of PG(5, K) are coordinate 6-tuples normalized so that the first
nonzero entry is 1. The first four coordinates are read row-wise as a 2x2
matrix C, and the Klein form is Q = det C - x5 x6.
"""
from __future__ import annotations

import itertools
import logging
from typing import Iterable, Optional, Sequence

import numpy as np

from ..algebra.field import FieldSpec
from ..algebra.ring import RingElement, RingSpec
from ..utils.report import CheckReport
from .linalg import FieldLinalg
from .projline import Matrix2R, PointKind, ProjectiveLine, ProjPoint

logger = logging.getLogger(__name__)

ProjPoint5 = tuple[int, ...]

VERTEX: ProjPoint5 = (0, 1, 0, 0, 0, 0)


# ----------------------------------------------------------------------
# 2x2 matrices over K
# ----------------------------------------------------------------------
def embed_ring(ring: RingSpec, r: RingElement) -> np.ndarray:
    """a + b eps -> [[a, b], [0, a^sigma]]."""
    return np.array([[r.a, r.b], [0, ring.aut(r.a)]], dtype=np.int64)


def mat2_det(field: FieldSpec, M: np.ndarray) -> int:
    return field.sub(field.mul(int(M[0, 0]), int(M[1, 1])), field.mul(int(M[0, 1]), int(M[1, 0])))


def mat2_adjugate(field: FieldSpec, M: np.ndarray) -> np.ndarray:
    """[[a, b], [c, d]] -> [[d, -b], [-c, a]]."""
    return np.array(
        [[M[1, 1], field.neg(int(M[0, 1]))], [field.neg(int(M[1, 0])), M[0, 0]]],
        dtype=np.int64,
    )


def mat2_mul(field: FieldSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return FieldLinalg(field).matmul(A, B)


# ----------------------------------------------------------------------
# The quadratic form
# ----------------------------------------------------------------------
def klein_form(field: FieldSpec, x: Sequence[int]) -> int:
    """Q(x) = x1 x4 - x2 x3 - x5 x6."""
    F = field
    x1, x2, x3, x4, x5, x6 = (int(c) for c in x)
    return F.sub(F.sub(F.mul(x1, x4), F.mul(x2, x3)), F.mul(x5, x6))


def klein_form_rows(field: FieldSpec, X: np.ndarray) -> np.ndarray:
    mul, sub = field.mul_table, field.sub_table
    X = np.asarray(X, dtype=np.int64)
    return sub[sub[mul[X[:, 0], X[:, 3]], mul[X[:, 1], X[:, 2]]], mul[X[:, 4], X[:, 5]]]


def polar_form(field: FieldSpec, x: Sequence[int], y: Sequence[int]) -> int:
    """beta(x, y) = Q(x + y) - Q(x) - Q(y)."""
    F = field
    s = [F.add(int(a), int(b)) for a, b in zip(x, y)]
    return F.sub(F.sub(klein_form(F, s), klein_form(F, x)), klein_form(F, y))


# ----------------------------------------------------------------------
# Hotje's map
# ----------------------------------------------------------------------
def phi_vector(line: ProjectiveLine, p: ProjPoint) -> tuple[int, ...]:
    """Unnormalized image: R(a + b eps, 1) -> (a, b, 0, a^sigma, a a^sigma, 1), R(1, c eps) -> (0, -c, 0, 0, 1, 0)."""
    ring = line.ring
    F = ring.field
    if p.kind == PointKind.AFFINE:
        a, b = p.coord
        a_s = ring.aut(a)
        return (a, b, 0, a_s, F.mul(a, a_s), 1)
    return (0, F.neg(p.coord.b), 0, 0, 1, 0)


def phi(line: ProjectiveLine, p: ProjPoint) -> ProjPoint5:
    F = line.ring.field
    image = FieldLinalg(F).normalize(phi_vector(line, p))
    assert klein_form(F, image) == 0, "image off the Klein quadric"
    return image


def phi_general(field: FieldSpec, A: np.ndarray, B: np.ndarray) -> ProjPoint5:
    """M(A, B) -> K(adj(B) A, det A, det B)."""
    linalg = FieldLinalg(field)
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if linalg.rank(np.hstack([A, B])) != 2:
        raise ValueError("rows (A | B) do not extend to an invertible 4x4 matrix")
    C = linalg.matmul(mat2_adjugate(field, B), A)
    vector = [int(C[0, 0]), int(C[0, 1]), int(C[1, 0]), int(C[1, 1]), mat2_det(field, A), mat2_det(field, B)]
    return linalg.normalize(vector)


def phi_of_pair(line: ProjectiveLine, a: RingElement, b: RingElement) -> ProjPoint5:
    """Image of R(a, b) from any admissible representative."""
    ring = line.ring
    return phi_general(ring.field, embed_ring(ring, a), embed_ring(ring, b))


def line_in_quadric(field: FieldSpec, p: Sequence[int], r: Sequence[int]) -> bool:
    """Whether the line pr lies on the Klein quadric."""
    linalg = FieldLinalg(field)
    if linalg.normalize(p) == linalg.normalize(r):
        raise ValueError("a line needs two distinct points")
    return klein_form(field, p) == 0 and klein_form(field, r) == 0 and polar_form(field, p, r) == 0


def line_in_quadric_exhaustive(field: FieldSpec, p: Sequence[int], r: Sequence[int]) -> bool:
    points = FieldLinalg(field).line_points(p, r)
    return all(klein_form(field, x) == 0 for x in points)


# ----------------------------------------------------------------------
# Subspace coordinates
# ----------------------------------------------------------------------
class SubspaceFrame:
    """Coordinates with respect to an independent set of rows."""

    def __init__(self, linalg: FieldLinalg, basis: np.ndarray):
        self.linalg = linalg
        self.basis = linalg.array(basis)
        _, pivots = linalg.rref(self.basis)
        if len(pivots) != len(self.basis):
            raise ValueError("frame rows are linearly dependent")
        self.pivots = pivots
        self._inverse = linalg.inverse(self.basis[:, pivots])

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coords(self, X: np.ndarray) -> np.ndarray:
        X = self.linalg.array(X)
        return self.linalg.matmul(X[:, self.pivots], self._inverse)

    def contains_rows(self, X: np.ndarray) -> np.ndarray:
        X = self.linalg.array(X)
        return np.all(self.linalg.matmul(self.coords(X), self.basis) == X, axis=1)

    @classmethod
    def greedy(cls, linalg: FieldLinalg, rows: Iterable[Sequence[int]]) -> "SubspaceFrame":
        """Extend the first row by each later row that raises the rank."""
        chosen: list[Sequence[int]] = []
        for row in rows:
            if linalg.rank(linalg.array(chosen + [row])) == len(chosen) + 1:
                chosen.append(row)
        return cls(linalg, linalg.array(chosen))


class KleinModel:
    """Images of the points of P(R), the vertex S and the cone frame."""

    def __init__(self, line: ProjectiveLine):
        self.line = line
        self.ring = line.ring
        self.field = line.ring.field
        self.linalg = FieldLinalg(self.field)
        self.q = line.q
        self.sigma_is_identity = line.ring.aut.is_identity

        self.images: list[ProjPoint5] = [phi(line, p) for p in line.points]
        self.index: dict[ProjPoint5, int] = {x: i for i, x in enumerate(self.images)}
        assert len(self.index) == line.v, "Hotje's map is not injective"
        self.image_array = np.array(self.images, dtype=np.int64)
        self.vertex: ProjPoint5 = VERTEX
        assert self.vertex not in self.index, "vertex lies in the image of P(R)"

        # V = span of the cone; coordinate 0 is the S-component
        self.frame = SubspaceFrame.greedy(self.linalg, [list(self.vertex)] + [list(x) for x in self.images])
        self.image_coords = self.frame.coords(self.image_array)
        logger.debug(f"Klein model over {self.ring.describe()}: cone spans a {self.frame.dim - 1}-space")

    @property
    def span_dim(self) -> int:
        """Vector dimension of the span of the cone."""
        return self.frame.dim

    def generator_key(self, x: Sequence[int]) -> ProjPoint5:
        """The cone generator through x, identified by x with x2 dropped."""
        y = list(x)
        y[1] = 0
        return self.linalg.normalize(y)

    def base_images(self) -> list[int]:
        from ..design.builder import base_block
        return list(base_block(self.line))

    def complements_containing(self, points: Sequence[int]) -> int:
        """Number of hyperplanes of V missing S that contain the images of points."""
        coords = self.image_coords[list(points)]
        null = self.linalg.nullspace(coords)
        if len(null) == 0 or not np.any(null[:, 0] != 0):
            return 0
        return self.q ** (len(null) - 1)


# ----------------------------------------------------------------------
# Model checks
# ----------------------------------------------------------------------
def verify_tangent_hyperplane(model: KleinModel) -> CheckReport:
    """H: x3 = 0 is {x : beta(x, S) = 0}."""
    F = model.field
    report = CheckReport(name="tangent_hyperplane")
    for i in range(6):
        e = [0] * 6
        e[i] = 1
        value = polar_form(F, e, model.vertex)
        report.require((value == 0) == (i != 2), f"beta(e{i + 1}, S) = {value}")
    report.require(klein_form(F, model.vertex) == 0, "vertex is not on the quadric")
    return report


def verify_cone(model: KleinModel) -> CheckReport:
    """Image of P(R) is the cone over Phi(B0) with vertex S, minus S, inside H."""
    report = CheckReport(name="cone")
    F = model.field
    line = model.line
    linalg = model.linalg

    report.require(bool(np.all(klein_form_rows(F, model.image_array) == 0)), "an image is off the quadric")

    cone: set[ProjPoint5] = set()
    base = model.base_images()
    for b in base:
        cone |= linalg.line_points(model.vertex, model.images[b])
    cone.discard(model.vertex)
    report.require(cone == set(model.images), "image of P(R) differs from the cone minus its vertex")

    in_h = model.image_array[:, 2] == 0
    report.require(bool(np.all(in_h)), f"{int(np.sum(~in_h))} images outside the hyperplane x3 = 0")

    generators: dict[ProjPoint5, list[int]] = {}
    for i, x in enumerate(model.images):
        generators.setdefault(model.generator_key(x), []).append(i)
    by_generator = sorted(sorted(members) for members in generators.values())
    report.require(
        by_generator == sorted(line.parallel_classes),
        "parallel classes are not the generators of the cone",
    )
    for b in base:
        report.require(
            line_in_quadric(F, model.vertex, model.images[b]),
            f"generator through point {b} is not on the quadric",
        )
    report.merge(verify_tangent_hyperplane(model))
    report.details = {
        'generators': len(generators),
        'points_per_generator': sorted({len(m) for m in generators.values()}),
        'images': len(model.images),
    }
    return report


def verify_parallel_lines(model: KleinModel) -> CheckReport:
    """p || r iff the line Phi(p) Phi(r) lies on the quadric."""
    report = CheckReport(name="parallel_lines")
    line = model.line
    F = model.field
    pairs = 0
    for i, j in itertools.combinations(range(line.v), 2):
        pairs += 1
        on_quadric = line_in_quadric(F, model.images[i], model.images[j])
        report.require(
            on_quadric == line.is_parallel_index(i, j),
            f"points {i}, {j}: parallel={line.is_parallel_index(i, j)}, line on quadric={on_quadric}",
        )
    report.details = {'pairs': pairs}
    return report


def hyperbolic_u0_count(model: KleinModel) -> int:
    """Points of U0: x2 = x3 = 0 on the Klein quadric."""
    P = model.linalg.projective_points(4)
    X = np.zeros((len(P), 6), dtype=np.int64)
    X[:, [0, 3, 4, 5]] = P
    return int(np.sum(klein_form_rows(model.field, X) == 0))


def verify_cap(model: KleinModel) -> CheckReport:
    """Phi(B0) is a cap: a conic in a plane if sigma = id, spanning U0 otherwise."""
    report = CheckReport(name="cap")
    linalg = model.linalg
    F = model.field
    base = model.base_images()
    B = model.image_array[base]

    collinear = 0
    for triple in itertools.combinations(range(len(base)), 3):
        if linalg.rank(B[list(triple)]) < 3:
            collinear += 1
    report.require(collinear == 0, f"{collinear} collinear triples in Phi(B0)")

    rank = linalg.rank(B)
    if model.sigma_is_identity:
        plane = linalg.span_points(B)
        section = {x for x in plane if klein_form(F, x) == 0}
        report.require(rank == 3, f"Phi(B0) spans rank {rank}, expected a plane")
        report.require(section == {model.images[b] for b in base}, "plane section of the quadric is not Phi(B0)")
        report.details['conic_points'] = len(section)
    else:
        in_u0 = bool(np.all(B[:, 1:3] == 0))
        report.require(in_u0, "Phi(B0) leaves U0: x2 = x3 = 0")
        report.require(rank == 4, f"Phi(B0) spans rank {rank}, expected the 3-space U0")
    hyperbolic = hyperbolic_u0_count(model)
    report.require(hyperbolic == (model.q + 1) ** 2, f"U0 meets the quadric in {hyperbolic} points")
    report.details.update({
        'points': len(base),
        'rank': rank,
        'collinear_triples': collinear,
        'u0_quadric_points': hyperbolic,
    })
    return report


def _block_form(model: KleinModel, block: Sequence[int]) -> Optional[np.ndarray]:
    """The linear form (1, c) in frame coordinates vanishing on Phi(block), if any."""
    null = model.linalg.nullspace(model.image_coords[list(block)])
    if len(null) != 1 or null[0, 0] == 0:
        return None
    return model.linalg.scale(int(model.field.inv(int(null[0, 0]))), null[0])


def verify_blocks_geometric(model: KleinModel, blocks: Sequence[Sequence[int]]) -> CheckReport:
    """Blocks are the sections of the cone by the hyperplanes of V missing S."""
    report = CheckReport(name="blocks_geometric")
    linalg = model.linalg
    d = model.span_dim
    expected = model.q ** (d - 1)
    keys: set[tuple[int, ...]] = set()

    for j, block in enumerate(blocks):
        form = _block_form(model, block)
        if form is None:
            report.fail(f"block {j}: images do not span a hyperplane of V missing S")
            continue
        values = linalg.matmul(model.image_coords, form[:, None])[:, 0]
        section = sorted(int(i) for i in np.nonzero(values == 0)[0])
        report.require(section == sorted(block), f"block {j}: cone section has {len(section)} points")
        keys.add(tuple(int(c) for c in form[1:]))

    report.require(len(keys) == len(blocks), f"{len(blocks) - len(keys)} blocks share a complement")
    report.require(len(keys) == expected, f"{len(keys)} complements met, expected q^{d - 1} = {expected}")

    # a hyperplane through S meets the cone in whole generators
    through_s = np.zeros(d, dtype=np.int64)
    through_s[1] = 1
    values = linalg.matmul(model.image_coords, through_s[:, None])[:, 0]
    section = set(int(i) for i in np.nonzero(values == 0)[0])
    classes_hit = {int(model.line.class_of[i]) for i in section}
    union = {p for c in classes_hit for p in model.line.parallel_classes[c]}
    report.require(bool(section) and section == union, "hyperplane through S does not meet the cone in generators")
    report.require(tuple(sorted(section)) not in {tuple(sorted(b)) for b in blocks},
                   "hyperplane through S cuts out a block")

    report.details = {
        'span_rank': d,
        'blocks': len(blocks),
        'complements': len(keys),
        'expected_complements': expected,
        'negative_control_points': len(section),
    }
    return report


def verify_baer(model: KleinModel) -> CheckReport:
    """Phi(B0) is the elliptic quadric N(x) = f1 f2 of the Baer subspace {(x,0,0,x^sigma,f1,f2)}."""
    ring = model.ring
    aut = ring.aut
    F = model.field
    if aut.is_identity or aut.degree != 2:
        raise ValueError(f"Baer subspace check needs q = m^2 with sigma != id (q={model.q}, m={aut.m})")
    report = CheckReport(name="baer")
    m = aut.m
    fixed = aut.fixed_points()
    linalg = model.linalg

    baer = [
        (x, 0, 0, aut(x), f1, f2)
        for x in F.elements() for f1 in fixed for f2 in fixed
    ]
    baer_set = set(baer)
    report.require(len(baer_set) == m ** 4, f"|Baer subspace| = {len(baer_set)}, expected m^4")
    closed = all(
        tuple(F.add(a, b) for a, b in zip(u, w)) in baer_set
        for u, w in itertools.combinations(baer, 2)
    ) and all(
        tuple(F.mul(f, a) for a in u) in baer_set
        for f in fixed for u in baer
    )
    report.require(closed, "Baer subspace is not closed under F-linear combinations")
    report.require(linalg.rank(np.array(baer, dtype=np.int64)) == 4, "Baer subspace does not span U0 over K")

    base = model.base_images()
    for b in base:
        report.require(phi_vector(model.line, model.line.points[b]) in baer_set,
                       f"Phi of base point {b} is outside the Baer subspace")

    zero_set = [u for u in baer if any(u) and F.mul(u[0], aut(u[0])) == F.mul(u[4], u[5])]
    report.require(len(zero_set) == (m - 1) * (m * m + 1), f"{len(zero_set)} nonzero vectors with N(x) = f1 f2")
    points = {linalg.normalize(u) for u in zero_set}
    report.require(points == {model.images[b] for b in base}, "zero set of N(x) - f1 f2 is not Phi(B0)")

    B = model.image_array[base]
    cap = all(linalg.rank(B[list(t)]) == 3 for t in itertools.combinations(range(len(base)), 3))
    report.require(cap, "Phi(B0) has three collinear points")
    report.details = {'m': m, 'baer_vectors': len(baer), 'quadric_points': len(points), 'cap': cap}
    return report


def trace_plane(model: KleinModel, design, p1: int, p2: int, p3: int) -> CheckReport:
    """The plane E of three images meets the cone in Phi(T); complements through E follow q/0/1."""
    from ..design.traces import trace

    if model.sigma_is_identity:
        raise ValueError("trace planes need sigma != id")
    T = trace(design, p1, p2, p3)
    report = CheckReport(name="trace_plane")
    linalg = model.linalg
    E = model.image_array[[p1, p2, p3]]
    report.require(linalg.rank(E) == 3, "images of the triple do not span a plane")
    report.require(not linalg.contains(E, model.vertex), "trace plane contains the vertex")

    null = linalg.nullspace(model.image_coords[[p1, p2, p3]])
    values = linalg.matmul(model.image_coords, null.T)
    section = tuple(int(i) for i in np.nonzero(np.all(values == 0, axis=1))[0])
    report.require(section == T, f"plane meets the cone in {len(section)} points, trace has {len(T)}")

    q = model.q
    through_e = model.complements_containing((p1, p2, p3))
    report.require(through_e == q, f"{through_e} complements contain E, expected {q}")

    triple_classes = {int(model.line.class_of[p]) for p in (p1, p2, p3)}
    trace_classes = {int(model.line.class_of[t]) for t in T}
    outcomes = {q: 0, 0: 0, 1: 0}
    for x in range(model.line.v):
        if x not in (p1, p2, p3) and int(model.line.class_of[x]) in triple_classes:
            continue
        count = model.complements_containing((p1, p2, p3, x))
        if x in T:
            expected = q
        elif int(model.line.class_of[x]) in trace_classes:
            expected = 0
        else:
            expected = 1
        report.require(count == expected, f"x={x}: {count} complements, expected {expected}")
        report.require(count == design.count_blocks_containing((p1, p2, p3, x)),
                       f"x={x}: complements and blocks disagree")
        outcomes[expected] = outcomes.get(expected, 0) + 1
    report.details = {
        'triple': [p1, p2, p3],
        'trace': list(T),
        'complements_through_plane': through_e,
        'fourth_points': {str(k): v for k, v in outcomes.items()},
    }
    return report


# ----------------------------------------------------------------------
# Induced collineations
# ----------------------------------------------------------------------
def recover_collineation(model: KleinModel, g: Matrix2R) -> Optional[np.ndarray]:
    """6x6 matrix L on V with Phi(p^g) ~ Phi(p) L, or None if no such map exists."""
    linalg = model.linalg
    F = model.field
    line = model.line
    targets = np.array([model.images[line.act_index(g, i)] for i in range(line.v)], dtype=np.int64)

    source = SubspaceFrame.greedy(linalg, model.images)
    basis_points = [model.index[tuple(int(c) for c in row)] for row in source.basis]
    try:
        target = SubspaceFrame(linalg, targets[basis_points])
    except (ValueError, ZeroDivisionError):
        return None
    d = source.dim
    alpha = source.coords(model.image_array)
    beta = target.coords(targets)
    if not np.all(linalg.matmul(beta, target.basis) == targets):
        return None

    # x -> sum alpha_i mu_i w_i is proportional to sum beta_i w_i
    rows = []
    for i, j in itertools.combinations(range(d), 2):
        block = np.zeros((len(alpha), d), dtype=np.int64)
        block[:, i] = F.mul_table[alpha[:, i], beta[:, j]]
        block[:, j] = F.neg_table[F.mul_table[alpha[:, j], beta[:, i]]]
        rows.append(block)
    null = linalg.nullspace(np.vstack(rows))
    if len(null) != 1 or np.any(null[0] == 0):
        return None
    mu = null[0]
    scaled = F.mul_table[mu[:, None], target.basis]
    # rows of the 6x6 matrix act on pivot coordinates of the source frame
    L = np.zeros((6, 6), dtype=np.int64)
    L[source.pivots] = linalg.matmul(source._inverse, scaled)
    return L


def _apply(model: KleinModel, L: np.ndarray, X: np.ndarray) -> np.ndarray:
    return model.linalg.matmul(model.linalg.array(X), L)


def verify_collineations(model: KleinModel, gens: Optional[Sequence[Matrix2R]] = None) -> CheckReport:
    """Each generator of GL2(R) induces a collineation of V fixing S and scaling Q."""
    from ..design.builder import group_generators

    gens = list(gens) if gens is not None else group_generators(model.line)
    report = CheckReport(name="collineations")
    linalg = model.linalg
    F = model.field
    line = model.line
    scalars = []
    for n, g in enumerate(gens):
        L = recover_collineation(model, g)
        if L is None:
            report.fail(f"generator {n}: no collineation maps Phi(p) to Phi(p^g)")
            continue
        images = linalg.normalize_rows(_apply(model, L, model.image_array))
        expected = np.array([model.images[line.act_index(g, i)] for i in range(line.v)], dtype=np.int64)
        report.require(np.array_equal(images, expected), f"generator {n}: induced map disagrees on P(R)")
        report.require(bool(np.all(images[:, 2] == 0)), f"generator {n}: image leaves H")

        s_image = _apply(model, L, [model.vertex])[0]
        report.require(any(s_image) and linalg.normalize(s_image) == model.vertex,
                       f"generator {n}: vertex not fixed")

        basis = model.frame.basis
        mapped = _apply(model, L, basis)
        c = None
        for i, j in itertools.combinations(range(len(basis)), 2):
            before = polar_form(F, basis[i], basis[j])
            if before != 0:
                c = F.div(polar_form(F, mapped[i], mapped[j]), before)
                break
        ok = c is not None and c != 0
        if ok:
            ok = all(klein_form(F, mapped[i]) == F.mul(c, klein_form(F, basis[i])) for i in range(len(basis)))
            ok = ok and all(
                polar_form(F, mapped[i], mapped[j]) == F.mul(c, polar_form(F, basis[i], basis[j]))
                for i, j in itertools.combinations(range(len(basis)), 2)
            )
        report.require(ok, f"generator {n}: Q is not scaled by a constant on V")
        if c is not None:
            scalars.append(int(c))
    report.details = {'generators': len(gens), 'form_scalars': scalars}
    return report
