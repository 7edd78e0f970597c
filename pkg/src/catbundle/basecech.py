"""Cech cohomology of transition data over finite simplicial bases.

The cover of a complex is always the family of closed vertex stars, so
patches are indexed by vertices, two patches overlap exactly when their
vertices span an edge, and triple overlaps correspond to triangles: the
nerve of the cover is the complex itself, and Cech data that is constant
per overlap is simplicial data.  All overlaps of closed stars are
connected, which is what makes the constant model meaningful.

Coefficient kinds:

* ``finite``: matrix values (group elements or normalizer representatives);
* ``phase``: rational circle phases, value q meaning exp(2*pi*i*q);
* ``int``: integers.

Circle-valued data carries an extra integer winding number per triangle
(default zero).  The windings record how the underlying circle-valued
transition functions wrap on triple overlaps; constant phases cannot see
that, and on a base whose second cohomology is free every nontrivial
class lives entirely in the windings.  The integral class of a phase
cocycle is the reduction of delta(normalized lifts) + windings; it is
independent of the choice of lifts.  Witnesses found by ``equivalent``
are constant per patch; equal classes are also required, since a pair of
phase cocycles with distinct integral classes is never equivalent even
when the flat parts match up.

Integral second cohomology is computed exactly by integer Smith normal
form with full unimodular transforms, so classes come with coordinates:
free coordinates in Z and torsion coordinates modulo the stored orders.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    IrrationalPhase,
    MissingValue,
    NotACocycle,
    SearchCapExceeded,
    WrongKind,
)
from .groups import GroupSpec, KIND_FINITE
from .linalg import ComplexMatrix, Tolerance

COEFF_FINITE = "finite"
COEFF_PHASE = "phase"
COEFF_INT = "int"

_COEFFS = (COEFF_FINITE, COEFF_PHASE, COEFF_INT)

SEARCH_CAP = 10 ** 6
PHASE_DENOMINATOR_BOUND = 360


class SimplicialComplex:
    """A finite abstract simplicial complex, closed under taking faces.

    Vertices are 0..vertices-1 and every vertex is a 0-simplex.  The
    orientation convention everywhere is increasing vertex order.
    """

    def __init__(self, vertices, simplices):
        self.vertices = int(vertices)
        simps = set()
        for s in simplices:
            fs = frozenset(int(v) for v in s)
            if not fs:
                raise ValueError("empty simplex")
            if any(v < 0 or v >= self.vertices for v in fs):
                raise ValueError("simplex %r has a vertex outside 0..%d" % (sorted(fs), self.vertices - 1))
            simps.add(fs)
        for v in range(self.vertices):
            if frozenset([v]) not in simps:
                raise ValueError("vertex %d is not listed as a 0-simplex" % v)
        for s in simps:
            if len(s) > 1:
                for v in s:
                    if s - {v} not in simps:
                        raise ValueError("face %r of %r is missing" % (sorted(s - {v}), sorted(s)))
        self.simplices = frozenset(simps)
        self._h2 = None

    @classmethod
    def from_maximal(cls, vertices, maximal):
        """Build the face closure of the given simplices, plus all vertices."""
        simps = set(frozenset([v]) for v in range(vertices))
        stack = [frozenset(int(v) for v in s) for s in maximal]
        while stack:
            s = stack.pop()
            if s in simps or not s:
                continue
            simps.add(s)
            for v in s:
                stack.append(s - {v})
        return cls(vertices, simps)

    @property
    def dim(self):
        return max(len(s) for s in self.simplices) - 1

    def simplices_of_dim(self, k):
        out = [tuple(sorted(s)) for s in self.simplices if len(s) == k + 1]
        out.sort()
        return out

    def edges(self):
        return self.simplices_of_dim(1)

    def triangles(self):
        return self.simplices_of_dim(2)

    def tetrahedra(self):
        return self.simplices_of_dim(3)

    def components(self):
        """Vertex sets of the connected components of the 1-skeleton."""
        parent = list(range(self.vertices))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for i, j in self.edges():
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[ri] = rj
        groups = {}
        for v in range(self.vertices):
            groups.setdefault(find(v), []).append(v)
        return [sorted(g) for g in sorted(groups.values())]

    def star(self, v):
        """Simplices of the closed star of vertex v."""
        closed = set()
        stack = [s for s in self.simplices if v in s]
        while stack:
            s = stack.pop()
            if s in closed:
                continue
            closed.add(s)
            if len(s) > 1:
                stack.extend(s - {w} for w in s)
        return frozenset(closed)

    def __eq__(self, other):
        return (
            isinstance(other, SimplicialComplex)
            and self.vertices == other.vertices
            and self.simplices == other.simplices
        )

    def __hash__(self):
        return hash((self.vertices, self.simplices))

    def to_json(self):
        return {
            "vertices": self.vertices,
            "simplices": [sorted(s) for s in sorted(self.simplices, key=lambda x: (len(x), sorted(x)))],
        }

    @classmethod
    def from_json(cls, doc):
        return cls.from_maximal(int(doc["vertices"]), doc["simplices"])


def octahedron():
    """Boundary of the octahedron: the 6-vertex triangulation of the 2-sphere."""
    faces = [
        (0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 1),
        (5, 1, 2), (5, 2, 3), (5, 3, 4), (5, 4, 1),
    ]
    return SimplicialComplex.from_maximal(6, faces)


@dataclass(frozen=True)
class Cover:
    """The closed-star cover of a complex; patches are indexed by vertices."""

    complex: SimplicialComplex

    @property
    def patch_count(self):
        return self.complex.vertices

    def patch(self, i):
        return self.complex.star(i)

    def overlap_pairs(self):
        return self.complex.edges()

    def __eq__(self, other):
        return isinstance(other, Cover) and self.complex == other.complex

    def __hash__(self):
        return hash(self.complex)


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise ValueError("phase values must be exact rationals, got %r" % (x,))


def normalized_lift(q):
    """The representative of q mod 1 in the half-open interval (-1/2, 1/2]."""
    return q - math.ceil(q - Fraction(1, 2))


class CechCocycle:
    """Transition data on the closed-star cover of a complex.

    Values are stored on edges (i, j) with i < j; the value for (j, i) is
    the inverse, and the value on a repeated index is the identity.
    Phase and finite kinds may carry integer windings on triangles.
    An optional structure group may be attached to a finite-kind cocycle;
    ``equivalent`` then searches witnesses in that group.
    """

    def __init__(self, cover, coeff, values, windings=None, group=None):
        if coeff not in _COEFFS:
            raise ValueError("unknown coefficient kind %r" % (coeff,))
        self.cover = cover
        self.coeff = coeff
        self.group = group
        if group is not None and coeff != COEFF_FINITE:
            raise ValueError("a structure group only makes sense for matrix values")
        edges = set(cover.complex.edges())
        store = {}
        for (i, j), v in dict(values).items():
            i, j = int(i), int(j)
            if i == j:
                raise ValueError("diagonal value on (%d, %d)" % (i, j))
            key = (min(i, j), max(i, j))
            if key not in edges:
                raise ValueError("pair %r is not an overlap of the cover" % (key,))
            if coeff == COEFF_PHASE:
                v = _as_fraction(v)
            elif coeff == COEFF_INT:
                v = int(v)
            else:
                v = v if isinstance(v, ComplexMatrix) else ComplexMatrix(v)
            if i > j:
                v = self._invert(v)
            if key in store:
                raise ValueError("duplicate value for %r" % (key,))
            store[key] = v
        self.values = store
        wind = {}
        if windings:
            if coeff == COEFF_INT:
                raise ValueError("integer cocycles carry no windings")
            tris = set(cover.complex.triangles())
            for t, n in dict(windings).items():
                key = tuple(sorted(int(v) for v in t))
                if key not in tris:
                    raise ValueError("winding on %r which is not a triangle" % (key,))
                if int(n):
                    wind[key] = int(n)
        self.windings = wind

    def _invert(self, v):
        if self.coeff == COEFF_PHASE:
            return -v
        if self.coeff == COEFF_INT:
            return -v
        return v.adjoint()

    def _identity(self):
        if self.coeff == COEFF_PHASE:
            return Fraction(0)
        if self.coeff == COEFF_INT:
            return 0
        d = self.degree()
        return ComplexMatrix.eye(d)

    def degree(self):
        if self.coeff != COEFF_FINITE:
            raise WrongKind("degree only makes sense for matrix values")
        for v in self.values.values():
            return v.rows
        if self.group is not None:
            return self.group.degree
        raise MissingValue("cocycle has no values to take a degree from")

    def value(self, i, j):
        if i == j:
            return self._identity()
        key = (min(i, j), max(i, j))
        v = self.values.get(key)
        if v is None:
            raise MissingValue("no value on overlap %r" % (key,))
        return v if i < j else self._invert(v)

    def winding(self, i, j, k):
        return self.windings.get(tuple(sorted((i, j, k))), 0)

    def product(self, other):
        """Pointwise product; abelian kinds only, windings add."""
        if self.coeff == COEFF_FINITE or other.coeff != self.coeff:
            raise WrongKind("cocycle products are defined for phase and integer kinds")
        if self.cover != other.cover:
            raise ValueError("cocycles live on different covers")
        vals = {e: self.values[e] + other.values[e] for e in self.values}
        wind = dict(self.windings)
        for t, n in other.windings.items():
            wind[t] = wind.get(t, 0) + n
        return CechCocycle(self.cover, self.coeff, vals, windings=wind)

    def to_json(self):
        doc = {"coeff": self.coeff, "values": []}
        for (i, j), v in sorted(self.values.items()):
            if self.coeff == COEFF_PHASE:
                vv = "%d/%d" % (v.numerator, v.denominator)
            elif self.coeff == COEFF_INT:
                vv = int(v)
            else:
                vv = v.to_json()
            doc["values"].append({"edge": [i, j], "value": vv})
        if self.windings:
            doc["windings"] = [
                {"triangle": list(t), "value": n} for t, n in sorted(self.windings.items())
            ]
        return doc

    @classmethod
    def from_json(cls, doc, cover, group=None):
        coeff = doc["coeff"]
        values = {}
        for item in doc.get("values", []):
            i, j = item["edge"]
            v = item["value"]
            if coeff == COEFF_FINITE:
                v = ComplexMatrix.from_json(v)
            values[(int(i), int(j))] = v
        windings = {}
        for item in doc.get("windings", []):
            windings[tuple(item["triangle"])] = int(item["value"])
        return cls(cover, coeff, values, windings=windings, group=group)


def trivial_cocycle(cover, coeff, degree=None, group=None):
    vals = {}
    for e in cover.complex.edges():
        if coeff == COEFF_PHASE:
            vals[e] = Fraction(0)
        elif coeff == COEFF_INT:
            vals[e] = 0
        else:
            vals[e] = ComplexMatrix.eye(degree if degree is not None else group.degree)
    return CechCocycle(cover, coeff, vals, group=group)


@dataclass(frozen=True)
class CocycleCheck:
    ok: bool
    triangle: tuple | None = None
    residual: float | None = None

    def __bool__(self):
        return self.ok


def is_cocycle(c, tol=None):
    """Check the cocycle identity on every triangle of the base.

    Matrix values are checked within tolerance, phases and integers
    exactly (a phase triple must sum to an integer).
    """
    tol = tol or Tolerance()
    for (i, j, k) in c.cover.complex.triangles():
        gij = c.value(i, j)
        gjk = c.value(j, k)
        gik = c.value(i, k)
        if c.coeff == COEFF_PHASE:
            defect = gij + gjk - gik
            if defect.denominator != 1:
                return CocycleCheck(False, (i, j, k), float(abs(defect - round(defect))))
        elif c.coeff == COEFF_INT:
            defect = gij + gjk - gik
            if defect != 0:
                return CocycleCheck(False, (i, j, k), float(abs(defect)))
        else:
            res = float(np.linalg.norm(gij.a @ gjk.a - gik.a))
            if not tol.close(res, scale=math.sqrt(gij.rows)):
                return CocycleCheck(False, (i, j, k), res)
    return CocycleCheck(True)


# ---------------------------------------------------------------------------
# integer Smith normal form with unimodular transforms


def _eye_int(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _matvec_int(m, v):
    return [sum(row[j] * v[j] for j in range(len(v))) for row in m]


def smith_normal_form(a):
    """Exact Smith normal form over the integers.

    Returns (diag, u, vinv) where diag is the full m x n normal form as
    nested lists, and u, vinv are unimodular with diag = u @ a @ vinv^(-1).
    vinv is the inverse of the right transform, which is what coordinate
    computations need.  Arbitrary precision throughout.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    d = [list(map(int, row)) for row in a]
    u = _eye_int(m)
    vinv = _eye_int(n)

    def row_add(i, j, c):
        # row_i += c * row_j, on d and u
        d[i] = [d[i][t] + c * d[j][t] for t in range(n)]
        u[i] = [u[i][t] + c * u[j][t] for t in range(m)]

    def col_add(i, j, c):
        # col_j += c * col_i on d; vinv tracks the inverse: row_i -= c * row_j
        for t in range(m):
            d[t][j] += c * d[t][i]
        vinv[i] = [vinv[i][t] - c * vinv[j][t] for t in range(n)]

    def row_swap(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def col_swap(i, j):
        for t in range(m):
            d[t][i], d[t][j] = d[t][j], d[t][i]
        vinv[i], vinv[j] = vinv[j], vinv[i]

    def row_neg(i):
        d[i] = [-x for x in d[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    while t < min(m, n):
        pivot = None
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if d[i][j] != 0 and (best is None or abs(d[i][j]) < best):
                    best = abs(d[i][j])
                    pivot = (i, j)
        if pivot is None:
            break
        row_swap(t, pivot[0])
        col_swap(t, pivot[1])
        p = d[t][t]
        # clear column t; any nonzero remainder is smaller than the pivot,
        # so restarting with a fresh pivot strictly shrinks it
        for i in range(t + 1, m):
            if d[i][t]:
                row_add(i, t, -(d[i][t] // p))
        if any(d[i][t] for i in range(t + 1, m)):
            continue
        # with the column clean these touch row t only
        for j in range(t + 1, n):
            if d[t][j]:
                col_add(t, j, -(d[t][j] // p))
        if any(d[t][j] for j in range(t + 1, n)):
            continue
        # pivot must divide the rest of the block for the invariant chain;
        # folding the offending row into row t forces a strictly smaller
        # remainder on the next pass
        stray = None
        for i in range(t + 1, m):
            if any(d[i][j] % p for j in range(t + 1, n)):
                stray = i
                break
        if stray is not None:
            row_add(t, stray, 1)
            continue
        if p < 0:
            row_neg(t)
        t += 1
    return d, u, vinv


# ---------------------------------------------------------------------------
# integral second cohomology


@dataclass(frozen=True)
class IntegralCohomClass:
    """Coordinates of a class in H^2: free part over Z, torsion part mod orders."""

    free: tuple
    torsion: tuple
    torsion_orders: tuple

    def is_zero(self):
        return all(x == 0 for x in self.free) and all(x == 0 for x in self.torsion)

    def __add__(self, other):
        if self.torsion_orders != other.torsion_orders or len(self.free) != len(other.free):
            raise ValueError("classes live in different groups")
        return IntegralCohomClass(
            free=tuple(a + b for a, b in zip(self.free, other.free)),
            torsion=tuple(
                (a + b) % o for a, b, o in zip(self.torsion, other.torsion, self.torsion_orders)
            ),
            torsion_orders=self.torsion_orders,
        )

    def to_json(self):
        return {
            "free": list(self.free),
            "torsion": list(self.torsion),
            "torsion_orders": list(self.torsion_orders),
        }

    def __str__(self):
        return "H2 class free=%r torsion=%r mod %r" % (
            list(self.free),
            list(self.torsion),
            list(self.torsion_orders),
        )


class CohomologySummary:
    """H^2 of a complex with an exact reduction map for integral 2-cocycles."""

    def __init__(self, complex_):
        if complex_.dim > 3:
            raise WrongKind("second cohomology is computed for complexes of dimension <= 3")
        self.complex = complex_
        edges = complex_.edges()
        tris = complex_.triangles()
        tets = complex_.tetrahedra()
        eidx = {e: a for a, e in enumerate(edges)}
        tidx = {t: a for a, t in enumerate(tris)}
        n1, n2, n3 = len(edges), len(tris), len(tets)
        self._tris = tris
        d1 = [[0] * n1 for _ in range(n2)]
        for a, (i, j, k) in enumerate(tris):
            d1[a][eidx[(j, k)]] += 1
            d1[a][eidx[(i, k)]] -= 1
            d1[a][eidx[(i, j)]] += 1
        d2 = [[0] * n2 for _ in range(n3)]
        for b, (i, j, k, l) in enumerate(tets):
            d2[b][tidx[(j, k, l)]] += 1
            d2[b][tidx[(i, k, l)]] -= 1
            d2[b][tidx[(i, j, l)]] += 1
            d2[b][tidx[(i, j, k)]] -= 1
        if n3:
            diag_b, _, vinv_b = smith_normal_form(d2)
            rank_b = sum(
                1 for i in range(min(n3, n2)) if diag_b[i][i] != 0
            )
            self._vinv_b = vinv_b
            self._rank_b = rank_b
        else:
            self._vinv_b = None
            self._rank_b = 0
        kernel_dim = n2 - self._rank_b
        # coordinates of the image of delta1 inside the kernel of delta2
        if n1:
            cols = list(zip(*d1)) if n2 else []
            c = []
            for col in cols:
                x = self._kernel_coords(list(col))
                c.append(x)
            c_mat = [list(row) for row in zip(*c)] if c else [[] for _ in range(kernel_dim)]
        else:
            c_mat = [[] for _ in range(kernel_dim)]
        if kernel_dim and c_mat and len(c_mat[0]):
            diag_c, u_c, _ = smith_normal_form(c_mat)
            rank_c = sum(
                1
                for i in range(min(len(c_mat), len(c_mat[0])))
                if diag_c[i][i] != 0
            )
            factors = [diag_c[i][i] for i in range(rank_c)]
        else:
            u_c = _eye_int(kernel_dim)
            rank_c = 0
            factors = []
        self._u_c = u_c
        self._rank_c = rank_c
        self._factors = factors
        self.kernel_dim = kernel_dim
        self.free_rank = kernel_dim - rank_c
        self.torsion_orders = tuple(f for f in factors if f > 1)

    def _kernel_coords(self, z):
        if self._vinv_b is None:
            return z
        x = _matvec_int(self._vinv_b, z)
        if any(x[i] != 0 for i in range(self._rank_b)):
            raise NotACocycle("2-cochain is not closed")
        return x[self._rank_b:]

    def reduce(self, zdict):
        """Class coordinates of an integral 2-cocycle given per triangle."""
        z = [int(zdict.get(t, 0)) for t in self._tris]
        x = self._kernel_coords(z)
        y = _matvec_int(self._u_c, x)
        torsion = tuple(
            y[i] % self._factors[i]
            for i in range(self._rank_c)
            if self._factors[i] > 1
        )
        free = tuple(y[self._rank_c:])
        return IntegralCohomClass(free=free, torsion=torsion, torsion_orders=self.torsion_orders)


def h2_integral(complex_):
    """Integral H^2 summary of a complex, cached on the complex."""
    if complex_._h2 is None:
        complex_._h2 = CohomologySummary(complex_)
    return complex_._h2


def circle_class(c, tol=None):
    """Integral class of a circle cocycle: reduce delta(lifts) + windings.

    Changing the lifts changes delta(lifts) by an integer coboundary, so
    the class does not depend on the stored representatives.
    """
    if c.coeff != COEFF_PHASE:
        raise WrongKind("circle classes are defined for phase cocycles")
    check = is_cocycle(c, tol)
    if not check:
        raise NotACocycle(
            "phase data fails the cocycle identity on %r" % (check.triangle,)
        )
    z = {}
    for (i, j, k) in c.cover.complex.triangles():
        n = (
            normalized_lift(c.value(i, j))
            + normalized_lift(c.value(j, k))
            - normalized_lift(c.value(i, k))
        )
        assert n.denominator == 1
        z[(i, j, k)] = int(n) + c.winding(i, j, k)
    return h2_integral(c.cover.complex).reduce(z)


# ---------------------------------------------------------------------------
# equivalence witnesses


def _spanning_forest(complex_):
    """BFS tree edges per component, rooted at each component's least vertex."""
    adj = {}
    for i, j in complex_.edges():
        adj.setdefault(i, []).append(j)
        adj.setdefault(j, []).append(i)
    seen = set()
    forest = []
    for comp in complex_.components():
        root = comp[0]
        order = []
        seen.add(root)
        queue = [root]
        while queue:
            v = queue.pop(0)
            for w in sorted(adj.get(v, [])):
                if w not in seen:
                    seen.add(w)
                    order.append((v, w))
                    queue.append(w)
        forest.append((root, order))
    return forest


def equivalent(c, c2, modulo=None, search_cap=SEARCH_CAP, tol=None):
    """Search for a coboundary witness u with u_i c2_ij = c_ij u_j.

    Phase kind: solve the flat part exactly over the rationals along a
    spanning forest, check the remaining edges modulo 1, and require the
    integral classes to agree; the witness phases are rational.  Integer
    kind: exact solve.  Finite kind: enumerate candidate root values per
    component (the attached structure group, or the closure generated by
    the values of both cocycles and ``modulo``), propagate along the
    forest, verify every edge; with ``modulo`` set, equalities hold up to
    right multiplication by elements of that group.  Returns the witness
    family as a dict or None.
    """
    tol = tol or Tolerance()
    if c.cover != c2.cover:
        raise ValueError("cocycles live on different covers")
    if c.coeff != c2.coeff:
        raise ValueError("coefficient kinds differ")
    complex_ = c.cover.complex
    forest = _spanning_forest(complex_)

    if c.coeff == COEFF_PHASE:
        theta = {}
        for root, tree in forest:
            theta[root] = Fraction(0)
            for (pv, cv) in tree:
                # theta_i - theta_j = q_ij - q'_ij along the edge (i=cv or pv)
                diff = c.value(cv, pv) - c2.value(cv, pv)
                theta[cv] = theta[pv] + diff
        for (i, j) in complex_.edges():
            resid = theta[i] - theta[j] - (c.value(i, j) - c2.value(i, j))
            if resid.denominator != 1:
                return None
        if circle_class(c, tol) != circle_class(c2, tol):
            return None
        return {v: normalized_lift(theta[v]) for v in theta}

    if c.coeff == COEFF_INT:
        m = {}
        for root, tree in forest:
            m[root] = 0
            for (pv, cv) in tree:
                m[cv] = m[pv] + c.value(cv, pv) - c2.value(cv, pv)
        for (i, j) in complex_.edges():
            if m[i] - m[j] != c.value(i, j) - c2.value(i, j):
                return None
        return m

    # matrix values
    d = c.degree()
    if modulo is not None and modulo.kind != KIND_FINITE:
        raise WrongKind("matrix witness search modulo a group needs a finite group")
    if c.group is not None and modulo is None:
        candidates = [e.a for e in c.group.elements()]
    else:
        gens = [v.a for v in c.values.values()] + [v.a for v in c2.values.values()]
        if modulo is not None:
            gens += [g.a for g in modulo.generators]
        closure_spec = GroupSpec(KIND_FINITE, d, gens, enumeration_cap=search_cap)
        try:
            candidates = [e.a for e in closure_spec.elements()]
        except Exception as exc:
            raise SearchCapExceeded("candidate closure did not stay finite: %s" % exc)
    # on an edge, admissible witnesses satisfy u_i c2_ij = c_ij u_j h with
    # h in the quotient group (h = 1 when modulo is None)
    twists = [np.eye(d)] if modulo is None else [g.a for g in modulo.elements()]

    def edge_ok(u_i, u_j, i, j):
        lhs = u_i @ c2.value(i, j).a
        rhs = c.value(i, j).a @ u_j
        if modulo is None:
            return np.linalg.norm(lhs - rhs) <= tol.tau * max(1.0, math.sqrt(d))
        return modulo.contains(rhs.conj().T @ lhs, tol=tol)

    budget = [search_cap]

    def assign(order, back_edges, u, pos):
        if pos == len(order):
            return True
        pv, cv = order[pos]
        base = c.value(cv, pv).a
        tail = c2.value(cv, pv).a.conj().T
        for h in twists:
            budget[0] -= 1
            if budget[0] < 0:
                raise SearchCapExceeded(
                    "witness search passed %d assignments" % search_cap
                )
            u[cv] = base @ u[pv] @ h @ tail
            if all(
                edge_ok(u[i], u[j], i, j)
                for (i, j) in back_edges.get(cv, ())
            ):
                if assign(order, back_edges, u, pos + 1):
                    return True
        del u[cv]
        return False

    witness = {}
    for root, tree in forest:
        comp_vertices = {root} | {cv for _, cv in tree}
        seen_at = {root: 0}
        for pos, (pv, cv) in enumerate(tree):
            seen_at[cv] = pos + 1
        back_edges = {}
        for (i, j) in complex_.edges():
            if i not in comp_vertices:
                continue
            later = i if seen_at[i] >= seen_at[j] else j
            back_edges.setdefault(later, []).append((i, j))
        found = None
        for w in candidates:
            budget[0] -= 1
            if budget[0] < 0:
                raise SearchCapExceeded(
                    "witness search passed %d assignments" % search_cap
                )
            u = {root: w}
            if all(edge_ok(u[i], u[j], i, j) for (i, j) in back_edges.get(root, ())):
                if assign(tree, back_edges, u, 0):
                    found = u
                    break
        if found is None:
            return None
        witness.update(found)
    return {v: ComplexMatrix(m) for v, m in witness.items()}


# ---------------------------------------------------------------------------
# determinant pushforward


def snap_phase(z, tol=None, max_denominator=PHASE_DENOMINATOR_BOUND):
    """Nearest bounded-denominator rational q with exp(2*pi*i*q) = z.

    Raises IrrationalPhase when no such rational is within tolerance.
    """
    tol = tol or Tolerance()
    if abs(abs(z) - 1.0) > tol.tau:
        raise IrrationalPhase("value %r is not on the unit circle" % (z,))
    ang = cmath.phase(z) / (2.0 * math.pi)
    q = Fraction(ang).limit_denominator(max_denominator)
    q = normalized_lift(q)
    if abs(cmath.exp(2j * math.pi * float(q)) - z) > max(tol.tau, 1e-12):
        raise IrrationalPhase(
            "phase of %r is not rational with denominator <= %d" % (z, max_denominator)
        )
    return q


def det_pushforward(c, tol=None, max_denominator=PHASE_DENOMINATOR_BOUND):
    """Phase cocycle of determinants of a matrix-valued cocycle.

    Windings are carried over unchanged: they record the winding of the
    underlying transitions in the determinant direction.
    """
    tol = tol or Tolerance()
    if c.coeff != COEFF_FINITE:
        raise WrongKind("determinant pushforward needs matrix values")
    vals = {}
    for (i, j), v in c.values.items():
        det = complex(np.linalg.det(v.a))
        vals[(i, j)] = snap_phase(det, tol, max_denominator)
    return CechCocycle(c.cover, COEFF_PHASE, vals, windings=dict(c.windings))
