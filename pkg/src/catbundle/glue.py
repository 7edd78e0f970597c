"""Categories glued from group intertwiner fibres over a simplicial base.

A gluing datum assigns to every edge of the base a unitary normalizing
the fibre symmetry group, with the cocycle identity holding modulo the
group.  Conjugation by tensor powers of these transitions acts on the
intertwiner spaces of the fibre, and that action depends only on the
transition modulo the group, so the datum is exactly the amount of
information the glued category sees.  An arrow of the glued category is
a family of fibre intertwiners, one per patch, matched across overlaps
by the transition action; all operations are computed patchwise and the
overlap compatibility is what cuts the space down.

Circle-valued winding numbers on triangles travel with the datum and
carry the part of the bundle class that constant transitions cannot
express; they are inert in all patchwise computations and resurface in
the determinant pushforward and the twisted special extraction.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .basecech import (
    COEFF_FINITE,
    COEFF_PHASE,
    CechCocycle,
    Cover,
    SimplicialComplex,
    circle_class,
    det_pushforward,
    equivalent,
    is_cocycle,
    snap_phase,
)
from .errors import (
    ConsistencyError,
    NotACocycleModG,
    RankDeficientVModule,
    SizeCapExceeded,
)
from .groups import (
    GroupSpec,
    KIND_SU,
    KIND_U,
    NormalizerElement,
    group_distance,
    verify_normalizer,
)
from .linalg import ComplexMatrix, Tolerance, canonical_basis, hs_inner, kron, nullspace, opnorm
from .repcat import antisym_projector, hat_action, intertwiners, symmetry_unitary

GLUED_COEFF_CAP = 2_000_000


class GluingDatum:
    """Transitions in the normalizer of the fibre group, cocycle modulo it.

    ``transitions`` maps overlap pairs to unitaries; values on (j, i) are
    the adjoints of values on (i, j).  ``windings`` maps triangles to
    integers.  Construction verifies normalizer membership of every
    transition and the cocycle identity modulo the fibre group on every
    triangle, raising NotACocycleModG with the offending triangle.
    """

    def __init__(self, complex_, group, transitions, windings=None, tol=None):
        self.complex = complex_ if isinstance(complex_, SimplicialComplex) else complex_.complex
        self.cover = Cover(self.complex)
        self.group = group
        self.tol = tol or Tolerance()
        vals = {}
        self.normalizers = {}
        for (i, j), u in dict(transitions).items():
            if isinstance(u, NormalizerElement):
                u = u.u
            elif not isinstance(u, ComplexMatrix):
                u = ComplexMatrix(u)
            key = (min(i, j), max(i, j))
            if i > j:
                u = u.adjoint()
            vals[key] = u
            self.normalizers[key] = verify_normalizer(u, group, tol=self.tol)
        self.cocycle = CechCocycle(self.cover, COEFF_FINITE, vals, windings=windings)
        for (i, j, k) in self.complex.triangles():
            w = (
                self.cocycle.value(i, j).a
                @ self.cocycle.value(j, k).a
                @ self.cocycle.value(i, k).a.conj().T
            )
            if not group.contains(w, tol=self.tol):
                raise NotACocycleModG(
                    "transition defect on triangle %r is outside the fibre group" % ((i, j, k),)
                )
        self._hats = {}

    @property
    def degree(self):
        return self.group.degree

    @property
    def windings(self):
        return self.cocycle.windings

    def transition(self, i, j):
        return self.cocycle.value(i, j)

    def mod_group_residual(self):
        """Worst distance of a triangle transition defect from the fibre group."""
        worst = 0.0
        for (i, j, k) in self.complex.triangles():
            w = (
                self.cocycle.value(i, j).a
                @ self.cocycle.value(j, k).a
                @ self.cocycle.value(i, k).a.conj().T
            )
            worst = max(worst, group_distance(self.group, w))
        return worst

    def fibre_basis(self, r, s):
        return intertwiners(self.group, r, s, tol=self.tol)

    def hat_matrix(self, i, j, r, s):
        """Action of the (i, j) transition on the fibre intertwiner basis."""
        key = (i, j, r, s)
        m = self._hats.get(key)
        if m is not None:
            return m
        basis = self.fibre_basis(r, s)
        n = len(basis)
        u = self.transition(i, j)
        out = np.zeros((n, n), dtype=complex)
        for b, t in enumerate(basis):
            img = hat_action(u, t, r, s)
            for a in range(n):
                out[a, b] = hs_inner(basis[a], img)
            resid = img.a - sum(out[a, b] * basis[a].a for a in range(n))
            if not self.tol.close(float(np.linalg.norm(resid)), scale=float(np.linalg.norm(img.a)) + 1.0):
                raise ConsistencyError(
                    "transition (%d, %d) does not preserve the (%d, %d) fibre space" % (i, j, r, s)
                )
        m = ComplexMatrix(out) if n else ComplexMatrix.zeros(0, 0)
        self._hats[key] = m
        return m

    def to_json(self):
        return {
            "complex": self.complex.to_json(),
            "group": self.group.to_json(),
            "cocycle": self.cocycle.to_json(),
        }

    @classmethod
    def from_json(cls, doc, tol=None):
        complex_ = SimplicialComplex.from_json(doc["complex"])
        group = GroupSpec.from_json(doc["group"])
        cdoc = doc["cocycle"]
        transitions = {}
        for item in cdoc.get("values", []):
            i, j = item["edge"]
            transitions[(int(i), int(j))] = ComplexMatrix.from_json(item["value"])
        windings = {
            tuple(item["triangle"]): int(item["value"])
            for item in cdoc.get("windings", [])
        }
        return cls(complex_, group, transitions, windings=windings, tol=tol)


def scalar_datum(complex_, group, phases, windings=None, tol=None):
    """Datum whose transitions are the scalar unitaries exp(2*pi*i*q) * 1.

    ``phases`` maps edges to rational phases q.  Scalars normalize every
    fibre group, so this is the quickest way to write down twisted data.
    """
    d = group.degree
    eye = np.eye(d)
    transitions = {}
    for (i, j), q in dict(phases).items():
        transitions[(i, j)] = cmath.exp(2j * math.pi * float(q)) * eye
    return GluingDatum(complex_, group, transitions, windings=windings, tol=tol)


@dataclass
class GluedArrow:
    """A family of fibre intertwiners matched across overlaps."""

    datum: GluingDatum
    r: int
    s: int
    components: dict

    def component(self, v):
        return self.components[v]

    def compose(self, other):
        if other.datum is not self.datum or other.s != self.r:
            raise ValueError("arrows do not compose")
        comps = {v: self.components[v] @ other.components[v] for v in self.components}
        return GluedArrow(self.datum, other.r, self.s, comps)

    def adjoint(self):
        comps = {v: t.adjoint() for v, t in self.components.items()}
        return GluedArrow(self.datum, self.s, self.r, comps)

    def tensor(self, other):
        if other.datum is not self.datum:
            raise ValueError("arrows live over different data")
        comps = {
            v: kron(self.components[v], other.components[v]) for v in self.components
        }
        return GluedArrow(self.datum, self.r + other.r, self.s + other.s, comps)

    def __add__(self, other):
        if other.datum is not self.datum or (other.r, other.s) != (self.r, self.s):
            raise ValueError("arrows live in different spaces")
        comps = {v: self.components[v] + other.components[v] for v in self.components}
        return GluedArrow(self.datum, self.r, self.s, comps)

    def __sub__(self, other):
        return self + (-1.0) * other

    def __mul__(self, scalar):
        comps = {v: t * scalar for v, t in self.components.items()}
        return GluedArrow(self.datum, self.r, self.s, comps)

    __rmul__ = __mul__

    def norm(self):
        return max(opnorm(t) for t in self.components.values())

    def compatibility_residual(self):
        worst = 0.0
        for (i, j) in self.datum.complex.edges():
            img = hat_action(self.datum.transition(i, j), self.components[j], self.r, self.s)
            worst = max(worst, float(np.linalg.norm(self.components[i].a - img.a)))
        return worst


def glued_identity(datum, r):
    eye = ComplexMatrix.eye(datum.degree ** r)
    return GluedArrow(datum, r, r, {v: eye for v in range(datum.complex.vertices)})


def glued_symmetry(r, s, datum):
    """The braiding family: constant because permutations commute with tensor powers."""
    th = symmetry_unitary(r, s, datum.degree)
    return GluedArrow(
        datum, r + s, s + r, {v: th for v in range(datum.complex.vertices)}
    )


@dataclass
class GluedSpace:
    """All glued arrows between two tensor powers, with a coefficient basis."""

    datum: GluingDatum
    r: int
    s: int
    arrows: list
    fibre_dim: int
    coefficients: list = field(default_factory=list)

    @property
    def dim(self):
        return len(self.arrows)


def glued_space(datum, r, s, cap=GLUED_COEFF_CAP):
    """Solve the overlap matching constraints in fibre coefficients.

    An arrow is determined by one coefficient vector per patch over the
    fibre intertwiner basis; each edge imposes c_i = M_ij c_j where M_ij
    is the transition action in that basis.  The joint kernel of the
    stacked constraints is the glued space.
    """
    basis = datum.fibre_basis(r, s)
    m = len(basis)
    n = datum.complex.vertices
    if m == 0:
        return GluedSpace(datum, r, s, [], 0)
    edges = datum.complex.edges()
    rows = len(edges) * m
    cols = n * m
    if rows * cols > cap:
        raise SizeCapExceeded(
            "glued constraint system %d x %d exceeds the cap" % (rows, cols)
        )
    op = np.zeros((rows, cols), dtype=complex)
    for e, (i, j) in enumerate(edges):
        mij = datum.hat_matrix(i, j, r, s)
        blk = slice(e * m, (e + 1) * m)
        op[blk, i * m : (i + 1) * m] += np.eye(m)
        op[blk, j * m : (j + 1) * m] -= mij.a
    kernel = nullspace(ComplexMatrix(op), tol=datum.tol)
    arrows = []
    for x in kernel:
        xv = x.a.reshape(-1)
        comps = {}
        for v in range(n):
            acc = sum(xv[v * m + a] * basis[a].a for a in range(m))
            comps[v] = ComplexMatrix(acc)
        arrows.append(GluedArrow(datum, r, s, comps))
    return GluedSpace(datum, r, s, arrows, m, coefficients=kernel)


class GluedCategory:
    """Arrow spaces of the glued category up to a tensor power cap."""

    def __init__(self, datum, r_max, cap=GLUED_COEFF_CAP):
        if r_max < 0:
            raise ValueError("the power cap must be nonnegative")
        self.datum = datum
        self.r_max = r_max
        self.spaces = {}
        for r in range(r_max + 1):
            for s in range(r_max + 1):
                self.spaces[(r, s)] = glued_space(datum, r, s, cap=cap)

    def space(self, r, s):
        sp = self.spaces.get((r, s))
        if sp is None:
            sp = glued_space(self.datum, r, s)
            self.spaces[(r, s)] = sp
        return sp

    def dims(self):
        return {rs: sp.dim for rs, sp in sorted(self.spaces.items())}


def build_glued(datum, r_max, cap=GLUED_COEFF_CAP):
    """All glued arrow spaces with powers up to the cap."""
    return GluedCategory(datum, r_max, cap=cap)


def fibre_eval(arrow, v):
    """Evaluate a glued arrow in the fibre over patch v."""
    return arrow.component(v)


def norm_function(arrow):
    """Patchwise operator norms plus the global norm.

    The global norm is computed on the direct sum of the components, not
    as a maximum, so comparing it against the patchwise supremum is a
    real check of the sup formula.
    """
    per = {v: opnorm(t) for v, t in arrow.components.items()}
    comps = [arrow.components[v] for v in sorted(arrow.components)]
    rows = sum(t.rows for t in comps)
    cols = sum(t.cols for t in comps)
    block = np.zeros((rows, cols), dtype=complex)
    ro = co = 0
    for t in comps:
        block[ro : ro + t.rows, co : co + t.cols] = t.a
        ro += t.rows
        co += t.cols
    return {"per_vertex": per, "global": opnorm(ComplexMatrix(block))}


def tensor_glued(a, b, tol=None):
    """Tensor of glued arrows, with the overlap matching rechecked."""
    tol = tol or Tolerance()
    out = a.tensor(b)
    resid = out.compatibility_residual()
    if not tol.close(resid, scale=max(1.0, out.norm())):
        raise ConsistencyError("tensor of glued arrows drifted off the overlap matching")
    return out


# ---------------------------------------------------------------------------
# classification


@dataclass
class IsomorphismReport:
    isomorphic: bool
    witness: dict | None = None
    distinguishing: dict | None = None
    checks: list = field(default_factory=list)

    def __bool__(self):
        return self.isomorphic


def _functor_checks(d1, d2, witness, rmax, tol):
    """Verify that patchwise conjugation by the witness carries glued
    arrows of the second datum to glued arrows of the first and respects
    composition, adjoints, tensor products and the braiding."""
    checks = []

    def push(arrow):
        comps = {
            v: hat_action(witness[v], arrow.components[v], arrow.r, arrow.s)
            for v in arrow.components
        }
        return GluedArrow(d1, arrow.r, arrow.s, comps)

    pairs = [(r, s) for r in range(rmax + 1) for s in range(rmax + 1)]
    for (r, s) in pairs:
        s1 = glued_space(d1, r, s)
        s2 = glued_space(d2, r, s)
        checks.append(("dim (%d,%d)" % (r, s), float(abs(s1.dim - s2.dim))))
        if s1.dim != s2.dim:
            return checks, False
        for arrow in s2.arrows:
            resid = push(arrow).compatibility_residual()
            checks.append(("transport (%d,%d)" % (r, s), resid))
            if not tol.close(resid, scale=max(1.0, arrow.norm())):
                return checks, False
    sample = glued_space(d2, 1, 1)
    if sample.dim:
        a = sample.arrows[0]
        resid = (push(a.compose(a)) - push(a).compose(push(a))).norm()
        checks.append(("composition", resid))
        resid = (push(a.adjoint()) - push(a).adjoint()).norm()
        checks.append(("adjoint", resid))
        resid = (push(a.tensor(a)) - push(a).tensor(push(a))).norm()
        checks.append(("tensor", resid))
    th2 = glued_symmetry(1, 1, d2)
    resid = (push(th2) - glued_symmetry(1, 1, d1)).norm()
    checks.append(("braiding", resid))
    return checks, all(tol.close(r) for _, r in checks)


def isomorphic(d1, d2, rmax=2, tol=None):
    """Decide whether two gluing data present the same glued category.

    Special unitary fibre: the transition action factors through the
    determinant, so the data are isomorphic exactly when the determinant
    phase cocycles are equivalent (flat parts cohomologous and equal
    integral classes); the witness is scalar per patch.  Finite fibre:
    search for patchwise normalizer witnesses modulo the fibre group and
    require equal determinant classes.  When no witness exists the report
    carries a distinguishing invariant.
    """
    tol = tol or Tolerance()
    if d1.complex != d2.complex:
        raise ValueError("data live over different bases")
    if d1.group.kind != d2.group.kind or d1.degree != d2.degree:
        raise ValueError("fibre groups do not match")

    if d1.group.kind == KIND_U:
        # every transition acts trivially on the fibre spaces, which are
        # spanned by permutation operators
        d = d1.degree
        witness = {
            v: ComplexMatrix(np.eye(d)) for v in range(d1.complex.vertices)
        }
        checks, ok = _functor_checks(d1, d2, witness, rmax, tol)
        if not ok:
            raise ConsistencyError("identity witness failed on a permutation fibre")
        return IsomorphismReport(True, witness, None, checks)

    p1 = det_pushforward(d1.cocycle, tol)
    p2 = det_pushforward(d2.cocycle, tol)
    c1 = circle_class(p1, tol)
    c2 = circle_class(p2, tol)

    if d1.group.kind == KIND_SU:
        theta = equivalent(p1, p2, tol=tol)
        if theta is None:
            if c1 != c2:
                dist = {"invariant": "determinant class", "first": c1.to_json(), "second": c2.to_json()}
            else:
                dist = {"invariant": "determinant holonomy"}
            return IsomorphismReport(False, None, dist)
        d = d1.degree
        witness = {
            v: ComplexMatrix(cmath.exp(2j * math.pi * float(q) / d) * np.eye(d))
            for v, q in theta.items()
        }
        checks, ok = _functor_checks(d1, d2, witness, rmax, tol)
        if not ok:
            raise ConsistencyError("scalar witness failed the functor checks")
        return IsomorphismReport(True, witness, None, checks)

    if c1 != c2:
        dist = {"invariant": "determinant class", "first": c1.to_json(), "second": c2.to_json()}
        return IsomorphismReport(False, None, dist)
    w = equivalent(d1.cocycle, d2.cocycle, modulo=d1.group, tol=tol)
    if w is None:
        dims = {}
        differ = None
        for r in range(rmax + 1):
            for s in range(rmax + 1):
                a, b = glued_space(d1, r, s).dim, glued_space(d2, r, s).dim
                dims[(r, s)] = (a, b)
                if a != b and differ is None:
                    differ = (r, s)
        if differ is not None:
            dist = {
                "invariant": "glued dimension at %r" % (differ,),
                "first": dims[differ][0],
                "second": dims[differ][1],
            }
        else:
            dist = {"invariant": "no witness in the transition closure"}
        return IsomorphismReport(False, None, dist)
    for v, u in w.items():
        verify_normalizer(u, d1.group, tol=tol)
    checks, ok = _functor_checks(d1, d2, w, rmax, tol)
    if not ok:
        raise ConsistencyError("cocycle witness failed the functor checks")
    return IsomorphismReport(True, w, None, checks)


# ---------------------------------------------------------------------------
# twisted special extraction


@dataclass
class TwistedSpecialExtraction:
    isometries: dict
    module_basis: list
    phase_cocycle: CechCocycle
    extracted_class: object
    pushforward_class: object
    checks: list

    @property
    def classes_agree(self):
        return self.extracted_class == self.pushforward_class


def extract_twisted_special(cat, tol=None):
    """Recover the determinant twist from the glued antisymmetric line.

    The antisymmetric isometries in the fibres form a glued family of
    rank one over each patch; its patch-to-patch phases reproduce the
    determinants of the transitions, and the integral class of those
    phases (windings included) is the class of the datum.  Computed
    without ever looking at the transition determinants, then compared
    against the determinant pushforward route.  Accepts a glued category
    or a bare datum.
    """
    datum = cat.datum if isinstance(cat, GluedCategory) else cat
    tol = tol or datum.tol
    d = datum.degree
    if isinstance(cat, GluedCategory) and (0, d) in cat.spaces:
        space = cat.spaces[(0, d)]
    else:
        space = glued_space(datum, 0, d)
    if space.dim == 0:
        raise RankDeficientVModule("no glued antisymmetric sections at all")
    proj = antisym_projector(d, d)
    n = datum.complex.vertices
    cols = []
    for arrow in space.arrows:
        col = np.concatenate(
            [
                ((np.eye(d ** d) - proj.a) @ arrow.components[v].a).reshape(-1)
                for v in range(n)
            ]
        )
        cols.append(col)
    op = np.array(cols, dtype=complex).T
    # arrows carry unit coefficient vectors, so the right reference scale
    # for "this column combination is antisymmetric" is 1, not ||op||:
    # the op is numerically zero exactly when every section is already
    # antisymmetric, and a relative cutoff would discard that kernel
    _, svals, vh = np.linalg.svd(op)
    cutoff = tol.tau * max(1.0, float(svals[0]) if svals.size else 0.0)
    kept = [
        vh[i].conj()
        for i in range(space.dim)
        if (float(svals[i]) if i < svals.size else 0.0) <= cutoff
    ]
    coeffs = [ComplexMatrix(v.reshape(-1, 1)) for v in canonical_basis(kept)]
    if not coeffs:
        raise RankDeficientVModule("no antisymmetric sections among the glued ones")
    families = []
    for x in coeffs:
        xv = x.a.reshape(-1)
        comps = {}
        for v in range(n):
            acc = sum(xv[b] * space.arrows[b].components[v].a for b in range(space.dim))
            comps[v] = ComplexMatrix(acc)
        families.append(GluedArrow(datum, 0, d, comps))
    ranks = {}
    for v in range(n):
        block = np.array([f.components[v].a.reshape(-1) for f in families])
        ranks[v] = int(np.linalg.matrix_rank(block, tol=1e-8))
    if any(rk != 1 for rk in ranks.values()):
        raise RankDeficientVModule(
            "antisymmetric section module has patch ranks %r, need all 1" % (ranks,)
        )
    vee = None
    for f in families:
        if all(float(np.linalg.norm(f.components[v].a)) > tol.tau for v in range(n)):
            vee = f
            break
    if vee is None:
        raise RankDeficientVModule("every antisymmetric section vanishes on some patch")
    # patchwise norms of a section are constant on components, so this
    # normalization keeps the overlap matching exact
    comps = {
        v: vee.components[v] * (1.0 / float(np.linalg.norm(vee.components[v].a)))
        for v in range(n)
    }
    checks = []
    sd = d ** d
    for v in range(n):
        V = comps[v].a
        checks.append(("isometry patch %d" % v, float(abs((V.conj().T @ V)[0, 0] - 1.0))))
        checks.append(
            ("range projector patch %d" % v, float(np.linalg.norm(V @ V.conj().T - proj.a)))
        )
        lhs = np.kron(V.conj().T, np.eye(d)) @ np.kron(np.eye(d), V)
        want = ((-1.0) ** (d - 1)) / d * np.eye(d)
        checks.append(("pairing patch %d" % v, float(np.linalg.norm(lhs - want))))
    for name, resid in checks:
        if not tol.close(resid, scale=math.sqrt(sd)):
            raise ConsistencyError("twisted special identity failed: %s (%g)" % (name, resid))
    sref = comps[0]
    phases = {}
    for (i, j) in datum.complex.edges():
        ci = complex(hs_inner(sref, comps[i]))
        cj = complex(hs_inner(sref, comps[j]))
        phases[(i, j)] = snap_phase(ci * cj.conjugate() / abs(ci * cj), tol)
    cocycle = CechCocycle(
        datum.cover, COEFF_PHASE, phases, windings=dict(datum.windings)
    )
    if not is_cocycle(cocycle, tol):
        raise ConsistencyError("extracted phases fail the cocycle identity")
    extracted = circle_class(cocycle, tol)
    pushed = circle_class(det_pushforward(datum.cocycle, tol), tol)
    return TwistedSpecialExtraction(comps, families, cocycle, extracted, pushed, checks)
