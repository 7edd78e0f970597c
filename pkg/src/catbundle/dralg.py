"""Truncated arrow algebras with circle and gauge actions.

Arrows between tensor powers up to a fixed window assemble into a
graded *-algebra: a product pads the factors with identity legs on the
right until the powers meet, and (r, s, t) is identified with
(r+1, s+1, t (x) 1).  Elements are kept in reduced form by stripping
identity legs off whenever the matrix splits that way, so equality of
elements is equality of reduced representatives.

The ambient algebra is built from full matrix spaces; the gauge action
of a fibre group carves out the intertwiner subalgebra as its fixed
points, and unitaries normalizing the group act on that subalgebra.
The circle acts by the power grade s - r.  The inner endomorphism along
the antisymmetric isometry family commutes with both, which is the
algebraic shadow of the determinant twist.

The carrier is either a plain group fibre or a glued family over a
base; all arithmetic is patchwise in the glued case, and the overlap
matching survives because paddings and products are patchwise too.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, NotUnitary, TruncationOverflow, WrongKind
from .groups import (
    KIND_FINITE,
    NormalizerElement,
    lie_basis,
    verify_normalizer,
)
from .linalg import ComplexMatrix, Tolerance, canonical_basis, opnorm
from .repcat import (
    averaged_fixed_space,
    hat_action,
    intertwiners,
    special_isometry,
    symmetry_unitary,
    _derived_power,
)

DEFAULT_LEVEL = 4


@dataclass(frozen=True)
class DRTruncation:
    """Finite window onto the graded algebra: source powers capped at level.

    Exactly one of ``group`` (plain fibre) and ``datum`` (glued family)
    is set; target powers may overhang the level by the fibre degree so
    that the antisymmetric isometry and its inner endomorphism fit.
    """

    level: int
    group: object = None
    datum: object = None

    def __post_init__(self):
        if self.level < 1:
            raise ValueError("truncation level must be at least 1")
        if (self.group is None) == (self.datum is None):
            raise ValueError("exactly one carrier: a fibre group or a gluing datum")

    @property
    def degree(self):
        return (self.group or self.datum.group).degree

    @property
    def fibre_group(self):
        return self.group if self.group is not None else self.datum.group

    @property
    def glued(self):
        return self.datum is not None

    def admits(self, r, s):
        return r <= self.level and s <= self.level + self.degree


@dataclass(frozen=True)
class DRElement:
    """Reduced representative (r, s, t) of a truncated algebra element."""

    trunc: DRTruncation
    r: int
    s: int
    value: object

    @property
    def grade(self):
        return self.s - self.r

    @property
    def glued(self):
        return isinstance(self.value, dict)


def _strip_once(t, r, s, d, tol):
    """If t = t0 (x) 1 on the last leg, return t0, else None."""
    if r < 1 or s < 1:
        return None
    rows, cols = d ** (s - 1), d ** (r - 1)
    a = t.a.reshape(rows, d, cols, d)
    t0 = np.trace(a, axis1=1, axis2=3) / d
    resid = float(np.linalg.norm(t.a - np.kron(t0, np.eye(d))))
    if tol.close(resid, scale=max(1.0, float(np.linalg.norm(t.a)))):
        return ComplexMatrix(t0)
    return None


def _reduce(value, r, s, d, tol):
    while r >= 1 and s >= 1:
        if isinstance(value, dict):
            stripped = {v: _strip_once(t, r, s, d, tol) for v, t in value.items()}
            if any(t is None for t in stripped.values()):
                break
            value = stripped
        else:
            t0 = _strip_once(value, r, s, d, tol)
            if t0 is None:
                break
            value = t0
        r -= 1
        s -= 1
    return value, r, s


def _apply(f, value, *others):
    if isinstance(value, dict):
        return {v: f(value[v], *[o[v] for o in others]) for v in value}
    return f(value, *others)


def _pad(value, q, d):
    if q == 0:
        return value
    eye = np.eye(d ** q)
    return _apply(lambda t: ComplexMatrix(np.kron(t.a, eye)), value)


def dr_element(trunc, r, s, value, tol=None):
    """Wrap a matrix (or a patch family) as a reduced algebra element."""
    tol = tol or Tolerance()
    d = trunc.degree
    if not trunc.admits(r, s):
        raise TruncationOverflow(
            "powers (%d, %d) exceed the truncation window at level %d" % (r, s, trunc.level)
        )
    if trunc.glued:
        if not isinstance(value, dict):
            value = {v: value for v in range(trunc.datum.complex.vertices)}
        comps = {}
        for v, t in value.items():
            t = t if isinstance(t, ComplexMatrix) else ComplexMatrix(t)
            if t.shape != (d ** s, d ** r):
                raise ValueError("component %r has shape %r" % (v, t.shape))
            comps[v] = t
        value = comps
    else:
        value = value if isinstance(value, ComplexMatrix) else ComplexMatrix(value)
        if value.shape != (d ** s, d ** r):
            raise ValueError(
                "value shape %r does not match powers (%d, %d)" % (value.shape, r, s)
            )
    value, r, s = _reduce(value, r, s, d, tol)
    return DRElement(trunc, r, s, value)


def dr_one(trunc):
    if trunc.glued:
        one = ComplexMatrix.eye(1)
        return DRElement(
            trunc, 0, 0, {v: one for v in range(trunc.datum.complex.vertices)}
        )
    return DRElement(trunc, 0, 0, ComplexMatrix.eye(1))


def _same_carrier(a, b):
    if a.trunc is not b.trunc and a.trunc != b.trunc:
        raise WrongKind("elements live in different truncations")
    if a.glued != b.glued:
        raise WrongKind("cannot mix a plain element with a glued one")


def dr_mul(a, b, tol=None):
    """Product after padding the shorter factor with identity legs.

    The source power of a is matched against the target power of b;
    whichever is smaller gets identity legs appended on the right.  A
    padding that pushes a source power past the window is refused.
    """
    tol = tol or Tolerance()
    _same_carrier(a, b)
    trunc = a.trunc
    d = trunc.degree
    if a.r >= b.s:
        p, q = 0, a.r - b.s
    else:
        p, q = b.s - a.r, 0
    r_out, s_out = b.r + q, a.s + p
    if a.r + p > trunc.level or b.r + q > trunc.level or not trunc.admits(r_out, s_out):
        raise TruncationOverflow(
            "product pads to source power %d, window level is %d"
            % (max(a.r + p, b.r + q), trunc.level)
        )
    xv = _pad(a.value, p, d)
    yv = _pad(b.value, q, d)
    prod = _apply(lambda x, y: x @ y, xv, yv)
    value, r, s = _reduce(prod, r_out, s_out, d, tol)
    return DRElement(trunc, r, s, value)


def dr_adjoint(a):
    value = _apply(lambda t: t.adjoint(), a.value)
    return DRElement(a.trunc, a.s, a.r, value)


def dr_add(a, b, scalar=1.0, tol=None):
    """a + scalar * b; grades must agree, the shorter one is padded up."""
    tol = tol or Tolerance()
    _same_carrier(a, b)
    trunc = a.trunc
    d = trunc.degree
    if a.grade != b.grade:
        raise WrongKind("sum of elements of different grades is not representable")
    q = a.r - b.r
    if q >= 0:
        xv, yv, r, s = a.value, _pad(b.value, q, d), a.r, a.s
    else:
        xv, yv, r, s = _pad(a.value, -q, d), b.value, b.r, b.s
    if not trunc.admits(r, s):
        raise TruncationOverflow("sum needs powers (%d, %d)" % (r, s))
    out = _apply(lambda x, y: x + y * scalar, xv, yv)
    value, r, s = _reduce(out, r, s, d, tol)
    return DRElement(trunc, r, s, value)


def dr_norm(a):
    if a.glued:
        return max(opnorm(t) for t in a.value.values())
    return opnorm(a.value)


def dr_close(a, b, tol=None):
    tol = tol or Tolerance()
    if a.grade != b.grade:
        return False
    diff = dr_add(a, b, scalar=-1.0, tol=tol)
    return tol.close(dr_norm(diff), scale=max(1.0, dr_norm(a)))


def canonical_endo(a):
    """Tensor an identity leg on the left: the generating endomorphism."""
    trunc = a.trunc
    d = trunc.degree
    if a.r + 1 > trunc.level or not trunc.admits(a.r + 1, a.s + 1):
        raise TruncationOverflow("endomorphism image leaves the truncation window")
    eye = np.eye(d)
    value = _apply(lambda t: ComplexMatrix(np.kron(eye, t.a)), a.value)
    value, r, s = _reduce(value, a.r + 1, a.s + 1, d, Tolerance())
    return DRElement(trunc, r, s, value)


def circle_action(z, a, tol=None):
    tol = tol or Tolerance()
    if abs(abs(z) - 1.0) > tol.tau:
        raise ValueError("circle parameter must have modulus one")
    scal = z ** a.grade
    value = _apply(lambda t: t * scal, a.value)
    return DRElement(a.trunc, a.r, a.s, value)


def gauge_action(g, a, tol=None):
    """Conjugation on all tensor legs by a unitary of the fibre degree."""
    tol = tol or Tolerance()
    if isinstance(g, NormalizerElement):
        g = g.u
    elif not isinstance(g, ComplexMatrix):
        g = ComplexMatrix(g)
    d = a.trunc.degree
    if g.shape != (d, d):
        raise WrongKind("gauge unitary has shape %r, fibre degree is %d" % (g.shape, d))
    if not tol.close(float(np.linalg.norm(g.a.conj().T @ g.a - np.eye(d))), scale=float(d)):
        raise NotUnitary("gauge parameter is not unitary")
    value = _apply(lambda t: hat_action(g, t, a.r, a.s), a.value)
    return DRElement(a.trunc, a.r, a.s, value)


def eq_rhoeps(a):
    """Residual of the exchange identity 1 (x) t = th(s,1) (t (x) 1) th(1,r).

    Zero exactly when tensoring an identity leg on the left agrees with
    tensoring on the right up to the braiding; this is the finite,
    checkable identity behind the canonical endomorphism being inner to
    the ambient shift.
    """
    d = a.trunc.degree
    ths = symmetry_unitary(a.s, 1, d).a
    thr = symmetry_unitary(1, a.r, d).a

    def resid(t):
        lhs = np.kron(np.eye(d), t.a)
        rhs = ths @ np.kron(t.a, np.eye(d)) @ thr
        return float(np.linalg.norm(lhs - rhs))

    if a.glued:
        return max(resid(t) for t in a.value.values())
    return resid(a.value)


def special_element(trunc, tol=None):
    """The antisymmetric isometry as an algebra element of pure grade d."""
    d = trunc.degree
    if trunc.glued:
        from .glue import extract_twisted_special

        extraction = extract_twisted_special(trunc.datum, tol=tol)
        return dr_element(trunc, 0, d, dict(extraction.isometries), tol=tol)
    return dr_element(trunc, 0, d, special_isometry(d).isometry, tol=tol)


def inner_endo_nu(vbasis, a, tol=None):
    """The inner endomorphism t -> sum_l psi_l t psi_l* along the V-module."""
    tol = tol or Tolerance()
    if not vbasis:
        raise ValueError("the V-module basis is empty")
    d = a.trunc.degree
    out = None
    for psi in vbasis:
        if (psi.r, psi.s) != (0, d):
            raise WrongKind("V-module elements must have powers (0, %d)" % d)
        term = dr_mul(dr_mul(psi, a, tol), dr_adjoint(psi), tol)
        out = term if out is None else dr_add(out, term, tol=tol)
    return out


def fixed_points(group, r, s, level=DEFAULT_LEVEL, tol=None):
    """Basis of the arrows fixed by the whole fibre gauge group.

    Finite fibres go through the averaging projector; Lie fibres through
    the kernel of the summed squared derivation.  Both routes are
    independent of the generator-constraint route behind the fibre
    bases, so agreement between the two is a real consistency check.
    """
    tol = tol or Tolerance()
    if max(r, s) > level:
        raise TruncationOverflow("powers exceed the truncation level")
    if group.kind == KIND_FINITE:
        return averaged_fixed_space(group, r, s, tol=tol)
    d = group.degree
    ds, dr = d ** s, d ** r
    basis = lie_basis(group)
    acc = np.zeros((ds * dr, ds * dr), dtype=complex)
    for xg in basis.matrices:
        ls = _derived_power(xg.a, s, d)
        lr = _derived_power(xg.a, r, d)
        k = np.kron(ls, np.eye(dr)) - np.kron(np.eye(ds), lr.T)
        acc += k.conj().T @ k
    w, v = np.linalg.eigh((acc + acc.conj().T) / 2.0)
    top = max(1.0, float(w[-1])) if len(w) else 1.0
    vecs = [v[:, i] for i in range(len(w)) if w[i] <= tol.tau * top]
    return [ComplexMatrix(x.reshape(ds, dr)) for x in canonical_basis(vecs)]


@dataclass(frozen=True)
class StabilizerVerdict:
    agree: bool
    in_group: bool
    witness: tuple | None

    def __bool__(self):
        return self.agree


def stabilizer_test(u, v, group, level=3, tol=None):
    """Compare the gauge actions of two normalizers against membership.

    The actions agree on every intertwiner space up to the level exactly
    when u v* lies in the fibre group; any discrepancy between the two
    answers would break faithfulness, so it is raised instead of
    returned.  The verdict is truthy iff the actions agree, and carries
    the first witnessing intertwiner when they do not.
    """
    tol = tol or Tolerance()
    if group.kind != KIND_FINITE:
        raise WrongKind("the stabilizer test needs a finite fibre group")
    un = u if isinstance(u, NormalizerElement) else verify_normalizer(u, group, tol=tol)
    vn = v if isinstance(v, NormalizerElement) else verify_normalizer(v, group, tol=tol)
    witness = None
    for r in range(level + 1):
        for s in range(level + 1):
            for idx, t in enumerate(intertwiners(group, r, s, tol=tol)):
                du = hat_action(un, t, r, s)
                dv = hat_action(vn, t, r, s)
                resid = float(np.linalg.norm(du.a - dv.a))
                if not tol.close(resid, scale=max(1.0, float(np.linalg.norm(t.a)))):
                    witness = (r, s, idx)
                    break
            if witness is not None:
                break
        if witness is not None:
            break
    agree = witness is None
    in_group = group.contains(un.u.a @ vn.u.a.conj().T, tol=tol)
    if agree != in_group:
        raise ConsistencyError(
            "gauge action agreement (%s) contradicts membership (%s)" % (agree, in_group)
        )
    return StabilizerVerdict(agree, in_group, witness)
