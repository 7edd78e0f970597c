"""Intertwiner spaces of tensor powers of the defining representation.

Objects are tensor powers H^r of C^d carrying g -> g^(x r); arrows from
H^r to H^s are the d^s x d^r matrices t with g^(x s) t = t g^(x r) for
every group element.  For finite groups the constraint is stacked over
the generators; for the su/u kinds the equivalent derivative condition
is stacked over a Lie algebra basis, so continuous groups are never
sampled.  Row-major vectorization turns t -> a t b into (a kron b^T).

The module also builds the permutation unitaries and symmetries of the
tensor powers, antisymmetric projectors, the top antisymmetric isometry
with its sign identity, the standard conjugate solutions, and the hat
action of normalizer elements.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import SizeCapExceeded, WrongKind
from .groups import KIND_FINITE, GroupSpec, NormalizerElement, lie_basis
from .linalg import ComplexMatrix, Tolerance, canonical_basis, nullspace, tensor_power

INTERTWINER_UNKNOWN_CAP = 10_000
ANTISYM_POWER_CAP = 6


@dataclass(frozen=True)
class TensorPowerObject:
    """The r-th tensor power of the defining space of dimension degree."""

    degree: int
    power: int

    @property
    def dim(self):
        return self.degree ** self.power


@dataclass(frozen=True)
class IntertwinerSpace:
    """Orthonormal basis (Hilbert-Schmidt) of (H^r, H^s) for one group.

    Behaves as a sequence of its basis matrices.
    """

    group: GroupSpec
    r: int
    s: int
    basis: tuple

    @property
    def dim(self):
        return len(self.basis)

    def __len__(self):
        return len(self.basis)

    def __iter__(self):
        return iter(self.basis)

    def __getitem__(self, k):
        return self.basis[k]

    def to_json(self):
        return {
            "group": self.group.to_json(),
            "r": self.r,
            "s": self.s,
            "basis": [b.to_json() for b in self.basis],
        }


@dataclass(frozen=True)
class SpecialObjectData:
    """Top antisymmetric isometry S in (1, H^d) with S*S = 1."""

    degree: int
    isometry: ComplexMatrix

    @property
    def projector(self):
        return ComplexMatrix(self.isometry.a @ self.isometry.a.conj().T)

    @property
    def pairing_scalar(self):
        """Expected value of (S* x 1)(1 x S) as a multiple of the identity."""
        d = self.degree
        return (-1.0) ** (d - 1) / d


@dataclass(frozen=True)
class ConjugatePair:
    """Standard solution of the conjugate equations for the defining power."""

    degree: int
    r: ComplexMatrix
    rbar: ComplexMatrix
    dim_value: float


def _derived_power(x, r, d):
    """Derivative of g -> g^(x r) at the identity: sum over slots of x."""
    if r == 0:
        return np.zeros((1, 1), dtype=complex)
    out = np.zeros((d ** r, d ** r), dtype=complex)
    for k in range(r):
        out += np.kron(
            np.kron(np.eye(d ** k), x), np.eye(d ** (r - 1 - k))
        )
    return out


def intertwiners(group, r, s, tol=None, cap=INTERTWINER_UNKNOWN_CAP):
    """Orthonormal basis of the intertwiner space (H^r, H^s).

    Raises SizeCapExceeded when the vectorized problem has more than
    ``cap`` unknowns.  Results are cached on the group.
    """
    tol = tol or Tolerance()
    key = ("intertwiners", r, s, tol.tau)
    hit = group.cache.get(key)
    if hit is not None:
        return hit
    d = group.degree
    n = d ** r * d ** s
    if n > cap:
        raise SizeCapExceeded(
            "intertwiner problem has %d unknowns, cap is %d" % (n, cap)
        )
    ds, dr = d ** s, d ** r
    rows = []
    if group.kind == KIND_FINITE:
        for g in group.generators:
            gs = tensor_power(g, s).a
            gr = tensor_power(g, r).a
            rows.append(np.kron(gs, np.eye(dr)) - np.kron(np.eye(ds), gr.T))
    else:
        for x in lie_basis(group).matrices:
            xs = _derived_power(x.a, s, d)
            xr = _derived_power(x.a, r, d)
            rows.append(np.kron(xs, np.eye(dr)) - np.kron(np.eye(ds), xr.T))
    if rows:
        op = np.vstack(rows)
    else:
        op = np.zeros((0, n), dtype=complex)
    vecs = nullspace(op, tol)
    basis = tuple(ComplexMatrix(v.a.reshape(ds, dr)) for v in vecs)
    space = IntertwinerSpace(group=group, r=r, s=s, basis=basis)
    group.cache[key] = space
    return space


def group_average(group, t, r, s):
    """Average of g^(x s) t (g^(x r))* over a finite group."""
    if group.kind != KIND_FINITE:
        raise WrongKind("group averaging needs a finite group")
    d = group.degree
    tt = t.a if isinstance(t, ComplexMatrix) else np.asarray(t, dtype=complex)
    if tt.shape != (d ** s, d ** r):
        raise ValueError("arrow shape %r does not match (r, s) = (%d, %d)" % (tt.shape, r, s))
    acc = np.zeros_like(tt)
    elems = group.elements()
    for g in elems:
        gs = tensor_power(g, s).a
        gr = tensor_power(g, r).a
        acc += gs @ tt @ gr.conj().T
    return ComplexMatrix(acc / len(elems))


def permutation_unitary(perm, d):
    """Unitary on (C^d)^(x r) moving tensor slot k to slot perm[k].

    Composition convention: permutation_unitary(p) @ permutation_unitary(q)
    equals permutation_unitary(p after q).
    """
    r = len(perm)
    if sorted(perm) != list(range(r)):
        raise ValueError("not a permutation of 0..%d: %r" % (r - 1, perm))
    n = d ** r
    u = np.zeros((n, n), dtype=complex)
    for src in itertools.product(range(d), repeat=r):
        dst = [0] * r
        for k in range(r):
            dst[perm[k]] = src[k]
        row = 0
        col = 0
        for k in range(r):
            row = row * d + dst[k]
            col = col * d + src[k]
        u[row, col] = 1.0
    return ComplexMatrix(u)


def symmetry_unitary(r, s, d):
    """The flip of tensor blocks: v x w -> w x v for v in H^r, w in H^s."""
    perm = [k + s for k in range(r)] + list(range(s))
    return permutation_unitary(perm, d)


def _sign(perm):
    inv = 0
    for a in range(len(perm)):
        for b in range(a + 1, len(perm)):
            if perm[a] > perm[b]:
                inv += 1
    return -1 if inv % 2 else 1


def antisym_projector(d, r):
    """Projector (1/r!) sum over permutations of sign(p) times the permutation unitary."""
    if r > ANTISYM_POWER_CAP:
        raise SizeCapExceeded("antisymmetrizer capped at power %d" % ANTISYM_POWER_CAP)
    n = d ** r
    acc = np.zeros((n, n), dtype=complex)
    for p in itertools.permutations(range(r)):
        acc += _sign(p) * permutation_unitary(p, d).a
    return ComplexMatrix(acc / math.factorial(r))


def special_isometry(d):
    """The normalized top antisymmetric vector as an isometry 1 -> H^d.

    Phase convention: positive coefficient on e_1 x ... x e_d.
    """
    n = d ** d
    vec = np.zeros((n, 1), dtype=complex)
    coeff = 1.0 / math.sqrt(math.factorial(d))
    for p in itertools.permutations(range(d)):
        row = 0
        for k in range(d):
            row = row * d + p[k]
        vec[row, 0] = _sign(p) * coeff
    return SpecialObjectData(degree=d, isometry=ComplexMatrix(vec))


def conjugate_pair(d):
    """Unnormalized standard conjugate solution R = sum_k e_k x e_k.

    Both members coincide numerically; the dimension value R* R equals d.
    """
    vec = np.zeros((d * d, 1), dtype=complex)
    for k in range(d):
        vec[k * d + k, 0] = 1.0
    r = ComplexMatrix(vec)
    return ConjugatePair(degree=d, r=r, rbar=r, dim_value=float(d))


def hat_action(u, t, r, s):
    """Conjugation by tensor powers: t -> u^(x s) t (u^(x r))*."""
    if isinstance(u, NormalizerElement):
        u = u.u
    us = tensor_power(u, s).a
    ur = tensor_power(u, r).a
    tt = t.a if isinstance(t, ComplexMatrix) else np.asarray(t, dtype=complex)
    return ComplexMatrix(us @ tt @ ur.conj().T)


def averaged_fixed_space(group, r, s, tol=None):
    """Image of the group averaging projector, as an orthonormal basis.

    Independent route to the intertwiner space of a finite group: the
    averaging superoperator is assembled and diagonalized instead of
    stacking generator constraints.
    """
    if group.kind != KIND_FINITE:
        raise WrongKind("averaging route needs a finite group")
    tol = tol or Tolerance()
    d = group.degree
    ds, dr = d ** s, d ** r
    n = ds * dr
    acc = np.zeros((n, n), dtype=complex)
    elems = group.elements()
    for g in elems:
        gs = tensor_power(g, s).a
        gr = tensor_power(g, r).a
        acc += np.kron(gs, gr.conj())
    acc /= len(elems)
    # acc is the HS-orthogonal projector onto the fixed space
    w, v = np.linalg.eigh((acc + acc.conj().T) / 2.0)
    vecs = [v[:, i] for i in range(n) if w[i] > 0.5]
    return [ComplexMatrix(x.reshape(ds, dr)) for x in canonical_basis(vecs)]
