"""Dense complex matrices under a single numerical contract.

Every dimension reported by the rest of the package (intertwiner spaces,
glued section spaces, cohomology ranks of numerical origin) traces back
to the rank decisions made here, so the conventions are pinned once:

* double precision complex entries, immutable after construction;
* one relative tolerance, measured against the largest singular value
  of the operand;
* nullspace bases are orthonormal and canonically ordered (each vector
  phase-fixed at its largest entry, then sorted lexicographically) so
  repeated runs report identical bases.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_TAU = 1e-9


@dataclass(frozen=True)
class Tolerance:
    """Relative tolerance for rank and residual decisions."""

    tau: float = DEFAULT_TAU

    def __post_init__(self):
        if not (self.tau > 0.0):
            raise ValueError("tolerance must be positive, got %r" % (self.tau,))

    def close(self, residual, scale=1.0):
        """Accept a residual measured against max(1, scale)."""
        return residual <= self.tau * max(1.0, scale)


class ComplexMatrix:
    """Immutable dense complex matrix, row-major entries."""

    __slots__ = ("_a",)

    def __init__(self, entries):
        a = np.array(entries, dtype=complex, order="C")
        if a.ndim == 1:
            a = a.reshape(-1, 1)
        if a.ndim != 2:
            raise ValueError("expected a 2-d array, got shape %r" % (a.shape,))
        if a.size and not np.all(np.isfinite(a)):
            raise ValueError("matrix entries must be finite")
        a.setflags(write=False)
        object.__setattr__(self, "_a", a)

    @property
    def a(self):
        """Read-only ndarray view of the entries."""
        return self._a

    @property
    def rows(self):
        return self._a.shape[0]

    @property
    def cols(self):
        return self._a.shape[1]

    @property
    def shape(self):
        return self._a.shape

    @classmethod
    def zeros(cls, rows, cols):
        return cls(np.zeros((rows, cols)))

    @classmethod
    def eye(cls, n):
        return cls(np.eye(n))

    def adjoint(self):
        return ComplexMatrix(self._a.conj().T)

    def conj(self):
        """Entrywise conjugate (no transpose)."""
        return ComplexMatrix(self._a.conj())

    def trace(self):
        return complex(np.trace(self._a))

    def __matmul__(self, other):
        return ComplexMatrix(self._a @ _as_array(other))

    def __add__(self, other):
        return ComplexMatrix(self._a + _as_array(other))

    def __sub__(self, other):
        return ComplexMatrix(self._a - _as_array(other))

    def __mul__(self, scalar):
        return ComplexMatrix(self._a * complex(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return ComplexMatrix(-self._a)

    def __repr__(self):
        return "ComplexMatrix(%d x %d)" % self._a.shape

    def to_json(self):
        return {
            "rows": self.rows,
            "cols": self.cols,
            "re": [float(x) for x in self._a.real.ravel()],
            "im": [float(x) for x in self._a.imag.ravel()],
        }

    @classmethod
    def from_json(cls, doc):
        rows, cols = int(doc["rows"]), int(doc["cols"])
        re, im = doc["re"], doc["im"]
        if len(re) != rows * cols or len(im) != rows * cols:
            raise ValueError(
                "matrix document has %d/%d entries for shape %d x %d"
                % (len(re), len(im), rows, cols)
            )
        a = np.array(re, dtype=float) + 1j * np.array(im, dtype=float)
        return cls(a.reshape(rows, cols))


def _as_array(m):
    if isinstance(m, ComplexMatrix):
        return m.a
    return np.asarray(m, dtype=complex)


def kron(a, b):
    """Tensor product, left factor on the leading slot: (a x b)(v x w) = av x bw."""
    return ComplexMatrix(np.kron(_as_array(a), _as_array(b)))


def adjoint(a):
    return ComplexMatrix(_as_array(a).conj().T)


def identity(n):
    return ComplexMatrix.eye(n)


def tensor_power(a, r):
    """r-fold tensor power; the zeroth power is the 1 x 1 identity."""
    out = np.eye(1, dtype=complex)
    aa = _as_array(a)
    for _ in range(r):
        out = np.kron(out, aa)
    return ComplexMatrix(out)


def opnorm(a):
    """Operator norm (largest singular value)."""
    aa = _as_array(a)
    if aa.size == 0:
        return 0.0
    return float(np.linalg.svd(aa, compute_uv=False)[0])


def hs_inner(a, b):
    """Hilbert-Schmidt inner product trace(a* b), conjugate-linear in a."""
    return complex(np.vdot(_as_array(a), _as_array(b)))


def hs_norm(a):
    return float(np.linalg.norm(_as_array(a)))


def _canonical_phase(v):
    # rotate the largest entry (first on ties) onto the positive real axis
    j = int(np.argmax(np.abs(v)))
    pivot = v[j]
    if abs(pivot) == 0.0:
        return v
    return v * (pivot.conjugate() / abs(pivot))


def _sort_key(v):
    r = np.round(v.real, 9) + 0.0  # fold -0.0 into 0.0
    i = np.round(v.imag, 9) + 0.0
    return tuple(np.stack([r, i], axis=1).ravel())


def canonical_basis(vectors):
    """Phase-fix and order a list of 1-d arrays deterministically."""
    fixed = [_canonical_phase(np.asarray(v, dtype=complex).ravel()) for v in vectors]
    fixed.sort(key=_sort_key, reverse=True)
    return fixed


def nullspace(op, tol=None):
    """Orthonormal basis of the numerical kernel of ``op``.

    A vector v is kept when ||op v|| <= tau * ||op|| * ||v||, decided by
    the singular values of op.  Returns column vectors as ComplexMatrix,
    in canonical order.
    """
    tol = tol or Tolerance()
    a = _as_array(op)
    m, n = a.shape
    if n == 0:
        return []
    if m == 0:
        vecs = list(np.eye(n, dtype=complex))
    else:
        _, s, vh = np.linalg.svd(a)
        smax = float(s[0]) if s.size else 0.0
        cutoff = tol.tau * smax
        vecs = []
        for i in range(n):
            sigma = float(s[i]) if i < s.size else 0.0
            if sigma <= cutoff:
                vecs.append(vh[i].conj())
    return [ComplexMatrix(v.reshape(-1, 1)) for v in canonical_basis(vecs)]


def projection_residual(vec, basis_vectors):
    """Distance from ``vec`` to the span of orthonormal ``basis_vectors``."""
    v = _as_array(vec).ravel()
    rem = v.copy()
    for b in basis_vectors:
        bb = _as_array(b).ravel()
        rem = rem - np.vdot(bb, v) * bb
    return float(np.linalg.norm(rem))
