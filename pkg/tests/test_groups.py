import math

import numpy as np
import pytest

from catbundle.errors import CapExceeded, NotInNormalizer, NotUnitary, WrongKind
from catbundle.groups import (
    KIND_FINITE,
    KIND_SU,
    KIND_U,
    GroupSpec,
    cyclic_diagonal_group,
    enumerate_finite,
    full_unitary,
    group_distance,
    lie_basis,
    quaternion_group,
    special_unitary,
    trivial_group,
    verify_normalizer,
)

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0)


def test_enumerate_cyclic_four():
    # closure by hand: diag(i,-i) -> diag(-1,-1) -> diag(-i,i) -> identity
    g = cyclic_diagonal_group()
    assert g.order() == 4


def test_enumerate_quaternion_eight():
    assert quaternion_group().order() == 8


def test_enumerate_trivial():
    assert trivial_group(3).order() == 1


def test_enumeration_closed_under_products():
    g = quaternion_group()
    elems = g.elements()
    for a in elems:
        for b in elems:
            assert g.contains(a.a @ b.a)


def test_enumeration_cap():
    # an order-12 rotation exceeds a cap of 5
    w = np.exp(2j * math.pi / 12)
    g = GroupSpec(KIND_FINITE, 1, [np.array([[w]])], enumeration_cap=5)
    with pytest.raises(CapExceeded):
        g.elements()


def test_nonunitary_generator_rejected():
    with pytest.raises(NotUnitary):
        GroupSpec(KIND_FINITE, 2, [np.array([[1.0, 1.0], [0.0, 1.0]])])


def test_lie_basis_counts():
    assert len(lie_basis(special_unitary(2)).matrices) == 3
    assert len(lie_basis(full_unitary(2)).matrices) == 4
    assert len(lie_basis(special_unitary(3)).matrices) == 8


def test_lie_basis_anti_hermitian_and_traceless():
    for x in lie_basis(special_unitary(3)).matrices:
        assert np.linalg.norm(x.a + x.a.conj().T) <= 1e-12
        assert abs(np.trace(x.a)) <= 1e-12


def test_lie_basis_exponentials_unitary():
    # truncated series at t = 0.1
    for x in lie_basis(full_unitary(2)).matrices:
        acc = np.eye(2, dtype=complex)
        term = np.eye(2, dtype=complex)
        for k in range(1, 30):
            term = term @ (0.1 * x.a) / k
            acc = acc + term
        assert np.linalg.norm(acc.conj().T @ acc - np.eye(2)) <= 1e-8


def test_lie_basis_wrong_kind():
    with pytest.raises(WrongKind):
        lie_basis(quaternion_group())


def test_normalizer_swap_of_cyclic_diagonal():
    # conjugation by hand: swap exchanges the diagonal entries
    swap = np.array([[0, 1], [1, 0]], dtype=complex)
    n = verify_normalizer(swap, cyclic_diagonal_group())
    assert abs(n.phase_det + 1.0) <= 1e-12


def test_normalizer_identity_and_scalars():
    assert verify_normalizer(np.eye(2), quaternion_group()).phase_det == pytest.approx(1.0)
    w = np.exp(1j * math.pi / 7)
    n = verify_normalizer(w * np.eye(2), special_unitary(2))
    assert abs(n.phase_det - np.exp(2j * math.pi / 7)) <= 1e-12


def test_normalizer_of_quaternion():
    for u in (np.diag([1.0, 1j]), HADAMARD):
        verify_normalizer(u, quaternion_group())


def test_normalizer_rejects():
    bad = np.diag([1.0, np.exp(1j * math.pi / 5)])
    with pytest.raises(NotInNormalizer):
        verify_normalizer(bad, quaternion_group())


def test_normalizer_composes():
    g = quaternion_group()
    u = np.diag([1.0, 1j])
    v = HADAMARD
    verify_normalizer(u @ v, g)
    verify_normalizer(v @ u, g)


def test_contains_kinds():
    su = special_unitary(2)
    assert su.contains(HADAMARD @ np.diag([1j, -1j]) @ HADAMARD)
    assert not su.contains(np.diag([1.0, 1j]))
    assert full_unitary(2).contains(np.diag([1.0, 1j]))
    q8 = quaternion_group()
    assert q8.contains(np.diag([1j, -1j]) @ np.array([[0, 1], [-1, 0]]))
    assert not q8.contains(np.exp(1j * math.pi / 4) * np.eye(2))


def test_group_distance():
    q8 = quaternion_group()
    assert group_distance(q8, np.diag([1j, -1j])) <= 1e-12
    assert group_distance(q8, np.exp(1j * math.pi / 4) * np.eye(2)) > 0.5
    assert group_distance(special_unitary(2), HADAMARD) > 0.1  # det = -1
    assert group_distance(full_unitary(2), HADAMARD) <= 1e-12


def test_group_json_roundtrip():
    g = quaternion_group()
    g2 = GroupSpec.from_json(g.to_json())
    assert g2.kind == KIND_FINITE and g2.degree == 2 and g2.order() == 8
    su = GroupSpec.from_json(special_unitary(3).to_json())
    assert su.kind == KIND_SU and su.degree == 3
    u = GroupSpec.from_json(full_unitary(2).to_json())
    assert u.kind == KIND_U


def test_lie_kind_rejects_generators():
    with pytest.raises(ValueError):
        GroupSpec(KIND_SU, 2, [np.eye(2)])


def test_finite_enumerate_only():
    with pytest.raises(WrongKind):
        special_unitary(2).elements()
