import numpy as np
import pytest

from graphdist import clifford as C
from oracles import PAULI


def _conj(u, p):
    return u @ PAULI[p] @ u.conj().T


def test_group_has_24_distinct_elements():
    assert len(C.CLIFFORDS) == 24
    assert len(set(C.CLIFFORDS)) == 24
    assert len({c.name for c in C.CLIFFORDS}) == 24


@pytest.mark.parametrize("c", C.CLIFFORDS, ids=lambda c: c.name)
def test_images_match_matrix(c):
    u = c.matrix()
    assert np.allclose(u @ u.conj().T, np.eye(2))
    for p, (img, sign) in (("X", c.x_image), ("Z", c.z_image), ("Y", c.y_image)):
        assert np.allclose(_conj(u, p), sign * PAULI[img])
    assert C.Clifford1.from_matrix(u) == c
    assert C.Clifford1.from_name(c.name) == c


def test_composition_order_and_inverse():
    for a in C.CLIFFORDS:
        assert (a @ a.inverse()).is_identity
        for b in C.CLIFFORDS:
            # (a @ b) applies b first
            assert C.Clifford1.from_matrix(a.matrix() @ b.matrix()) == a @ b
            assert a.then(b) == b @ a


def test_named_constants():
    assert C.H.name == "+Z+X"
    assert C.I.is_identity and C.Z.is_pauli and C.S.is_diagonal
    assert np.allclose(
        C.SQRT_Z.matrix() / C.SQRT_Z.matrix()[0, 0], np.diag([1, -1j])
    )
    # e^{+i pi/4 Z} is S^dagger up to phase
    assert C.SQRT_Z == C.SDG
    x = C.SQRT_X.matrix()
    ref = (np.eye(2) - 1j * PAULI["X"]) / np.sqrt(2)
    assert abs(abs(np.vdot(x.reshape(-1), ref.reshape(-1))) / 2 - 1) < 1e-9


def test_symplectic_classes_partition_group():
    classes = C.by_symplectic_class()
    assert len(classes) == 6
    assert all(len(v) == 4 for v in classes.values())


def test_unknown_name_rejected():
    with pytest.raises(ValueError):
        C.Clifford1.from_name("bogus")
