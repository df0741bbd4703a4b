import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from twoqubit import pauli

coeff_vectors = st.lists(st.floats(-3, 3), min_size=16, max_size=16).map(np.array)

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0 + 0j, -1.0])


def test_single_qubit_convention():
    s = pauli.SIGMA
    assert np.allclose(s[1] @ s[2], 1j * s[3])
    assert np.allclose(s[2] @ s[3], 1j * s[1])
    assert np.allclose(s[3] @ s[1], 1j * s[2])


def test_flat_index_is_lexicographic():
    assert pauli.index(0, 0) == 0
    assert pauli.index(1, 0) == 4
    assert pauli.index(3, 2) == 14
    assert [pauli.element(pauli.index(*e)) for e in pauli.ELEMENTS] == list(pauli.ELEMENTS)
    with pytest.raises(ValueError):
        pauli.index(4, 0)


def test_basis_matches_kron_of_literal_matrices():
    one = [np.eye(2), X, Y, Z]
    for s, x in pauli.ELEMENTS:
        assert np.array_equal(pauli.basis_matrix((s, x)), np.kron(one[s], one[x]))


def test_basis_is_orthogonal_under_trace():
    gram = np.array(
        [
            [np.trace(pauli.basis_matrix(a) @ pauli.basis_matrix(b)) for b in pauli.ELEMENTS]
            for a in pauli.ELEMENTS
        ]
    )
    assert np.allclose(gram, 4 * np.eye(16))


def test_labels():
    assert pauli.label((0, 0)) == "I"
    assert pauli.label((2, 0)) == "S2"
    assert pauli.label((0, 3)) == "X3"
    assert pauli.label((1, 3)) == "S1X3"


@given(coeff_vectors)
def test_expand_inverts_from_coefficients(c):
    m = pauli.from_coefficients(c)
    assert np.allclose(m, m.conj().T)
    assert np.allclose(pauli.pauli_expand(m), c, atol=1e-12)


def test_expand_warns_on_non_hermitian():
    with pytest.warns(UserWarning):
        c = pauli.pauli_expand(1j * pauli.basis_matrix((1, 0)))
    assert np.iscomplexobj(c)


def test_commutator_of_sigma_pair():
    table = pauli.product_table()
    phase, k = table[pauli.index(1, 0), pauli.index(2, 0)]
    assert k == pauli.index(3, 0)
    assert phase == pytest.approx(2j)


def test_commuting_correlation_pair():
    # S2X2 and S3X3 anticommute on both factors, so they commute overall
    a, b = pauli.basis_matrix((2, 2)), pauli.basis_matrix((3, 3))
    assert np.allclose(pauli.commutator(a, b), 0)
    assert pauli.product_table()[pauli.index(2, 2), pauli.index(3, 3)] is None


def test_product_table_against_direct_commutators():
    table = pauli.product_table()
    for i, j in itertools.product(range(16), repeat=2):
        c = pauli.commutator(pauli.basis_matrix(pauli.element(i)), pauli.basis_matrix(pauli.element(j)))
        entry = table[i, j]
        if entry is None:
            assert np.allclose(c, 0)
        else:
            phase, k = entry
            assert np.allclose(c, phase * pauli.basis_matrix(pauli.element(k)))


@given(coeff_vectors, coeff_vectors)
def test_adjoint_matrix_generates_heisenberg_derivative(hc, oc):
    h = pauli.from_coefficients(hc)
    a = pauli.adjoint_matrix(h)
    assert np.isrealobj(a)
    assert np.allclose(a, -a.T, atol=1e-12)
    direct = pauli.pauli_expand(-1j * pauli.commutator(pauli.from_coefficients(oc), h))
    assert np.allclose(a @ oc, direct, atol=1e-10)
