import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from twoqubit.example import example_eigenvalues
from twoqubit.hamiltonian import (
    CanonicalHamiltonian,
    GeneralHamiltonian,
    axis3_gauge,
    canonicalize,
    from_dict,
    gamma_gram,
    gamma_triple,
    parameter_scale,
    random_canonical,
    random_general,
    sign_partner,
    spectrum,
    to_dict,
    to_matrix,
)
from twoqubit.pauli import SIGMA

seeds = st.integers(0, 2**32 - 1)


def literal_matrix(alpha, beta, gamma):
    """H assembled term by term from Kronecker products."""
    i2 = np.eye(2)
    h = np.zeros((4, 4), dtype=complex)
    for j in range(3):
        h += 0.5 * alpha[j] * np.kron(SIGMA[j + 1], i2)
        h += 0.5 * beta[j] * np.kron(i2, SIGMA[j + 1])
        for k in range(3):
            h += 0.5 * gamma[j][k] * np.kron(SIGMA[j + 1], SIGMA[k + 1])
    return h


@given(seeds)
def test_matrix_matches_literal_sum(seed):
    h = random_general(np.random.default_rng(seed))
    assert np.allclose(to_matrix(h), literal_matrix(h.alpha, h.beta, h.gamma), atol=1e-14)


@given(seeds)
def test_hilbert_schmidt_norm_is_parameter_norm(seed):
    h = random_general(np.random.default_rng(seed))
    m = to_matrix(h)
    assert np.trace(m @ m).real == pytest.approx(np.sum(h.parameters() ** 2), rel=1e-12)
    assert parameter_scale(h) == pytest.approx(np.linalg.norm(h.parameters()))


@given(seeds)
def test_spectrum_matches_characteristic_roots(seed):
    h = random_general(np.random.default_rng(seed))
    roots = np.sort(np.roots(np.poly(to_matrix(h))).real)
    assert np.allclose(spectrum(h), roots, atol=1e-8)


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
def test_pure_interaction_eigenvalue_formulas(g1, g2, g3):
    h = CanonicalHamiltonian(gamma=[g1, g2, g3])
    assert np.allclose(spectrum(h), example_eigenvalues([g1, g2, g3]), atol=1e-12)


def test_canonical_convention_flags():
    assert CanonicalHamiltonian(gamma=[-0.5, 1.0, 2.0]).follows_convention()
    assert not CanonicalHamiltonian(gamma=[1.5, 1.0, 2.0]).follows_convention()
    assert not CanonicalHamiltonian(gamma=[0.5, -1.0, 2.0]).follows_convention()


def test_to_general_round_trip():
    c = CanonicalHamiltonian([0.1, 0.2, 0.3], [0.4, 0.5, 0.6], [0.7, 0.8, 0.9])
    g = c.to_general()
    assert isinstance(g, GeneralHamiltonian)
    assert np.allclose(to_matrix(g), to_matrix(c))


@given(seeds)
def test_canonicalize_properties(seed):
    h = random_general(np.random.default_rng(seed))
    c, r, s = canonicalize(h)
    for q in (r, s):
        assert np.allclose(q @ q.T, np.eye(3), atol=1e-12)
        assert np.linalg.det(q) == pytest.approx(1.0)
    assert np.allclose(r @ h.gamma @ s.T, np.diag(c.gamma), atol=1e-12)
    assert np.allclose(c.alpha, r @ h.alpha)
    assert np.allclose(c.beta, s @ h.beta)
    assert c.follows_convention(1e-12)
    assert gamma_triple(c) == pytest.approx(gamma_triple(h), rel=1e-10, abs=1e-12)
    assert np.allclose(np.sort(c.gamma**2), np.linalg.eigvalsh(gamma_gram(h)), atol=1e-12)
    # a local frame change is a unitary similarity
    assert np.allclose(spectrum(c), spectrum(h), atol=1e-12)


def test_canonicalize_is_idempotent_on_canonical_input(rng):
    for case in ("I", "II", "III"):
        h = random_canonical(rng, case=case)
        c, _, _ = canonicalize(h)
        assert np.allclose(c.parameters(), h.parameters(), atol=1e-12)


def test_canonicalize_single_coupling_gauge(rng):
    # only gamma_3 survives: alpha_2 = 0, alpha_1 >= 0, beta_2 = 0, beta_1 >= 0
    u = np.linalg.qr(rng.normal(size=(3, 3)))[0]
    v = np.linalg.qr(rng.normal(size=(3, 3)))[0]
    h = GeneralHamiltonian(rng.normal(size=3), rng.normal(size=3), 1.3 * np.outer(u[:, 0], v[:, 0]))
    c, _, _ = canonicalize(h)
    assert np.allclose(c.gamma[:2], 0, atol=1e-12)
    assert c.gamma[2] == pytest.approx(1.3)
    assert abs(c.alpha[1]) < 1e-12 and c.alpha[0] >= 0
    assert abs(c.beta[1]) < 1e-12 and c.beta[0] >= 0


@given(seeds)
def test_axis3_gauge(seed):
    alpha = np.random.default_rng(seed).normal(size=3)
    g = axis3_gauge(alpha)
    assert np.allclose(g @ g.T, np.eye(3))
    assert np.linalg.det(g) == pytest.approx(1.0)
    a = g @ alpha
    assert abs(a[1]) < 1e-12 and a[0] >= 0 and a[2] >= 0
    assert abs(g[2, 2]) == pytest.approx(1.0)


def test_sign_partner_flips_exactly_three_parameters():
    h = CanonicalHamiltonian([1, 2, 3], [4, 5, 6], [7, 8, 9])
    p = sign_partner(h)
    assert np.array_equal(p.alpha, [1, 2, 3])
    assert np.array_equal(p.beta, [4, -5, -6])
    assert np.array_equal(p.gamma, [-7, 8, 9])
    assert np.array_equal(sign_partner(p).parameters(), h.parameters())


def test_dict_round_trip(rng):
    g = random_general(rng)
    c = random_canonical(rng)
    g2, c2 = from_dict(to_dict(g)), from_dict(to_dict(c))
    assert isinstance(g2, GeneralHamiltonian) and isinstance(c2, CanonicalHamiltonian)
    assert np.array_equal(g2.parameters(), g.parameters())
    assert np.array_equal(c2.parameters(), c.parameters())
    with pytest.raises(ValueError):
        from_dict({"alpha": [0] * 3, "beta": [0] * 3, "gamma": [0] * 4})
    with pytest.raises(ValueError):
        from_dict({"alpha": [0] * 3, "gamma": [0] * 3})
