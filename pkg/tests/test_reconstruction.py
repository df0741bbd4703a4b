import json

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from twoqubit.dynamics import TaylorTable, map_snapshot, taylor_maps
from twoqubit.errors import InsufficientOrderError, MalformedDataError, ReconstructionFailed
from twoqubit.hamiltonian import (
    CanonicalHamiltonian,
    GeneralHamiltonian,
    canonicalize,
    random_canonical,
    random_general,
    sign_partner,
)
from twoqubit.reconstruction import (
    SCHEMA,
    CaseClass,
    classify,
    extract_alpha,
    extract_gram,
    reconstruct,
)

seeds = st.integers(0, 2**32 - 1)


def random_rotation(rng):
    return scipy.linalg.expm(np.cross(np.eye(3), rng.normal(size=3)))


def disguise(h: CanonicalHamiltonian, rng) -> GeneralHamiltonian:
    """Same physics in randomly rotated local frames."""
    r, s = random_rotation(rng), random_rotation(rng)
    return GeneralHamiltonian(r @ h.alpha, s @ h.beta, r @ np.diag(h.gamma) @ s.T)


def matches(a: CanonicalHamiltonian, b: CanonicalHamiltonian, tol: float) -> bool:
    return float(np.max(np.abs(a.parameters() - b.parameters()))) <= tol


AXIS_FLIPS = [np.diag(d) for d in ([1, 1, 1], [-1, -1, 1], [-1, 1, -1], [1, -1, -1])]


def matches_up_to_axis_flips(a: CanonicalHamiltonian, b: CanonicalHamiltonian, tol: float) -> bool:
    """Negating the same two axes of both qubit frames keeps gamma diagonal and signed alike."""
    return any(
        matches(CanonicalHamiltonian(d @ a.alpha, d @ a.beta, a.gamma), b, tol) for d in AXIS_FLIPS
    )


def assert_regenerates(report, h, times=np.linspace(0, 2, 9), tol=1e-9):
    r = report.frame_r
    for t in times:
        target = r @ map_snapshot(h, t).u @ r.T
        for cand in report.candidates:
            assert np.max(np.abs(map_snapshot(cand, t).u - target)) <= tol


@given(seeds)
def test_case_one_round_trip(seed):
    rng = np.random.default_rng(seed)
    h = random_general(rng)
    report = reconstruct(taylor_maps(h, 4))
    assert report.case is CaseClass.CASE_I
    canon, _, _ = canonicalize(h)
    hits = [matches(c, canon, 1e-8) for c in report.candidates]
    assert sum(hits) == 1
    assert matches(report.candidate_minus, sign_partner(report.candidate_plus), 0.0)
    assert report.candidate_plus.gamma[0] >= 0
    assert_regenerates(report, h)


@pytest.mark.parametrize("case,order", [("I", 3), ("I", 6), ("II", 4), ("II", 6), ("III", 6)])
def test_disguised_canonical_inputs(rng, case, order):
    for _ in range(10):
        h = random_canonical(rng, case=case)
        g = disguise(h, rng)
        report = reconstruct(taylor_maps(g, order))
        assert report.case.value == case
        assert sum(matches(c, canonicalize(g)[0], 1e-8) for c in report.candidates) == 1
        assert any(matches_up_to_axis_flips(c, h, 1e-8) for c in report.candidates)
        assert not report.undetermined


def test_case_two_sign_of_beta_product(rng):
    h = random_canonical(rng, case="II")
    h = CanonicalHamiltonian(h.alpha, [h.beta[0], -0.8, 1.2], h.gamma)
    report = reconstruct(taylor_maps(h, 4))
    assert matches(report.candidate_plus, h, 1e-8)
    report = reconstruct(taylor_maps(sign_partner(h), 4))
    assert matches(report.candidate_minus, sign_partner(h), 1e-8)


@pytest.mark.parametrize("beta3", [-5.0, 0.0, 5.0])
def test_exception_flags_beta3(beta3):
    h = CanonicalHamiltonian([0.3, 0.0, 0.4], [0.0, 0.0, beta3], [0.0, 0.0, 1.2])
    report = reconstruct(taylor_maps(h, 6))
    assert report.case is CaseClass.EXCEPTION
    assert "beta3" in report.undetermined
    assert np.allclose(report.candidate_plus.alpha, h.alpha)
    assert np.allclose(report.candidate_plus.gamma, h.gamma)


def test_exception_needs_only_fourth_order():
    h = CanonicalHamiltonian([0.3, 0.0, 0.4], [0.0, 0.0, 2.0], [0.0, 0.0, 1.2])
    assert reconstruct(taylor_maps(h, 4)).case is CaseClass.EXCEPTION


def test_case_three_needs_sixth_order(rng):
    h = random_canonical(rng, case="III")
    for order in (4, 5):
        with pytest.raises(InsufficientOrderError) as info:
            reconstruct(taylor_maps(h, order))
        assert info.value.required == 6
        assert info.value.available == order


def test_case_two_needs_fourth_order(rng):
    with pytest.raises(InsufficientOrderError):
        reconstruct(taylor_maps(random_canonical(rng, case="II"), 3))


def test_no_interaction():
    h = GeneralHamiltonian([0.2, -0.4, 0.9], [1.0, 2.0, 3.0], np.zeros((3, 3)))
    report = reconstruct(taylor_maps(h, 2))
    assert report.case is CaseClass.NO_INTERACTION
    assert set(report.undetermined) == {"beta1", "beta2", "beta3"}
    alpha = report.candidate_plus.alpha
    assert np.linalg.norm(alpha) == pytest.approx(np.linalg.norm(h.alpha))
    assert np.allclose(report.frame_r @ h.alpha, alpha)


def test_alpha_and_gram_from_low_orders(rng):
    h = random_general(rng)
    tab = taylor_maps(h, 2)
    alpha = extract_alpha(tab)
    assert np.allclose(alpha, h.alpha)
    assert np.allclose(extract_gram(tab, alpha), h.gamma @ h.gamma.T)


def test_malformed_first_order():
    tab = taylor_maps(random_general(np.random.default_rng(1)), 4)
    tab.u[1, 0, 0] += 1e-3
    with pytest.raises(MalformedDataError):
        reconstruct(tab)


def test_inconsistent_fourth_order_is_rejected(rng):
    tab = taylor_maps(random_general(rng), 4)
    tab.u[4] += 1e-3 * np.eye(3)
    with pytest.raises(MalformedDataError):
        reconstruct(tab)


def test_verification_failure_carries_diagnostics(rng):
    # case I extraction never looks at fifth order, so only verification sees it
    tab = taylor_maps(random_general(rng), 5)
    tab.u[5] += 1e-3 * np.eye(3)
    with pytest.raises(ReconstructionFailed) as info:
        reconstruct(tab)
    assert info.value.diagnostics


def test_insufficient_order_for_alpha():
    tab = taylor_maps(CanonicalHamiltonian(gamma=[0.1, 0.2, 0.3]), 1)
    with pytest.raises(InsufficientOrderError):
        reconstruct(tab)


def test_classify():
    assert classify([1.0, 2.0, 3.0], 1e-6) is CaseClass.CASE_I
    assert classify([0.0, 2.0, 3.0], 1e-6) is CaseClass.CASE_II
    assert classify([0.0, 0.0, 3.0], 1e-6) is CaseClass.CASE_III
    assert classify([0.0, 0.0, 3.0], 1e-6, beta_perp_sq=0.0) is CaseClass.EXCEPTION
    assert classify([0.0, 0.0, 3.0], 1e-6, beta_perp_sq=0.5) is CaseClass.CASE_III
    assert classify([0.0, 0.0, 0.0], 1e-6) is CaseClass.NO_INTERACTION
    with pytest.raises(ValueError):
        classify([3.0, 2.0, 1.0], 1e-6)


def test_threshold_is_relative_to_scale():
    # a coupling that is tiny in absolute terms but large against eps * scale survives
    h = CanonicalHamiltonian(gamma=[1e-4, 0.2, 0.3])
    assert reconstruct(taylor_maps(h, 4)).case is CaseClass.CASE_I
    assert reconstruct(taylor_maps(h, 4), eps=1e-3, tol=1e-3).case is CaseClass.CASE_II


def test_report_serializes(rng):
    report = reconstruct(taylor_maps(random_canonical(rng, case="III"), 6))
    d = json.loads(json.dumps(report.to_dict()))
    assert d["schema"] == SCHEMA
    assert d["case"] == "III"
    assert len(d["candidate_plus"]["gamma"]) == 3
    assert np.allclose(np.array(d["frame_R"]) @ np.array(d["frame_R"]).T, np.eye(3))


def test_table_without_v_w_data_still_reconstructs(rng):
    # only the u-blocks carry information for the Hamiltonian
    h = random_general(rng)
    full = taylor_maps(h, 4)
    bare = TaylorTable(full.u, np.zeros_like(full.v), np.zeros_like(full.w))
    a, b = reconstruct(full), reconstruct(bare)
    assert matches(a.candidate_plus, b.candidate_plus, 0.0)
