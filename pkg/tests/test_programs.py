import numpy as np
import pytest
from numpy.testing import assert_allclose

from cbnorm import channels as ch
from cbnorm import linalg as la
from cbnorm import oracles
from cbnorm import programs as pr

TOL = 1e-8


def assert_certified(result):
    assert result.status == "optimal"
    lo, hi = result.certificate.value_interval
    assert lo - 1e-15 <= result.value <= hi + 1e-15
    assert hi - lo <= TOL * (1 + 2 * abs(result.value))
    assert result.certificate.weak_duality_ok


# -- fidelity ------------------------------------------------------------------


def test_fidelity_scalar():
    r = pr.fidelity_sdp(np.eye(1), np.eye(1))
    assert_certified(r)
    assert r.value == pytest.approx(1, abs=1e-7)


def test_fidelity_identity_pair():
    r = pr.fidelity_sdp(np.eye(2), np.eye(2))
    assert r.value == pytest.approx(2, abs=1e-7)


def test_fidelity_commuting_example():
    r = pr.fidelity_sdp(np.diag([0.5, 0.5]), np.diag([0.25, 0.75]))
    assert r.value == pytest.approx(oracles.commuting_fidelity_oracle([0.5, 0.5], [0.25, 0.75]), abs=1e-6)
    assert r.value == pytest.approx(0.9659258, abs=1e-6)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_fidelity_matches_direct(rng, n):
    P, Q = la.random_density(n, rng), la.random_density(n, rng)
    r = pr.fidelity_sdp(P, Q)
    assert_certified(r)
    assert r.value == pytest.approx(la.fidelity_direct(P, Q), abs=1e-6)


def test_fidelity_rank_deficient(rng):
    # no strictly feasible primal point: the dual optimum need not be attained,
    # so only the dual bound is exact and the value is loose
    P, Q = la.random_density(3, rng, rank=1), la.random_density(3, rng, rank=2)
    r = pr.fidelity_sdp(P, Q)
    F = la.fidelity_direct(P, Q)
    assert r.certificate.dual_min_eig >= -1e-9
    assert r.solution.beta >= F - 1e-9
    assert r.value == pytest.approx(F, abs=1e-3)
    assert r.certificate.primal_residual <= 1e-5


def test_fidelity_rejects_non_psd():
    with pytest.raises(la.NotPSDError):
        pr.build_fidelity_sdp(np.diag([1.0, -0.1]), np.eye(2))
    with pytest.raises(la.ShapeError):
        pr.build_fidelity_sdp(np.eye(2), np.eye(3))


def test_fidelity_program_structure():
    P, Q = np.diag([1.0, 2.0]), np.diag([3.0, 4.0])
    p = pr.build_fidelity_sdp(P, Q)
    assert p.blocks == (4,)
    assert p.num_constraints == 8
    X = np.block([[P, np.eye(2)], [np.eye(2), Q]])
    assert_allclose(p.apply([X]), p.b, atol=1e-14)
    # objective extracts Re Tr of the off-diagonal block
    assert p.objective([X]) == pytest.approx(2.0)


def test_contraction_structure_of_fidelity_optimum(rng):
    P, Q = la.random_density(3, rng), la.random_density(3, rng, rank=2)
    r = pr.fidelity_sdp(P, Q)
    x = pr.offdiagonal_block(r)
    assert pr.contraction_norm(P, x, Q) <= 1 + 10 * TOL


# -- balanced dual bound -----------------------------------------------------------


def test_alberti_identity():
    value, lam = pr.alberti_check(np.eye(2) / 2, np.eye(2) / 2, np.eye(2))
    assert lam == pytest.approx(1)
    assert value == pytest.approx(1)


def test_alberti_scaling_absorbed():
    value, lam = pr.alberti_check(np.eye(2) / 2, np.eye(2) / 2, 2 * np.eye(2))
    assert lam == pytest.approx(0.5)
    assert value == pytest.approx(1)


def test_alberti_upper_bound_and_dual_witness(rng):
    P, Q = la.random_density(3, rng), la.random_density(3, rng)
    F = la.fidelity_direct(P, Q)
    for _ in range(20):
        Y = la.random_psd(3, rng) + 1e-3 * np.eye(3)
        value, lam = pr.alberti_check(P, Q, Y)
        assert value >= F - 1e-9
        py, qy = la.inner(P, Y).real, la.inner(Q, np.linalg.inv(Y)).real
        assert value == pytest.approx(np.sqrt(py * qy))
        assert lam * py == pytest.approx(qy / lam)
    r = pr.fidelity_sdp(P, Q)
    value, _ = pr.alberti_check(P, Q, pr.fidelity_dual_operator(r))
    assert F - 1e-9 <= value <= F + 1e-5


def test_alberti_rejects_singular():
    with pytest.raises(np.linalg.LinAlgError):
        pr.alberti_check(np.eye(2), np.eye(2), np.diag([1.0, 0.0]))


# -- maximum output fidelity -------------------------------------------------------


def test_maxfid_identity_channel():
    s = ch.StinespringPair(np.eye(2), np.eye(2), 2, 2, 1)
    r = pr.max_output_fidelity(s)
    assert_certified(r)
    assert r.value == pytest.approx(oracles.cp_diamond_oracle(ch.identity_map(2)), abs=1e-7)
    assert r.value == pytest.approx(1, abs=1e-7)


def test_maxfid_zero_map():
    s = ch.StinespringPair(np.eye(2), np.zeros((2, 2)), 2, 2, 1)
    r = pr.max_output_fidelity(s)
    assert r.status == "optimal"
    assert r.value == pytest.approx(0, abs=1e-6)


def test_maxfid_program_structure(rng):
    s = ch.random_stinespring(3, 2, 2, rng)
    p = pr.build_maxfid_sdp(s)
    assert p.blocks == (3, 3, 4)
    pts = pr.strict_feasible_points("maxfid-stinespring", s)
    assert_allclose(p.apply(pts.primal), p.b, atol=1e-12)


@pytest.mark.parametrize("k", [2, 3])
def test_maxfid_agrees_with_choi_program(rng, k):
    s = ch.random_stinespring(2, 2, k, rng)
    a = pr.max_output_fidelity(s)
    b = pr.diamond_norm(ch.choi_from_stinespring(s))
    assert_certified(a)
    assert_certified(b)
    assert abs(a.value - b.value) <= 2 * TOL * (1 + a.value)


def test_equal_pairs_give_adjoint_identity_norm(rng):
    a = rng.standard_normal((6, 2)) + 1j * rng.standard_normal((6, 2))
    s = ch.StinespringPair(a, a, 2, 3, 2)
    psi0, _ = ch.reduced_maps(s)
    expected = pr.cp_adjoint_identity_norm(psi0)
    assert expected == pytest.approx(la.spectral_norm(a.conj().T @ a))
    assert pr.diamond_norm(s).value == pytest.approx(expected, rel=1e-7)


def test_contraction_structure_of_maxfid_optimum(rng):
    r = pr.max_output_fidelity(ch.random_stinespring(2, 2, 3, rng))
    assert pr.block_contraction(r) <= 1 + 10 * TOL


# -- Choi program -----------------------------------------------------------


def test_choi_zero_map():
    r = pr.diamond_norm(ch.ChoiMatrix(np.zeros((4, 4)), 2, 2))
    assert r.status == "optimal"
    assert r.value == pytest.approx(0, abs=1e-7)


def test_choi_identity_channel():
    r = pr.diamond_norm(ch.identity_map(2))
    assert_certified(r)
    assert r.value == pytest.approx(oracles.cp_diamond_oracle(ch.identity_map(2)), abs=1e-7)


def test_choi_transpose_two():
    r = pr.diamond_norm(ch.transpose_map(2))
    lower, _ = oracles.rank_one_ascent(ch.transpose_map(2))
    assert lower <= r.certificate.value_interval[1] + TOL
    assert r.value == pytest.approx(2, abs=1e-6)


def test_choi_program_objective(rng):
    c = ch.random_choi(2, 2, rng)
    p = pr.build_choi_sdp(c)
    X = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    W = np.block([[np.eye(4), X], [X.conj().T, np.eye(4)]])
    blocks = [np.eye(2), np.eye(2), W]
    assert p.objective(blocks) == pytest.approx(la.inner(c.J, X).real)


def test_diamond_random_channels(rng):
    for n, m, k in [(2, 2, 3), (3, 2, 2)]:
        s = ch.random_channel(n, m, k, rng)
        c = ch.choi_from_stinespring(s)
        assert abs(pr.diamond_norm(c).value - 1) <= 1e-6
        assert abs(pr.diamond_norm(s).value - 1) <= 1e-6


def test_diamond_transpose_three():
    assert pr.diamond_norm(ch.transpose_map(3)).value == pytest.approx(3, abs=1e-5)


def test_diamond_homogeneity(rng):
    c = ch.random_choi(2, 2, rng)
    one = pr.diamond_norm(c).value
    two = pr.diamond_norm(ch.ChoiMatrix(2 * c.J, 2, 2)).value
    assert abs(two - 2 * one) <= 2e-6 * (1 + one)


def test_contraction_structure_of_choi_optimum(rng):
    r = pr.diamond_norm(ch.random_choi(2, 2, rng))
    assert pr.block_contraction(r) <= 1 + 10 * TOL


def test_diamond_does_not_convert(monkeypatch, rng):
    def boom(*_):
        raise AssertionError("representation conversion")

    monkeypatch.setattr(ch, "choi_from_stinespring", boom)
    monkeypatch.setattr(ch, "stinespring_from_choi", boom)
    pr.diamond_norm(ch.random_choi(2, 2, rng))
    pr.diamond_norm(ch.random_stinespring(2, 2, 2, rng))


# -- CB spectral norm -----------------------------------------------------------


def test_cb_spectral_identity():
    assert pr.cb_spectral_norm(ch.identity_map(2)).value == pytest.approx(1, abs=1e-7)


def test_cb_spectral_same_path(rng):
    c = ch.random_choi(2, 3, rng)
    assert pr.cb_spectral_norm(c).value == pr.diamond_norm(ch.adjoint(c)).value


def test_cb_spectral_roundtrip(rng):
    c = ch.random_choi(2, 2, rng)
    assert abs(pr.cb_spectral_norm(ch.adjoint(c)).value - pr.diamond_norm(c).value) <= 2e-6


# -- explicit feasible points ---------------------------------------------------


def test_choi_dual_point_formula():
    J = np.diag([2.0, 1.0, 0.0, -1.0])
    c = ch.ChoiMatrix(J, 2, 2)
    pts = pr.strict_feasible_points("choi", c)
    assert pts.dual_parts["lambda"] == pytest.approx(1 + 2 * 2)
    p = pr.build_choi_sdp(c)
    assert min(la.min_eig(z) for z in pts.slack) >= 1 - 1e-12
    assert_allclose(p.apply(pts.primal), p.b, atol=1e-12)
    assert min(la.min_eig(x) for x in pts.primal) > 0


def test_maxfid_points(rng):
    s = ch.random_stinespring(2, 3, 2, rng)
    pts = pr.strict_feasible_points("maxfid-stinespring", s)
    p = pr.build_maxfid_sdp(s)
    assert_allclose(p.apply(pts.primal), p.b, atol=1e-12)
    assert min(la.min_eig(x) for x in pts.primal) >= -1e-12
    assert min(la.min_eig(z) for z in pts.slack) >= 0.5 - 1e-12


def test_fidelity_points(rng):
    P, Q = la.random_psd(3, rng, rank=2), la.random_psd(3, rng)
    pts = pr.strict_feasible_points("fidelity", (P, Q))
    p = pr.build_fidelity_sdp(P, Q)
    assert_allclose(p.apply(pts.primal), p.b, atol=1e-12)
    assert la.min_eig(pts.slack[0]) == pytest.approx(0.5)


def test_dual_points_bound_the_optimum(rng):
    c = ch.random_choi(2, 2, rng)
    pts = pr.strict_feasible_points("choi", c)
    r = pr.diamond_norm(c)
    assert r.value <= float(r.problem.b @ pts.y) + TOL
