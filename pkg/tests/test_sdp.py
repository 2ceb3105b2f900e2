import io

import numpy as np
import pytest
from numpy.testing import assert_allclose

from cbnorm import channels as ch
from cbnorm import linalg as la
from cbnorm import programs as pr
from cbnorm import sdp
from conftest import random_hermitian

TOL = 1e-8


def trivial_problem():
    """max Tr X  s.t.  Tr X = 1,  X >= 0 on C^2."""
    return sdp.SdpProblem((2,), (np.eye(2),), (np.eye(2)[None],), [1.0], name="trivial")


def test_realify_diagonal():
    r = sdp.realify(np.diag([1.0, 2.0]))
    assert_allclose(np.sort(np.linalg.eigvalsh(r)), [1, 1, 2, 2])
    assert_allclose(r, np.diag([1, 2, 1, 2]))


def test_realify_pauli_y_like():
    h = np.array([[0, 1j], [-1j, 0]])
    r = sdp.realify(h)
    assert np.isrealobj(r) and r.shape == (4, 4)
    assert_allclose(r, r.T)
    assert_allclose(np.linalg.eigvalsh(r), [-1, -1, 1, 1], atol=1e-14)


def test_realify_spectrum_inner_product_and_inverse(rng):
    a, b = random_hermitian(rng, 4), random_hermitian(rng, 4)
    w = np.linalg.eigvalsh(a)
    assert_allclose(np.linalg.eigvalsh(sdp.realify(a)), np.sort(np.repeat(w, 2)), atol=1e-12)
    assert np.sum(sdp.realify(a) * sdp.realify(b)) == pytest.approx(2 * la.inner(a, b).real)
    assert_allclose(sdp.unrealify(sdp.realify(a)), a, atol=1e-15)
    p = la.random_psd(3, rng, rank=2)
    assert (la.min_eig(p) >= -1e-12) == (np.linalg.eigvalsh(sdp.realify(p))[0] >= -1e-12)
    assert np.linalg.eigvalsh(sdp.realify(a))[0] < 0 and la.min_eig(a) < 0


def test_trivial_program():
    p = trivial_problem()
    s = sdp.solve(p)
    assert s.status == "optimal"
    assert s.alpha == pytest.approx(1, abs=TOL)
    assert s.beta == pytest.approx(1, abs=10 * TOL)
    c = sdp.check(p, s)
    assert c.duality_gap <= 10 * TOL
    assert c.weak_duality_ok


def test_solution_postconditions(rng):
    p = pr.build_choi_sdp(ch.random_choi(2, 2, rng))
    s = sdp.solve(p, tol=TOL)
    assert s.optimal
    assert abs(s.alpha - s.beta) <= TOL * (1 + abs(s.alpha) + abs(s.beta))
    assert np.linalg.norm(p.apply(s.X) - p.b) <= TOL
    assert min(la.min_eig(x) for x in s.X) >= -TOL
    assert min(la.min_eig(z) for z in s.S) >= -TOL
    assert s.alpha <= s.beta + TOL


def test_fidelity_program_maximally_mixed():
    s = sdp.solve(pr.build_fidelity_sdp(np.eye(2) / 2, np.eye(2) / 2))
    assert s.optimal
    assert s.alpha == pytest.approx(1, abs=TOL)


def test_fidelity_program_diagonal(rng):
    p = rng.uniform(0.1, 1, 4)
    q = rng.uniform(0.1, 1, 4)
    s = sdp.solve(pr.build_fidelity_sdp(np.diag(p), np.diag(q)))
    assert s.alpha == pytest.approx(np.sum(np.sqrt(p * q)), abs=1e-7)


def test_check_infeasible_point():
    p = trivial_problem()
    s = sdp.SdpSolution(
        X=[np.eye(2)], y=np.array([1.0]), S=[np.zeros((2, 2))], alpha=2, beta=1, gap=1,
        status="optimal", iterations=0,
    )
    c = sdp.check(p, s)
    assert c.primal_residual == pytest.approx(1)
    assert not c.weak_duality_ok


def test_check_residual_linear_in_perturbation():
    p = trivial_problem()
    s = sdp.solve(p)
    base = sdp.check(p, s).primal_residual
    residuals = []
    for delta in (1e-3, 2e-3, 4e-3):
        pert = sdp.SdpSolution(
            X=[s.X[0] + delta * np.eye(2)], y=s.y, S=s.S, alpha=s.alpha, beta=s.beta, gap=s.gap,
            status=s.status, iterations=s.iterations,
        )
        residuals.append(sdp.check(p, pert).primal_residual)
    # Tr(delta * 1) = 2 delta
    assert_allclose(residuals, [2e-3, 4e-3, 8e-3], atol=base + 1e-12)


def test_check_recomputes_independently(rng):
    p = pr.build_fidelity_sdp(la.random_density(3, rng), la.random_density(3, rng))
    s = sdp.solve(p)
    forged = sdp.SdpSolution(s.X, s.y, S=[np.eye(6)], alpha=0.0, beta=0.0, gap=0.0,
                             status="optimal", iterations=0)
    c = sdp.check(p, forged)
    assert c.duality_gap == pytest.approx(abs(s.beta - s.alpha), abs=1e-12)
    assert c.dual_min_eig == pytest.approx(min(la.min_eig(z) for z in s.S), abs=1e-12)


def test_weak_duality_along_iterates(rng):
    problems = [
        pr.build_fidelity_sdp(la.random_density(3, rng), la.random_density(3, rng)),
        pr.build_choi_sdp(ch.random_choi(2, 2, rng)),
        pr.build_maxfid_sdp(ch.random_stinespring(2, 2, 2, rng)),
    ]
    for p in problems:
        s = sdp.solve(p, tol=TOL)
        for h in s.history:
            assert h["alpha"] <= h["beta"] + abs(h["infeas"]) + 10 * TOL
            if h["pres"] <= TOL and h["dres"] <= TOL:
                assert h["alpha"] <= h["beta"] + 10 * TOL
        assert s.alpha <= s.beta + 10 * TOL


def test_solver_is_deterministic(rng):
    p = pr.build_maxfid_sdp(ch.random_stinespring(2, 2, 3, rng))
    a, b = sdp.solve(p), sdp.solve(p)
    assert a.history == b.history
    assert np.array_equal(a.y, b.y)


def test_trace_sink_receives_lines():
    lines = []
    s = sdp.solve(trivial_problem(), trace=lines.append)
    assert len(lines) == s.iterations + 2
    buf = io.StringIO()
    sdp.solve(trivial_problem(), trace=buf)
    assert buf.getvalue().count("\n") == len(lines)
    assert lines[0].split()[:3] == ["iter", "alpha", "beta"]


def test_max_iterations_status():
    s = sdp.solve(pr.build_choi_sdp(ch.transpose_map(2)), max_iter=2)
    assert s.status == "max-iterations"
    assert s.iterations == 2


def test_tolerance_validation():
    with pytest.raises(ValueError):
        sdp.solve(trivial_problem(), tol=0.5)


def test_presolve_drops_duplicates():
    A = np.stack([np.eye(2), 2 * np.eye(2), np.diag([1.0, 0.0])])
    p = sdp.SdpProblem((2,), (np.eye(2),), (A,), [1.0, 2.0, 0.25])
    reduced, keep = sdp.presolve(p)
    assert reduced.num_constraints == 2 and keep.size == 2
    s = sdp.solve(p)
    assert s.optimal and s.y.size == 3
    assert s.alpha == pytest.approx(1, abs=TOL)


def test_presolve_inconsistent():
    A = np.stack([np.eye(2), 2 * np.eye(2)])
    p = sdp.SdpProblem((2,), (np.eye(2),), (A,), [1.0, 3.0])
    with pytest.raises(sdp.InfeasibleConstraintsError):
        sdp.presolve(p)


def test_problem_validation():
    with pytest.raises(la.ShapeError):
        sdp.SdpProblem((2,), (np.eye(3),), (np.eye(2)[None],), [1.0])
    with pytest.raises(ValueError):
        sdp.SdpProblem((2,), (np.eye(2),), (np.array([[[0, 1], [0, 0]]]),), [1.0])
    p = trivial_problem()
    (mats, rhs), = p.constraints
    assert rhs == 1.0 and mats[0].shape == (2, 2)


def test_probe_fidelity_positive_definite():
    rep = sdp.strict_feasibility_probe(pr.build_fidelity_sdp(np.diag([1.0, 2.0]), np.diag([1.0, 0.5])))
    assert rep.primal_margin > 1e-3
    assert rep.dual_margin > 1e-3


def test_probe_fidelity_singular():
    rep = sdp.strict_feasibility_probe(pr.build_fidelity_sdp(np.diag([1.0, 0.0]), np.diag([1.0, 0.5])))
    assert abs(rep.primal_margin) < 1e-6
    assert not rep.strictly_primal_feasible
    assert rep.strictly_dual_feasible


@pytest.mark.parametrize("seed", range(3))
def test_probe_choi_both_sides(seed):
    c = ch.random_choi(2, 2, np.random.default_rng(seed))
    rep = sdp.strict_feasibility_probe(pr.build_choi_sdp(c))
    assert rep.primal_margin > 1e-3 and rep.dual_margin > 1e-3
