"""Semidefinite programs for fidelity and completely bounded norms.

Three program families are compiled to :class:`~cbnorm.sdp.SdpProblem`:

* ``fidelity``: one block ``[[P, X], [X*, Q]]`` with the diagonal blocks
  pinned, maximizing ``Re Tr X``.
* ``maxfid-stinespring``: blocks ``rho0, rho1`` (density operators on the
  input space) and ``[[Z0, X], [X*, Z1]]`` on ``Z (+) Z`` with
  ``Z_b = Psi_b(rho_b)``.
* ``choi``: blocks ``rho0, rho1`` and ``[[Z0, X], [X*, Z1]]`` on
  ``(Y (x) X) (+) (Y (x) X)`` with ``Z_b = 1_Y (x) rho_b``, maximizing
  ``Re <J, X>``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import channels
from .channels import ChannelRep, ChoiMatrix, StinespringPair
from .linalg import (
    NotPSDError,
    PSD_TOL,
    ShapeError,
    as_hermitian,
    hermitian_basis,
    inner,
    min_eig,
    partial_trace,
    pinv_sqrtm_psd,
    spectral_norm,
)
from .sdp import DEFAULT_MAX_ITER, DEFAULT_TOL, Certificate, SdpProblem, SdpSolution, TraceSink, check, solve

Program = Literal["fidelity", "maxfid-stinespring", "choi"]


@dataclass
class NormResult:
    value: float
    certificate: Certificate
    program: Program
    dual_witness: list[np.ndarray]
    solution: SdpSolution
    problem: SdpProblem

    @property
    def status(self) -> str:
        return self.solution.status


def _corner(b: np.ndarray, d: int, where: Literal["top", "bottom"]) -> np.ndarray:
    """Embed a stack of ``d x d`` matrices into a diagonal corner of ``2d x 2d`` matrices."""
    out = np.zeros(b.shape[:-2] + (2 * d, 2 * d), dtype=complex)
    if where == "top":
        out[..., :d, :d] = b
    else:
        out[..., d:, d:] = b
    return out


def _offdiag_identity(d: int, scale=0.5) -> np.ndarray:
    c = np.zeros((2 * d, 2 * d), dtype=complex)
    c[:d, d:] = scale * np.eye(d)
    c[d:, :d] = scale * np.eye(d)
    return c


def _check_psd(p: np.ndarray, name: str) -> np.ndarray:
    p = as_hermitian(p, herm_tol=1e-10)
    lo = min_eig(p)
    if lo < -PSD_TOL:
        raise NotPSDError(lo, PSD_TOL)
    return p


# -- fidelity ----------------------------------------------------------------


def build_fidelity_sdp(P: np.ndarray, Q: np.ndarray) -> SdpProblem:
    """Program whose optimum is ``F(P, Q) = ||sqrt(P) sqrt(Q)||_1``."""
    P = _check_psd(P, "P")
    Q = _check_psd(Q, "Q")
    if P.shape != Q.shape:
        raise ShapeError(f"P and Q must have equal shape, got {P.shape} and {Q.shape}")
    n = P.shape[0]
    basis = hermitian_basis(n)
    A = np.concatenate([_corner(basis, n, "top"), _corner(basis, n, "bottom")])
    b = np.concatenate(
        [np.real(np.einsum("kij,ji->k", basis, P)), np.real(np.einsum("kij,ji->k", basis, Q))]
    )
    return SdpProblem((2 * n,), (_offdiag_identity(n),), (A,), b, name="fidelity")


def _result(problem, program, tol, max_iter, trace) -> NormResult:
    sol = solve(problem, tol=tol, max_iter=max_iter, trace=trace)
    cert = check(problem, sol, tol)
    lo, hi = cert.value_interval
    value = min(max((sol.alpha + sol.beta) / 2, lo), hi)
    return NormResult(
        value=float(max(value, 0.0)),
        certificate=cert,
        program=program,
        dual_witness=sol.S,
        solution=sol,
        problem=problem,
    )


def fidelity_sdp(
    P: np.ndarray,
    Q: np.ndarray,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    trace: TraceSink = None,
) -> NormResult:
    """Fidelity of two PSD matrices computed by semidefinite programming.

    ``dual_witness[0]`` is the dual slack ``[[Y, -1/2], [-1/2, Z]]``; its
    upper-left block is a positive definite operator usable with
    :func:`alberti_check`.
    """
    return _result(build_fidelity_sdp(P, Q), "fidelity", tol, max_iter, trace)


def fidelity_dual_operator(result: NormResult) -> np.ndarray:
    """Upper-left block of the fidelity program's dual slack."""
    s = result.dual_witness[0]
    n = s.shape[0] // 2
    return s[:n, :n]


def alberti_check(P: np.ndarray, Q: np.ndarray, Y: np.ndarray) -> tuple[float, float]:
    """Balance ``Y`` so both terms of ``1/2 <P, lY> + 1/2 <Q, (lY)^-1>`` agree.

    Returns ``(balanced_value, lambda)`` where
    ``balanced_value = sqrt(<P, Y> <Q, Y^-1>)``, an upper bound on ``F(P, Q)``
    for every positive definite ``Y``.
    """
    Y = as_hermitian(Y, herm_tol=1e-8)
    if min_eig(Y) <= 1e-10:
        raise np.linalg.LinAlgError("Y must be positive definite")
    py = inner(P, Y).real
    if py <= 0:
        raise ValueError("<P, Y> must be positive")
    qyi = inner(Q, np.linalg.inv(Y)).real
    lam = float(np.sqrt(qyi / py))
    balanced = 0.5 * lam * py + 0.5 * qyi / lam
    return float(balanced), lam


# -- maximum output fidelity ---------------------------------------------------


def _cp_adjoint_stack(psi: StinespringPair, basis: np.ndarray) -> np.ndarray:
    """``Psi*(B) = A* (B (x) 1) A`` for each basis element (``Psi`` has output first)."""
    k, env, n = psi.m, psi.k, psi.n
    a = psi.A0.reshape(k, env, n)
    return np.einsum("aei,tab,bej->tij", a.conj(), basis, a)


def _coupled_block_program(
    in_dim: int,
    out_dim: int,
    pullbacks: tuple[np.ndarray, np.ndarray],
    objective: np.ndarray,
    name: str,
) -> SdpProblem:
    """Blocks ``rho0, rho1`` (dim ``in_dim``) and ``W`` (dim ``2*out_dim``).

    Constraints: ``Tr rho_b = 1`` and ``<B, W_bb> - <pullback_b(B), rho_b> = 0``
    for every Hermitian basis element ``B`` of the output space.
    """
    n, d = in_dim, out_dim
    basis = hermitian_basis(d)
    nb = basis.shape[0]
    m = 2 + 2 * nb
    A_r0 = np.zeros((m, n, n), dtype=complex)
    A_r1 = np.zeros((m, n, n), dtype=complex)
    A_w = np.zeros((m, 2 * d, 2 * d), dtype=complex)
    A_r0[0] = np.eye(n)
    A_r1[1] = np.eye(n)
    A_w[2 : 2 + nb] = _corner(basis, d, "top")
    A_r0[2 : 2 + nb] = -pullbacks[0]
    A_w[2 + nb :] = _corner(basis, d, "bottom")
    A_r1[2 + nb :] = -pullbacks[1]
    b = np.zeros(m)
    b[:2] = 1.0
    zero = np.zeros((n, n))
    return SdpProblem((n, n, 2 * d), (zero, zero, objective), (A_r0, A_r1, A_w), b, name=name)


def build_maxfid_sdp(s: StinespringPair) -> SdpProblem:
    """Maximum output fidelity program for ``Psi_0, Psi_1`` derived from ``s``."""
    psi0, psi1 = channels.reduced_maps(s)
    basis = hermitian_basis(s.k)
    pull = (_cp_adjoint_stack(psi0, basis), _cp_adjoint_stack(psi1, basis))
    return _coupled_block_program(s.n, s.k, pull, _offdiag_identity(s.k), "maxfid-stinespring")


def max_output_fidelity(
    s: StinespringPair,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    trace: TraceSink = None,
) -> NormResult:
    return _result(build_maxfid_sdp(s), "maxfid-stinespring", tol, max_iter, trace)


# -- Choi program --------------------------------------------------------------


def build_choi_sdp(c: ChoiMatrix) -> SdpProblem:
    """Completely bounded trace norm program over the Choi matrix ``J``."""
    n, m = c.n, c.m
    d = n * m
    basis = hermitian_basis(d)
    # <B, 1_Y (x) rho> = <Tr_Y B, rho>
    pull = np.einsum("tyayb->tab", basis.reshape(-1, m, n, m, n))
    objective = np.zeros((2 * d, 2 * d), dtype=complex)
    objective[:d, d:] = 0.5 * c.J
    objective[d:, :d] = 0.5 * c.J.conj().T
    return _coupled_block_program(n, d, (pull, pull), objective, "choi")


def diamond_norm(
    rep: ChannelRep,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    trace: TraceSink = None,
) -> NormResult:
    """Completely bounded trace norm ``|||Phi|||_1``.

    Choi input uses the Choi program; Stinespring input uses the maximum
    output fidelity program.  No representation conversion takes place.
    """
    if isinstance(rep, ChoiMatrix):
        return _result(build_choi_sdp(rep), "choi", tol, max_iter, trace)
    return max_output_fidelity(rep, tol, max_iter, trace)


def cb_spectral_norm(
    rep: ChannelRep,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    trace: TraceSink = None,
) -> NormResult:
    """``|||Phi|||_inf``, computed as the completely bounded trace norm of ``Phi*``."""
    return diamond_norm(channels.adjoint(rep), tol, max_iter, trace)


def offdiagonal_block(result: NormResult) -> np.ndarray:
    """The operator ``X`` in the coupled block ``[[Z0, X], [X*, Z1]]`` of an optimum."""
    w = result.solution.X[-1]
    d = w.shape[0] // 2
    return w[:d, d:]


def contraction_norm(z0: np.ndarray, x: np.ndarray, z1: np.ndarray) -> float:
    """``sigma_max(sqrt(Z0)^+ X sqrt(Z1)^+)``; at most 1 when ``[[Z0, X], [X*, Z1]] >= 0``."""
    return spectral_norm(pinv_sqrtm_psd(z0) @ x @ pinv_sqrtm_psd(z1))


def block_contraction(result: NormResult) -> float:
    """Contraction norm of the optimal coupled block, relative to its own diagonal blocks."""
    w = result.solution.X[-1]
    d = w.shape[0] // 2
    return contraction_norm(w[:d, :d], w[:d, d:], w[d:, d:])


# -- explicit feasible points --------------------------------------------------


@dataclass(frozen=True)
class FeasiblePoints:
    """Explicit primal point (per-block list) and dual point (``y`` and slack)."""

    primal: list[np.ndarray]
    y: np.ndarray | None
    slack: list[np.ndarray] | None
    dual_parts: dict


def _cp_adjoint_identity(psi: StinespringPair) -> np.ndarray:
    return psi.A0.conj().T @ psi.A0


def strict_feasible_points(program: Program, data) -> FeasiblePoints:
    """Explicit feasible points for each program family.

    * ``fidelity`` with ``data=(P, Q)``: primal ``diag(P, Q)``; dual ``Y = Z = 1``
      (slack ``[[1, -1/2], [-1/2, 1]] >= 1/2``).
    * ``maxfid-stinespring`` with a :class:`StinespringPair`: primal
      ``rho_b = 1/n``, ``Z_b = Psi_b(rho_b)``; dual ``lambda_b = 1/2 + ||Psi_b*(1)||``
      and ``Y_b = 1`` (slack ``>= 1/2``).
    * ``choi`` with a :class:`ChoiMatrix`: primal ``rho_b = 1/n``,
      ``Z_b = 1/n``; dual ``Y_b = (||J||/2 + 1) 1`` and
      ``lambda = 1 + (||J||/2 + 1) m`` (slack ``>= 1``).
    """
    if program == "fidelity":
        P, Q = (as_hermitian(a, herm_tol=1e-10) for a in data)
        n = P.shape[0]
        primal = [np.block([[P, np.zeros_like(P)], [np.zeros_like(Q), Q]])]
        problem = build_fidelity_sdp(P, Q)
        basis = hermitian_basis(n)
        y = np.concatenate([np.real(np.einsum("kii->k", basis))] * 2)
        return FeasiblePoints(primal, y, problem.slack(y), {"Y": np.eye(n), "Z": np.eye(n)})
    if program == "maxfid-stinespring":
        s: StinespringPair = data
        psi0, psi1 = channels.reduced_maps(s)
        rho = np.eye(s.n) / s.n
        z0 = channels.apply(psi0, rho)
        z1 = channels.apply(psi1, rho)
        k = s.k
        primal = [rho, rho.copy(), np.block([[z0, np.zeros((k, k))], [np.zeros((k, k)), z1]])]
        lam0 = 0.5 + spectral_norm(_cp_adjoint_identity(psi0))
        lam1 = 0.5 + spectral_norm(_cp_adjoint_identity(psi1))
        y = _coupled_dual_vector(k, lam0, lam1, np.eye(k), np.eye(k))
        problem = build_maxfid_sdp(s)
        return FeasiblePoints(
            primal, y, problem.slack(y),
            {"lambda0": lam0, "lambda1": lam1, "Y0": np.eye(k), "Y1": np.eye(k)},
        )
    if program == "choi":
        c: ChoiMatrix = data
        n, m = c.n, c.m
        d = n * m
        rho = np.eye(n) / n
        z = np.eye(d) / n
        primal = [rho, rho.copy(), np.block([[z, np.zeros((d, d))], [np.zeros((d, d)), z]])]
        scale = spectral_norm(c.J) / 2 + 1
        lam = 1 + scale * m
        Y = scale * np.eye(d)
        y = _coupled_dual_vector(d, lam, lam, Y, Y)
        problem = build_choi_sdp(c)
        return FeasiblePoints(primal, y, problem.slack(y), {"lambda": lam, "Y0": Y, "Y1": Y})
    raise ValueError(f"unknown program {program!r}")


def _coupled_dual_vector(d: int, lam0: float, lam1: float, Y0: np.ndarray, Y1: np.ndarray) -> np.ndarray:
    """Multipliers for :func:`_coupled_block_program` from ``(lambda_b, Y_b)``."""
    basis = hermitian_basis(d)
    c0 = np.real(np.einsum("kij,ji->k", basis, Y0))
    c1 = np.real(np.einsum("kij,ji->k", basis, Y1))
    return np.concatenate([[lam0, lam1], c0, c1])


def dual_parts(result: NormResult) -> tuple[float, float, np.ndarray, np.ndarray]:
    """``(lambda0, lambda1, Y0, Y1)`` from the dual vector of a maxfid or Choi solve."""
    if result.program == "fidelity":
        raise ValueError("dual_parts applies to the coupled-block programs only")
    d = result.problem.blocks[2] // 2
    basis = hermitian_basis(d)
    y = np.asarray(result.solution.y)
    Y0 = np.einsum("k,kij->ij", y[2 : 2 + d * d], basis)
    Y1 = np.einsum("k,kij->ij", y[2 + d * d :], basis)
    return float(y[0]), float(y[1]), Y0, Y1


def cp_adjoint_identity_norm(psi: StinespringPair) -> float:
    """``||Psi*(1)||_inf`` for a completely positive map given with ``A0 = A1``."""
    return spectral_norm(_cp_adjoint_identity(psi))


def reduced_trace(c: ChoiMatrix) -> np.ndarray:
    """``Tr_Y J``, the operator on the input space."""
    return partial_trace(c.J, (c.m, c.n), keep="second")
