"""Interior-ball radius and dual trace bound for the two norm programs.

For each program an explicit dual point ``Y`` is known such that ``Y + H``
stays dual feasible for every Hermitian ``H`` with ``||H||_2 <= epsilon``;
``r_bound`` bounds the trace of the dual solutions worth considering.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from . import channels
from .channels import ChoiMatrix, StinespringPair
from .linalg import min_eig, partial_trace, spectral_norm
from .programs import cp_adjoint_identity_norm

DiagProgram = Literal["maxfid-stinespring", "choi"]


@dataclass(frozen=True)
class SolvabilityReport:
    epsilon: float
    r_bound: float
    program: DiagProgram
    inputs_digest: dict = field(default_factory=dict)
    degenerate: bool = False


def _psi_norms(s: StinespringPair) -> tuple[float, float]:
    psi0, psi1 = channels.reduced_maps(s)
    return cp_adjoint_identity_norm(psi0), cp_adjoint_identity_norm(psi1)


def epsilon_stinespring(s: StinespringPair) -> float:
    a, b = _psi_norms(s)
    return 1.0 / (4.0 * (1.0 + a + b))


def r_stinespring(s: StinespringPair) -> float:
    a, b = _psi_norms(s)
    return a + b + 2.0 * s.k


def epsilon_choi(c: ChoiMatrix) -> float:
    return 1.0 / (2.0 * c.m)


def r_choi(c: ChoiMatrix) -> float:
    return 2.0 * spectral_norm(c.J) * c.n * c.m


def solvability_report(rep: channels.ChannelRep) -> SolvabilityReport:
    if isinstance(rep, ChoiMatrix):
        jn = spectral_norm(rep.J)
        return SolvabilityReport(
            epsilon_choi(rep), r_choi(rep), "choi",
            {"n": rep.n, "m": rep.m, "J_spectral_norm": jn},
            degenerate=jn == 0.0,
        )
    a, b = _psi_norms(rep)
    return SolvabilityReport(
        epsilon_stinespring(rep), r_stinespring(rep), "maxfid-stinespring",
        {"n": rep.n, "m": rep.m, "k": rep.k, "psi0_adj_norm": a, "psi1_adj_norm": b},
        degenerate=bool(np.all(rep.A0 == 0) or np.all(rep.A1 == 0)),
    )


def _random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (g + g.conj().T) / 2


def _dual_slack(program: DiagProgram, data, lam0, lam1, Y0, Y1) -> list[np.ndarray]:
    """``Xi*(lambda0, lambda1, Y0, Y1) - C`` as a list of diagonal blocks."""
    if program == "choi":
        c: ChoiMatrix = data
        dims = (c.m, c.n)
        t0 = partial_trace(Y0, dims, keep="second")
        t1 = partial_trace(Y1, dims, keep="second")
        off = -0.5 * c.J
        n = c.n
    else:
        s: StinespringPair = data
        psi0, psi1 = channels.reduced_maps(s)
        t0 = channels.apply(channels.adjoint(psi0), Y0)
        t1 = channels.apply(channels.adjoint(psi1), Y1)
        off = -0.5 * np.eye(s.k)
        n = s.n
    w = np.block([[Y0, off], [off.conj().T, Y1]])
    return [lam0 * np.eye(n) - t0, lam1 * np.eye(n) - t1, w]


def interior_dual_point(program: DiagProgram, data) -> tuple[float, float, np.ndarray, np.ndarray]:
    """The explicit strictly feasible dual point ``(lambda0, lambda1, Y0, Y1)``."""
    if program == "choi":
        c: ChoiMatrix = data
        scale = spectral_norm(c.J) / 2 + 1
        lam = 1 + scale * c.m
        Y = scale * np.eye(c.n * c.m, dtype=complex)
        return lam, lam, Y, Y.copy()
    s: StinespringPair = data
    a, b = _psi_norms(s)
    eye = np.eye(s.k, dtype=complex)
    return 0.5 + a, 0.5 + b, eye, eye.copy()


def verify_interior_point(
    program: DiagProgram,
    data,
    epsilon: float,
    samples: int = 64,
    seed: int = 0,
    tol: float = 1e-9,
) -> bool:
    """Check that random perturbations of Frobenius norm ``epsilon`` keep the dual point feasible.

    Perturbations ``H`` are drawn on the full dual space
    ``C (+) C (+) W (+) W``; only their diagonal blocks enter the constraint.
    """
    lam0, lam1, Y0, Y1 = interior_dual_point(program, data)
    d = Y0.shape[0]
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        H = _random_hermitian(2 + 2 * d, rng)
        H *= epsilon / np.linalg.norm(H)
        h0, h1 = H[0, 0].real, H[1, 1].real
        H0 = H[2 : 2 + d, 2 : 2 + d]
        H1 = H[2 + d :, 2 + d :]
        slack = _dual_slack(program, data, lam0 + h0, lam1 + h1, Y0 + H0, Y1 + H1)
        if min(min_eig(z) for z in slack) < -tol:
            return False
    return True
