"""Solver-free reference computations for checking SDP answers."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import ChoiMatrix
from .linalg import min_eig, partial_trace, spectral_norm, trace_norm, vec


class WrongRegimeError(ValueError):
    """The oracle's closed form does not apply to this input."""


@dataclass(frozen=True)
class AscentConfig:
    restarts: int = 32
    max_steps: int = 500
    step_tol: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")


def cp_diamond_oracle(c: ChoiMatrix, psd_tol: float = 1e-9) -> float:
    """``||Tr_Y J||_inf``, the completely bounded trace norm of a completely positive map."""
    lo = min_eig(c.J)
    scale = max(1.0, spectral_norm(c.J))
    if np.max(np.abs(c.J - c.J.conj().T)) > psd_tol * scale or lo < -psd_tol * scale:
        raise WrongRegimeError(
            f"Choi matrix is not positive semidefinite (min eigenvalue {lo:.3e})"
        )
    return spectral_norm(partial_trace(c.J, (c.m, c.n), keep="second"))


def rank_one_value(c: ChoiMatrix, A: np.ndarray, B: np.ndarray) -> float:
    """``||(1 (x) A^T) J (1 (x) conj(B))||_1``, which equals ``||(Phi (x) 1)(vec(A) vec(B)*)||_1``."""
    m = c.m
    left = np.kron(np.eye(m), A.T)
    right = np.kron(np.eye(m), B.conj())
    return trace_norm(left @ c.J @ right)


def _polar(a: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(a)
    return u @ vh


def _normalize(a: np.ndarray) -> np.ndarray:
    nrm = np.linalg.norm(a)
    return a / nrm if nrm > 0 else a


def _ascend(c: ChoiMatrix, A: np.ndarray, B: np.ndarray, cfg: AscentConfig):
    m, n = c.m, c.n
    J = c.J
    eye = np.eye(m)
    value = rank_one_value(c, A, B)
    for _ in range(cfg.max_steps):
        M = np.kron(eye, A.T) @ J @ np.kron(eye, B.conj())
        U = _polar(M)
        # best A for fixed (U, B): Re Tr(U* (1 (x) A^T) K) = Re <conj(T), A>
        K = J @ np.kron(eye, B.conj())
        T = partial_trace(K @ U.conj().T, (m, n), keep="second")
        A = _normalize(T.conj())
        L = np.kron(eye, A.T) @ J
        M = L @ np.kron(eye, B.conj())
        U = _polar(M)
        # best B for fixed (U, A): Re Tr(U* L (1 (x) conj(B))) = Re <B, T'^T>
        T2 = partial_trace(U.conj().T @ L, (m, n), keep="second")
        B = _normalize(T2.T)
        new = rank_one_value(c, A, B)
        if new - value <= cfg.step_tol * max(1.0, value):
            value = max(value, new)
            break
        value = new
    return value, A, B


def rank_one_ascent(
    c: ChoiMatrix, cfg: AscentConfig | None = None
) -> tuple[float, tuple[np.ndarray, np.ndarray]]:
    """Certified lower bound on ``|||Phi|||_1`` by maximizing over rank-one inputs.

    The input ``u v*`` with unit ``u = vec(A)``, ``v = vec(B)`` is improved by
    alternating exact maximization over ``A`` and ``B`` against the polar
    factor of the output, which never decreases the objective.  Restarts
    use independent seeds derived from ``cfg.seed``.

    Returns
    -------
    lower_bound : float
        ``||(Phi (x) 1)(u v*)||_1`` at the returned witness.
    witness : (u, v)
        Unit vectors in ``C^n (x) C^n``.
    """
    cfg = cfg or AscentConfig()
    n = c.n
    best = (-1.0, None, None)
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    for r, ss in enumerate(seeds):
        rng = np.random.default_rng(ss)
        if r == 0:
            A0 = np.eye(n) / np.sqrt(n)
            B0 = A0.copy()
        else:
            A0 = _normalize(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
            B0 = _normalize(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        value, A, B = _ascend(c, A0, B0, cfg)
        # ties within the step tolerance keep the earlier restart
        if value > best[0] + cfg.step_tol * max(1.0, best[0]):
            best = (value, A, B)
    value, A, B = best
    return float(value), (vec(A), vec(B))


def commuting_fidelity_oracle(p, q) -> float:
    """``sum_i sqrt(p_i q_i)``, the fidelity of ``diag(p)`` and ``diag(q)``."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError("p and q must have equal length")
    if np.any(p < 0) or np.any(q < 0):
        raise ValueError("entries must be nonnegative")
    return float(np.sum(np.sqrt(p * q)))
