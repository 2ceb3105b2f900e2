"""Stinespring and Choi representations of linear maps ``L(C^n) -> L(C^m)``.

Conventions
-----------
* A Stinespring pair ``(A0, A1)`` consists of two ``(m*k) x n`` matrices
  mapping into ``Y (x) Z`` with the environment ``Z = C^k`` as the *second*
  tensor factor, and represents ``Phi(X) = Tr_Z(A0 X A1*)``.
* The Choi matrix is ``J(Phi) = sum_ij Phi(E_ij) (x) E_ij``, an operator on
  ``Y (x) X``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .linalg import ShapeError, as_matrix, partial_trace, unvec, vec


@dataclass(frozen=True)
class StinespringPair:
    """``Phi(X) = Tr_Z(A0 X A1*)`` with ``A0, A1 : C^n -> C^m (x) C^k``."""

    A0: np.ndarray
    A1: np.ndarray
    n: int
    m: int
    k: int

    def __post_init__(self):
        a0 = as_matrix(self.A0, self.m * self.k, self.n)
        a1 = as_matrix(self.A1, self.m * self.k, self.n)
        object.__setattr__(self, "A0", a0)
        object.__setattr__(self, "A1", a1)

    @classmethod
    def from_kraus(cls, left, right=None) -> StinespringPair:
        """Build from operator lists with ``Phi(X) = sum_z L_z X R_z*``.

        ``right`` defaults to ``left`` (a completely positive map).
        """
        left = [as_matrix(a) for a in left]
        right = left if right is None else [as_matrix(a) for a in right]
        if len(left) != len(right) or not left:
            raise ShapeError("need equally many (and at least one) left and right operators")
        m, n = left[0].shape
        k = len(left)
        a0 = np.stack(left, axis=1).reshape(m * k, n)
        a1 = np.stack(right, axis=1).reshape(m * k, n)
        return cls(a0, a1, n, m, k)

    def kraus(self) -> tuple[np.ndarray, np.ndarray]:
        """Slices ``(A0_z, A1_z)`` as ``(k, m, n)`` arrays."""
        s0 = self.A0.reshape(self.m, self.k, self.n).transpose(1, 0, 2)
        s1 = self.A1.reshape(self.m, self.k, self.n).transpose(1, 0, 2)
        return s0, s1


@dataclass(frozen=True)
class ChoiMatrix:
    """Choi matrix ``J`` of a map ``L(C^n) -> L(C^m)``, acting on ``C^m (x) C^n``."""

    J: np.ndarray
    n: int
    m: int

    def __post_init__(self):
        object.__setattr__(self, "J", as_matrix(self.J, self.m * self.n, self.m * self.n))

    def tensor(self) -> np.ndarray:
        """``J`` as a 4-index array ``[y1, x1, y2, x2]``."""
        return self.J.reshape(self.m, self.n, self.m, self.n)


ChannelRep = Union[StinespringPair, ChoiMatrix]


def dims(rep: ChannelRep) -> tuple[int, int]:
    """Input and output dimensions ``(n, m)``."""
    return rep.n, rep.m


def choi_from_stinespring(s: StinespringPair) -> ChoiMatrix:
    # J = sum_z vec(A0_z) vec(A1_z)*
    s0, s1 = s.kraus()
    v0 = s0.reshape(s.k, -1)
    v1 = s1.reshape(s.k, -1)
    return ChoiMatrix(v0.T @ v1.conj(), s.n, s.m)


def stinespring_from_choi(c: ChoiMatrix, rank_tol: float = 1e-10) -> StinespringPair:
    """Factor ``J = sum_t u_t v_t*`` by SVD and unvec the factors into Kraus slices.

    Singular values below ``rank_tol * sigma_max`` are dropped, so ``k`` is
    the numerical rank of ``J`` (at least 1).
    """
    u, sv, vh = np.linalg.svd(c.J)
    keep = sv > rank_tol * sv[0] if sv[0] > 0 else np.zeros_like(sv, dtype=bool)
    k = max(int(np.count_nonzero(keep)), 1)
    root = np.sqrt(sv[:k] * keep[:k])
    left = [unvec(u[:, t] * root[t], c.m, c.n) for t in range(k)]
    right = [unvec(vh[t].conj() * root[t], c.m, c.n) for t in range(k)]
    return StinespringPair.from_kraus(left, right)


def to_choi(rep: ChannelRep) -> ChoiMatrix:
    return rep if isinstance(rep, ChoiMatrix) else choi_from_stinespring(rep)


def apply(rep: ChannelRep, x: np.ndarray) -> np.ndarray:
    """Evaluate ``Phi(X)``.

    The Choi path computes ``Tr_X(J (1 (x) X^T))``; the Stinespring path
    computes ``Tr_Z(A0 X A1*)``.
    """
    x = as_matrix(x, rep.n, rep.n)
    if isinstance(rep, ChoiMatrix):
        return np.einsum("aibj,ij->ab", rep.tensor(), x)
    out = rep.A0 @ x @ rep.A1.conj().T
    return partial_trace(out, (rep.m, rep.k), keep="first")


def adjoint(rep: ChannelRep) -> ChannelRep:
    """The map ``Phi*`` defined by ``<Y, Phi(X)> = <Phi*(Y), X>``, in the same representation."""
    if isinstance(rep, ChoiMatrix):
        t = rep.tensor().conj().transpose(1, 0, 3, 2)
        return ChoiMatrix(t.reshape(rep.n * rep.m, rep.n * rep.m), rep.m, rep.n)
    s0, s1 = rep.kraus()
    return StinespringPair.from_kraus(
        [a.conj().T for a in s0], [a.conj().T for a in s1]
    )


def _swap_factors(a: np.ndarray, m: int, k: int, n: int) -> np.ndarray:
    # rows indexed (y, z) -> (z, y)
    return a.reshape(m, k, n).transpose(1, 0, 2).reshape(k * m, n)


def reduced_maps(s: StinespringPair) -> tuple[StinespringPair, StinespringPair]:
    """The completely positive maps ``Psi_b(X) = Tr_Y(A_b X A_b*)`` from ``C^n`` to ``C^k``."""
    b0 = _swap_factors(s.A0, s.m, s.k, s.n)
    b1 = _swap_factors(s.A1, s.m, s.k, s.n)
    return (
        StinespringPair(b0, b0, s.n, s.k, s.m),
        StinespringPair(b1, b1, s.n, s.k, s.m),
    )


def identity_map(n: int) -> ChoiMatrix:
    v = vec(np.eye(n))
    return ChoiMatrix(np.outer(v, v.conj()), n, n)


def transpose_map(n: int) -> ChoiMatrix:
    """Choi matrix of ``X -> X^T``, which is the swap operator on ``C^n (x) C^n``."""
    j = np.zeros((n, n, n, n), dtype=complex)
    for a in range(n):
        for b in range(n):
            j[b, a, a, b] = 1.0
    return ChoiMatrix(j.reshape(n * n, n * n), n, n)


def random_channel(
    n: int, m: int, k: int, rng: np.random.Generator
) -> StinespringPair:
    """A random trace-preserving completely positive map with ``k`` Kraus operators."""
    g = rng.standard_normal((m * k, n)) + 1j * rng.standard_normal((m * k, n))
    q, _ = np.linalg.qr(g)
    return StinespringPair(q, q, n, m, k)


def random_stinespring(
    n: int, m: int, k: int, rng: np.random.Generator
) -> StinespringPair:
    shape = (m * k, n)
    a0 = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    a1 = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return StinespringPair(a0, a1, n, m, k)


def random_choi(n: int, m: int, rng: np.random.Generator, cp: bool = False) -> ChoiMatrix:
    """Gaussian Choi matrix; with ``cp`` it is ``G G*`` so the map is completely positive."""
    d = n * m
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return ChoiMatrix(g @ g.conj().T / d if cp else g, n, m)
