"""Equality-form Hermitian semidefinite programs.

A problem is the triple ``(Xi, C, D)`` compiled to scalar constraints::

    primal:  maximize <C, X>   s.t.  Tr(A_i X) = b_i,  X >= 0
    dual:    minimize b . y    s.t.  S = sum_i y_i A_i - C >= 0

where ``X``, ``C``, ``A_i`` and ``S`` are block diagonal with complex
Hermitian blocks.  :func:`solve` realifies every block once and runs an
infeasible-start primal-dual path-following method (HKM search direction
with Mehrotra predictor-corrector) on the real symmetric problem.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence, TextIO, Union

import numpy as np
import scipy.linalg as sla

from .linalg import ShapeError, as_hermitian, min_eig

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 200
STEP_FRACTION = 0.98
PRESOLVE_TOL = 1e-10

TraceSink = Union[Callable[[str], None], TextIO, None]


class InfeasibleConstraintsError(ValueError):
    """Linearly dependent constraints with inconsistent right-hand sides."""


@dataclass(frozen=True)
class SdpProblem:
    """Block-diagonal Hermitian SDP.

    ``A[b]`` holds the block-``b`` parts of all constraints as an array of
    shape ``(num_constraints, d_b, d_b)``.
    """

    blocks: tuple[int, ...]
    C: tuple[np.ndarray, ...]
    A: tuple[np.ndarray, ...]
    b: np.ndarray
    name: str = "sdp"

    def __post_init__(self):
        blocks = tuple(int(d) for d in self.blocks)
        if len(self.C) != len(blocks) or len(self.A) != len(blocks):
            raise ShapeError("C and A must have one entry per block")
        b = np.asarray(self.b, dtype=float).reshape(-1)
        C = []
        A = []
        for d, c, a in zip(blocks, self.C, self.A):
            c = as_hermitian(c, herm_tol=1e-10)
            if c.shape != (d, d):
                raise ShapeError(f"objective block of shape {c.shape} does not match dim {d}")
            a = np.asarray(a, dtype=complex)
            if a.shape != (b.size, d, d):
                raise ShapeError(f"constraint block of shape {a.shape}, expected {(b.size, d, d)}")
            if np.max(np.abs(a - a.conj().transpose(0, 2, 1)), initial=0.0) > 1e-10:
                raise ValueError("constraint matrices must be Hermitian")
            C.append(c)
            A.append((a + a.conj().transpose(0, 2, 1)) / 2)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "C", tuple(C))
        object.__setattr__(self, "A", tuple(A))
        object.__setattr__(self, "b", b)

    @property
    def num_constraints(self) -> int:
        return self.b.size

    @property
    def constraints(self) -> list[tuple[list[np.ndarray], float]]:
        """Constraints as ``(per-block matrices, rhs)`` pairs."""
        return [([a[i] for a in self.A], float(self.b[i])) for i in range(self.b.size)]

    def apply(self, X: Sequence[np.ndarray]) -> np.ndarray:
        """Constraint map ``X -> (Tr(A_i X))_i`` (real part)."""
        out = np.zeros(self.b.size)
        for a, x in zip(self.A, X):
            out += np.real(a.reshape(a.shape[0], -1) @ x.T.reshape(-1))
        return out

    def adjoint(self, y: np.ndarray) -> list[np.ndarray]:
        return [np.tensordot(y, a, axes=1) for a in self.A]

    def objective(self, X: Sequence[np.ndarray]) -> float:
        return float(sum(np.real(np.vdot(c, x)) for c, x in zip(self.C, X)))

    def slack(self, y: np.ndarray) -> list[np.ndarray]:
        return [s - c for s, c in zip(self.adjoint(y), self.C)]


@dataclass
class SdpSolution:
    X: list[np.ndarray]
    y: np.ndarray
    S: list[np.ndarray]
    alpha: float
    beta: float
    gap: float
    status: str
    iterations: int
    history: list[dict] = field(default_factory=list, repr=False)

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


@dataclass(frozen=True)
class Certificate:
    """Optimality evidence recomputed from a solution, independent of solver state."""

    primal_residual: float
    primal_min_eig: float
    dual_min_eig: float
    duality_gap: float
    weak_duality_ok: bool
    value_interval: tuple[float, float]


# -- complex <-> real embedding ----------------------------------------------


def realify(h: np.ndarray) -> np.ndarray:
    """Real symmetric embedding ``[[Re H, -Im H], [Im H, Re H]]``.

    Works on a single matrix or on a stack of matrices (leading axes).
    """
    h = np.asarray(h)
    re, im = h.real, h.imag
    top = np.concatenate([re, -im], axis=-1)
    bottom = np.concatenate([im, re], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


def unrealify(r: np.ndarray) -> np.ndarray:
    """Project a real symmetric ``2d x 2d`` matrix back onto a complex Hermitian ``d x d`` one."""
    d = r.shape[-1] // 2
    r11, r12 = r[..., :d, :d], r[..., :d, d:]
    r21, r22 = r[..., d:, :d], r[..., d:, d:]
    h = (r11 + r22) / 2 + 1j * (r21 - r12) / 2
    return (h + np.swapaxes(h, -1, -2).conj()) / 2


# -- presolve ----------------------------------------------------------------


def _constraint_rows(p: SdpProblem) -> np.ndarray:
    """Constraint matrices as real rows, so that the row Gram matrix is ``Re <A_i, A_j>``."""
    parts = []
    for a in p.A:
        flat = a.reshape(a.shape[0], -1)
        parts.append(flat.real)
        parts.append(flat.imag)
    return np.concatenate(parts, axis=1)


def presolve(p: SdpProblem, tol: float = PRESOLVE_TOL) -> tuple[SdpProblem, np.ndarray]:
    """Drop linearly dependent constraints.

    Returns the reduced problem and the indices of the kept constraints.
    Raises :class:`InfeasibleConstraintsError` if a dropped constraint is
    inconsistent with the kept ones.
    """
    rows = _constraint_rows(p)
    m = rows.shape[0]
    if m == 0:
        return p, np.arange(0)
    _, r, piv = sla.qr(rows.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    rank = int(np.count_nonzero(diag > tol * max(diag[0], 1.0))) if diag.size else 0
    if rank == m:
        return p, np.arange(m)
    keep = np.sort(piv[:rank])
    drop = np.setdiff1d(np.arange(m), keep)
    coef, *_ = np.linalg.lstsq(rows[keep].T, rows[drop].T, rcond=None)
    predicted = coef.T @ p.b[keep]
    if np.max(np.abs(predicted - p.b[drop])) > 1e-8 * (1.0 + np.max(np.abs(p.b))):
        raise InfeasibleConstraintsError("dependent constraints have inconsistent right-hand sides")
    log.debug("presolve dropped %d of %d constraints", drop.size, m)
    reduced = SdpProblem(
        p.blocks, p.C, tuple(a[keep] for a in p.A), p.b[keep], p.name
    )
    return reduced, keep


# -- interior point core -----------------------------------------------------


def _emit(sink: TraceSink, line: str) -> None:
    if sink is None:
        return
    if callable(sink):
        sink(line)
    else:
        sink.write(line + "\n")


class _RealProblem:
    def __init__(self, p: SdpProblem):
        # halve so that <A~, realify(X)> = Re Tr(A X)
        self.A = [realify(a) / 2 for a in p.A]
        self.Aflat = [a.reshape(a.shape[0], -1) for a in self.A]
        self.C = [realify(c) / 2 for c in p.C]
        self.b = p.b.copy()
        self.dims = [c.shape[0] for c in self.C]
        self.m = p.b.size

    def op(self, X):
        out = np.zeros(self.m)
        for af, x in zip(self.Aflat, X):
            out += af @ x.reshape(-1)
        return out

    def adj(self, y):
        return [np.tensordot(y, a, axes=1) for a in self.A]


def _sym(a: np.ndarray) -> np.ndarray:
    return (a + a.T) / 2


def _inner(U, V) -> float:
    return float(sum(np.vdot(u, v) for u, v in zip(U, V)))


def _max_step(X: list[np.ndarray], dX: list[np.ndarray]) -> float:
    """Largest ``t`` with ``X + t dX >= 0`` (``inf`` if unbounded)."""
    t = np.inf
    for x, dx in zip(X, dX):
        L = np.linalg.cholesky(x)
        Li = sla.solve_triangular(L, np.eye(x.shape[0]), lower=True)
        lam = np.linalg.eigvalsh(_sym(Li @ dx @ Li.T))[0]
        if lam < 0:
            t = min(t, -1.0 / lam)
    return t


def _schur(rp: _RealProblem, X, Sinv) -> np.ndarray:
    M = np.zeros((rp.m, rp.m))
    for a, af, x, si in zip(rp.A, rp.Aflat, X, Sinv):
        G = x @ a @ si
        M += af @ G.transpose(0, 2, 1).reshape(rp.m, -1).T
    return _sym(M)


def solve(
    p: SdpProblem,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    trace: TraceSink = None,
) -> SdpSolution:
    """Solve ``p`` by a primal-dual interior-point method.

    Parameters
    ----------
    p : SdpProblem
        Problem to solve; dependent constraints are removed first.
    tol : float
        Termination tolerance in ``(0, 1e-2]``.  On ``status == "optimal"``
        the relative gap ``|alpha - beta| / (1 + |alpha| + |beta|)``, the
        2-norm equality residual and the negative parts of the eigenvalues
        of ``X`` and ``S`` are all at most ``tol``.
    max_iter : int
        Iteration cap.  When reached the best iterate is returned with
        status ``"max-iterations"``.
    trace : callable or text stream, optional
        Receives one line per iteration (iter, alpha, beta, gap, residuals).

    Returns
    -------
    SdpSolution
    """
    if not 0 < tol <= 1e-2:
        raise ValueError(f"tol must lie in (0, 1e-2], got {tol}")
    reduced, keep = presolve(p)
    rp = _RealProblem(reduced)
    m = rp.m
    N = sum(rp.dims)
    bnorm = float(np.linalg.norm(rp.b))
    cnorm = float(np.sqrt(sum(np.sum(c * c) for c in rp.C)))
    xi = 1.0 + cnorm + bnorm
    X = [xi * np.eye(d) for d in rp.dims]
    S = [xi * np.eye(d) for d in rp.dims]
    y = np.zeros(m)
    history: list[dict] = []
    status = "max-iterations"
    best = None
    it = 0

    def finish(X, y, status, it):
        Xc = [unrealify(x) for x in X]
        y_full = np.zeros(p.num_constraints)
        y_full[keep] = y
        Sc = p.slack(y_full)
        alpha = p.objective(Xc)
        beta = float(p.b @ y_full)
        return SdpSolution(
            X=Xc, y=y_full, S=Sc, alpha=alpha, beta=beta, gap=abs(alpha - beta),
            status=status, iterations=it, history=history,
        )

    _emit(trace, f"{'iter':>4} {'alpha':>16} {'beta':>16} {'gap':>10} {'pres':>10} {'dres':>10}")
    while True:
        Aty = rp.adj(y)
        Rd = [aty - s - c for aty, s, c in zip(Aty, S, rp.C)]
        rpri = rp.b - rp.op(X)
        pobj = _inner(rp.C, X)
        dobj = float(rp.b @ y)
        pres = float(np.linalg.norm(rpri))
        dres = float(np.sqrt(sum(np.sum(r * r) for r in Rd)))
        mu = _inner(X, S) / N
        relgap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
        # beta - alpha = <X, S> + <X, Rd> + rp . y exactly; the last two vanish when feasible
        infeas = _inner(X, Rd) + float(rpri @ y)
        history.append(
            dict(iter=it, alpha=pobj, beta=dobj, gap=relgap, pres=pres, dres=dres, mu=mu, infeas=infeas)
        )
        _emit(trace, f"{it:4d} {pobj:16.9e} {dobj:16.9e} {relgap:10.3e} {pres:10.3e} {dres:10.3e}")
        merit = max(relgap, pres, dres)
        if best is None or merit < best[0]:
            best = (merit, [x.copy() for x in X], y.copy(), it)
        # slack eigenvalues are halved by the embedding
        if relgap <= tol and pres <= tol and dres <= tol:
            status = "optimal"
            break
        if it >= max_iter:
            break
        if max(np.max(np.abs(y), initial=0.0), max(np.max(np.abs(x)) for x in X)) > 1e14:
            status = "infeasible-suspected"
            break
        it += 1

        try:
            Sinv = [np.linalg.inv(s) for s in S]
            Sinv = [_sym(s) for s in Sinv]
            M = _schur(rp, X, Sinv)
            try:
                fac = sla.cho_factor(M)
                msolve = lambda r: sla.cho_solve(fac, r)  # noqa: E731
            except np.linalg.LinAlgError:
                lu = sla.lu_factor(M + 1e-14 * np.trace(M) / m * np.eye(m))
                msolve = lambda r: sla.lu_solve(lu, r)  # noqa: E731

            XRS = [x @ r @ si for x, r, si in zip(X, Rd, Sinv)]

            def direction(target):
                # target: per-block matrices T with dX = T - X dS S^{-1}
                rhs = rp.op([t - g for t, g in zip(target, XRS)]) - rpri
                dy = msolve(rhs)
                dS = [a + r for a, r in zip(rp.adj(dy), Rd)]
                dX = [_sym(t - x @ ds @ si) for t, x, ds, si in zip(target, X, dS, Sinv)]
                return dX, dy, dS

            # predictor: dX = -X - X dS S^{-1}
            dXa, dya, dSa = direction([-x for x in X])
            ap = min(1.0, STEP_FRACTION * _max_step(X, dXa))
            ad = min(1.0, STEP_FRACTION * _max_step(S, dSa))
            mu_aff = _inner(
                [x + ap * dx for x, dx in zip(X, dXa)], [s + ad * ds for s, ds in zip(S, dSa)]
            ) / N
            sigma = min(1.0, (mu_aff / mu) ** 3) if mu > 0 else 0.0
            # corrector with second-order term
            target = [
                sigma * mu * si - x - dxa @ dsa @ si
                for si, x, dxa, dsa in zip(Sinv, X, dXa, dSa)
            ]
            dX, dy, dS = direction(target)
            ap = min(1.0, STEP_FRACTION * _max_step(X, dX))
            ad = min(1.0, STEP_FRACTION * _max_step(S, dS))
        except np.linalg.LinAlgError as exc:
            log.debug("linear algebra breakdown at iteration %d: %s", it, exc)
            break

        log.debug("iter %d: step primal %.3e dual %.3e sigma %.3e", it, ap, ad, sigma)
        X = [x + ap * dx for x, dx in zip(X, dX)]
        y = y + ad * dy
        S = [s + ad * ds for s, ds in zip(S, dS)]

    if status != "optimal" and best is not None:
        _, Xb, yb, itb = best
        sol = finish(Xb, yb, status, it)
    else:
        sol = finish(X, y, status, it)
    return sol


def check(p: SdpProblem, s: SdpSolution, tol: float = DEFAULT_TOL) -> Certificate:
    """Recompute residuals, eigenvalue margins and the duality gap from scratch."""
    X = [as_hermitian(x, herm_tol=1e-8) for x in s.X]
    residual = float(np.linalg.norm(p.apply(X) - p.b))
    pmin = min(min_eig(x) for x in X)
    slack = p.slack(np.asarray(s.y, dtype=float))
    dmin = min(min_eig(z) for z in slack)
    alpha = p.objective(X)
    beta = float(p.b @ s.y)
    scale = 1.0 + abs(alpha) + abs(beta)
    return Certificate(
        primal_residual=residual,
        primal_min_eig=pmin,
        dual_min_eig=dmin,
        duality_gap=abs(beta - alpha),
        weak_duality_ok=bool(alpha <= beta + 1e-9 * scale),
        value_interval=(min(alpha, beta), max(alpha, beta)),
    )


@dataclass(frozen=True)
class FeasibilityReport:
    """Margins found by :func:`strict_feasibility_probe` (capped at 1)."""

    primal_margin: float
    dual_margin: float
    primal_status: str
    dual_status: str

    @property
    def strictly_primal_feasible(self) -> bool:
        return self.primal_margin > 1e-6

    @property
    def strictly_dual_feasible(self) -> bool:
        return self.dual_margin > 1e-6


def strict_feasibility_probe(p: SdpProblem, tol: float = 1e-9) -> FeasibilityReport:
    """Search for strictly feasible primal and dual points.

    The primal margin is ``max t`` such that some feasible ``X`` has
    ``X >= t 1``; the dual margin is ``max t`` such that some ``y`` has
    ``sum y_i A_i - C >= t 1``.  Both are capped at 1 to keep the auxiliary
    programs bounded.
    """
    m = p.num_constraints
    nb = len(p.blocks)
    one = np.ones((1, 1))

    # primal: X = X' + t 1, X' >= 0, t >= 0, t + s = 1
    A = [np.concatenate([a, np.zeros((1, d, d))]) for a, d in zip(p.A, p.blocks)]
    t_col = sum(np.real(np.trace(a, axis1=1, axis2=2)) for a in p.A) if m else np.zeros(0)
    At = np.concatenate([t_col, [1.0]]).reshape(m + 1, 1, 1)
    As = np.concatenate([np.zeros(m), [1.0]]).reshape(m + 1, 1, 1)
    aux = SdpProblem(
        p.blocks + (1, 1),
        tuple(np.zeros((d, d)) for d in p.blocks) + (one, 0 * one),
        tuple(A) + (At, As),
        np.concatenate([p.b, [1.0]]),
        name=p.name + ":primal-probe",
    )
    ps = solve(aux, tol=tol)
    primal_margin = float(np.real(ps.X[nb][0, 0]))

    # dual: min -t  s.t.  sum y_i A_i - t 1 - C >= 0,  1 - t >= 0
    eye_blocks = [-np.eye(d)[None] for d in p.blocks]
    A2 = [np.concatenate([a, e]) for a, e in zip(p.A, eye_blocks)]
    A2.append(np.concatenate([np.zeros(m), [-1.0]]).reshape(m + 1, 1, 1))
    aux2 = SdpProblem(
        p.blocks + (1,),
        p.C + (-one,),
        tuple(A2),
        np.concatenate([np.zeros(m), [-1.0]]),
        name=p.name + ":dual-probe",
    )
    ds = solve(aux2, tol=tol)
    dual_margin = float(ds.y[-1])
    return FeasibilityReport(primal_margin, dual_margin, ps.status, ds.status)
