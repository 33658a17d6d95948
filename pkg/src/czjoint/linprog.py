"""Dense linear programs over the constrained unit hypercube.

Every LP in this package has the form::

    minimize    objective @ xi
    subject to  A @ xi = b,  -1 <= xi <= 1

which is always bounded. :class:`BoxSimplex` solves it with a revised
bounded-variable primal simplex. A single instance keeps its basis between
calls to :meth:`BoxSimplex.minimize`, so solving many objectives over the same
feasible region (interval hulls, support functions) pays for phase one once.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "BoxLP",
    "LPResult",
    "LPNumericalError",
    "BoxSimplex",
    "solve_box_lp",
    "feasible",
    "DEFAULT_TOL",
]

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9
_PIVOT_TOL = 1e-11
_REFACTOR_EVERY = 40


class LPNumericalError(RuntimeError):
    """The solver could not certify optimality or infeasibility."""


@dataclass(frozen=True)
class BoxLP:
    objective: np.ndarray
    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.objective, dtype=float))
        n = c.shape[0]
        A = np.asarray(self.A, dtype=float).reshape(-1, n) if np.size(self.A) else np.zeros((0, n))
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if A.shape[0] != b.shape[0]:
            raise ValueError(f"A has {A.shape[0]} rows but b has {b.shape[0]} entries")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)


@dataclass(frozen=True)
class LPResult:
    status: str
    value: float = np.nan
    point: np.ndarray = field(default_factory=lambda: np.zeros(0))
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


class BoxSimplex:
    """Bounded-variable revised simplex on ``{xi : A xi = b, |xi| <= 1}``.

    Phase one adds one artificial per row; afterwards the artificials are
    fixed at zero and may stay basic, which absorbs rank-deficient ``A``.
    Dantzig pricing switches to Bland's rule after a run of degenerate pivots.
    Instances hold mutable state and are not safe for concurrent use.
    """

    def __init__(self, A, b, tol: float = DEFAULT_TOL, max_iter: int | None = None):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.asarray(b, dtype=float).reshape(-1)
        if A.size == 0 and A.shape[0] != b.shape[0]:
            A = np.zeros((b.shape[0], 0))
        if A.shape[0] != b.shape[0]:
            raise ValueError(f"A has {A.shape[0]} rows but b has {b.shape[0]} entries")
        self.n = A.shape[1]
        self.tol = tol
        self.max_iter = max_iter if max_iter is not None else 50 * (A.shape[1] + A.shape[0]) + 50

        # Row equilibration; empty rows are either vacuous or contradictory.
        scale = np.abs(A).max(axis=1) if A.shape[1] else np.zeros(A.shape[0])
        keep = scale > 0
        self._trivially_infeasible = bool(np.any(np.abs(b[~keep]) > tol))
        A, b, scale = A[keep], b[keep], scale[keep]
        self.A = A / scale[:, None]
        self.b = b / scale
        self.m = self.A.shape[0]

        self._phase_one_done = False
        self._feasible = None
        self.iterations = 0

    # -- public --------------------------------------------------------------
    def is_feasible(self) -> bool:
        if self._feasible is None:
            self._phase_one(np.zeros(self.n))
        return self._feasible

    def minimize(self, objective) -> LPResult:
        c = np.asarray(objective, dtype=float).reshape(-1)
        if c.shape[0] != self.n:
            raise ValueError(f"objective has {c.shape[0]} entries, expected {self.n}")
        if self._trivially_infeasible:
            self._feasible = False
            return LPResult("infeasible")
        if self.m == 0:
            xi = np.where(c > 0, -1.0, 1.0)
            self._feasible = True
            return LPResult("optimal", float(c @ xi), xi, 0)
        if self._feasible is None:
            self._phase_one(c)
        if not self._feasible:
            return LPResult("infeasible", iterations=self.iterations)
        cost = np.concatenate([c, np.zeros(self.m)])
        it = self._iterate(cost)
        xi = self.x[: self.n].copy()
        return LPResult("optimal", float(c @ xi), xi, it)

    # -- internals -----------------------------------------------------------
    def _phase_one(self, c_hint):
        if self._trivially_infeasible:
            self._feasible = False
            return
        if self.m == 0:
            self._feasible = True
            return
        n, m = self.n, self.m
        x0 = np.where(c_hint > 0, -1.0, 1.0)
        x0[c_hint == 0] = -1.0
        r = self.b - self.A @ x0
        sign = np.where(r >= 0, 1.0, -1.0)
        self.Afull = np.hstack([self.A, np.diag(sign)])
        self.lo = np.concatenate([-np.ones(n), np.zeros(m)])
        self.hi = np.concatenate([np.ones(n), np.full(m, np.inf)])
        self.x = np.concatenate([x0, np.abs(r)])
        self.basis = np.arange(n, n + m)
        self.is_basic = np.zeros(n + m, dtype=bool)
        self.is_basic[self.basis] = True
        self.Binv = np.diag(sign)

        cost = np.concatenate([np.zeros(n), np.ones(m)])
        self._iterate(cost)
        infeas = float(self.x[n:].sum())
        self._feasible = infeas <= self.tol * max(1.0, np.sqrt(m))
        if self._feasible:
            self.hi[n:] = 0.0
            self.x[n:] = 0.0
            self._recompute_basic()
        self._phase_one_done = True

    def _refactor(self):
        B = self.Afull[:, self.basis]
        try:
            self.Binv = np.linalg.inv(B)
        except np.linalg.LinAlgError as exc:
            raise LPNumericalError("singular basis matrix") from exc

    def _recompute_basic(self):
        nb = ~self.is_basic
        rhs = self.b - self.Afull[:, nb] @ self.x[nb]
        self.x[self.basis] = self.Binv @ rhs

    def _iterate(self, cost) -> int:
        tol = self.tol
        lo, hi, Afull = self.lo, self.hi, self.Afull
        bounded = hi > lo
        bland = False
        degenerate_run = 0
        since_refactor = 0
        certify_attempts = 0
        it = 0
        d = None
        while True:
            if it >= self.max_iter:
                raise LPNumericalError(f"iteration cap {self.max_iter} reached")
            if since_refactor >= _REFACTOR_EVERY:
                self._refactor()
                self._recompute_basic()
                since_refactor = 0
                d = None

            if d is None:
                # Reduced costs only change when the basis does, not on bound flips.
                d = cost - (cost[self.basis] @ self.Binv) @ Afull
            x = self.x
            movable = bounded & ~self.is_basic
            up = movable & (x < hi) & (d < -tol)
            down = movable & (x > lo) & (d > tol)
            eligible = up | down
            if not eligible.any():
                # Certify on a fresh factorization before declaring optimality.
                if since_refactor == 0 and certify_attempts > 0:
                    return it
                self._refactor()
                self._recompute_basic()
                since_refactor = 0
                certify_attempts += 1
                d = None
                xb = self.x[self.basis]
                viol = np.maximum(lo[self.basis] - xb, xb - hi[self.basis])
                if viol.max(initial=0.0) > 1e3 * tol:
                    raise LPNumericalError("basic solution violates bounds after refactorization")
                continue

            if bland:
                q = int(eligible.argmax())
            else:
                q = int(np.where(eligible, np.abs(d), -1.0).argmax())
            s = 1.0 if up[q] else -1.0

            alpha = self.Binv @ Afull[:, q]
            t, r = self._ratio_test(alpha, s, bland)
            span = hi[q] - lo[q]
            if not np.isfinite(t) and not np.isfinite(span):
                raise LPNumericalError("unbounded direction in a bounded problem")

            basis = self.basis
            if span <= t:
                # Bound flip of the entering variable; basis unchanged.
                step = span
                x[basis] -= (step * s) * alpha
                x[q] = hi[q] if s > 0 else lo[q]
            else:
                step = t
                x[basis] -= (step * s) * alpha
                leave = basis[r]
                x[leave] = lo[leave] if s * alpha[r] > 0 else hi[leave]
                x[q] += s * step
                self.is_basic[leave] = False
                self.is_basic[q] = True
                basis[r] = q
                row = self.Binv[r] / alpha[r]
                self.Binv -= np.outer(alpha, row)
                self.Binv[r] = row
                since_refactor += 1
                d = None

            if step <= tol:
                degenerate_run += 1
                if degenerate_run > 2 * self.m + 5:
                    bland = True
            else:
                degenerate_run = 0
                bland = False
            it += 1
            self.iterations += 1

    def _ratio_test(self, alpha, s, bland):
        """Harris two-pass ratio test; returns ``(step, row)``."""
        idx = self.basis
        xb = self.x[idx]
        sa = s * alpha
        mag = np.abs(sa)
        active = mag > _PIVOT_TOL
        if not active.any():
            return np.inf, -1
        room = np.where(sa > 0, xb - self.lo[idx], self.hi[idx] - xb)
        with np.errstate(divide="ignore", invalid="ignore"):
            exact = np.where(active, room / mag, np.inf)
            t_relaxed = np.where(active, (room + self.tol) / mag, np.inf).min()
        if not np.isfinite(t_relaxed):
            return np.inf, -1
        cand = np.flatnonzero(exact <= t_relaxed)
        if cand.size == 0:
            cand = np.array([int(np.argmin(exact))])
        if bland:
            r = int(cand[np.argmin(idx[cand])])
        else:
            r = int(cand[np.argmax(mag[cand])])
        return max(exact[r], 0.0), r


def solve_box_lp(p: BoxLP, tol: float = DEFAULT_TOL) -> LPResult:
    """Minimize ``p.objective @ xi`` over ``B∞(p.A, p.b)``."""
    solver = BoxSimplex(p.A, p.b, tol=tol)
    try:
        return solver.minimize(p.objective)
    except LPNumericalError:
        logger.debug("native simplex failed; retrying with HiGHS", exc_info=True)
        return _solve_highs(p, tol)


def _solve_highs(p: BoxLP, tol: float) -> LPResult:
    from scipy.optimize import linprog

    n = p.objective.shape[0]
    res = linprog(p.objective, A_eq=p.A if p.A.shape[0] else None, b_eq=p.b if p.A.shape[0] else None,
                  bounds=[(-1.0, 1.0)] * n, method="highs",
                  options={"primal_feasibility_tolerance": max(tol, 1e-10)})
    if res.status == 0:
        return LPResult("optimal", float(res.fun), np.asarray(res.x), int(res.nit))
    if res.status == 2:
        return LPResult("infeasible")
    raise LPNumericalError(f"HiGHS failed: {res.message}")


def feasible(A, b, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``B∞(A, b)`` is nonempty (within ``tol``)."""
    b = np.asarray(b, dtype=float).reshape(-1)
    A = np.asarray(A, dtype=float)
    if b.size == 0:
        return True
    A = A.reshape(b.size, -1)
    solver = BoxSimplex(A, b, tol=tol)
    try:
        return solver.is_feasible()
    except LPNumericalError:
        return _solve_highs(BoxLP(np.zeros(A.shape[1]), A, b), tol).optimal
