"""Constrained zonotopes in constrained generator representation.

A constrained zonotope is ``{c + G xi : ||xi||_inf <= 1, A xi = b}``; a
zonotope is the special case without equality constraints. Linear maps,
Minkowski sums, Cartesian products and generalized intersections are exact in
this representation. Interval hulls, membership tests and 2-D projection
areas go through :mod:`czjoint.linprog`.
"""

from __future__ import annotations

import json

import numpy as np
from scipy.linalg import block_diag

from .intervals import IntervalMatrix, imat_vec
from .linprog import DEFAULT_TOL, BoxSimplex, LPNumericalError, feasible, _solve_highs, BoxLP

__all__ = [
    "EmptySetError",
    "ReductionBudgetError",
    "ConstrainedZonotope",
    "Zonotope",
    "linear_map",
    "translate",
    "minkowski_sum",
    "gen_intersection",
    "cartesian_product",
    "interval_hull",
    "contains_point",
    "constraint_eliminate",
    "eliminate_one_constraint",
    "xi_bounds",
    "reduce",
    "reduce_generators",
    "cz_inclusion",
    "projection_area_2d",
    "projection_polygon_2d",
    "to_text",
    "from_text",
]

_EPS = np.finfo(float).eps


class EmptySetError(ValueError):
    """Raised when an operation requires a nonempty set."""


class ReductionBudgetError(ValueError):
    """Raised when a reduction budget is below the representability floor."""


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


class ConstrainedZonotope:
    """The set ``{c + G xi : ||xi||_inf <= 1, A xi = b}``.

    Instances are immutable. Emptiness is decided lazily with a feasibility
    LP and cached; sets built from a known-empty operand carry the flag.
    """

    __slots__ = ("G", "c", "A", "b", "_empty")

    def __init__(self, G, c, A=None, b=None, *, empty: bool | None = None):
        c = np.atleast_1d(np.asarray(c, dtype=float)).reshape(-1)
        n = c.shape[0]
        G = np.asarray(G, dtype=float)
        if G.size == 0:
            G = np.zeros((n, 0))
        G = G.reshape(n, -1) if G.ndim != 2 else G
        if G.shape[0] != n:
            raise ValueError(f"G has {G.shape[0]} rows but c has {n} entries")
        ng = G.shape[1]
        if A is None or np.size(A) == 0:
            nb = 0 if b is None else np.size(b)
            if nb:
                raise ValueError("b given without A")
            A = np.zeros((0, ng))
            b = np.zeros(0)
        else:
            A = np.atleast_2d(np.asarray(A, dtype=float))
            b = np.asarray(b, dtype=float).reshape(-1)
            if A.shape[1] != ng:
                raise ValueError(f"A has {A.shape[1]} columns but G has {ng}")
            if A.shape[0] != b.shape[0]:
                raise ValueError(f"A has {A.shape[0]} rows but b has {b.shape[0]} entries")
        self.G = _frozen(G)
        self.c = _frozen(c)
        self.A = _frozen(A)
        self.b = _frozen(b)
        self._empty = empty

    # -- constructors --------------------------------------------------------
    @classmethod
    def from_box(cls, lo, hi=None) -> ConstrainedZonotope:
        """Axis-aligned box ``[lo, hi]`` (or an :class:`IntervalMatrix`)."""
        if isinstance(lo, IntervalMatrix):
            lo, hi = lo.lo, lo.hi
        lo = np.atleast_1d(np.asarray(lo, dtype=float))
        hi = np.atleast_1d(np.asarray(hi, dtype=float))
        if np.any(lo > hi):
            raise ValueError("box lower bounds exceed upper bounds")
        return Zonotope(np.diag(0.5 * (hi - lo)), 0.5 * (hi + lo))

    @classmethod
    def from_point(cls, x) -> ConstrainedZonotope:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return Zonotope(np.zeros((x.size, 0)), x)

    @classmethod
    def empty_set(cls, dim: int) -> ConstrainedZonotope:
        return ConstrainedZonotope(np.zeros((dim, 0)), np.zeros(dim), empty=True)

    # -- basic properties ----------------------------------------------------
    @property
    def dim(self) -> int:
        return self.c.shape[0]

    @property
    def n_generators(self) -> int:
        return self.G.shape[1]

    @property
    def n_constraints(self) -> int:
        return self.A.shape[0]

    @property
    def is_empty(self) -> bool:
        if self._empty is None:
            self._empty = not feasible(self.A, self.b) if self.n_constraints else False
        return self._empty

    @property
    def empty_known(self) -> bool:
        return self._empty is True

    def __repr__(self):
        return (f"{type(self).__name__}(dim={self.dim}, n_generators={self.n_generators}, "
                f"n_constraints={self.n_constraints})")

    # -- method forms of the module functions ---------------------------------
    def linear_map(self, R):
        return linear_map(R, self)

    def __rmatmul__(self, R):
        return linear_map(R, self)

    def __add__(self, other):
        if isinstance(other, ConstrainedZonotope):
            return minkowski_sum(self, other)
        return translate(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, ConstrainedZonotope):
            return minkowski_sum(self, linear_map(-np.eye(other.dim), other))
        return translate(self, -np.asarray(other, dtype=float))

    def intersect(self, R, Y):
        return gen_intersection(self, R, Y)

    def interval_hull(self):
        return interval_hull(self)

    def contains(self, x, tol: float = DEFAULT_TOL) -> bool:
        return contains_point(self, x, tol)

    def support(self, direction) -> float:
        """Support function ``max_{z in Z} direction @ z``."""
        d = np.asarray(direction, dtype=float)
        return float(d @ self.c) - _min_objective(self, -(d @ self.G))

    def sample(self, n: int, rng=None) -> np.ndarray:
        """Draw ``n`` members (not uniform) by projecting random box points."""
        rng = np.random.default_rng(rng)
        xi = _sample_xi(self.A, self.b, n, rng)
        return self.c + xi @ self.G.T


class Zonotope(ConstrainedZonotope):
    """Constrained zonotope without constraints: ``{c + G xi : ||xi|| <= 1}``."""

    __slots__ = ()

    def __init__(self, G, c, A=None, b=None, *, empty: bool | None = None):
        if A is not None and np.size(A):
            raise ValueError("a Zonotope has no equality constraints")
        super().__init__(G, c, empty=False if empty is None else empty)

    @property
    def is_empty(self) -> bool:
        return bool(self._empty)

    def interval_hull(self):
        return interval_hull(self)

    def support(self, direction) -> float:
        d = np.asarray(direction, dtype=float)
        return float(d @ self.c + np.abs(d @ self.G).sum())


def _make(G, c, A, b, empty=None) -> ConstrainedZonotope:
    if A is None or np.shape(A)[0] == 0:
        return Zonotope(G, c, empty=empty)
    return ConstrainedZonotope(G, c, A, b, empty=empty)


def _as_cz(Z) -> ConstrainedZonotope:
    if not isinstance(Z, ConstrainedZonotope):
        raise TypeError(f"expected a ConstrainedZonotope, got {type(Z).__name__}")
    return Z


def _propagate_empty(*sets):
    return True if any(s.empty_known for s in sets) else None


# ---------------------------------------------------------------------------
# exact operations
# ---------------------------------------------------------------------------

def linear_map(R, Z: ConstrainedZonotope) -> ConstrainedZonotope:
    """Image ``{R z : z in Z}``."""
    Z = _as_cz(Z)
    R = np.atleast_2d(np.asarray(R, dtype=float))
    if R.shape[1] != Z.dim:
        raise ValueError(f"R has {R.shape[1]} columns but Z has dimension {Z.dim}")
    return _make(R @ Z.G, R @ Z.c, Z.A, Z.b, _propagate_empty(Z))


def translate(Z: ConstrainedZonotope, v) -> ConstrainedZonotope:
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape[0] != Z.dim:
        raise ValueError(f"translation has dimension {v.shape[0]}, set has {Z.dim}")
    return _make(Z.G, Z.c + v, Z.A, Z.b, _propagate_empty(Z))


def minkowski_sum(Z: ConstrainedZonotope, W: ConstrainedZonotope) -> ConstrainedZonotope:
    """``{z + w : z in Z, w in W}``."""
    Z, W = _as_cz(Z), _as_cz(W)
    if Z.dim != W.dim:
        raise ValueError(f"dimension mismatch: {Z.dim} vs {W.dim}")
    G = np.hstack([Z.G, W.G])
    A = block_diag(Z.A, W.A) if (Z.n_constraints or W.n_constraints) else None
    b = np.concatenate([Z.b, W.b])
    if A is not None:
        A = A.reshape(Z.n_constraints + W.n_constraints, G.shape[1])
    return _make(G, Z.c + W.c, A, b, _propagate_empty(Z, W))


def gen_intersection(Z: ConstrainedZonotope, R, Y: ConstrainedZonotope) -> ConstrainedZonotope:
    """Generalized intersection ``{z in Z : R z in Y}``."""
    Z, Y = _as_cz(Z), _as_cz(Y)
    R = np.atleast_2d(np.asarray(R, dtype=float))
    if R.shape != (Y.dim, Z.dim):
        raise ValueError(f"R must be {Y.dim}x{Z.dim}, got {R.shape[0]}x{R.shape[1]}")
    ngz, ngy = Z.n_generators, Y.n_generators
    G = np.hstack([Z.G, np.zeros((Z.dim, ngy))])
    A = np.vstack([
        np.hstack([Z.A, np.zeros((Z.n_constraints, ngy))]),
        np.hstack([np.zeros((Y.n_constraints, ngz)), Y.A]),
        np.hstack([R @ Z.G, -Y.G]),
    ])
    b = np.concatenate([Z.b, Y.b, Y.c - R @ Z.c])
    return ConstrainedZonotope(G, Z.c, A, b, empty=_propagate_empty(Z, Y))


def cartesian_product(Z: ConstrainedZonotope, W: ConstrainedZonotope) -> ConstrainedZonotope:
    Z, W = _as_cz(Z), _as_cz(W)
    G = block_diag(Z.G, W.G).reshape(Z.dim + W.dim, Z.n_generators + W.n_generators)
    nc = Z.n_constraints + W.n_constraints
    A = block_diag(Z.A, W.A).reshape(nc, G.shape[1]) if nc else None
    return _make(G, np.concatenate([Z.c, W.c]), A, np.concatenate([Z.b, W.b]),
                 _propagate_empty(Z, W))


# ---------------------------------------------------------------------------
# LP-backed queries
# ---------------------------------------------------------------------------

def _min_objective(Z: ConstrainedZonotope, obj) -> float:
    """``min obj @ xi`` over the constrained unit box of ``Z``."""
    if Z.n_constraints == 0:
        if Z.empty_known:
            raise EmptySetError("set is empty")
        return -float(np.abs(obj).sum())
    res = _solve(BoxSimplex(Z.A, Z.b), obj, Z)
    return res.value


def _solve(solver: BoxSimplex, obj, Z):
    try:
        res = solver.minimize(obj)
    except LPNumericalError:
        res = _solve_highs(BoxLP(obj, Z.A, Z.b), solver.tol)
    if not res.optimal:
        raise EmptySetError("set is empty")
    return res


def interval_hull(Z: ConstrainedZonotope) -> IntervalMatrix:
    """Tightest axis-aligned box containing ``Z`` (2·dim LPs)."""
    Z = _as_cz(Z)
    if Z.empty_known:
        raise EmptySetError("interval hull of an empty set")
    if Z.n_constraints == 0:
        r = np.abs(Z.G).sum(axis=1)
        return IntervalMatrix(Z.c - r, Z.c + r)
    solver = BoxSimplex(Z.A, Z.b)
    lo = np.empty(Z.dim)
    hi = np.empty(Z.dim)
    for i in range(Z.dim):
        g = Z.G[i]
        if not g.any():
            if not solver.is_feasible():
                raise EmptySetError("interval hull of an empty set")
            lo[i] = hi[i] = Z.c[i]
            continue
        lo[i] = Z.c[i] + _solve(solver, g, Z).value
        hi[i] = Z.c[i] - _solve(solver, -g, Z).value
    Z._empty = False
    return IntervalMatrix(lo, np.maximum(hi, lo))


def contains_point(Z: ConstrainedZonotope, x, tol: float = DEFAULT_TOL) -> bool:
    """Decide ``x in Z`` with a feasibility LP."""
    Z = _as_cz(Z)
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != Z.dim:
        raise ValueError(f"point has dimension {x.shape[0]}, set has {Z.dim}")
    if Z.empty_known:
        return False
    # Cheap rejection against the unconstrained zonotope's box.
    r = np.abs(Z.G).sum(axis=1)
    slack = tol * (1.0 + np.abs(x) + r)
    if np.any(np.abs(x - Z.c) > r + slack):
        return False
    A = np.vstack([Z.A, Z.G])
    b = np.concatenate([Z.b, x - Z.c])
    return feasible(A, b, tol)


# ---------------------------------------------------------------------------
# constraint elimination and reduction
# ---------------------------------------------------------------------------

def xi_bounds(A, b, sweeps: int = 10):
    """Interval enclosure of ``B∞(A, b)`` by constraint propagation.

    Returns ``(lo, hi)`` arrays, or ``None`` if propagation proves the set
    empty.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    ng = A.shape[1]
    lo = -np.ones(ng)
    hi = np.ones(ng)
    for _ in range(sweeps):
        changed = False
        for i in range(A.shape[0]):
            a = A[i]
            nz = np.flatnonzero(a)
            if nz.size == 0:
                continue
            an = a[nz]
            tlo = np.minimum(an * lo[nz], an * hi[nz])
            thi = np.maximum(an * lo[nz], an * hi[nz])
            slo, shi = tlo.sum(), thi.sum()
            pad = 8 * _EPS * (np.abs(tlo).sum() + np.abs(thi).sum() + abs(b[i]))
            if slo > b[i] + pad + 1e-9 or shi < b[i] - pad - 1e-9:
                return None
            # Tiny coefficients stay in the sums but imply no useful bound.
            sig = np.abs(an) > 1e-12 * np.abs(an).max()
            idx, an, tlo, thi = nz[sig], an[sig], tlo[sig], thi[sig]
            # a_j xi_j = b_i - sum_{l != j} a_l xi_l
            num_lo = b[i] - (shi - thi) - pad
            num_hi = b[i] - (slo - tlo) + pad
            q1 = num_lo / an
            q2 = num_hi / an
            nlo = np.maximum(lo[idx], np.minimum(q1, q2))
            nhi = np.minimum(hi[idx], np.maximum(q1, q2))
            if np.any(nlo > nhi + 1e-9):
                return None
            nhi = np.maximum(nhi, nlo)
            if np.any((nlo > lo[idx] + 1e-12) | (nhi < hi[idx] - 1e-12)):
                changed = True
            lo[idx], hi[idx] = nlo, nhi
        if not changed:
            break
    return lo, hi


def _rescale(Z: ConstrainedZonotope, lo, hi) -> ConstrainedZonotope:
    """Re-parameterize so that the generator box becomes ``[lo, hi]``."""
    m = 0.5 * (lo + hi)
    r = 0.5 * (hi - lo)
    return ConstrainedZonotope(Z.G * r, Z.c + Z.G @ m, Z.A * r, Z.b - Z.A @ m, empty=Z._empty)


def _substitute(G, c, A, b, i, j):
    """Solve row ``i`` for ``xi_j`` and substitute it everywhere."""
    piv = A[i, j]
    lam_g = G[:, j] / piv
    lam_a = A[:, j] / piv
    Gn = G - np.outer(lam_g, A[i])
    cn = c + lam_g * b[i]
    An = A - np.outer(lam_a, A[i])
    bn = b - lam_a * b[i]
    keep_rows = np.arange(A.shape[0]) != i
    keep_cols = np.arange(A.shape[1]) != j
    return Gn[:, keep_cols], cn, An[np.ix_(keep_rows, keep_cols)], bn[keep_rows]


def _generator_size(G, A, usable):
    """``sum_k ||G'_k||_1 / ||G_k||_1`` for every usable pivot ``(i, j)``.

    ``G' = G - G[:, j] A[i] / A[i, j]`` is the generator matrix left after
    substituting ``xi_j`` from row ``i``. Pivots that fold a constraint into
    generator rows it nearly duplicates score well.
    """
    w = 1.0 / np.maximum(np.abs(G).sum(axis=1), 1e-300)
    size = np.full(A.shape, np.inf)
    for i in np.flatnonzero(usable.any(axis=1)):
        cols = np.flatnonzero(usable[i])
        ratio = A[i][None, :] / A[i, cols][:, None]
        Gp = G[None, :, :] - G[:, cols].T[:, :, None] * ratio[:, None, :]
        size[i, cols] = np.abs(Gp).sum(axis=2) @ w
    return size


def _usable(A):
    absA = np.abs(A)
    return absA > 1e-10 * np.maximum(absA.sum(axis=1, keepdims=True), 1e-300)


def _excess_pivot(G, A, b):
    """Pivot minimizing ``excess(R_ij) * ||G_j||_1``, or ``None``.

    ``R_ij`` is the range of ``xi_j`` implied by row ``i`` with the other
    variables in ``[-1, 1]``; its excess beyond ``[-1, 1]`` bounds how much
    the set grows when the box constraint on ``xi_j`` is dropped. Ties go
    to the smallest ``rad(R_ij) * ||G_j||_1``.
    """
    usable = _usable(A)
    if not usable.any():
        return None
    absA = np.abs(A)
    rowsum = absA.sum(axis=1, keepdims=True)
    gnorm = np.abs(G).sum(axis=0) + 1e-300
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        rad_r = (rowsum - absA) / absA
        excess = np.maximum(0.0, np.abs(b[:, None] / A) + rad_r - 1.0)
    primary = np.where(usable, excess * gnorm, np.inf)
    secondary = np.where(usable, rad_r * gnorm, np.inf)
    cand = np.isclose(primary, primary.min(), rtol=1e-9, atol=1e-15) & usable
    i, j = np.unravel_index(np.argmin(np.where(cand, secondary, np.inf)), A.shape)
    return int(i), int(j)


def _compact_pivot(G, A, b):
    """Pivot leaving the smallest generator matrix, or ``None``.

    When every constraint is going to be eliminated the size of the final
    generator matrix is what matters.
    """
    usable = _usable(A)
    if not usable.any():
        return None
    i, j = np.unravel_index(np.argmin(_generator_size(G, A, usable)), A.shape)
    return int(i), int(j)


_PIVOT_RULES = {"excess": _excess_pivot, "compact": _compact_pivot}


def eliminate_one_constraint(Z: ConstrainedZonotope, rule: str = "excess") -> ConstrainedZonotope:
    """Remove one constraint and one generator, returning a superset.

    ``rule`` selects the pivot heuristic: ``"excess"`` keeps the set as close
    as possible to the original (used when constraints remain), while
    ``"compact"`` keeps the generator matrix small (used when eliminating
    every constraint).
    """
    if Z.n_constraints == 0:
        return Z
    bounds = xi_bounds(Z.A, Z.b)
    if bounds is None:
        raise EmptySetError("constraint propagation proved the set empty")
    Z = _rescale(Z, *bounds)
    A, b, G = Z.A, Z.b, Z.G
    pivot = _PIVOT_RULES[rule](G, A, b)
    if pivot is None:
        # Only zero rows remain: they are vacuous when consistent.
        if np.any(np.abs(b) > 0):
            raise EmptySetError("inconsistent zero constraint")
        return _make(G, Z.c, A[1:], b[1:])
    return _make(*_substitute(G, Z.c, A, b, *pivot))


def constraint_eliminate(Z: ConstrainedZonotope) -> Zonotope:
    """Zonotope enclosing ``Z`` obtained by eliminating every constraint."""
    Z = _as_cz(Z)
    if Z.empty_known:
        raise EmptySetError("cannot eliminate constraints of an empty set")
    while Z.n_constraints:
        Z = eliminate_one_constraint(Z, "compact")
    return Zonotope(Z.G, Z.c)


def reduce_generators(Z: ConstrainedZonotope, max_ng: int) -> ConstrainedZonotope:
    """Girard-style reduction of the lifted zonotope ``{[G; A], (c; -b)}``."""
    n, nc, ng = Z.dim, Z.n_constraints, Z.n_generators
    if ng <= max_ng:
        return Z
    lifted = np.vstack([Z.G, Z.A])
    n_box = n + nc
    n_keep = max_ng - n_box
    if n_keep < 0:
        raise ReductionBudgetError(f"max_ng={max_ng} is below dim + n_constraints = {n_box}")
    score = np.abs(lifted).sum(axis=0) - np.abs(lifted).max(axis=0, initial=0.0)
    order = np.argsort(-score, kind="stable")
    keep, drop = np.sort(order[:n_keep]), order[n_keep:]
    box = np.abs(lifted[:, drop]).sum(axis=1)
    box = np.nextafter(box * (1 + 4 * len(drop) * _EPS), np.inf) * (box > 0)
    nz = np.flatnonzero(box)
    B = np.zeros((n_box, nz.size))
    B[nz, np.arange(nz.size)] = box[nz]
    new = np.hstack([lifted[:, keep], B])
    return _make(new[:n], Z.c, new[n:] if nc else None, Z.b, _propagate_empty(Z))


def reduce(Z: ConstrainedZonotope, max_ng: int, max_nc: int, pivot: str = "excess") -> ConstrainedZonotope:
    """Enclose ``Z`` by a set with at most ``max_ng`` generators and ``max_nc`` constraints.

    Constraints are eliminated first (each elimination also removes a
    generator) using the ``pivot`` rule of :func:`eliminate_one_constraint`;
    the remaining generators are then reduced in the lifted space.
    """
    Z = _as_cz(Z)
    if max_nc < 0 or max_ng < Z.dim + max_nc:
        raise ReductionBudgetError(
            f"budget (max_ng={max_ng}, max_nc={max_nc}) is below the floor dim + max_nc = {Z.dim + max_nc}")
    if pivot not in _PIVOT_RULES:
        raise ValueError(f"unknown pivot rule {pivot!r}")
    if Z.n_generators <= max_ng and Z.n_constraints <= max_nc:
        return Z
    while Z.n_constraints > max_nc:
        Z = eliminate_one_constraint(Z, pivot)
    return reduce_generators(Z, max_ng)


def cz_inclusion(J: IntervalMatrix, X: ConstrainedZonotope) -> ConstrainedZonotope:
    """Enclosure of ``{J' x : J' in J, x in X}`` as ``mid(J) X ⊕ P B∞``."""
    X = _as_cz(X)
    if J.ndim != 2 or J.shape[1] != X.dim:
        raise ValueError(f"J is {J.shape}, expected (*, {X.dim})")
    n = J.shape[0]
    H = J.mid
    rJ = J.rad
    bar = constraint_eliminate(X)
    m = imat_vec(J.centered(), bar.c)
    rad_m = np.maximum(np.abs(m.lo), np.abs(m.hi))
    P = rad_m + rJ @ np.abs(bar.G).sum(axis=1)
    P = np.nextafter(P * (1 + 4 * (X.dim + bar.n_generators) * _EPS), np.inf) * (P > 0)
    return minkowski_sum(linear_map(H, X), Zonotope(np.diag(P).reshape(n, n), np.zeros(n)))


# ---------------------------------------------------------------------------
# 2-D projections
# ---------------------------------------------------------------------------

class _Support2D:
    """Support points of a 2-D constrained zonotope, sharing one LP solver."""

    def __init__(self, Z: ConstrainedZonotope):
        self.Z = Z
        self.solver = BoxSimplex(Z.A, Z.b) if Z.n_constraints else None

    def point(self, d) -> np.ndarray:
        Z = self.Z
        obj = -(d @ Z.G)
        if self.solver is None:
            xi = np.where(obj > 0, -1.0, 1.0)
        else:
            xi = _solve(self.solver, obj, Z).point
        return Z.c + Z.G @ xi


def _project(Z: ConstrainedZonotope, dims) -> ConstrainedZonotope:
    i, j = dims
    S = np.zeros((2, Z.dim))
    S[0, i] = S[1, j] = 1.0
    return linear_map(S, Z)


def _convex_hull(points: np.ndarray) -> np.ndarray:
    """Counter-clockwise hull vertices (monotone chain)."""
    pts = np.unique(np.round(points, 15), axis=0)
    if len(pts) <= 2:
        return pts
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in pts[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def _shoelace(poly: np.ndarray) -> float:
    if len(poly) < 3:
        return 0.0
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * abs(float(x @ np.roll(y, -1) - y @ np.roll(x, -1)))


def projection_polygon_2d(Z: ConstrainedZonotope, dims=(0, 1), n_directions: int | None = 720,
                          tol: float = 1e-9) -> np.ndarray:
    """Vertices (counter-clockwise) of the projection of ``Z`` onto ``dims``.

    With ``n_directions`` set, support points are sampled over that many
    equally spaced directions and the result is an inner approximation. With
    ``n_directions=None`` edges are refined until every edge normal is
    certified by its support value, which yields the exact polygon.
    """
    Z = _as_cz(Z)
    if Z.empty_known:
        raise EmptySetError("projection of an empty set")
    P = _project(Z, dims)
    sup = _Support2D(P)
    if n_directions is not None:
        th = 2 * np.pi * np.arange(n_directions) / n_directions
        D = np.column_stack([np.cos(th), np.sin(th)])
        return _convex_hull(np.array([sup.point(d) for d in D]))

    th = 2 * np.pi * np.arange(8) / 8
    pts = [sup.point(np.array([np.cos(t), np.sin(t)])) for t in th]
    hull = _convex_hull(np.array(pts))
    scale = 1.0 + float(np.abs(P.c).max() + np.abs(P.G).sum(axis=1).max())
    confirmed = set()
    for _ in range(10_000):
        # a segment is refined too: its two edges face opposite directions
        if len(hull) < 2:
            return hull
        added = False
        for k in range(len(hull)):
            a, b = hull[k], hull[(k + 1) % len(hull)]
            key = (tuple(a), tuple(b))
            if key in confirmed:
                continue
            e = b - a
            normal = np.array([e[1], -e[0]])
            nn = np.linalg.norm(normal)
            if nn == 0:
                confirmed.add(key)
                continue
            normal /= nn
            p = sup.point(normal)
            if normal @ p > normal @ a + tol * scale:
                pts.append(p)
                added = True
            else:
                confirmed.add(key)
        if not added:
            return hull
        hull = _convex_hull(np.array(pts))
    return hull


def projection_area_2d(Z: ConstrainedZonotope, dims=(0, 1), n_directions: int | None = 720) -> float:
    """Area of the projection of ``Z`` onto coordinates ``dims``.

    ``n_directions=None`` computes the exact polygon; otherwise the area of
    the hull of sampled support points, which approaches the exact area from
    below.
    """
    return _shoelace(projection_polygon_2d(Z, dims, n_directions))


# ---------------------------------------------------------------------------
# sampling helpers (tests and diagnostics)
# ---------------------------------------------------------------------------

def _sample_xi(A, b, n, rng):
    """Points of ``B∞(A, b)``: random box points projected onto ``A xi = b`` and
    shrunk towards a feasible anchor until inside the box."""
    ng = A.shape[1]
    if A.shape[0] == 0:
        return rng.uniform(-1, 1, size=(n, ng))
    solver = BoxSimplex(A, b)
    anchors = []
    for _ in range(4):
        res = solver.minimize(rng.normal(size=ng))
        if not res.optimal:
            raise EmptySetError("cannot sample an empty set")
        anchors.append(res.point)
    anchor = np.clip(np.mean(anchors, axis=0), -1, 1)
    pinv = np.linalg.pinv(A)
    raw = rng.uniform(-1, 1, size=(n, ng))
    proj = raw - (raw @ A.T - b) @ pinv.T
    d = proj - anchor
    with np.errstate(divide="ignore", invalid="ignore"):
        lim = np.where(d > 0, (1 - anchor) / d, np.where(d < 0, (-1 - anchor) / d, np.inf))
    t = np.minimum(1.0, lim.min(axis=1))[:, None]
    return np.clip(anchor + t * d, -1, 1)


# ---------------------------------------------------------------------------
# text serialization
# ---------------------------------------------------------------------------

def to_text(Z: ConstrainedZonotope) -> str:
    """One-line JSON record with row-major ``G``, ``c``, ``A``, ``b``."""
    return json.dumps({
        "kind": "zonotope" if isinstance(Z, Zonotope) else "constrained_zonotope",
        "dim": Z.dim,
        "G": Z.G.tolist(),
        "c": Z.c.tolist(),
        "A": Z.A.tolist(),
        "b": Z.b.tolist(),
        "empty": bool(Z.empty_known),
    })


def from_text(text: str) -> ConstrainedZonotope:
    rec = json.loads(text) if isinstance(text, str) else text
    dim = int(rec["dim"])
    G = np.asarray(rec["G"], dtype=float).reshape(dim, -1)
    A = np.asarray(rec["A"], dtype=float).reshape(-1, G.shape[1])
    empty = True if rec.get("empty") else None
    if rec.get("kind") == "zonotope":
        return Zonotope(G, rec["c"], empty=empty)
    return _make(G, rec["c"], A, rec["b"], empty)
