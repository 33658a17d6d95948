"""System models, the two benchmark families, and ground-truth simulation.

A model exposes the dynamics three ways: a point evaluator, its natural
interval extension, and an interval enclosure of the Jacobian with respect to
``(x, p, w)``. Nonlinear models write the dynamics once as a function that
works on floats and on :class:`~czjoint.intervals.Interval` alike.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .czsets import ConstrainedZonotope, Zonotope, contains_point, interval_hull
from .intervals import Interval, IntervalMatrix

__all__ = [
    "LinearModel",
    "NonlinearModel",
    "UncertaintyBudget",
    "Trajectory",
    "InitialConditionError",
    "iv_eval_jacobian",
    "random_linear_system",
    "random_truth",
    "example_nonlinear_system",
    "simulate",
    "write_trajectory_csv",
    "read_trajectory_csv",
]


class InitialConditionError(ValueError):
    """Initial state or parameter lies outside its uncertainty set."""


def _mat(a, rows=None, cols=None, name="matrix"):
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if rows is not None and a.shape[0] != rows:
        raise ValueError(f"{name} must have {rows} rows, got {a.shape[0]}")
    if cols is not None and a.shape[1] != cols:
        raise ValueError(f"{name} must have {cols} columns, got {a.shape[1]}")
    a.setflags(write=False)
    return a


def _box_entries(box) -> list:
    if isinstance(box, IntervalMatrix):
        return [Interval(lo, hi) for lo, hi in zip(box.lo, box.hi)]
    return [b if isinstance(b, Interval) else Interval.point(float(b)) for b in box]


class _OutputMixin:
    def output(self, x, u, p, v) -> np.ndarray:
        return self.C @ x + self.D_u @ u + self.D_p @ p + self.D_v @ v

    @property
    def n_y(self) -> int:
        return self.C.shape[0]

    @property
    def n_v(self) -> int:
        return self.D_v.shape[1]


@dataclass(frozen=True, eq=False)
class LinearModel(_OutputMixin):
    """``x+ = A x + B_u u + B_p p + B_w w``, ``y = C x + D_u u + D_p p + D_v v``."""

    A: np.ndarray
    B_u: np.ndarray
    B_p: np.ndarray
    B_w: np.ndarray
    C: np.ndarray
    D_u: np.ndarray
    D_p: np.ndarray
    D_v: np.ndarray
    nominal_input: np.ndarray | None = None

    def __post_init__(self):
        A = _mat(self.A, name="A")
        n = A.shape[0]
        if A.shape[1] != n:
            raise ValueError("A must be square")
        C = _mat(self.C, cols=n, name="C")
        ny = C.shape[0]
        B_u = _mat(self.B_u, rows=n, name="B_u")
        B_p = _mat(self.B_p, rows=n, name="B_p")
        B_w = _mat(self.B_w, rows=n, name="B_w")
        D_u = _mat(self.D_u, rows=ny, cols=B_u.shape[1], name="D_u")
        D_p = _mat(self.D_p, rows=ny, cols=B_p.shape[1], name="D_p")
        D_v = _mat(self.D_v, rows=ny, name="D_v")
        u0 = np.zeros(B_u.shape[1]) if self.nominal_input is None else np.asarray(
            self.nominal_input, dtype=float).reshape(B_u.shape[1])
        for k, v in dict(A=A, B_u=B_u, B_p=B_p, B_w=B_w, C=C, D_u=D_u, D_p=D_p, D_v=D_v,
                         nominal_input=u0).items():
            object.__setattr__(self, k, v)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def n_u(self) -> int:
        return self.B_u.shape[1]

    @property
    def n_p(self) -> int:
        return self.B_p.shape[1]

    @property
    def n_w(self) -> int:
        return self.B_w.shape[1]

    def f(self, x, u, p, w) -> np.ndarray:
        return self.A @ x + self.B_u @ u + self.B_p @ p + self.B_w @ w

    def f_interval(self, box_x, u, box_p, box_w) -> IntervalMatrix:
        return self.as_nonlinear().f_interval(box_x, u, box_p, box_w)

    def jacobian_interval(self, box_x, u, box_p, box_w) -> IntervalMatrix:
        return IntervalMatrix(np.hstack([self.A, self.B_p, self.B_w]))

    def as_nonlinear(self) -> NonlinearModel:
        """The same system wrapped as a :class:`NonlinearModel`."""
        return NonlinearModel.from_linear(self)


@dataclass(frozen=True, eq=False)
class NonlinearModel(_OutputMixin):
    """``x+ = f(x, u, p, w)`` with the linear output ``y = C x + D_u u + D_p p + D_v v``.

    ``dynamics(x, u, p, w)`` and ``jacobian(x, u, p, w)`` receive sequences of
    floats or :class:`Interval` objects and return a length-``n`` sequence and
    an ``n x (n + n_p + n_w)`` nested sequence respectively. Columns of the
    Jacobian are ordered ``(x, p, w)``.
    """

    n: int
    n_p: int
    n_w: int
    n_u: int
    dynamics: Callable
    jacobian: Callable
    C: np.ndarray
    D_u: np.ndarray
    D_p: np.ndarray
    D_v: np.ndarray
    nominal_input: np.ndarray | None = None
    name: str = "nonlinear"

    def __post_init__(self):
        C = _mat(self.C, cols=self.n, name="C")
        ny = C.shape[0]
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "D_u", _mat(self.D_u, rows=ny, cols=self.n_u, name="D_u"))
        object.__setattr__(self, "D_p", _mat(self.D_p, rows=ny, cols=self.n_p, name="D_p"))
        object.__setattr__(self, "D_v", _mat(self.D_v, rows=ny, name="D_v"))
        u0 = np.zeros(self.n_u) if self.nominal_input is None else np.asarray(
            self.nominal_input, dtype=float).reshape(self.n_u)
        object.__setattr__(self, "nominal_input", u0)

    @classmethod
    def from_linear(cls, m: LinearModel) -> NonlinearModel:
        A, B_u, B_p, B_w = m.A, m.B_u, m.B_p, m.B_w
        J = np.hstack([A, B_p, B_w])

        def dynamics(x, u, p, w):
            out = []
            for i in range(A.shape[0]):
                acc = float(B_u[i] @ np.asarray(u, dtype=float))
                for row, vals in ((A[i], x), (B_p[i], p), (B_w[i], w)):
                    for a, v in zip(row, vals):
                        if a != 0.0:
                            acc = acc + float(a) * v
                out.append(acc)
            return out

        def jacobian(x, u, p, w):
            return J

        return cls(m.n, m.n_p, m.n_w, m.n_u, dynamics, jacobian, m.C, m.D_u, m.D_p, m.D_v,
                   m.nominal_input, name="linear")

    def f(self, x, u, p, w) -> np.ndarray:
        return np.asarray(self.dynamics(list(map(float, x)), u, list(map(float, p)),
                                        list(map(float, w))), dtype=float)

    def f_interval(self, box_x, u, box_p, box_w) -> IntervalMatrix:
        """Natural interval extension of the dynamics over boxes."""
        out = self.dynamics(_box_entries(box_x), u, _box_entries(box_p), _box_entries(box_w))
        return IntervalMatrix.from_intervals(list(out))

    def jacobian_interval(self, box_x, u, box_p, box_w) -> IntervalMatrix:
        J = self.jacobian(_box_entries(box_x), u, _box_entries(box_p), _box_entries(box_w))
        if isinstance(J, np.ndarray) and J.dtype != object:
            return IntervalMatrix(J)
        return IntervalMatrix.from_intervals([list(r) for r in J])


def iv_eval_jacobian(model, box_z, box_w, u=None, wrt: str = "z") -> IntervalMatrix:
    """Interval enclosure of the Jacobian of the dynamics over boxes.

    ``box_z`` covers ``(x, p)``. With ``wrt="z"`` the result is
    ``n x (n + n_p)``; with ``wrt="w"`` it is ``n x n_w``.
    """
    n = model.n
    if not isinstance(box_z, IntervalMatrix):
        box_z = IntervalMatrix.from_intervals(_box_entries(box_z))
    if not isinstance(box_w, IntervalMatrix):
        box_w = IntervalMatrix.from_intervals(_box_entries(box_w))
    if box_z.shape[0] != n + model.n_p or box_w.shape[0] != model.n_w:
        raise ValueError("box dimensions do not match the model")
    u = model.nominal_input if u is None else np.asarray(u, dtype=float)
    J = model.jacobian_interval(box_z[:n], u, box_z[n:], box_w)
    if wrt == "z":
        return J[:, : n + model.n_p]
    if wrt == "w":
        return J[:, n + model.n_p:]
    raise ValueError(f"wrt must be 'z' or 'w', got {wrt!r}")


@dataclass(frozen=True, eq=False)
class UncertaintyBudget:
    """Initial-state, parameter, and disturbance sets ``X0 × P × W × V``."""

    X0: ConstrainedZonotope
    P: ConstrainedZonotope
    W: ConstrainedZonotope
    V: ConstrainedZonotope

    def check(self, model):
        for name, S, d in (("X0", self.X0, model.n), ("P", self.P, model.n_p),
                           ("W", self.W, model.n_w), ("V", self.V, model.n_v)):
            if S.dim != d:
                raise ValueError(f"{name} has dimension {S.dim}, model expects {d}")
            if S.is_empty:
                raise ValueError(f"{name} is empty")
        return self


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Ground truth for ``k = 0..horizon``.

    ``x``, ``y``, ``u``, ``v`` have ``horizon + 1`` rows; ``w`` has ``horizon``
    rows (``w[k]`` drives the transition from ``k`` to ``k + 1``).
    """

    x: np.ndarray
    y: np.ndarray
    u: np.ndarray
    w: np.ndarray
    v: np.ndarray
    p: np.ndarray
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    @property
    def horizon(self) -> int:
        return self.x.shape[0] - 1

    def truth(self, k: int) -> np.ndarray:
        """Joint truth ``(x_k, p)``."""
        return np.concatenate([self.x[k], self.p])


# ---------------------------------------------------------------------------
# benchmark systems
# ---------------------------------------------------------------------------

def random_linear_system(seed) -> tuple[LinearModel, UncertaintyBudget]:
    """Random stable-ish system of the linear benchmark (n = 10, n_p = n_y = 6)."""
    rng = np.random.default_rng(seed)
    n, n_p, n_y, n_u = 10, 6, 6, 1
    A = rng.uniform(-1 / 7, 1 / 7, size=(n, n))
    C = rng.uniform(-1 / 4, 1 / 4, size=(n_y, n))
    B_p = rng.uniform(-1, 1, size=(n, n_p))
    D_p = rng.uniform(-1, 1, size=(n_y, n_p))
    model = LinearModel(A=A, B_u=np.zeros((n, n_u)), B_p=B_p, B_w=np.eye(n), C=C,
                        D_u=np.zeros((n_y, n_u)), D_p=D_p, D_v=np.eye(n_y))
    cx = rng.integers(-6, 7, size=n).astype(float)
    cp = rng.integers(-6, 7, size=n_p).astype(float)
    budget = UncertaintyBudget(
        X0=ConstrainedZonotope.from_box(cx - 0.5, cx + 0.5),
        P=ConstrainedZonotope.from_box(cp - 0.5, cp + 0.5),
        W=ConstrainedZonotope.from_box(np.full(n, -0.05), np.full(n, 0.05)),
        V=ConstrainedZonotope.from_box(np.full(n_y, -0.05), np.full(n_y, 0.05)),
    )
    return model, budget


def random_truth(budget: UncertaintyBudget, seed) -> tuple[np.ndarray, np.ndarray]:
    """Uniform draw of ``(x0, p)`` from the interval hulls of ``X0`` and ``P``."""
    rng = np.random.default_rng(seed)
    hx, hp = interval_hull(budget.X0), interval_hull(budget.P)
    return rng.uniform(hx.lo, hx.hi), rng.uniform(hp.lo, hp.hi)


def _eq17_dynamics(x, u, p, w):
    x1, x2 = x[0], x[1]
    p = p[0]
    q = 4 + x1
    return [3 * x1 - p * x1**2 - 4 * x1 * x2 / q + w[0],
            -2 * x2 + 3 * x1 * x2 / q + w[1]]


def _eq17_jacobian(x, u, p, w):
    # Columns (x1, x2, p, w1, w2); x1/(4+x1) rewritten as 1 - 4/(4+x1).
    x1, x2 = x[0], x[1]
    p = p[0]
    q = 4 + x1
    q2 = q**2
    return [[3 - 2 * p * x1 - 16 * x2 / q2, -4 + 16 / q, -(x1**2), 1.0, 0.0],
            [12 * x2 / q2, 1 - 12 / q, 0.0, 0.0, 1.0]]


def example_nonlinear_system() -> tuple[NonlinearModel, UncertaintyBudget]:
    """Two-state system with one unknown parameter and a constant output offset.

    The offset ``-1`` in the second output is carried as ``D_u u`` with the
    known input ``u = 1``.
    """
    model = NonlinearModel(
        n=2, n_p=1, n_w=2, n_u=1,
        dynamics=_eq17_dynamics, jacobian=_eq17_jacobian,
        C=[[1.0, 0.0], [-1.0, 1.0]],
        D_u=[[0.0], [-1.0]],
        D_p=[[0.0], [7.0]],
        D_v=np.eye(2),
        nominal_input=[1.0],
        name="eq17",
    )
    budget = UncertaintyBudget(
        X0=Zonotope(np.diag([1.2, 0.6]), [10.0, 0.5]),
        P=Zonotope([[5.0]], [1 / 7]),
        W=ConstrainedZonotope.from_box([-0.2, -0.2], [0.2, 0.2]),
        V=ConstrainedZonotope.from_box([-0.1, -0.1], [0.1, 0.1]),
    )
    return model, budget


# ---------------------------------------------------------------------------
# simulation
# ---------------------------------------------------------------------------

def simulate(model, budget: UncertaintyBudget, x0, p, seed, horizon: int, inputs=None) -> Trajectory:
    """Simulate ``horizon`` transitions with uniform disturbances in the budget hulls."""
    x0 = np.asarray(x0, dtype=float).reshape(model.n)
    p = np.asarray(p, dtype=float).reshape(model.n_p)
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    if not contains_point(budget.X0, x0):
        raise InitialConditionError(f"x0={x0.tolist()} is outside X0")
    if not contains_point(budget.P, p):
        raise InitialConditionError(f"p={p.tolist()} is outside P")
    rng = np.random.default_rng(seed)
    hw, hv = interval_hull(budget.W), interval_hull(budget.V)
    if inputs is None:
        U = np.tile(model.nominal_input, (horizon + 1, 1))
    else:
        U = np.asarray(inputs, dtype=float).reshape(horizon + 1, model.n_u)
    W = rng.uniform(hw.lo, hw.hi, size=(horizon, model.n_w))
    V = rng.uniform(hv.lo, hv.hi, size=(horizon + 1, model.n_v))
    X = np.empty((horizon + 1, model.n))
    Y = np.empty((horizon + 1, model.n_y))
    X[0] = x0
    for k in range(horizon + 1):
        if k > 0:
            X[k] = model.f(X[k - 1], U[k - 1], p, W[k - 1])
        Y[k] = model.output(X[k], U[k], p, V[k])
    return Trajectory(x=X, y=Y, u=U, w=W, v=V, p=p, seed=seed)


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """Columns ``k, x*, y*, w*, v*, p*, u*``; ``w`` is empty on the last row."""
    n, ny, nw, nv = traj.x.shape[1], traj.y.shape[1], traj.w.shape[1], traj.v.shape[1]
    npar, nu = traj.p.shape[0], traj.u.shape[1]
    header = (["k"] + [f"x{i + 1}" for i in range(n)] + [f"y{i + 1}" for i in range(ny)]
              + [f"w{i + 1}" for i in range(nw)] + [f"v{i + 1}" for i in range(nv)]
              + [f"p{i + 1}" for i in range(npar)] + [f"u{i + 1}" for i in range(nu)])
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(header)
        for k in range(traj.horizon + 1):
            w = [repr(float(v)) for v in traj.w[k]] if k < traj.horizon else [""] * nw
            wr.writerow([k] + [repr(float(v)) for v in traj.x[k]] + [repr(float(v)) for v in traj.y[k]]
                        + w + [repr(float(v)) for v in traj.v[k]] + [repr(float(v)) for v in traj.p]
                        + [repr(float(v)) for v in traj.u[k]])


def read_trajectory_csv(path) -> Trajectory:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2 or not rows[0] or rows[0][0] != "k":
        raise ValueError(f"{path} is not a trajectory CSV")
    header, body = rows[0], rows[1:]

    def block(prefix, last_row=True):
        idx = [i for i, h in enumerate(header) if h[:1] == prefix and h[1:].isdigit()]
        data = body if last_row else body[:-1]
        return np.array([[float(r[i]) for i in idx] for r in data]).reshape(len(data), len(idx))

    try:
        p = block("p")[0]
        x, y, u, v = block("x"), block("y"), block("u"), block("v")
        w = block("w", last_row=False)
    except (IndexError, ValueError) as exc:
        raise ValueError(f"{path} is not a trajectory CSV: {exc}") from exc
    return Trajectory(x=x, y=y, u=u, w=w, v=v, p=p)
