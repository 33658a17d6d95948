"""Set-membership estimators over the joint state-parameter space.

The joint methods (``CZ-J``, ``CZMV-J``) propagate one constrained zonotope
over ``z = (x, p)``: prediction is a linear map (or a mean-value extension
for nonlinear dynamics) that passes ``p`` through unchanged, and the update is
a generalized intersection with the measurement set, which is what refines
``p`` over time. The remaining methods are comparison baselines:

``CZ`` / ``CZMV``
    constrained zonotope over ``x`` only, with ``P`` re-entering every step.
``Z-J`` / ``ZMV-J``
    joint zonotope updated by one strip per output row.
``FBP``
    joint interval box with one forward-backward contraction sweep.

:class:`SetMembershipFilter` wraps all of them behind a scikit-learn
estimator interface.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin, clone
from sklearn.utils import check_array
from sklearn.utils.validation import check_is_fitted

from .czsets import (
    ConstrainedZonotope,
    EmptySetError,
    Zonotope,
    cartesian_product,
    constraint_eliminate,
    contains_point,
    gen_intersection,
    interval_hull,
    linear_map,
    minkowski_sum,
    reduce,
    reduce_generators,
    translate,
)
from .intervals import IntervalMatrix, imat_vec
from .linprog import feasible
from .models import LinearModel, UncertaintyBudget

__all__ = [
    "METHODS",
    "InconsistentMeasurementError",
    "DivergenceError",
    "EstimatorConfig",
    "EstimatorState",
    "linear_joint_predict",
    "nonlinear_joint_predict",
    "measurement_set",
    "joint_update",
    "strip_update",
    "initial_state",
    "step",
    "joint_step",
    "nonjoint_step",
    "zonotope_strip_step",
    "fbp_step",
    "SetMembershipFilter",
]

METHODS = ("CZ-J", "CZ", "CZMV-J", "CZMV", "Z-J", "ZMV-J", "FBP")
DIVERGENCE_RADIUS = 1e6
_EPS = np.finfo(float).eps


class InconsistentMeasurementError(RuntimeError):
    """The measurements are incompatible with the model and uncertainty budget."""


class DivergenceError(RuntimeError):
    """The enclosure grew beyond :data:`DIVERGENCE_RADIUS`."""


@dataclass(frozen=True)
class EstimatorConfig:
    method: str = "CZ-J"
    max_ng: int | None = 70
    max_nc: int | None = 20
    gamma_rule: str = "hull-midpoint"

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.gamma_rule != "hull-midpoint":
            raise ValueError(f"unsupported gamma_rule {self.gamma_rule!r}")
        if (self.max_ng is None) != (self.max_nc is None) and self.family == "cz":
            raise ValueError("set both max_ng and max_nc, or neither to disable reduction")

    @property
    def joint(self) -> bool:
        return self.method.endswith("-J") or self.method == "FBP"

    @property
    def mean_value(self) -> bool:
        return "MV" in self.method

    @property
    def family(self) -> str:
        if self.method == "FBP":
            return "interval"
        return "zonotope" if self.method.startswith("Z") else "cz"

    def check_budget(self, dim: int):
        if self.family == "cz" and self.max_ng is not None and self.max_ng < dim + self.max_nc:
            raise ValueError(f"max_ng={self.max_ng} is below dim + max_nc = {dim + self.max_nc}")
        if self.family == "zonotope" and self.max_ng is not None and self.max_ng < dim:
            raise ValueError(f"max_ng={self.max_ng} is below the dimension {dim}")


@dataclass
class EstimatorState:
    """Enclosure after the update at step ``k``.

    ``Z`` is a set over ``(x, p)`` for joint methods, over ``x`` for the
    non-joint ones (``P`` then stays fixed), and an :class:`IntervalMatrix`
    box for FBP. ``hull`` always covers ``(x, p)``.
    """

    k: int
    Z: object
    hull: IntervalMatrix
    model: object
    budget: UncertaintyBudget
    u_prev: np.ndarray
    predicted: object = None
    counts: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.model.n

    def contains(self, x, p, tol: float = 1e-9) -> bool:
        """Whether ``(x, p)`` lies in the current enclosure."""
        z = np.concatenate([np.asarray(x, float).reshape(-1), np.asarray(p, float).reshape(-1)])
        if isinstance(self.Z, IntervalMatrix):
            slack = tol * (1 + np.abs(z))
            return bool(np.all(self.Z.lo - slack <= z) and np.all(z <= self.Z.hi + slack))
        if self.Z.dim == z.shape[0]:
            return contains_point(self.Z, z, tol)
        n = self.model.n
        return contains_point(self.Z, z[:n], tol) and contains_point(self.budget.P, z[n:], tol)


# ---------------------------------------------------------------------------
# building blocks
# ---------------------------------------------------------------------------

def _joint_matrices(model):
    n, n_p = model.n, model.n_p
    M = np.block([[model.A, model.B_p], [np.zeros((n_p, n)), np.eye(n_p)]])
    return M


def linear_joint_predict(Z: ConstrainedZonotope, model: LinearModel, u, W: ConstrainedZonotope):
    """``[A B_p; 0 I] Z ⊕ [B_u; 0] u ⊕ [B_w; 0] W``."""
    n, n_p = model.n, model.n_p
    if Z.dim != n + n_p:
        raise ValueError(f"joint set has dimension {Z.dim}, expected {n + n_p}")
    u = np.asarray(u, dtype=float).reshape(model.n_u)
    shift = np.concatenate([model.B_u @ u, np.zeros(n_p)])
    Bw = np.vstack([model.B_w, np.zeros((n_p, model.n_w))])
    return minkowski_sum(translate(linear_map(_joint_matrices(model), Z), shift), linear_map(Bw, W))


def _disturbance_image(model, gx, u, gp, W: ConstrainedZonotope, hull_w: IntervalMatrix):
    """Set ``Z_w ⊇ f(gx, u, gp, W)`` with ``n_gw + n`` generators.

    Mean-value form in ``w`` around the midpoint of ``hull_w``; the rounding
    radius of the point evaluation is folded into the diagonal term.
    """
    n = model.n
    gw = hull_w.mid
    pt = lambda v: IntervalMatrix(v)  # noqa: E731
    f0 = model.f_interval(pt(gx), u, pt(gp), pt(gw))
    Jw = model.jacobian_interval(pt(gx), u, pt(gp), hull_w)[:, n + model.n_p:]
    Wc = translate(W, -gw)
    bar = constraint_eliminate(Wc)
    m = imat_vec(Jw.centered(), bar.c)
    diag = (np.maximum(np.abs(m.lo), np.abs(m.hi)) + Jw.rad @ np.abs(bar.G).sum(axis=1) + f0.rad)
    diag = np.nextafter(diag * (1 + 8 * (W.dim + bar.n_generators) * _EPS), np.inf) * (diag > 0)
    core = translate(linear_map(Jw.mid, Wc), f0.mid)
    return minkowski_sum(core, Zonotope(np.diag(diag).reshape(n, n), np.zeros(n)))


def nonlinear_joint_predict(Z: ConstrainedZonotope, model, u, W: ConstrainedZonotope,
                            hull: IntervalMatrix | None = None):
    """Mean-value joint prediction.

    Returns ``[H; E] Z ⊕ [H; 0](-γ) ⊕ [P̂; 0] B∞ ⊕ [I; 0] Z_w`` with ``γ`` the
    midpoint of the interval hull of ``Z``, ``H = mid(J_z)`` and ``P̂`` the
    diagonal remainder of the CZ-inclusion.
    """
    n, n_p = model.n, model.n_p
    if Z.dim != n + n_p:
        raise ValueError(f"joint set has dimension {Z.dim}, expected {n + n_p}")
    u = np.asarray(u, dtype=float).reshape(model.n_u)
    hull = interval_hull(Z) if hull is None else hull
    hull_w = interval_hull(W)
    gamma = hull.mid
    J = model.jacobian_interval(hull[:n], u, hull[n:], hull_w)
    Jz = J[:, : n + n_p]
    H = Jz.mid

    bar = constraint_eliminate(translate(Z, -gamma))
    m = imat_vec(Jz.centered(), bar.c)
    Phat = np.maximum(np.abs(m.lo), np.abs(m.hi)) + Jz.rad @ np.abs(bar.G).sum(axis=1)
    Phat = np.nextafter(Phat * (1 + 8 * (Z.dim + bar.n_generators) * _EPS), np.inf) * (Phat > 0)

    Zw = _disturbance_image(model, gamma[:n], u, gamma[n:], W, hull_w)
    E = np.hstack([np.zeros((n_p, n)), np.eye(n_p)])
    lift = np.vstack([np.eye(n), np.zeros((n_p, n))])
    out = translate(linear_map(np.vstack([H, E]), Z), np.concatenate([-H @ gamma, np.zeros(n_p)]))
    out = minkowski_sum(out, Zonotope(np.vstack([np.diag(Phat).reshape(n, n), np.zeros((n_p, n))]),
                                      np.zeros(n + n_p)))
    return minkowski_sum(out, linear_map(lift, Zw))


def measurement_set(model, u, y, V: ConstrainedZonotope, P: ConstrainedZonotope | None = None):
    """``(y − D_u u) ⊕ (−D_v V)``, plus ``(−D_p P)`` when ``P`` is given."""
    u = np.asarray(u, dtype=float).reshape(model.n_u)
    y = np.asarray(y, dtype=float).reshape(model.n_y)
    Y = translate(linear_map(-model.D_v, V), y - model.D_u @ u)
    if P is not None:
        Y = minkowski_sum(Y, linear_map(-model.D_p, P))
    return Y


def joint_update(Zbar: ConstrainedZonotope, model, u, y, V: ConstrainedZonotope):
    """``Z̄ ∩_[C D_p] ((y − D_u u) ⊕ (−D_v V))``."""
    return gen_intersection(Zbar, np.hstack([model.C, model.D_p]), measurement_set(model, u, y, V))


def strip_update(Z: Zonotope, h, d: float, sigma: float) -> Zonotope:
    """Zonotope enclosing ``Z ∩ {z : |h·z − d| ≤ σ}``.

    Uses the gain ``λ = G Gᵀh / (hᵀG Gᵀh + σ²)``, which minimizes the squared
    Frobenius norm of the updated generator matrix ``[(I − λhᵀ)G, σλ]``.
    """
    h = np.asarray(h, dtype=float)
    Gh = Z.G.T @ h
    ctr = float(h @ Z.c)
    spread = float(np.abs(Gh).sum())
    if abs(ctr - d) > spread + sigma + 1e-9 * (1 + abs(d) + spread + sigma):
        raise InconsistentMeasurementError("strip does not intersect the zonotope")
    if abs(ctr - d) + spread <= sigma:
        return Z
    denom = float(Gh @ Gh) + sigma**2
    if denom == 0.0:
        return Z
    lam = (Z.G @ Gh) / denom
    G = np.hstack([Z.G - np.outer(lam, Gh), (sigma * lam)[:, None]])
    c = Z.c + lam * (d - ctr)
    if np.sum(G**2) > np.sum(Z.G**2):
        return Z
    return Zonotope(G, c)


def _contract_linear(lo, hi, a, rhs_lo, rhs_hi):
    """One backward pass of ``a·v ∈ [rhs_lo, rhs_hi]`` over the box ``[lo, hi]``."""
    nz = np.flatnonzero(a)
    an = a[nz]
    tlo = np.minimum(an * lo[nz], an * hi[nz])
    thi = np.maximum(an * lo[nz], an * hi[nz])
    slo, shi = tlo.sum(), thi.sum()
    pad = 8 * _EPS * (np.abs(tlo).sum() + np.abs(thi).sum() + abs(rhs_lo) + abs(rhs_hi))
    if slo > rhs_hi + pad or shi < rhs_lo - pad:
        return None
    num_lo = rhs_lo - (shi - thi) - pad
    num_hi = rhs_hi - (slo - tlo) + pad
    q1, q2 = num_lo / an, num_hi / an
    lo, hi = lo.copy(), hi.copy()
    lo[nz] = np.maximum(lo[nz], np.nextafter(np.minimum(q1, q2), -np.inf))
    hi[nz] = np.minimum(hi[nz], np.nextafter(np.maximum(q1, q2), np.inf))
    if np.any(lo > hi):
        return None
    return lo, hi


def _check_divergence(hull: IntervalMatrix, k: int):
    r = float(np.max(hull.rad, initial=0.0))
    if not np.isfinite(r) or r > DIVERGENCE_RADIUS:
        raise DivergenceError(f"enclosure radius {r:.3g} exceeds {DIVERGENCE_RADIUS:g} at k={k}")


def _require_nonempty(Z: ConstrainedZonotope, k: int):
    if Z.n_constraints and not feasible(Z.A, Z.b):
        raise InconsistentMeasurementError(f"empty enclosure after the update at k={k}")


# ---------------------------------------------------------------------------
# recursions
# ---------------------------------------------------------------------------

def _predict(config: EstimatorConfig, Z, model, u, W, hull):
    if config.mean_value:
        return nonlinear_joint_predict(Z, model, u, W, hull)
    if not isinstance(model, LinearModel):
        raise TypeError(f"method {config.method} needs a LinearModel; use the MV variant")
    return linear_joint_predict(Z, model, u, W)


def _reduce_cz(Z, config):
    if config.max_ng is None:
        return Z
    # The mean-value predictor pays for the size of the constraint-free
    # generator matrix, so keep that compact; otherwise keep the set itself.
    return reduce(Z, config.max_ng, config.max_nc, "compact" if config.mean_value else "excess")


def _finish_cz(state, Zbar, Zhat, k, u, config, counts, x_only=False):
    _require_nonempty(Zhat, k)
    counts.update(update_ng=Zhat.n_generators, update_nc=Zhat.n_constraints)
    Zred = _reduce_cz(Zhat, config)
    try:
        hull = interval_hull(Zred)
    except EmptySetError as exc:
        raise InconsistentMeasurementError(f"empty enclosure at k={k}") from exc
    if x_only:
        hull = IntervalMatrix(np.concatenate([hull.lo, state.budget.P.interval_hull().lo]),
                              np.concatenate([hull.hi, state.budget.P.interval_hull().hi]))
    elif Zred is Zhat and state.hull is not None:
        # Without reduction the p-projection can only shrink; clip the LP
        # round-off so the reported p-hull is nested too.
        n = state.model.n
        lo = hull.lo.copy()
        hi = hull.hi.copy()
        lo[n:] = np.maximum(lo[n:], state.hull.lo[n:])
        hi[n:] = np.minimum(hi[n:], state.hull.hi[n:])
        hull = IntervalMatrix(lo, np.maximum(hi, lo))
    _check_divergence(hull, k)
    counts.update(ng=Zred.n_generators, nc=Zred.n_constraints)
    return replace(state, k=k, Z=Zred, hull=hull, u_prev=u, predicted=Zbar, counts=counts)


def joint_step(state: EstimatorState, y, u, config: EstimatorConfig) -> EstimatorState:
    """Joint prediction, generalized-intersection update, then reduction."""
    model, budget = state.model, state.budget
    Zbar = _predict(config, state.Z, model, state.u_prev, budget.W, state.hull)
    counts = dict(prior_ng=state.Z.n_generators, prior_nc=state.Z.n_constraints,
                  predict_ng=Zbar.n_generators, predict_nc=Zbar.n_constraints)
    Zhat = joint_update(Zbar, model, u, y, budget.V)
    return _finish_cz(state, Zbar, Zhat, state.k + 1, u, config, counts)


def nonjoint_step(state: EstimatorState, y, u, config: EstimatorConfig) -> EstimatorState:
    """State-only recursion: ``P`` is re-used unrefined at every step."""
    model, budget = state.model, state.budget
    n = model.n
    Zj = cartesian_product(state.Z, budget.P)
    Zbar_j = _predict(config, Zj, model, state.u_prev, budget.W, state.hull)
    Zbar = linear_map(np.eye(n, n + model.n_p), Zbar_j)
    counts = dict(prior_ng=state.Z.n_generators, prior_nc=state.Z.n_constraints,
                  predict_ng=Zbar.n_generators, predict_nc=Zbar.n_constraints)
    Zhat = gen_intersection(Zbar, model.C, measurement_set(model, u, y, budget.V, budget.P))
    return _finish_cz(state, Zbar, Zhat, state.k + 1, u, config, counts, x_only=True)


def _strip_updates(Z: Zonotope, model, u, y, V):
    R = np.hstack([model.C, model.D_p])
    Ymeas = interval_hull(measurement_set(model, u, y, V))
    mid, rad = Ymeas.mid, Ymeas.rad
    for i in range(model.n_y):
        Z = strip_update(Z, R[i], mid[i], rad[i])
    return Z


def zonotope_strip_step(state: EstimatorState, y, u, config: EstimatorConfig) -> EstimatorState:
    """Joint zonotope prediction followed by sequential strip intersections."""
    model, budget = state.model, state.budget
    k = state.k + 1
    Zbar = _predict(config, state.Z, model, state.u_prev, budget.W, state.hull)
    counts = dict(prior_ng=state.Z.n_generators, prior_nc=0,
                  predict_ng=Zbar.n_generators, predict_nc=0)
    Zhat = _strip_updates(Zbar, model, u, y, budget.V)
    counts.update(update_ng=Zhat.n_generators, update_nc=0)
    if config.max_ng is not None:
        Zhat = reduce_generators(Zhat, config.max_ng)
    hull = interval_hull(Zhat)
    _check_divergence(hull, k)
    counts.update(ng=Zhat.n_generators, nc=0)
    return replace(state, k=k, Z=Zhat, hull=hull, u_prev=u, predicted=Zbar, counts=counts)


def _fbp_contract(box: IntervalMatrix, model, u, y, V, k):
    n, n_p = model.n, model.n_p
    hv = interval_hull(V)
    lo = np.concatenate([box.lo, hv.lo])
    hi = np.concatenate([box.hi, hv.hi])
    coeff = np.hstack([model.C, model.D_p, model.D_v])
    rhs = np.asarray(y, float) - model.D_u @ np.asarray(u, float)
    for i in range(model.n_y):
        res = _contract_linear(lo, hi, coeff[i], rhs[i], rhs[i])
        if res is None:
            raise InconsistentMeasurementError(f"empty interval contraction at k={k}")
        lo, hi = res
    return IntervalMatrix(lo[: n + n_p], hi[: n + n_p])


def fbp_step(state: EstimatorState, y, u, config: EstimatorConfig) -> EstimatorState:
    """Natural interval extension forward, one contraction sweep backward."""
    model, budget = state.model, state.budget
    n = model.n
    k = state.k + 1
    box = state.Z
    fx = model.f_interval(box[:n], state.u_prev, box[n:], interval_hull(budget.W))
    pred = IntervalMatrix(np.concatenate([fx.lo, box.lo[n:]]), np.concatenate([fx.hi, box.hi[n:]]))
    new = _fbp_contract(pred, model, u, y, budget.V, k)
    _check_divergence(new, k)
    counts = dict(prior_ng=0, prior_nc=0, predict_ng=0, predict_nc=0,
                  update_ng=0, update_nc=0, ng=0, nc=0)
    return replace(state, k=k, Z=new, hull=new, u_prev=u, predicted=pred, counts=counts)


_STEPS = {"cz": None, "zonotope": zonotope_strip_step, "interval": fbp_step}


def step(state: EstimatorState, y, u, config: EstimatorConfig) -> EstimatorState:
    """Advance ``state`` from ``k`` to ``k + 1`` with measurement ``y`` and input ``u``."""
    u = np.asarray(u, dtype=float).reshape(state.model.n_u)
    if config.family == "cz":
        return (joint_step if config.joint else nonjoint_step)(state, y, u, config)
    return _STEPS[config.family](state, y, u, config)


def initial_state(model, budget: UncertaintyBudget, y0, u0, config: EstimatorConfig) -> EstimatorState:
    """Update of ``X0 × P`` (or ``X0`` alone for non-joint methods) with ``y0``."""
    budget.check(model)
    u0 = np.asarray(u0, dtype=float).reshape(model.n_u)
    config.check_budget(model.n + (model.n_p if config.joint else 0))
    base = EstimatorState(k=0, Z=None, hull=None, model=model, budget=budget, u_prev=u0)
    if config.family == "interval":
        box = IntervalMatrix(np.concatenate([interval_hull(budget.X0).lo, interval_hull(budget.P).lo]),
                             np.concatenate([interval_hull(budget.X0).hi, interval_hull(budget.P).hi]))
        new = _fbp_contract(box, model, u0, y0, budget.V, 0)
        return replace(base, Z=new, hull=new, predicted=box)
    if config.family == "zonotope":
        Zbar = cartesian_product(constraint_eliminate(budget.X0), constraint_eliminate(budget.P))
        Zhat = _strip_updates(Zbar, model, u0, y0, budget.V)
        if config.max_ng is not None:
            Zhat = reduce_generators(Zhat, config.max_ng)
        return replace(base, Z=Zhat, hull=interval_hull(Zhat), predicted=Zbar,
                       counts=dict(ng=Zhat.n_generators, nc=0))
    if config.joint:
        Zbar = cartesian_product(budget.X0, budget.P)
        Zhat = joint_update(Zbar, model, u0, y0, budget.V)
        return _finish_cz(base, Zbar, Zhat, 0, u0, config, {})
    Zhat = gen_intersection(budget.X0, model.C, measurement_set(model, u0, y0, budget.V, budget.P))
    return _finish_cz(base, budget.X0, Zhat, 0, u0, config, {}, x_only=True)


# ---------------------------------------------------------------------------
# scikit-learn style wrapper
# ---------------------------------------------------------------------------

class SetMembershipFilter(TransformerMixin, BaseEstimator):
    """Guaranteed recursive estimator of ``(x_k, p)`` from output data.

    Parameters
    ----------
    model : LinearModel or NonlinearModel
    budget : UncertaintyBudget
        Sets ``X0``, ``P``, ``W`` and ``V``.
    method : str, default="CZ-J"
        One of :data:`METHODS`.
    max_generators, max_constraints : int or None
        Complexity budget applied after each update; ``None`` disables
        reduction.
    record_sets : bool, default=True
        Keep every predicted and updated set in ``predicted_sets_`` and
        ``sets_``.

    Attributes
    ----------
    state_ : EstimatorState
    sets_ : list
        Updated enclosure per step (``Ẑ_k``).
    hulls_ : ndarray of shape (n_steps, n + n_p, 2)
        Interval hull of the ``(x, p)`` enclosure per step.
    counts_ : list of dict
        Generator/constraint counts after prediction, update and reduction.
    step_time_ms_ : ndarray of shape (n_steps,)
    """

    def __init__(self, model=None, budget=None, method="CZ-J", max_generators=70,
                 max_constraints=20, record_sets=True):
        self.model = model
        self.budget = budget
        self.method = method
        self.max_generators = max_generators
        self.max_constraints = max_constraints
        self.record_sets = record_sets

    def _config(self) -> EstimatorConfig:
        return EstimatorConfig(self.method, self.max_generators, self.max_constraints)

    def _validate(self, Y, U):
        if self.model is None or self.budget is None:
            raise ValueError("model and budget must be set")
        Y = check_array(Y, ensure_min_samples=1)
        if Y.shape[1] != self.model.n_y:
            raise ValueError(f"Y has {Y.shape[1]} columns, model has {self.model.n_y} outputs")
        if U is None:
            U = np.tile(self.model.nominal_input, (Y.shape[0], 1))
        else:
            U = check_array(U, ensure_min_features=0).reshape(Y.shape[0], self.model.n_u)
        return Y, U

    def _record(self, state, elapsed_ms):
        self.state_ = state
        if self.record_sets:
            self.sets_.append(state.Z)
            self.predicted_sets_.append(state.predicted)
        self._hulls.append(np.column_stack([state.hull.lo, state.hull.hi]))
        self.counts_.append(dict(state.counts))
        self._times.append(elapsed_ms)

    def _finalize(self):
        self.hulls_ = np.array(self._hulls)
        self.step_time_ms_ = np.array(self._times)
        self.n_steps_ = len(self._hulls)
        return self

    def fit(self, Y, U=None):
        """Run the recursion over every row of ``Y`` (row ``k`` is ``y_k``)."""
        Y, U = self._validate(Y, U)
        config = self._config()
        self.sets_, self.predicted_sets_, self.counts_ = [], [], []
        self._hulls, self._times = [], []
        t0 = time.perf_counter()
        state = initial_state(self.model, self.budget, Y[0], U[0], config)
        self._record(state, 1e3 * (time.perf_counter() - t0))
        return self._advance(Y[1:], U[1:], config)

    def partial_fit(self, Y, U=None):
        """Continue the recursion with more measurements."""
        if not hasattr(self, "state_"):
            return self.fit(Y, U)
        Y, U = self._validate(Y, U)
        return self._advance(Y, U, self._config())

    def _advance(self, Y, U, config):
        state = self.state_
        for y, u in zip(Y, U):
            t0 = time.perf_counter()
            state = step(state, y, u, config)
            self._record(state, 1e3 * (time.perf_counter() - t0))
        return self._finalize()

    def transform(self, Y, U=None):
        """Interval hulls of the enclosures obtained by filtering ``Y`` from scratch."""
        return clone(self).set_params(record_sets=False).fit(Y, U).hulls_

    def fit_transform(self, Y, y=None, U=None):
        return self.fit(Y, U).hulls_

    def contains(self, X_true, p_true, tol: float = 1e-9) -> np.ndarray:
        """Per-step membership of the true ``(x_k, p)`` in the recorded enclosures."""
        check_is_fitted(self, "sets_")
        if not self.record_sets:
            raise ValueError("contains() needs record_sets=True")
        X_true = np.atleast_2d(np.asarray(X_true, dtype=float))
        out = np.zeros(len(self.sets_), dtype=bool)
        for k, Z in enumerate(self.sets_):
            st = EstimatorState(k, Z, None, self.model, self.budget, None)
            out[k] = st.contains(X_true[k], p_true, tol)
        return out
