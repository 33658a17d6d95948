"""Acceptance criteria, one test each.

Every test prints a single ``[PASS]``/``[FAIL]`` line, also collected into the
terminal summary by ``conftest.py``.
"""

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from czjoint import ConstrainedZonotope, IntervalMatrix, SetMembershipFilter, bench
from czjoint.czsets import (
    cartesian_product,
    contains_point,
    cz_inclusion,
    gen_intersection,
    interval_hull,
    linear_map,
    minkowski_sum,
)
from czjoint.estimators import linear_joint_predict, nonlinear_joint_predict
from oracles import (
    depth_gen_intersection,
    depth_linear_map,
    depth_product,
    depth_sum,
    hull_by_vertices,
    random_cz,
    sample_members,
    xi_vertices,
)


class Criterion:
    def __init__(self, name):
        self.name = name
        self.detail = ""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        status = "PASS" if exc_type is None else "FAIL"
        detail = self.detail if exc_type is None else f"{self.detail} {exc_type.__name__}: {exc}".strip()
        line = f"[{status}] {self.name}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return False


def test_guaranteed_containment(linear_batch, nonlinear_run):
    with Criterion("guaranteed containment") as c:
        lin, _, t_lin = linear_batch
        nl, _, t_nl = nonlinear_run
        checked = lin.report.checked + nl.report.checked
        violations = lin.report.violations + nl.report.violations
        errors = lin.report.errors + nl.report.errors
        rows_false = sum(not r.contains_truth for s in range(10) for r in lin.rows[s])
        rows_false += sum(not r.contains_truth for m in nl.rows for r in nl.rows[m])
        c.detail = (f"{checked} steps checked, {len(violations)} violations, {len(errors)} errors, "
                    f"benchmarks took {t_lin + t_nl:.0f} s")
        assert checked == 10 * 4 * 201 + 4 * 151
        assert not violations and not errors and rows_false == 0
        assert t_lin + t_nl < 600


def _exactness_instance(rng, op):
    n = int(rng.integers(1, 4))
    ng = int(rng.integers(1, 6))
    nc = int(rng.integers(0, min(ng, 3)))
    Z = random_cz(rng, n, ng, nc)
    if op == "linear_map":
        m = int(rng.integers(1, 4))
        R = rng.normal(size=(m, n))
        res = linear_map(R, Z)
        inside = sample_members(Z, rng, 5) @ R.T
        return res, inside, lambda x: depth_linear_map(R, Z, x)
    ngw = int(rng.integers(1, 6))
    W = random_cz(rng, n, ngw, int(rng.integers(0, min(ngw, 3))))
    if op == "minkowski_sum":
        res = minkowski_sum(Z, W)
        inside = sample_members(Z, rng, 5) + sample_members(W, rng, 5)
        return res, inside, lambda x: depth_sum(Z, W, x)
    if op == "cartesian_product":
        res = cartesian_product(Z, W)
        inside = np.hstack([sample_members(Z, rng, 5), sample_members(W, rng, 5)])
        return res, inside, lambda x: depth_product(Z, W, x)
    m = int(rng.integers(1, 3))
    R = rng.normal(size=(m, n))
    z0 = sample_members(Z, rng, 1)[0]
    Y = random_cz(rng, m, int(rng.integers(1, 4)), 0, scale=0.8)
    Y = ConstrainedZonotope(Y.G, R @ z0, Y.A, Y.b)
    res = gen_intersection(Z, R, Y)
    cand = sample_members(Z, rng, 200)
    keep = [x for x in cand if depth_gen_intersection(Z, R, Y, x) < -1e-6][:5]
    inside = np.array(keep + [z0])
    return res, inside, lambda x: depth_gen_intersection(Z, R, Y, x)


def test_cz_calculus_exactness():
    with Criterion("exactness of the CZ operations") as c:
        rng = np.random.default_rng(2024)
        ops = ("linear_map", "minkowski_sum", "gen_intersection", "cartesian_product")
        n_inst, agree_in, agree_out, mismatches = 0, 0, 0, []
        for i in range(240):
            op = ops[i % 4]
            res, inside, oracle = _exactness_instance(rng, op)
            r = np.abs(res.G).sum(axis=1)
            outside = res.c + rng.uniform(-1.5, 1.5, size=(12, res.dim)) * (r + 0.1)
            for x in np.vstack([inside, outside]):
                s = oracle(x)
                if abs(s) < 1e-7:
                    continue
                got = contains_point(res, x)
                if got != (s < 0):
                    mismatches.append((i, op, s))
                elif got:
                    agree_in += 1
                else:
                    agree_out += 1
            n_inst += 1
        c.detail = (f"{n_inst} instances, {agree_in} members and {agree_out} non-members agree, "
                    f"{len(mismatches)} mismatches")
        assert n_inst >= 200 and not mismatches
        assert agree_in > 0 and agree_out > 0


def test_cz_inclusion_soundness():
    with Criterion("CZ-inclusion soundness") as c:
        rng = np.random.default_rng(77)
        n_pairs, fallback, misses = 0, 0, 0
        for _ in range(50):
            n = int(rng.integers(2, 4))
            ng = int(rng.integers(n, 6))
            X = random_cz(rng, n, ng, int(rng.integers(0, min(ng - 1, 2) + 1)))
            mid = rng.normal(size=(n, n))
            rad = rng.uniform(0, 0.3, size=(n, n))
            J = IntervalMatrix(mid - rad, mid + rad)
            S = cz_inclusion(J, X)
            V = xi_vertices(X.A, X.b)
            w = rng.dirichlet(np.ones(len(V)) * 0.5, size=10_000)
            xis = w @ V
            xs = X.c + xis @ X.G.T
            Js = rng.uniform(J.lo, J.hi, size=(10_000, n, n))
            ys = np.einsum("kij,kj->ki", Js, xs)
            # witness: the x-part reuses ξ, the box part takes the rest
            rest = ys - xs @ J.mid.T
            Pdiag = S.G[:, X.n_generators:].diagonal() if S.n_generators > X.n_generators else np.zeros(n)
            with np.errstate(divide="ignore", invalid="ignore"):
                xi_box = np.where(Pdiag > 0, rest / Pdiag, 0.0)
            full = np.hstack([xis, xi_box])
            ok = ((np.abs(full) <= 1 + 1e-9).all(axis=1)
                  & (np.abs(S.c + full @ S.G.T - ys) <= 1e-9 * (1 + np.abs(ys))).all(axis=1)
                  & (np.abs(full @ S.A.T - S.b) <= 1e-9).all(axis=1))
            for y in ys[~ok]:
                fallback += 1
                misses += not contains_point(S, y, 1e-7)
            n_pairs += len(ys)
        rng2 = np.random.default_rng(5)
        worst = 0.0
        for _ in range(20):
            X = random_cz(rng2, 3, 5, 2)
            M = rng2.normal(size=(3, 3))
            h1 = interval_hull(cz_inclusion(IntervalMatrix(M), X))
            h2 = interval_hull(linear_map(M, X))
            worst = max(worst, np.abs(h1.lo - h2.lo).max(), np.abs(h1.hi - h2.hi).max())
        c.detail = (f"{n_pairs} sampled (J, x) pairs over 50 instances, {misses} outside "
                    f"({fallback} checked by LP); zero-radius hull gap {worst:.1e}")
        assert misses == 0
        assert worst <= 1e-9


def test_interval_hull_brute_force():
    with Criterion("interval hull vs vertex enumeration") as c:
        rng = np.random.default_rng(11)
        worst = 0.0
        for _ in range(150):
            n = int(rng.integers(1, 4))
            ng = int(rng.integers(1, 7))
            nc = int(rng.integers(0, min(ng, 4)))
            Z = random_cz(rng, n, ng, nc)
            lo, hi = hull_by_vertices(Z)
            h = interval_hull(Z)
            worst = max(worst, np.abs(h.lo - lo).max(), np.abs(h.hi - hi).max())
        c.detail = f"150 instances with at most 6 generators, max deviation {worst:.1e}"
        assert worst <= 1e-6


def test_linear_benchmark_ordering(linear_batch):
    with Criterion("linear benchmark ordering") as c:
        s = linear_batch[0].summary
        rx = {m: s[m]["mean_radius_x"] for m in s}
        rp = {m: s[m]["mean_radius_p"] for m in s}
        c.detail = ("k=200 x: " + ", ".join(f"{m} {v:.3f}" for m, v in rx.items())
                    + f"; p: CZ-J {rp['CZ-J']:.3f}, FBP {rp['FBP']:.3f}")
        assert rx["CZ-J"] < rx["CZ"] and rx["CZ-J"] < rx["Z-J"] and rx["CZ-J"] < rx["FBP"]
        assert rp["CZ-J"] < 0.5
        assert abs(rp["FBP"] - 0.5) < 0.05


def test_nonlinear_summary_ratios(nonlinear_run):
    with Criterion("nonlinear summary ratios") as c:
        s = nonlinear_run[0].summary
        c.detail = f"area ratio {s['area_ratio']:.3f}, p-radius ratio {s['radius_p_ratio']:.3f}"
        assert 0.56 <= s["area_ratio"] <= 0.86
        assert 0.19 <= s["radius_p_ratio"] <= 0.49


def test_parameter_monotonicity():
    with Criterion("parameter monotonicity without reduction") as c:
        model, budget, traj = bench.linear_fixture(0, 20)
        f = SetMembershipFilter(model, budget, "CZ-J", None, None, record_sets=False).fit(traj.y, traj.u)
        h = f.hulls_[:, model.n:, :]
        rad = 0.5 * (h[:, :, 1] - h[:, :, 0])
        increases = int((np.diff(rad, axis=0) > 0).sum())
        c.detail = f"21 steps, {increases} increases, final mean radius {rad[-1].mean():.4f}"
        assert increases == 0
        assert np.all(np.diff(h[:, :, 0], axis=0) >= 0) and np.all(np.diff(h[:, :, 1], axis=0) <= 0)


def test_affine_collapse():
    with Criterion("affine collapse of the mean-value predictor") as c:
        model, budget, traj = bench.linear_fixture(3, 20)
        f = SetMembershipFilter(model, budget, "CZ-J").fit(traj.y, traj.u)
        worst = 0.0
        for k in range(20):
            Z = f.sets_[k]
            h_lin = interval_hull(linear_joint_predict(Z, model, traj.u[k], budget.W))
            for m in (model, model.as_nonlinear()):
                h_mv = interval_hull(nonlinear_joint_predict(Z, m, traj.u[k], budget.W))
                worst = max(worst, np.abs(h_mv.lo - h_lin.lo).max(), np.abs(h_mv.hi - h_lin.hi).max())
        c.detail = f"20 steps, max hull difference {worst:.1e}"
        assert worst <= 1e-9


@pytest.mark.parametrize("case", ["nonlinear", "linear"])
def test_set_size_accounting(case):
    with Criterion(f"set-size accounting ({case})") as c:
        if case == "nonlinear":
            model, budget, traj = bench.nonlinear_fixture(0, 40)
            method, extra = "CZMV-J", 2 * model.n + budget.W.n_generators
            f = SetMembershipFilter(model, budget, method, 8, 3, record_sets=False)
        else:
            model, budget, traj = bench.linear_fixture(1, 40)
            method, extra = "CZ-J", budget.W.n_generators
            f = SetMembershipFilter(model, budget, method, record_sets=False)
        f.fit(traj.y, traj.u)
        bad = []
        for k, cnt in enumerate(f.counts_[1:], start=1):
            expect = (cnt["prior_ng"] + extra,
                      cnt["prior_nc"] + budget.W.n_constraints,
                      cnt["predict_ng"] + budget.V.n_generators,
                      cnt["predict_nc"] + budget.V.n_constraints + model.n_y)
            got = (cnt["predict_ng"], cnt["predict_nc"], cnt["update_ng"], cnt["update_nc"])
            if got != expect:
                bad.append((k, got, expect))
        c.detail = f"{method}, {len(f.counts_) - 1} steps, {len(bad)} mismatches"
        assert not bad
