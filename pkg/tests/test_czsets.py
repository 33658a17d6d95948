import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from czjoint import ConstrainedZonotope, EmptySetError, IntervalMatrix, Zonotope
from czjoint.czsets import (
    ReductionBudgetError,
    cartesian_product,
    constraint_eliminate,
    contains_point,
    cz_inclusion,
    eliminate_one_constraint,
    from_text,
    gen_intersection,
    interval_hull,
    linear_map,
    minkowski_sum,
    projection_area_2d,
    reduce,
    to_text,
    xi_bounds,
)
from oracles import area_by_vertices, random_cz, sample_members, zonotope_area

SQUARE = ConstrainedZonotope.from_box([-1, -1], [1, 1])


def slab():
    return gen_intersection(SQUARE, np.array([[1.0, 0.0]]), ConstrainedZonotope.from_box([0.5], [1.5]))


def hull_close(Z, lo, hi, tol=1e-9):
    h = interval_hull(Z)
    np.testing.assert_allclose(h.lo, lo, atol=tol)
    np.testing.assert_allclose(h.hi, hi, atol=tol)


# -- exact operations --------------------------------------------------------

def test_linear_map_formula():
    Z = ConstrainedZonotope.from_box([0, -1], [2, 1])
    R = np.diag([2.0, 1.0])
    out = linear_map(R, Z)
    np.testing.assert_array_equal(out.G, np.diag([2.0, 1.0]))
    np.testing.assert_array_equal(out.c, [2.0, 0.0])


def test_linear_map_by_zero_is_origin():
    out = linear_map(np.zeros((2, 2)), SQUARE)
    hull_close(out, [0, 0], [0, 0])


def test_linear_map_contains_sampled_images():
    rng = np.random.default_rng(0)
    Z = random_cz(rng, 3, 5, 2)
    R = rng.normal(size=(2, 3))
    out = linear_map(R, Z)
    assert all(contains_point(out, R @ z) for z in Z.sample(1000, rng))
    with pytest.raises(ValueError):
        linear_map(np.eye(2), Z)


def test_minkowski_sum_examples():
    I = ConstrainedZonotope.from_box([-1], [1])
    hull_close(minkowski_sum(I, I), [-2], [2])
    moved = minkowski_sum(SQUARE, ConstrainedZonotope.from_point([3.0, -1.0]))
    hull_close(moved, [2, -2], [4, 0])
    with pytest.raises(ValueError):
        minkowski_sum(I, SQUARE)


def test_minkowski_sum_of_zonotopes_adds_hulls():
    rng = np.random.default_rng(1)
    Z = Zonotope(rng.normal(size=(3, 4)), rng.normal(size=3))
    W = Zonotope(rng.normal(size=(3, 2)), rng.normal(size=3))
    S = minkowski_sum(Z, W)
    hz, hw = interval_hull(Z), interval_hull(W)
    hull_close(S, hz.lo + hw.lo, hz.hi + hw.hi)
    zs, ws = Z.sample(300, rng), W.sample(300, rng)
    assert all(contains_point(S, z + w) for z, w in zip(zs, ws))


def test_gen_intersection_slab():
    S = slab()
    assert contains_point(S, [0.75, 0.0])
    assert not contains_point(S, [0.4, 0.0])
    hull_close(S, [0.5, -1], [1, 1])


def test_gen_intersection_vacuous_and_disjoint():
    big = ConstrainedZonotope.from_box([-5, -5], [5, 5])
    S = gen_intersection(SQUARE, np.eye(2), big)
    rng = np.random.default_rng(2)
    for x in rng.uniform(-1.5, 1.5, size=(100, 2)):
        assert contains_point(S, x) == bool(np.all(np.abs(x) <= 1))
    far = ConstrainedZonotope.from_box([3, 3], [4, 4])
    E = gen_intersection(SQUARE, np.eye(2), far)
    assert E.is_empty
    with pytest.raises(EmptySetError):
        interval_hull(E)


def test_gen_intersection_counts():
    rng = np.random.default_rng(3)
    Z = random_cz(rng, 3, 5, 2)
    Y = random_cz(rng, 2, 3, 1)
    S = gen_intersection(Z, rng.normal(size=(2, 3)), Y)
    assert S.n_generators == 8 and S.n_constraints == 2 + 1 + 2
    assert minkowski_sum(Z, random_cz(rng, 3, 4, 1)).n_generators == 9


def test_cartesian_product_examples():
    P = cartesian_product(ConstrainedZonotope.from_box([-1], [1]), ConstrainedZonotope.from_box([2], [4]))
    np.testing.assert_array_equal(P.G, np.eye(2))
    np.testing.assert_array_equal(P.c, [0, 3])
    E = cartesian_product(SQUARE, ConstrainedZonotope.from_point([7.0]))
    hull_close(E, [-1, -1, 7], [1, 1, 7])


# -- hulls and membership ----------------------------------------------------

def test_hull_examples():
    hull_close(SQUARE, [-1, -1], [1, 1])
    hull_close(Zonotope([[1, 1], [1, -1]], [0, 0]), [-2, -2], [2, 2])
    # grid brute force over the single free generator variable of the slab
    S = slab()
    grid = np.linspace(-1, 1, 401)
    pts = np.array([S.c + S.G @ np.array([a, b, t]) for a in grid[::10] for b in grid[::10]
                    for t in grid[::50] if abs((S.A @ np.array([a, b, t]) - S.b)[0]) < 1e-12])
    h = interval_hull(S)
    assert np.all(pts.min(axis=0) >= h.lo - 1e-9) and np.all(pts.max(axis=0) <= h.hi + 1e-9)


def test_contains_examples():
    Z = ConstrainedZonotope([[1.0, 0.5]], [2.0], [[1.0, -1.0]], [0.0])
    assert contains_point(Z, Z.c)
    assert contains_point(SQUARE, [1.0, 1.0])
    assert not contains_point(SQUARE, [1.1, 0.0])
    with pytest.raises(ValueError):
        contains_point(SQUARE, [0.0])


# -- elimination and reduction -----------------------------------------------

def test_eliminate_without_constraints_is_identity():
    Z = Zonotope([[1.0, 2.0]], [0.5])
    out = constraint_eliminate(Z)
    np.testing.assert_array_equal(out.G, Z.G)
    np.testing.assert_array_equal(out.c, Z.c)


def test_eliminate_slab():
    S = slab()
    Zt = constraint_eliminate(S)
    assert isinstance(Zt, Zonotope)
    assert Zt.n_generators == S.n_generators - S.n_constraints
    rng = np.random.default_rng(4)
    assert all(contains_point(Zt, x) for x in S.sample(1000, rng))


def test_eliminate_detects_empty_constraint_rows():
    Z = ConstrainedZonotope([[1.0, 1.0]], [0.0], [[1.0, 1.0]], [3.0])
    with pytest.raises(EmptySetError):
        constraint_eliminate(Z)


def test_xi_bounds_propagation():
    lo, hi = xi_bounds(np.array([[1.0, 1.0]]), np.array([1.5]))
    np.testing.assert_allclose(lo, [0.5, 0.5], atol=1e-12)
    np.testing.assert_allclose(hi, [1, 1])
    assert xi_bounds(np.array([[1.0, 1.0]]), np.array([3.0])) is None


@pytest.mark.parametrize("rule", ["excess", "compact"])
def test_single_elimination_is_sound(rule):
    rng = np.random.default_rng(5)
    for _ in range(10):
        Z = random_cz(rng, 3, 6, 2)
        E = eliminate_one_constraint(Z, rule)
        assert E.n_constraints == 1 and E.n_generators == 5
        assert all(contains_point(E, x, 1e-7) for x in sample_members(Z, rng, 60))


def test_reduce_examples():
    rng = np.random.default_rng(6)
    Z = random_cz(rng, 2, 5, 1)
    assert reduce(Z, 10, 2) is Z
    big = random_cz(rng, 3, 14, 5)
    small = reduce(big, 8, 2)
    assert small.n_generators <= 8 and small.n_constraints <= 2
    assert all(contains_point(small, x, 1e-7) for x in big.sample(1000, rng))
    with pytest.raises(ReductionBudgetError):
        reduce(big, 4, 2)


def test_reduce_at_linear_benchmark_budget():
    rng = np.random.default_rng(7)
    Z = random_cz(rng, 16, 100, 30, scale=0.2)
    R = reduce(Z, 70, 20)
    assert R.n_generators <= 70 and R.n_constraints <= 20
    assert all(contains_point(R, x, 1e-7) for x in Z.sample(200, rng))


@given(st.integers(0, 10_000))
def test_reduction_chain_is_sound(seed):
    rng = np.random.default_rng(seed)
    Z = random_cz(rng, 2, 7, 3)
    for out in (constraint_eliminate(Z), reduce(Z, 4, 1), reduce(Z, 5, 2, "compact")):
        assert all(contains_point(out, x, 1e-7) for x in sample_members(Z, rng, 20))


# -- CZ-inclusion --------------------------------------------------------------

def test_cz_inclusion_scalar_example():
    J = IntervalMatrix([[0.9]], [[1.1]])
    S = cz_inclusion(J, ConstrainedZonotope.from_box([-1], [1]))
    hull_close(S, [-1.1], [1.1], tol=1e-12)
    x = np.linspace(-1, 1, 101)
    j = np.linspace(0.9, 1.1, 101)
    prods = np.outer(j, x)
    assert prods.min() >= -1.1 - 1e-12 and prods.max() <= 1.1 + 1e-12


def test_cz_inclusion_point_matrix_is_linear_map():
    rng = np.random.default_rng(8)
    X = random_cz(rng, 2, 4, 1)
    M = rng.normal(size=(2, 2))
    h1, h2 = interval_hull(cz_inclusion(IntervalMatrix(M), X)), interval_hull(linear_map(M, X))
    np.testing.assert_allclose(h1.lo, h2.lo, atol=1e-12)
    np.testing.assert_allclose(h1.hi, h2.hi, atol=1e-12)


def test_cz_inclusion_random_containment():
    rng = np.random.default_rng(9)
    X = random_cz(rng, 2, 4, 1)
    mid = rng.normal(size=(2, 2))
    J = IntervalMatrix(mid - 0.2, mid + 0.2)
    S = cz_inclusion(J, X)
    xs = sample_members(X, rng, 300)
    Js = rng.uniform(J.lo, J.hi, size=(300, 2, 2))
    assert all(contains_point(S, Jk @ x, 1e-8) for Jk, x in zip(Js, xs))
    with pytest.raises(ValueError):
        cz_inclusion(IntervalMatrix(np.zeros((2, 3))), X)


# -- areas ---------------------------------------------------------------------

def test_area_examples():
    assert projection_area_2d(SQUARE) == pytest.approx(4.0)
    assert projection_area_2d(linear_map(np.diag([2.0, 1.0]), SQUARE)) == pytest.approx(8.0)
    assert projection_area_2d(slab()) == pytest.approx(1.0, abs=1e-9)
    assert projection_area_2d(slab(), n_directions=None) == pytest.approx(1.0, abs=1e-12)


def test_sampled_area_converges_on_zonotopes():
    rng = np.random.default_rng(10)
    for _ in range(20):
        G = rng.normal(size=(2, int(rng.integers(2, 7))))
        Z = Zonotope(G, rng.normal(size=2))
        exact = zonotope_area(G)
        a90, a720 = projection_area_2d(Z, n_directions=90), projection_area_2d(Z, n_directions=720)
        assert a90 <= a720 + 1e-9 <= exact + 2e-9
        assert a720 >= 0.99 * exact
        assert projection_area_2d(Z, n_directions=None) == pytest.approx(exact, rel=1e-9)


def test_exact_area_of_constrained_sets():
    rng = np.random.default_rng(11)
    for _ in range(15):
        Z = random_cz(rng, 3, 5, 2)
        dims = (0, 2)
        assert projection_area_2d(Z, dims, None) == pytest.approx(area_by_vertices(Z, dims), rel=1e-7, abs=1e-9)


# -- serialization -------------------------------------------------------------

def test_text_round_trip():
    rng = np.random.default_rng(12)
    for Z in (random_cz(rng, 3, 4, 2), Zonotope(np.eye(2), [1.0, 2.0])):
        back = from_text(to_text(Z))
        assert type(back) is type(Z)
        for name in ("G", "c", "A", "b"):
            np.testing.assert_array_equal(getattr(back, name), getattr(Z, name))
