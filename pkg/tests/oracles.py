"""Reference computations that do not go through the package's own solver.

Membership depths are solved with scipy's HiGHS backend, hulls and areas by
explicit vertex enumeration.
"""

from itertools import combinations, product

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull


def _blkdiag(*mats):
    rows = sum(m.shape[0] for m in mats)
    cols = sum(m.shape[1] for m in mats)
    out = np.zeros((rows, cols))
    r = c = 0
    for m in mats:
        out[r:r + m.shape[0], c:c + m.shape[1]] = m
        r += m.shape[0]
        c += m.shape[1]
    return out


def depth(E, f):
    """Smallest ``s`` with ``E ξ = f`` and ``‖ξ‖∞ ≤ 1 + s``.

    ``s ≤ 0`` means the defining system has a solution in the unit box. Returns
    ``inf`` when the equalities alone are inconsistent.
    """
    E = np.atleast_2d(np.asarray(E, float))
    f = np.asarray(f, float).ravel()
    m, nv = E.shape
    # variables (ξ, s); |ξ_i| − s ≤ 1
    cost = np.zeros(nv + 1)
    cost[-1] = 1.0
    ub = np.vstack([np.hstack([np.eye(nv), -np.ones((nv, 1))]),
                    np.hstack([-np.eye(nv), -np.ones((nv, 1))])])
    bounds = [(None, None)] * nv + [(-1.0, None)]
    res = linprog(cost, A_ub=ub, b_ub=np.ones(2 * nv), A_eq=np.hstack([E, np.zeros((m, 1))]),
                  b_eq=f, bounds=bounds, method="highs")
    if res.status == 2:
        return np.inf
    assert res.status == 0, res.message
    return float(res.fun)


def depth_in_set(Z, x):
    """Depth of ``x`` in ``{c + Gξ : Aξ = b}``."""
    E = np.vstack([Z.G, Z.A])
    return depth(E, np.concatenate([np.asarray(x, float) - Z.c, Z.b]))


def depth_linear_map(R, Z, x):
    """``x ∈ R Z``: ∃ z ∈ Z with R z = x."""
    R = np.atleast_2d(R)
    E = np.vstack([R @ Z.G, Z.A])
    return depth(E, np.concatenate([np.asarray(x, float) - R @ Z.c, Z.b]))


def depth_sum(Z, W, x):
    """``x ∈ Z ⊕ W``: ∃ z ∈ Z, w ∈ W with z + w = x."""
    E = np.vstack([np.hstack([Z.G, W.G]), _blkdiag(Z.A, W.A)])
    return depth(E, np.concatenate([np.asarray(x, float) - Z.c - W.c, Z.b, W.b]))


def depth_gen_intersection(Z, R, Y, x):
    """``x ∈ Z ∩_R Y``: x ∈ Z and R x ∈ Y."""
    R = np.atleast_2d(R)
    x = np.asarray(x, float)
    E = np.vstack([_blkdiag(Z.G, Y.G), _blkdiag(Z.A, Y.A)])
    return depth(E, np.concatenate([x - Z.c, R @ x - Y.c, Z.b, Y.b]))


def depth_product(Z, W, x):
    """``x ∈ Z × W``: both factors are members."""
    E = np.vstack([_blkdiag(Z.G, W.G), _blkdiag(Z.A, W.A)])
    return depth(E, np.concatenate([np.asarray(x, float) - np.concatenate([Z.c, W.c]), Z.b, W.b]))


def xi_vertices(A, b, tol=1e-9):
    """All vertices of ``{ξ ∈ [−1, 1]^n : A ξ = b}`` by enumeration."""
    A = np.atleast_2d(np.asarray(A, float))
    b = np.asarray(b, float).ravel()
    m, n = A.shape
    if m == 0:
        return np.array(list(product((-1.0, 1.0), repeat=n)))
    out = []
    for free in combinations(range(n), m):
        free = list(free)
        B = A[:, free]
        if abs(np.linalg.det(B)) < 1e-12:
            continue
        fixed = [j for j in range(n) if j not in free]
        for signs in product((-1.0, 1.0), repeat=len(fixed)):
            xi = np.zeros(n)
            xi[fixed] = signs
            xi[free] = np.linalg.solve(B, b - A[:, fixed] @ np.asarray(signs))
            if np.all(np.abs(xi) <= 1 + tol):
                out.append(xi)
    return np.array(out).reshape(-1, n)


def hull_by_vertices(Z):
    """Interval hull from the enumerated vertex set, as ``(lo, hi)``."""
    V = xi_vertices(Z.A, Z.b)
    if V.size == 0:
        raise ValueError("empty set")
    pts = Z.c + V @ Z.G.T
    return pts.min(axis=0), pts.max(axis=0)


def area_by_vertices(Z, dims=(0, 1)):
    """Exact area of a 2-D projection from the enumerated vertices."""
    V = xi_vertices(Z.A, Z.b)
    pts = (Z.c + V @ Z.G.T)[:, list(dims)]
    return float(ConvexHull(pts).volume)


def zonotope_area(G):
    """Area of the planar zonotope ``{Gξ : ‖ξ‖∞ ≤ 1}``: ``4 Σ_{i<j} |det(g_i, g_j)|``."""
    G = np.asarray(G, float)
    total = 0.0
    for i, j in combinations(range(G.shape[1]), 2):
        total += abs(G[0, i] * G[1, j] - G[1, i] * G[0, j])
    return 4.0 * total


def box_lp_brute_force(obj, A, b):
    """Minimum of ``obj·ξ`` over ``B∞(A, b)`` by vertex enumeration, or None."""
    V = xi_vertices(A, b)
    if V.size == 0:
        return None
    return float((V @ np.asarray(obj, float)).min())


def random_cz(rng, n, ng, nc, scale=1.0):
    """Random nonempty constrained zonotope (a feasible ξ is planted)."""
    from czjoint import ConstrainedZonotope

    G = rng.normal(size=(n, ng)) * scale
    c = rng.normal(size=n)
    A = rng.normal(size=(nc, ng))
    xi0 = rng.uniform(-0.6, 0.6, size=ng)
    return ConstrainedZonotope(G, c, A, A @ xi0)


def sample_members(Z, rng, count):
    """Members of ``Z`` as convex combinations of its vertices."""
    V = xi_vertices(Z.A, Z.b)
    w = rng.dirichlet(np.ones(len(V)) * 0.5, size=count)
    return Z.c + (w @ V) @ Z.G.T
