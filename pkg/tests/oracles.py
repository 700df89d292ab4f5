"""Independent reference computations used to freeze and cross-check values.

None of these import the code paths they check: LPs by vertex enumeration,
intersection numbers from the circuit relation with an explicit curve, linear
systems by brute-force lattice enumeration, graded algebras by Minkowski sums.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import mpmath
import numpy as np
import sympy


# -- linear programming ------------------------------------------------------


def lp_vertex_min(constraints, objective):
    """min c.x over {a.x >= b} in R^n by enumerating vertices (tight n-subsets).

    The region is intersected with boxes of two sizes; None when infeasible,
    "unbounded" when the two boxed optima differ.
    """
    n = len(objective)
    cons = [(list(map(Fraction, a)), Fraction(b)) for a, b in constraints]
    values = []
    for big in (Fraction(10**4), Fraction(10**6)):
        boxed = cons + [([Fraction(int(i == k)) for i in range(n)], -big) for k in range(n)]
        boxed += [([Fraction(-int(i == k)) for i in range(n)], -big) for k in range(n)]
        best = None
        for rows in itertools.combinations(boxed, n):
            M = sympy.Matrix([[x for x in a] for a, _ in rows])
            if M.det() == 0:
                continue
            sol = M.solve(sympy.Matrix([b for _, b in rows]))
            x = [Fraction(int(sympy.fraction(v)[0]), int(sympy.fraction(v)[1])) for v in sol]
            if all(sum(ai * xi for ai, xi in zip(a, x)) >= b for a, b in boxed):
                val = sum(ci * xi for ci, xi in zip(map(Fraction, objective), x))
                if best is None or val < best:
                    best = val
        if best is None:
            return None
        values.append(best)
    return values[0] if values[0] == values[1] else "unbounded"


# -- intersection numbers ---------------------------------------------------


def wall_intersections(rays, cone_a, cone_b, D):
    """D . C for the curve of the wall between two full-dimensional simplicial cones.

    Uses the linear relation among the n + 1 rays of the two cones, normalised
    so the coefficient of the ray opposite the wall in ``cone_b`` is
    mult(wall) / mult(cone_b) (the standard wall relation).
    """
    shared = sorted(set(cone_a) & set(cone_b))
    (p,) = set(cone_a) - set(shared)
    (q,) = set(cone_b) - set(shared)
    idx = [p, q] + shared
    M = sympy.Matrix([list(rays[i]) for i in idx]).T
    ns = M.nullspace()
    assert len(ns) == 1
    rel = ns[0] / ns[0][1]
    n = len(rays[0])
    wall_gcd = _minor_gcd([rays[i] for i in shared], n)
    mult_b = abs(sympy.Matrix([list(rays[i]) for i in cone_b]).det())
    scale = sympy.Rational(wall_gcd, mult_b)
    coeff = {i: rel[k] * scale for k, i in enumerate(idx)}
    total = sum(coeff.get(i, 0) * sympy.Rational(D[i].numerator, D[i].denominator) for i in range(len(rays)))
    return Fraction(int(sympy.fraction(total)[0]), int(sympy.fraction(total)[1]))


def _minor_gcd(vectors, n):
    k = len(vectors)
    M = sympy.Matrix([list(v) for v in vectors])
    g = 0
    for cols in itertools.combinations(range(n), k):
        g = sympy.igcd(g, M[:, list(cols)].det())
    return abs(int(g))


# -- linear systems ----------------------------------------------------------


def brute_lattice_points(rays, D, radius=None):
    """{m in Z^n : <m, v_i> >= -floor(a_i)} by scanning a cube."""
    n = len(rays[0])
    a = [Fraction(x).__floor__() for x in D]
    if radius is None:
        # smooth cones: cofactor bound on the vertices
        top = max(abs(x) for r in rays for x in r)
        radius = (sum(abs(x) for x in a) + 1) * math.factorial(n - 1) * top ** (n - 1) + 1
    grid = np.array(list(itertools.product(range(-radius, radius + 1), repeat=n)), dtype=np.int64)
    V = np.array(rays, dtype=np.int64)
    keep = np.all(grid @ V.T >= -np.array(a, dtype=np.int64), axis=1)
    return {tuple(int(x) for x in p) for p in grid[keep]}


def brute_fix(rays, D, radius=None):
    pts = brute_lattice_points(rays, D, radius)
    if not pts:
        return None
    return tuple(min(sum(m[k] * v[k] for k in range(len(v))) for m in pts) + Fraction(a) for v, a in zip(rays, D))


# -- graded algebras ----------------------------------------------------------


def _minkowski(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    S = (A[:, None, :] + B[None, :, :]).reshape(-1, A.shape[1])
    return np.unique(S, axis=0)


def semigroup_generated(points_of_degree, i: int, top: int) -> bool:
    """Is the truncated algebra in degrees i, 2i, ... generated in its first degree?

    ``points_of_degree(k)`` returns the monomial exponents of degree k.
    """
    base = np.array(sorted(points_of_degree(i)), dtype=np.int64)
    if len(base) == 0:
        return False
    acc = base
    for k in range(2, top // i + 1):
        acc = _minkowski(acc, base)
        target = points_of_degree(i * k)
        have = {tuple(int(x) for x in p) for p in acc}
        if not set(target) <= have:
            return False
    return True


def least_generating_index(points_of_degree, top: int = 20):
    for i in range(1, top // 2 + 1):
        if semigroup_generated(points_of_degree, i, top):
            return i
    return None


def restriction_rank(rays, D, s: int, radius=None) -> int:
    """Rank of H0(D) -> H0(S_s) in the monomial basis, by explicit matrix."""
    pts = sorted(brute_lattice_points(rays, D, radius))
    if not pts:
        return 0
    a_s = Fraction(D[s]).__floor__()
    v = rays[s]
    # restriction of chi^m is the character m on S when <m, v_s> = -a_s, else 0
    images = sorted({m for m in pts if sum(x * y for x, y in zip(m, v)) == -a_s})
    col = {m: k for k, m in enumerate(images)}
    if not images:
        return 0
    M = np.zeros((len(pts), len(images)), dtype=np.int64)
    for r, m in enumerate(pts):
        if m in col:
            M[r, col[m]] = 1
    return int(np.linalg.matrix_rank(M))


# -- high precision re-verification ----------------------------------------------


def mp_value(x, dps: int = 100):
    with mpmath.workdps(dps):
        if hasattr(x, "disc"):
            return mpmath.mpf(x.a.numerator) / x.a.denominator + mpmath.mpf(x.b.numerator) / x.b.denominator * mpmath.sqrt(x.disc)
        x = Fraction(x)
        return mpmath.mpf(x.numerator) / x.denominator


def mp_certificate_ok(E, d, eps, j, m, dps: int = 100) -> bool:
    with mpmath.workdps(dps):
        dv = [mp_value(x, dps) for x in d]
        res = [sum(e * (j * x - mk) for e, x, mk in zip(row, dv, m)) for row in E]
        e = mp_value(eps, dps)
        return all(abs(r) < e for r in res) and any(r < 0 for r in res)
