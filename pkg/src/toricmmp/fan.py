"""Simplicial fans, torus-invariant divisors and their lattice polytopes.

Conventions: a divisor is ``D = sum a_i D_i`` over the rays; its Cartier
data on a full-dimensional cone sigma is the m_sigma with
``<m_sigma, v_i> = -a_i`` for every ray of sigma, and sections of O(D) are
the lattice points of ``P_D = {m : <m, v_i> >= -a_i}``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    EmptyLinearSystem,
    InputError,
    NonIntegralDivisor,
    NonSimplicialFan,
)
from .kernel import (
    UNBOUNDED,
    as_rat,
    ceil_rat,
    det,
    dot,
    floor_rat,
    gcd_of_minors,
    integer_vector,
    lcm_denominators,
    lp_minimize,
    lp_solve,
    nullspace,
    rank,
    rat_str,
    solve,
)

MAX_CANDIDATES = 10**6


@dataclass(frozen=True)
class TorusDivisor:
    """Rational combination of the torus-invariant prime divisors of a fan."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(as_rat(c) for c in self.coeffs))

    @classmethod
    def zero(cls, n: int) -> "TorusDivisor":
        return cls((0,) * n)

    @classmethod
    def prime(cls, n: int, i: int, coeff=1) -> "TorusDivisor":
        c = [0] * n
        c[i] = coeff
        return cls(tuple(c))

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i]

    def __iter__(self):
        return iter(self.coeffs)

    @property
    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    @property
    def is_effective(self) -> bool:
        return all(c >= 0 for c in self.coeffs)

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __add__(self, other: "TorusDivisor") -> "TorusDivisor":
        return TorusDivisor(tuple(a + b for a, b in zip(self.coeffs, other.coeffs, strict=True)))

    def __sub__(self, other: "TorusDivisor") -> "TorusDivisor":
        return TorusDivisor(tuple(a - b for a, b in zip(self.coeffs, other.coeffs, strict=True)))

    def __neg__(self):
        return TorusDivisor(tuple(-a for a in self.coeffs))

    def __mul__(self, k) -> "TorusDivisor":
        k = as_rat(k)
        return TorusDivisor(tuple(k * a for a in self.coeffs))

    __rmul__ = __mul__

    def __truediv__(self, k) -> "TorusDivisor":
        k = as_rat(k)
        return TorusDivisor(tuple(a / k for a in self.coeffs))

    def floor(self) -> "TorusDivisor":
        return TorusDivisor(tuple(floor_rat(a) for a in self.coeffs))

    def ceil(self) -> "TorusDivisor":
        return TorusDivisor(tuple(ceil_rat(a) for a in self.coeffs))

    def __le__(self, other: "TorusDivisor") -> bool:
        """Coefficientwise comparison (a partial order)."""
        return all(a <= b for a, b in zip(self.coeffs, other.coeffs, strict=True))

    def __ge__(self, other: "TorusDivisor") -> bool:
        return other <= self

    def drop(self, i: int) -> "TorusDivisor":
        return TorusDivisor(self.coeffs[:i] + self.coeffs[i + 1 :])

    def to_json(self) -> list[str]:
        return [rat_str(c) for c in self.coeffs]


def divisor(*coeffs) -> TorusDivisor:
    if len(coeffs) == 1 and not isinstance(coeffs[0], (int, Fraction, str)):
        coeffs = tuple(coeffs[0])
    return TorusDivisor(tuple(coeffs))


@dataclass(frozen=True)
class Wall:
    """An interior codimension-one cone shared by two maximal cones.

    ``circuit`` maps ray index to the integer coefficient of the unique
    relation among the n+1 rays involved; the two rays opposite the wall
    carry positive coefficients and the gcd is 1.
    """

    cones: tuple[int, int]
    shared: tuple[int, ...]
    opposite: tuple[int, int]
    circuit: tuple[tuple[int, int], ...]
    wall_mult: int
    cone_mults: tuple[int, int]

    @property
    def key(self) -> tuple[int, ...]:
        return self.shared

    @property
    def relation(self) -> dict[int, int]:
        return dict(self.circuit)

    def curve_class(self, nrays: int) -> tuple[Fraction, ...]:
        """Intersection numbers D_k . C for every ray k, from the circuit."""
        rel = self.relation
        scale = Fraction(self.wall_mult, self.cone_mults[1] * rel[self.opposite[1]])
        return tuple(rel.get(k, 0) * scale for k in range(nrays))


class Fan:
    """A simplicial fan in Z^rank.

    ``rays`` are primitive integer vectors, ``cones`` the maximal cones as
    ray-index sets.  Non-simplicial input is rejected.  ``complete`` records
    whether the support is all of R^rank.
    """

    def __init__(self, rays: Sequence[Sequence[int]], cones: Iterable[Iterable[int]], rank: int | None = None):
        rays = tuple(tuple(int(c) for c in r) for r in rays)
        if not rays:
            raise InputError("a fan needs at least one ray")
        n = rank if rank is not None else len(rays[0])
        for r in rays:
            if len(r) != n:
                raise InputError(f"ray {r} does not live in Z^{n}")
            if math.gcd(*r) != 1:
                raise InputError(f"ray {r} is not primitive")
        if len(set(rays)) != len(rays):
            raise InputError("repeated ray")
        cones = tuple(sorted(tuple(sorted(set(int(i) for i in c))) for c in cones))
        if len(set(cones)) != len(cones):
            raise InputError("repeated cone")
        for c in cones:
            if not c or any(i < 0 or i >= len(rays) for i in c):
                raise InputError(f"cone {c} references unknown rays")
            if rank_of([rays[i] for i in c]) != len(c):
                raise NonSimplicialFan(f"cone {c} is not simplicial")
        self.rank = n
        self.rays = rays
        self.cones = cones
        self._check_facets()

    # -- construction helpers
    def __repr__(self):
        return f"Fan(rank={self.rank}, rays={list(self.rays)}, cones={[list(c) for c in self.cones]})"

    def __eq__(self, other):
        return isinstance(other, Fan) and self.rays == other.rays and self.cones == other.cones

    def __hash__(self):
        return hash((self.rays, self.cones))

    @property
    def nrays(self) -> int:
        return len(self.rays)

    def _check_facets(self):
        n = self.rank
        facets: dict[tuple[int, ...], list[int]] = {}
        for ci, c in enumerate(self.cones):
            if len(c) != n:
                continue
            for f in itertools.combinations(c, n - 1):
                facets.setdefault(f, []).append(ci)
        for f, owners in facets.items():
            if len(owners) > 2:
                raise InputError(f"facet {f} lies in more than two cones")
            if len(owners) == 2:
                a, b = (self._opposite(owners[0], f), self._opposite(owners[1], f))
                if n >= 1 and self._same_side(f, a, b):
                    raise InputError(f"cones {owners} overlap across facet {f}")
        self._facets = facets

    def _opposite(self, ci: int, facet) -> int:
        return next(i for i in self.cones[ci] if i not in facet)

    def _same_side(self, facet, a: int, b: int) -> bool:
        normal = self.facet_normal(facet)
        return (dot(normal, self.rays[a]) > 0) == (dot(normal, self.rays[b]) > 0)

    def facet_normal(self, facet) -> tuple[int, ...]:
        rows = [self.rays[i] for i in facet]
        ns = nullspace(rows, self.rank) if rows else [[1] + [0] * (self.rank - 1)]
        return integer_vector(ns[0])

    @cached_property
    def complete(self) -> bool:
        n = self.rank
        if any(len(c) != n for c in self.cones):
            return False
        if any(len(o) != 2 for o in self._facets.values()):
            return False
        # a pseudo-manifold without boundary covers R^n with constant degree
        probe = [1 + 7919 ** k for k in range(n)]
        probe = [p if k % 2 == 0 else -p for k, p in enumerate(probe)]
        hits = sum(1 for ci in range(len(self.cones)) if self.cone_contains(ci, probe))
        return hits == 1

    @cached_property
    def smooth(self) -> bool:
        return all(self.multiplicity(c) == 1 for c in self.cones)

    @cached_property
    def picard_number(self) -> int:
        return self.nrays - rank_of(self.rays)

    def multiplicity(self, cone: Sequence[int]) -> int:
        return gcd_of_minors([self.rays[i] for i in cone])

    # -- geometry
    def coordinates_in(self, ci: int, v: Sequence[int]) -> list[Fraction] | None:
        """Coefficients of v in the generators of cone ci, or None if v is outside its span."""
        gens = [self.rays[i] for i in self.cones[ci]]
        cols = [[g[r] for g in gens] for r in range(self.rank)]
        return solve(cols, list(v))

    def cone_contains(self, ci: int, v: Sequence[int]) -> bool:
        lam = self.coordinates_in(ci, v)
        return lam is not None and all(x >= 0 for x in lam)

    def find_cone(self, v: Sequence[int]) -> int | None:
        for ci in range(len(self.cones)):
            if self.cone_contains(ci, v):
                return ci
        return None

    def cartier_data(self, D: TorusDivisor, ci: int) -> list[Fraction]:
        """The m with <m, v_i> = -a_i on the rays of a full-dimensional cone."""
        cone = self.cones[ci]
        if len(cone) != self.rank:
            raise InputError("Cartier data needs a full-dimensional cone")
        rows = [self.rays[i] for i in cone]
        m = solve(rows, [-D[i] for i in cone])
        assert m is not None
        return m

    def is_cartier(self, D: TorusDivisor) -> bool:
        return all(
            all(x.denominator == 1 for x in self.cartier_data(D, ci))
            for ci, c in enumerate(self.cones)
            if len(c) == self.rank
        )

    @cached_property
    def walls(self) -> tuple[Wall, ...]:
        out = []
        for f, owners in sorted(self._facets.items()):
            if len(owners) != 2:
                continue
            c0, c1 = owners
            p, q = self._opposite(c0, f), self._opposite(c1, f)
            idx = list(f) + [p, q]
            cols = [[self.rays[i][r] for i in idx] for r in range(self.rank)]
            rel = integer_vector(nullspace(cols, len(idx))[0])
            if rel[-1] < 0:
                rel = tuple(-x for x in rel)
            circuit = tuple(sorted((i, c) for i, c in zip(idx, rel) if c != 0))
            out.append(
                Wall(
                    cones=(c0, c1),
                    shared=tuple(f),
                    opposite=(p, q),
                    circuit=circuit,
                    wall_mult=self.multiplicity(f) if f else 1,
                    cone_mults=(self.multiplicity(self.cones[c0]), self.multiplicity(self.cones[c1])),
                )
            )
        return tuple(out)

    def star_subdivide(self, v: Sequence[int]) -> "Fan":
        """Stellar subdivision at the primitive vector v of the support."""
        v = tuple(int(x) for x in v)
        if math.gcd(*v) != 1:
            raise InputError("subdivision vector must be primitive")
        if v in self.rays:
            return self
        rays = list(self.rays) + [v]
        new = len(rays) - 1
        cones = []
        touched = False
        for ci, c in enumerate(self.cones):
            lam = self.coordinates_in(ci, v)
            if lam is None or any(x < 0 for x in lam):
                cones.append(c)
                continue
            touched = True
            face = [i for i, x in zip(c, lam) if x > 0]
            for i in face:
                cones.append(tuple(sorted([j for j in c if j != i] + [new])))
        if not touched:
            raise InputError(f"{v} is outside the support of the fan")
        return Fan(rays, cones, self.rank)


def rank_of(vectors) -> int:
    return rank([list(v) for v in vectors]) if vectors else 0


# ---------------------------------------------------------------------------
# intersection numbers and positivity


def intersection_number(fan: Fan, D: TorusDivisor, w: Wall) -> Fraction:
    """D . C for the curve of wall w, from the jump of Cartier data across w."""
    c0, c1 = w.cones
    m0 = fan.cartier_data(D, c0)
    m1 = fan.cartier_data(D, c1)
    jump = dot([a - b for a, b in zip(m0, m1)], fan.rays[w.opposite[1]])
    return jump * Fraction(w.wall_mult, w.cone_mults[1])


def wall_numbers(fan: Fan, D: TorusDivisor) -> list[Fraction]:
    return [intersection_number(fan, D, w) for w in fan.walls]


def is_nef(fan: Fan, D: TorusDivisor) -> bool:
    return all(x >= 0 for x in wall_numbers(fan, D))


def _strictly_convex(fan: Fan, D: TorusDivisor) -> bool:
    for ci, cone in enumerate(fan.cones):
        m = fan.cartier_data(D, ci)
        for j in range(fan.nrays):
            if j not in cone and dot(m, fan.rays[j]) <= -D[j]:
                return False
    return True


def is_ample(fan: Fan, D: TorusDivisor) -> bool:
    if not fan.walls:
        return False
    return all(x > 0 for x in wall_numbers(fan, D)) and _strictly_convex(fan, D)


def is_globally_generated(fan: Fan, D: TorusDivisor) -> bool:
    """Every Cartier datum m_sigma lies in the polytope P_D."""
    for ci in range(len(fan.cones)):
        m = fan.cartier_data(D, ci)
        if any(dot(m, v) < -a for v, a in zip(fan.rays, D)):
            return False
    return True


def is_big(fan: Fan, D: TorusDivisor) -> bool:
    """Big iff the real polytope P_D has nonempty interior.

    Maximise s subject to <m, v_i> - s >= -a_i and s <= 1 over (m, s).
    """
    n = fan.rank
    cons = [(list(v) + [-1], -a) for v, a in zip(fan.rays, D)]
    cons.append(([0] * n + [-1], -1))
    try:
        value, _ = lp_solve([0] * n + [-1], ineqs=cons, nvars=n + 1)
    except Exception:
        return False
    return value is not UNBOUNDED and value < 0


# ---------------------------------------------------------------------------
# lattice points


@dataclass
class DivisorPolytope:
    """``{m : <m, v_i> >= -a_i}`` for an integral divisor."""

    fan: Fan
    divisor: TorusDivisor
    _points: list[tuple[int, ...]] | None = field(default=None, repr=False)

    @property
    def inequalities(self) -> list[tuple[tuple[int, ...], int]]:
        return [(v, -int(a)) for v, a in zip(self.fan.rays, self.divisor)]

    def bounding_box(self) -> list[tuple[int, int]] | None:
        n = self.fan.rank
        cons = [(list(v), b) for v, b in self.inequalities]
        box = []
        for k in range(n):
            e = [0] * n
            e[k] = 1
            try:
                lo = lp_minimize(cons, e)
            except Exception:
                return None
            hi = lp_minimize(cons, [-x for x in e])
            if lo is UNBOUNDED or hi is UNBOUNDED:
                raise InputError("divisor polytope is unbounded (fan not complete?)")
            box.append((ceil_rat(lo), floor_rat(-hi)))
        return box

    @property
    def lattice_points(self) -> list[tuple[int, ...]]:
        if self._points is None:
            self._points = _scan(self)
        return self._points


def _scan(poly: DivisorPolytope) -> list[tuple[int, ...]]:
    box = poly.bounding_box()
    if box is None or any(lo > hi for lo, hi in box):
        return []
    sizes = [hi - lo + 1 for lo, hi in box]
    if math.prod(sizes) > MAX_CANDIDATES:
        raise InputError(f"polytope bounding box has {math.prod(sizes)} candidates (> {MAX_CANDIDATES})")
    grids = np.meshgrid(*[np.arange(lo, hi + 1, dtype=np.int64) for lo, hi in box], indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    V = np.array(poly.fan.rays, dtype=np.int64)
    rhs = np.array([b for _, b in poly.inequalities], dtype=np.int64)
    keep = np.all(pts @ V.T >= rhs, axis=1)
    return [tuple(int(x) for x in p) for p in pts[keep]]


def lattice_points(fan: Fan, D: TorusDivisor) -> list[tuple[int, ...]]:
    """Lattice points of P_D; for a Q-divisor these are those of P_floor(D)."""
    return DivisorPolytope(fan, D.floor()).lattice_points


def h0(fan: Fan, D: TorusDivisor) -> int:
    if not D.is_integral:
        raise NonIntegralDivisor(f"h0 needs an integral divisor, got {D.to_json()}")
    return len(lattice_points(fan, D))


def mob_fix(fan: Fan, D: TorusDivisor) -> tuple[TorusDivisor, TorusDivisor]:
    """Mobile and fixed parts of the complete linear system |D|."""
    if not D.is_integral:
        raise NonIntegralDivisor(f"mob_fix needs an integral divisor, got {D.to_json()}")
    pts = lattice_points(fan, D)
    if not pts:
        raise EmptyLinearSystem("|D| is empty")
    fix = TorusDivisor(
        tuple(min(dot(m, v) for m in pts) + a for v, a in zip(fan.rays, D))
    )
    return D - fix, fix


def find_ample(fan: Fan) -> TorusDivisor | None:
    """An effective integral ample divisor, or None if the fan is not projective."""
    n = fan.nrays
    classes = [w.curve_class(n) for w in fan.walls]
    cons = [(list(c), 1) for c in classes] + [([int(i == k) for i in range(n)], 0) for k in range(n)]
    try:
        _, x = lp_solve([1] * n, ineqs=cons, nvars=n)
    except Exception:
        return None
    if x is None:
        return None
    L = lcm_denominators(x)
    D = TorusDivisor(tuple(v * L for v in x))
    return D if is_ample(fan, D) else None


def fans_isomorphic(a: Fan, b: Fan) -> bool:
    """Brute-force test for a GL(n, Z) map carrying fan a onto fan b."""
    if a.rank != b.rank or a.nrays != b.nrays or len(a.cones) != len(b.cones):
        return False
    n = a.rank
    base = next((c for c in a.cones if len(c) == n), None)
    if base is None:
        return False
    src = [a.rays[i] for i in base]
    d_src = det(src)
    bcones = {frozenset(b.rays[i] for i in c) for c in b.cones}
    for c in b.cones:
        if len(c) != n:
            continue
        for perm in itertools.permutations(c):
            dst = [b.rays[i] for i in perm]
            if abs(det(dst)) != abs(d_src):
                continue
            # solve g . src_k = dst_k for the linear map g (rows of g)
            g = []
            ok = True
            for r in range(n):
                row = solve([list(s) for s in src], [d[r] for d in dst])
                if row is None or any(x.denominator != 1 for x in row):
                    ok = False
                    break
                g.append(row)
            if not ok or abs(det(g)) != 1:
                continue
            image = [tuple(int(dot(row, v)) for row in g) for v in a.rays]
            if set(image) != set(b.rays):
                continue
            acones = {frozenset(image[i] for i in cc) for cc in a.cones}
            if acones == bcones:
                return True
    return False
