"""Exact numbers, small linear algebra over Q and an exact simplex solver.

Rationals are :class:`fractions.Fraction` throughout (always reduced, with a
positive denominator).  :class:`QuadReal` adds a single square root.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Sequence, Union

from .errors import EmptyFeasible, InputError, ZeroVector

Rat = Fraction
Number = Union[int, Fraction]


def as_rat(x) -> Fraction:
    """Coerce ints, Fractions and exact strings such as ``"-3/4"`` to a Fraction.

    Floats and decimal strings are refused: every value in the engine is exact.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise InputError(f"not a rational: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if "." in s or "e" in s.lower():
            raise InputError(f"decimal literal {x!r}; use an exact 'p/q' string")
        try:
            return Fraction(s)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"cannot parse rational {x!r}") from exc
    raise InputError(f"not a rational: {x!r}")


def rat_str(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def floor_rat(x: Fraction) -> int:
    return x.numerator // x.denominator


def ceil_rat(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def lcm_denominators(values: Iterable[Fraction]) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, Fraction(v).denominator)
    return out


# ---------------------------------------------------------------------------
# quadratic irrationals


def _squarefree(n: int) -> bool:
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


@total_ordering
class QuadReal:
    """The real number ``a + b*sqrt(disc)`` with rational a, b and square-free disc > 1.

    Arithmetic with Fractions, ints and QuadReals over the same ``disc`` is
    exact, as are comparisons, floor and fractional part.
    """

    __slots__ = ("a", "b", "disc")

    def __init__(self, a, b, disc: int):
        disc = int(disc)
        if not _squarefree(disc):
            raise InputError(f"discriminant {disc} is not a square-free integer > 1")
        self.a = as_rat(a)
        self.b = as_rat(b)
        self.disc = disc

    # -- helpers
    def _coerce(self, other):
        if isinstance(other, QuadReal):
            if other.disc != self.disc:
                raise InputError("QuadReal values over different square roots do not mix")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return QuadReal(other, 0, self.disc)
        return NotImplemented

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def sign(self) -> int:
        a, b, d = self.a, self.b, self.disc
        sa = (a > 0) - (a < 0)
        sb = (b > 0) - (b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with b^2 d
        lhs, rhs = a * a, b * b * d
        if lhs == rhs:
            return 0
        return sa if lhs > rhs else sb

    def conjugate(self) -> "QuadReal":
        return QuadReal(self.a, -self.b, self.disc)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.disc

    # -- arithmetic
    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadReal(self.a + o.a, self.b + o.b, self.disc)

    __radd__ = __add__

    def __neg__(self):
        return QuadReal(-self.a, -self.b, self.disc)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadReal(self.a - o.a, self.b - o.b, self.disc)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadReal(
            self.a * o.a + self.b * o.b * self.disc, self.a * o.b + self.b * o.a, self.disc
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero QuadReal")
        c = o.conjugate()
        num = self * c
        return QuadReal(num.a / n, num.b / n, self.disc)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    # -- comparisons
    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __lt__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return (self - o).sign() < 0

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.disc))

    def __floor__(self) -> int:
        # float guess, then exact correction
        k = math.floor(float(self))
        while self < k:
            k -= 1
        while self >= k + 1:
            k += 1
        return k

    def __ceil__(self) -> int:
        return -math.floor(-self)

    def frac(self) -> "QuadReal":
        return self - math.floor(self)

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(self.disc)

    def to_mpf(self, dps: int = 50):
        import mpmath

        with mpmath.workdps(dps):
            return mpmath.mpf(self.a.numerator) / self.a.denominator + (
                mpmath.mpf(self.b.numerator) / self.b.denominator
            ) * mpmath.sqrt(self.disc)

    def __repr__(self):
        return f"QuadReal({rat_str(self.a)}, {rat_str(self.b)}, {self.disc})"

    def to_json(self) -> dict:
        return {"a": rat_str(self.a), "b": rat_str(self.b), "disc": self.disc}


Real = Union[Fraction, QuadReal]


def exact_floor(x) -> int:
    if isinstance(x, QuadReal):
        return math.floor(x)
    return floor_rat(Fraction(x))


def exact_ceil(x) -> int:
    if isinstance(x, QuadReal):
        return math.ceil(x)
    return ceil_rat(Fraction(x))


def frac_part(x):
    return x - exact_floor(x)


def is_irrational(x) -> bool:
    return isinstance(x, QuadReal) and not x.is_rational


def real_to_json(x):
    if isinstance(x, QuadReal):
        return {"quad": x.to_json()}
    return rat_str(x)


def continued_fraction(x: Real, terms: int) -> list[int]:
    """First ``terms`` partial quotients of x (stops early for rationals)."""
    out = []
    for _ in range(terms):
        k = exact_floor(x)
        out.append(k)
        rest = x - k
        if rest == 0:
            break
        x = 1 / rest
    return out


def convergents(x: Real, max_denominator: int) -> list[tuple[int, int]]:
    """Convergents p/q of x with q <= max_denominator, in order."""
    out = []
    p0, q0, p1, q1 = 0, 1, 1, 0
    while True:
        k = exact_floor(x)
        p0, q0, p1, q1 = p1, q1, k * p1 + p0, k * q1 + q0
        if q1 > max_denominator:
            break
        out.append((p1, q1))
        rest = x - k
        if rest == 0:
            break
        x = 1 / rest
    return out


# ---------------------------------------------------------------------------
# lattice vectors


@dataclass(frozen=True)
class LatticeVec:
    coords: tuple[int, ...]

    @property
    def primitive(self) -> bool:
        return math.gcd(*self.coords) == 1

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]


def primitive(v: Sequence[int]) -> LatticeVec:
    coords = tuple(int(c) for c in v)
    g = math.gcd(*coords)
    if g == 0:
        raise ZeroVector("the zero vector has no primitive representative")
    return LatticeVec(tuple(c // g for c in coords))


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


# ---------------------------------------------------------------------------
# dense linear algebra over Q


def _to_frac_rows(rows) -> list[list[Fraction]]:
    return [[Fraction(x) for x in r] for r in rows]


def rref(rows) -> tuple[list[list[Fraction]], list[int]]:
    m = _to_frac_rows(rows)
    pivots = []
    r = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows) -> int:
    if not rows:
        return 0
    return len(rref(rows)[1])


def det(rows) -> Fraction:
    m = _to_frac_rows(rows)
    n = len(m)
    out = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            out = -out
        out *= m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] / m[c][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return out


def solve(rows, rhs) -> list[Fraction] | None:
    """Unique-or-any solution x of rows @ x = rhs, or None when inconsistent."""
    ncols = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    m, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        x[c] = m[i][-1]
    return x


def nullspace(rows, ncols: int) -> list[list[Fraction]]:
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    m, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -m[i][f]
        basis.append(v)
    return basis


def integer_vector(v: Sequence[Fraction]) -> tuple[int, ...]:
    """Clear denominators and divide by the gcd."""
    L = lcm_denominators(v)
    ints = [int(x * L) for x in v]
    g = math.gcd(*ints) or 1
    return tuple(i // g for i in ints)


def gcd_of_minors(rows: Sequence[Sequence[int]]) -> int:
    """gcd of the maximal minors of a k x n integer matrix of rank k."""
    from itertools import combinations

    k = len(rows)
    n = len(rows[0])
    g = 0
    for cols in combinations(range(n), k):
        sub = [[r[c] for c in cols] for r in rows]
        g = math.gcd(g, int(det(sub)))
    return g


# ---------------------------------------------------------------------------
# linear programming


class _Unbounded:
    """Sentinel returned by the LP routines for an unbounded objective."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "UNBOUNDED"


UNBOUNDED = _Unbounded()


def _simplex(T: list[list[Fraction]], basis: list[int], ncols: int, allowed: int) -> bool:
    """Bland-rule pivoting on tableau T whose last row is the reduced cost row.

    Columns >= ``allowed`` never enter.  Returns False on unboundedness.
    """
    m = len(T) - 1
    while True:
        cost = T[-1]
        enter = next((j for j in range(allowed) if cost[j] < 0), None)
        if enter is None:
            return True
        best = None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return False
        r = best[1]
        piv = T[r][enter]
        T[r] = [x / piv for x in T[r]]
        for i in range(len(T)):
            if i != r and T[i][enter] != 0:
                f = T[i][enter]
                T[i] = [a - f * b for a, b in zip(T[i], T[r])]
        basis[r] = enter


def lp_solve(objective, ineqs=(), eqs=(), constant=0, nvars: int | None = None):
    """Minimise ``objective . x + constant`` subject to ``a . x >= b`` for
    (a, b) in ``ineqs`` and ``a . x == b`` for (a, b) in ``eqs``; x is free.

    Returns ``(value, point)``, or ``(UNBOUNDED, None)``.  Raises
    :class:`EmptyFeasible` when no x satisfies the constraints.
    """
    c = [Fraction(x) for x in objective]
    n = nvars if nvars is not None else len(c)
    rows = []  # (coeffs over x+, x-, slacks), rhs
    n_ineq = len(ineqs)
    for k, (a, b) in enumerate(ineqs):
        a = [Fraction(x) for x in a]
        slack = [Fraction(0)] * n_ineq
        slack[k] = Fraction(-1)
        rows.append((a + [-x for x in a] + slack, Fraction(b)))
    for a, b in eqs:
        a = [Fraction(x) for x in a]
        rows.append((a + [-x for x in a] + [Fraction(0)] * n_ineq, Fraction(b)))
    nstd = 2 * n + n_ineq
    m = len(rows)
    if m == 0:
        if any(x != 0 for x in c):
            return UNBOUNDED, None
        return Fraction(constant), [Fraction(0)] * n
    # phase 1 with artificials
    T = []
    for coeffs, rhs in rows:
        if rhs < 0:
            coeffs, rhs = [-x for x in coeffs], -rhs
        T.append(coeffs + [Fraction(0)] * m + [rhs])
    for i in range(m):
        T[i][nstd + i] = Fraction(1)
    basis = [nstd + i for i in range(m)]
    cost = [Fraction(0)] * (nstd + m + 1)
    for i in range(m):
        cost = [a - b for a, b in zip(cost, T[i])]
    for i in range(m):
        cost[nstd + i] = Fraction(0)
    T.append(cost)
    _simplex(T, basis, nstd + m, nstd + m)
    if T[-1][-1] != 0:
        raise EmptyFeasible("constraint set is inconsistent")
    # drive artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= nstd:
            j = next((j for j in range(nstd) if T[i][j] != 0), None)
            if j is None:
                continue  # redundant row
            piv = T[i][j]
            T[i] = [x / piv for x in T[i]]
            for k in range(len(T)):
                if k != i and T[k][j] != 0:
                    f = T[k][j]
                    T[k] = [a - f * b for a, b in zip(T[k], T[i])]
            basis[i] = j
    # phase 2
    cstd = c + [-x for x in c] + [Fraction(0)] * n_ineq
    cost = cstd + [Fraction(0)] * m + [Fraction(0)]
    for i in range(m):
        cb = cost[basis[i]] if basis[i] < nstd else Fraction(0)
        if cb != 0:
            cost = [a - cb * b for a, b in zip(cost, T[i])]
    T[-1] = cost
    if not _simplex(T, basis, nstd + m, nstd):
        return UNBOUNDED, None
    xstd = [Fraction(0)] * nstd
    for i in range(m):
        if basis[i] < nstd:
            xstd[basis[i]] = T[i][-1]
    x = [xstd[i] - xstd[n + i] for i in range(n)]
    return dot(c, x) + Fraction(constant), x


def lp_minimize(constraints, objective, constant=0):
    """Exact minimum of a linear objective over ``{x : a.x >= b}``.

    ``constraints`` is a list of (vector, rhs) pairs.  Returns a Fraction or
    :data:`UNBOUNDED`.
    """
    value, _ = lp_solve(objective, ineqs=constraints, constant=constant, nvars=len(objective))
    return value


def lp_min_ratio(constraints, numerator, denominator=None, eqs=()):
    """Exact infimum of ``(c.x + c0) / (e.x + e0)`` over ``{x : a.x >= b}``.

    ``numerator`` and ``denominator`` are (vector, constant) pairs; a missing
    denominator means the plain linear program.  Points where the denominator
    vanishes are excluded, and it must not be negative on the feasible set.
    Solved by the Charnes-Cooper substitution y = t x, t = 1/(e.x + e0).
    """
    c, c0 = numerator
    n = len(c)
    if denominator is None:
        value, _ = lp_solve(c, ineqs=constraints, eqs=eqs, constant=c0, nvars=n)
        return value
    e, e0 = denominator
    if constraints or eqs:
        lowest, _ = lp_solve(e, ineqs=constraints, eqs=eqs, constant=e0, nvars=n)
        if lowest is not UNBOUNDED and lowest < 0:
            raise InputError("denominator takes negative values on the feasible set")
        if lowest is UNBOUNDED:
            raise InputError("denominator is unbounded below on the feasible set")
    # variables (y_1..y_n, t)
    ineqs = [(list(a) + [-Fraction(b)], 0) for a, b in constraints]
    ineqs.append(([0] * n + [1], 0))
    new_eqs = [(list(a) + [-Fraction(b)], 0) for a, b in eqs]
    new_eqs.append((list(e) + [e0], 1))
    value, _ = lp_solve(list(c) + [c0], ineqs=ineqs, eqs=new_eqs, nvars=n + 1)
    return value


def integer_kernel(rows: Sequence[Sequence[int]], ncols: int) -> list[tuple[int, ...]]:
    """Z-basis of {x in Z^ncols : rows @ x = 0}, by unimodular column reduction."""
    A = [list(int(x) for x in r) for r in rows]
    U = [[int(i == j) for j in range(ncols)] for i in range(ncols)]  # columns tracked

    def colop(i, j, a, b, c, d):
        # (col_i, col_j) <- (a col_i + b col_j, c col_i + d col_j)
        for M in (A, U):
            for r in M:
                x, y = r[i], r[j]
                r[i], r[j] = a * x + b * y, c * x + d * y

    pivot_col = 0
    for r in range(len(A)):
        if pivot_col >= ncols:
            break
        for j in range(pivot_col + 1, ncols):
            x, y = A[r][pivot_col], A[r][j]
            if y == 0:
                continue
            g, s, t = _ext_gcd(x, y)
            colop(pivot_col, j, s, t, -y // g, x // g)
        if A[r][pivot_col] != 0:
            pivot_col += 1
    return [tuple(U[i][j] for i in range(ncols)) for j in range(pivot_col, ncols)]


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """g, s, t with s*a + t*b = g = gcd(a, b) >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t
