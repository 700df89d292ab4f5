"""Vanishing of a bivariate polynomial on a lattice strip 0 < ay - rx < eps.

If P vanishes on every lattice point of the strip, then every line of the
strip carrying lattice points (and, for the boundary, the line ay = rx)
gives a linear factor of P, which bounds the denominator of a rational r.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import sympy

from .errors import DegreeMismatch, InputError
from .kernel import QuadReal, as_rat, exact_ceil, exact_floor, rat_str
from .pairs import rationality_bound

X, Y = sympy.symbols("x y")

FACTORS, NO_FACTOR, INSUFFICIENT = "factors", "no-factor", "insufficient-evidence"


def as_poly(P) -> sympy.Poly:
    if isinstance(P, sympy.Poly):
        return sympy.Poly(P.as_expr(), X, Y, domain="QQ")
    if isinstance(P, str):
        try:
            P = sympy.sympify(P, locals={"x": X, "y": Y})
        except (sympy.SympifyError, SyntaxError, TypeError) as exc:
            raise InputError(f"cannot parse polynomial {P!r}") from exc
    if isinstance(P, float):
        raise InputError("polynomial coefficients must be exact")
    expr = sympy.sympify(P)
    if expr.free_symbols - {X, Y}:
        raise InputError("polynomial may only involve x and y")
    if expr.atoms(sympy.Float):
        raise InputError("polynomial coefficients must be exact")
    try:
        return sympy.Poly(expr, X, Y, domain="QQ")
    except (sympy.PolynomialError, sympy.polys.polyerrors.CoercionFailed) as exc:
        raise InputError(f"not a polynomial with rational coefficients: {P}") from exc


@dataclass
class StripVerdict:
    status: str
    strip_points: int
    zeros: int
    vanishes: bool
    factors: list[tuple[sympy.Expr, int]] = field(default_factory=list)
    slope_denominator: int | None = None
    bound: Fraction | None = None
    bound_ok: bool | None = None
    strip_lines: int | None = None

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "strip_points": self.strip_points,
            "zeros": self.zeros,
            "vanishes": self.vanishes,
            "factors": [{"factor": str(f), "multiplicity": m} for f, m in self.factors],
            "slope_denominator": self.slope_denominator,
            "bound": None if self.bound is None else rat_str(self.bound),
            "bound_ok": self.bound_ok,
            "strip_lines": self.strip_lines,
        }


def strip_points(a: int, r, eps, N: int) -> list[tuple[int, int]]:
    """Lattice points 1 <= x, y <= N with 0 < a*y - r*x < eps, exactly."""
    out = []
    for x in range(1, N + 1):
        lo = r * x
        hi = r * x + eps
        y0 = exact_floor(lo / a) + 1
        y1 = exact_ceil(hi / a) - 1
        for y in range(max(1, y0), min(N, y1) + 1):
            t = a * y - r * x
            if t > 0 and t < eps:
                out.append((x, y))
    return out


def _normalise(expr) -> sympy.Expr:
    poly = sympy.Poly(expr, X, Y, domain="QQ")
    coeffs = [c for c in poly.coeffs() if c != 0]
    den = sympy.ilcm(*[sympy.fraction(c)[1] for c in coeffs])
    poly = poly * den
    g = sympy.igcd(*[int(c) for c in poly.coeffs()])
    poly = sympy.Poly(poly.as_expr() / g, X, Y, domain="QQ")
    lead = poly.coeff_monomial(X) or poly.coeff_monomial(Y)
    if lead < 0:
        poly = -poly
    return poly.as_expr()


def _multiplicity(P: sympy.Poly, form) -> int:
    L = sympy.Poly(form, X, Y, domain="QQ")
    k = 0
    while not P.is_zero:
        q, rem = sympy.div(P, L)
        if not rem.is_zero:
            break
        P = q
        k += 1
    return k


def candidate_forms(a: int, r, eps, zeros=()) -> list[sympy.Expr]:
    """Linear forms whose divisibility is tested.

    Rational r = u/v: the base line u*x - a*v*y and the strip lines
    a*v*y - u*x = t for every t in (0, eps*v) met by the lattice.  Irrational
    r: the lines through the origin and observed zeros, as in the argument
    for irrational slopes.
    """
    forms = []
    if isinstance(r, QuadReal) and not r.is_rational:
        seen = set()
        for p, q in zeros:
            g = math.gcd(p, q)
            key = (p // g, q // g)
            if key not in seen:
                seen.add(key)
                forms.append(_normalise(key[1] * X - key[0] * Y))
        return forms
    r = r.a if isinstance(r, QuadReal) else as_rat(r)
    u, v = r.numerator, r.denominator
    forms.append(_normalise(u * X - a * v * Y))
    g = math.gcd(a * v, u) or a * v
    t = g
    while t < eps * v:
        forms.append(_normalise(a * v * Y - u * X - t))
        t += g
    return forms


def strip_vanishing_verify(P, a: int, r, eps, N: int, n: int | None = None) -> StripVerdict:
    poly = as_poly(P)
    if poly.is_zero:
        raise InputError("the polynomial must be non-trivial")
    deg = poly.total_degree()
    if n is None:
        n = deg
    if deg > n:
        raise DegreeMismatch(f"deg P = {deg} exceeds the declared bound {n}")
    a = int(a)
    if a <= 0:
        raise InputError("a must be a positive integer")
    eps = as_rat(eps)
    if eps <= 0:
        raise InputError("epsilon must be positive")
    if not isinstance(r, QuadReal):
        r = as_rat(r)
    pts = strip_points(a, r, eps, N)
    zeros = [p for p in pts if poly.eval({X: p[0], Y: p[1]}) == 0]
    vanishes = bool(pts) and len(zeros) == len(pts)
    factors = []
    remaining = poly
    for form in candidate_forms(a, r, eps, zeros[: n + 2]):
        k = _multiplicity(remaining, form)
        if k:
            factors.append((form, k))
            remaining = sympy.div(remaining, sympy.Poly(form, X, Y, domain="QQ") ** k)[0]
    if factors:
        status = FACTORS
    elif vanishes:
        status = INSUFFICIENT
    else:
        status = NO_FACTOR
    verdict = StripVerdict(status, len(pts), len(zeros), vanishes, factors)
    verdict.bound = rationality_bound(a, n, eps)
    rational = not isinstance(r, QuadReal) or r.is_rational
    if rational:
        rr = r.a if isinstance(r, QuadReal) else r
        verdict.slope_denominator = rr.denominator
        verdict.strip_lines = len(candidate_forms(a, rr, eps)) - 1
        if vanishes:
            verdict.bound_ok = rr.denominator <= verdict.bound
    return verdict
