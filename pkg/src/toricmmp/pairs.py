"""Toric pairs (X, Delta): discrepancies, singularity classes, lct and nef thresholds."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import (
    AlreadyNef,
    BoundViolation,
    InputError,
    NonEffective,
    NonIntegralDivisor,
    NotCartier,
    NotKlt,
    OutsideSupport,
)
from .fan import Fan, TorusDivisor, intersection_number, is_big, is_nef
from .kernel import EmptyFeasible, as_rat, det, dot, lp_min_ratio, primitive, rat_str, solve

LCT_INFINITY = math.inf

KLT, PLT, LC, NOT_LC = "klt", "plt", "lc", "not-lc"


@dataclass(frozen=True)
class ToricPair:
    """A fan together with boundary coefficients d_i, one per ray.

    With ``strict`` (the default) the coefficients must lie in [0, 1];
    non-strict pairs allow any nonnegative coefficients and are used for
    sub-boundaries such as Delta + cD.
    """

    fan: Fan
    boundary: TorusDivisor
    strict: bool = field(default=True, compare=False)

    def __post_init__(self):
        if len(self.boundary) != self.fan.nrays:
            raise InputError("boundary needs one coefficient per ray")
        if any(d < 0 for d in self.boundary):
            raise InputError("boundary coefficients must be nonnegative")
        if self.strict and any(d > 1 for d in self.boundary):
            raise InputError("boundary coefficients must lie in [0, 1]")

    @classmethod
    def trivial(cls, fan: Fan) -> "ToricPair":
        return cls(fan, TorusDivisor.zero(fan.nrays))

    @property
    def reduced_part(self) -> tuple[int, ...]:
        """Rays with coefficient one, i.e. the components of S = floor(Delta)."""
        return tuple(i for i, d in enumerate(self.boundary) if d == 1)

    def log_canonical_divisor(self) -> TorusDivisor:
        return canonical_divisor(self.fan) + self.boundary

    def log_discrepancy_function(self) -> "LogDiscrepancyFunction":
        return LogDiscrepancyFunction(self)


def canonical_divisor(fan: Fan) -> TorusDivisor:
    return TorusDivisor((-1,) * fan.nrays)


class LogDiscrepancyFunction:
    """The piecewise-linear function equal to 1 - d_i at each ray generator.

    Its value at a primitive vector v is the log discrepancy a(v) + 1 of the
    toric valuation v.
    """

    def __init__(self, pair: ToricPair):
        self.pair = pair
        self.fan = pair.fan
        self.ray_values = tuple(1 - d for d in pair.boundary)

    def functional(self, ci: int) -> list[Fraction]:
        """Linear functional representing the function on a full-dimensional cone."""
        cone = self.fan.cones[ci]
        m = solve([self.fan.rays[i] for i in cone], [self.ray_values[i] for i in cone])
        assert m is not None
        return m

    def __call__(self, v: Sequence[int]) -> Fraction:
        for ci, cone in enumerate(self.fan.cones):
            lam = self.fan.coordinates_in(ci, v)
            if lam is not None and all(x >= 0 for x in lam):
                return sum(l * self.ray_values[i] for l, i in zip(lam, cone))
        raise OutsideSupport(f"{tuple(v)} is not in the support of the fan")


def discrepancy(pair: ToricPair, v: Sequence[int]) -> Fraction:
    v = tuple(v)
    if math.gcd(*v) != 1:
        raise InputError(f"{v} is not primitive")
    return LogDiscrepancyFunction(pair)(v) - 1


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class SingularityReport:
    cls: str
    dlt: bool | None  # None: undecided within the subdivision cap
    witnesses: tuple[tuple[tuple[int, ...], Fraction], ...]
    cone_minima: tuple[Fraction, ...]

    @property
    def is_klt(self) -> bool:
        return self.cls == KLT

    @property
    def is_lc(self) -> bool:
        return self.cls != NOT_LC

    def to_json(self) -> dict:
        return {
            "class": self.cls,
            "dlt": "unknown" if self.dlt is None else self.dlt,
            "witnesses": [
                {"valuation": list(v), "discrepancy": rat_str(a)} for v, a in self.witnesses
            ],
        }


def _simplex_minimum(values: Sequence[Fraction]) -> Fraction:
    """Minimum of sum(l_i * values_i) over the standard simplex, by LP."""
    k = len(values)
    cons = [([int(i == j) for j in range(k)], 0) for i in range(k)]
    return lp_min_ratio(cons, (list(values), 0), eqs=[([1] * k, 1)])


def classify(pair: ToricPair, dlt_depth: int = 6) -> SingularityReport:
    fan = pair.fan
    ld = LogDiscrepancyFunction(pair)
    minima = tuple(
        _simplex_minimum([ld.ray_values[i] for i in cone]) for cone in fan.cones
    )
    witnesses: dict[tuple[int, ...], Fraction] = {}
    exceptional_lc_centre = False
    for cone in fan.cones:
        bad = [i for i in cone if pair.boundary[i] >= 1]
        for i in bad:
            witnesses[fan.rays[i]] = -pair.boundary[i]
        if len(bad) >= 2:
            exceptional_lc_centre = True
            w = primitive([sum(fan.rays[i][k] for i in bad) for k in range(fan.rank)]).coords
            witnesses[w] = ld(w) - 1
    lowest = min(minima)
    if lowest < 0:
        cls = NOT_LC
    elif lowest > 0:
        cls = KLT
    elif not exceptional_lc_centre:
        cls = PLT
    else:
        cls = LC
    if cls == NOT_LC:
        dlt = False
    elif cls == KLT:
        dlt = True
    else:
        dlt = _dlt_search(pair, dlt_depth)
    wit = tuple(sorted(witnesses.items(), key=lambda kv: (kv[1], kv[0])))
    return SingularityReport(cls, dlt, wit, minima)


def parallelepiped_points(fan: Fan, cone: Sequence[int]) -> list[tuple[tuple[int, ...], list[Fraction]]]:
    """Nonzero lattice points sum(l_i v_i) with 0 <= l_i < 1, with their coordinates."""
    gens = [fan.rays[i] for i in cone]
    n = fan.rank
    if len(gens) != n:
        return []
    box = [
        range(sum(min(0, g[k]) for g in gens), sum(max(0, g[k]) for g in gens) + 1)
        for k in range(n)
    ]
    cols = [[g[r] for g in gens] for r in range(n)]
    out = []
    for x in itertools.product(*box):
        if not any(x):
            continue
        lam = solve(cols, list(x))
        if lam is not None and all(0 <= l < 1 for l in lam):
            out.append((tuple(x), lam))
    return out


def _dlt_search(pair: ToricPair, depth: int) -> bool | None:
    fan = pair.fan
    reduced = set(pair.reduced_part)
    # a singular face spanned by coefficient-one rays can never be resolved
    # without adding a valuation of discrepancy -1
    for cone in fan.cones:
        zero = [i for i in cone if i in reduced]
        for k in range(2, len(zero) + 1):
            for face in itertools.combinations(zero, k):
                if fan.multiplicity(face) > 1:
                    return False
    if fan.smooth:
        return True
    ld = LogDiscrepancyFunction(pair)  # refinement does not change the PL function
    current = fan
    for _ in range(depth):
        singular = [c for c in current.cones if len(c) == current.rank and current.multiplicity(c) > 1]
        if not singular:
            return True
        cone = singular[0]
        candidates = []
        for x, lam in parallelepiped_points(current, cone):
            if math.gcd(*x) != 1:
                continue
            if ld(x) > 0:
                candidates.append((sum(lam), x))
        if not candidates:
            return None
        _, w = min(candidates)
        current = current.star_subdivide(w)
    if all(current.multiplicity(c) == 1 for c in current.cones):
        return True
    return None


# ---------------------------------------------------------------------------
# thresholds


def lct(pair: ToricPair, D: TorusDivisor):
    """sup{c : (X, Delta + cD) is lc}; ``LCT_INFINITY`` when D = 0."""
    if not D.is_effective:
        raise NonEffective("lct needs an effective divisor")
    if not classify(pair).is_klt:
        raise NotKlt("lct is defined here for klt pairs")
    if D.is_zero:
        return LCT_INFINITY
    ld = LogDiscrepancyFunction(pair)
    best = None
    for cone in pair.fan.cones:
        orders = [D[i] for i in cone]
        if all(o == 0 for o in orders):
            continue
        k = len(cone)
        cons = [([int(i == j) for j in range(k)], 0) for i in range(k)]
        value = lp_min_ratio(cons, ([ld.ray_values[i] for i in cone], 0), ([o for o in orders], 0))
        if best is None or value < best:
            best = value
    return best


@dataclass(frozen=True)
class NefThreshold:
    r: Fraction
    u: int
    v: int
    bound: int
    wall: tuple[int, ...]

    def to_json(self) -> dict:
        return {"r": rat_str(self.r), "u": self.u, "v": self.v, "bound": self.bound, "wall": list(self.wall)}


def nef_threshold(pair: ToricPair, H: TorusDivisor, a: int) -> NefThreshold:
    """max{t : H + t(K + Delta) nef}, with the denominator bound v <= a(n+1) checked."""
    fan = pair.fan
    a = int(a)
    if a <= 0:
        raise InputError("a must be a positive integer")
    KD = pair.log_canonical_divisor()
    aKD = KD * a
    if not aKD.is_integral:
        raise NonIntegralDivisor(f"a(K+Delta) = {aKD.to_json()} is not integral")
    if not H.is_integral:
        raise NonIntegralDivisor("H must be integral")
    if not fan.is_cartier(aKD) or not fan.is_cartier(H):
        raise NotCartier("a(K+Delta) and H must be Cartier")
    if not is_nef(fan, H) or not is_big(fan, H):
        raise InputError("H must be nef and big")
    best = None
    for w in fan.walls:
        k = intersection_number(fan, KD, w)
        if k < 0:
            t = intersection_number(fan, H, w) / -k
            if best is None or t < best[0]:
                best = (t, w.shared)
    if best is None:
        raise AlreadyNef("K + Delta is already nef")
    r, wall = best
    bound = a * (fan.rank + 1)
    u, v = r.numerator, r.denominator
    if v > bound:
        raise BoundViolation(f"nef threshold {r} has denominator {v} > a(n+1) = {bound}")
    return NefThreshold(r, u, v, bound, wall)


def rationality_bound(a: int, n: int, eps) -> Fraction:
    eps = as_rat(eps)
    if eps <= 0:
        raise InputError("epsilon must be positive")
    return Fraction(a * (n + 1)) / eps
