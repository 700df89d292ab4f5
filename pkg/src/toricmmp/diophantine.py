"""Effective search for the approximation certificates of real divisors.

Given D = sum d_k P_k with some d_k irrational and each P_k written in a
reduced basis G by the columns of E, find j and an integral M = sum m_k P_k
with ||E(jd - m)||_inf < eps and jD - M not effective.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import InputError
from .kernel import QuadReal, Real, as_rat, convergents, exact_floor, is_irrational, rat_str, real_to_json


def _as_real(x) -> Real:
    if isinstance(x, QuadReal):
        return x.a if x.is_rational else x
    return as_rat(x)


@dataclass(frozen=True)
class ApproxInstance:
    E: tuple[tuple[int, ...], ...]
    d: tuple[Real, ...]
    eps: Fraction

    def __init__(self, E: Sequence[Sequence[int]], d: Sequence, eps):
        E = tuple(tuple(int(x) for x in row) for row in E)
        d = tuple(_as_real(x) for x in d)
        eps = as_rat(eps)
        if not E or any(len(row) != len(d) for row in E):
            raise InputError("E must be a g x l matrix with l = len(d)")
        if any(x < 0 for row in E for x in row):
            raise InputError("E must have nonnegative entries")
        if any(all(row[k] == 0 for row in E) for k in range(len(d))):
            raise InputError("every column of E must be nonzero")
        if eps <= 0:
            raise InputError("epsilon must be positive")
        if not any(is_irrational(x) for x in d):
            raise InputError("at least one coefficient of D must be irrational")
        if any(x < 0 for x in d):
            raise InputError("coefficients of D must be nonnegative")
        discs = {x.disc for x in d if is_irrational(x)}
        if len(discs) > 1:
            raise InputError("all irrational coefficients must lie in one quadratic field")
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "eps", eps)

    @property
    def l(self) -> int:
        return len(self.d)

    @property
    def g(self) -> int:
        return len(self.E)

    def residual(self, j: int, m: Sequence[int]) -> list[Real]:
        """E (j d - m) in the G basis."""
        diff = [j * x - mk for x, mk in zip(self.d, m)]
        out = []
        for row in self.E:
            acc: Real = Fraction(0)
            for e, x in zip(row, diff):
                if e:
                    acc = acc + e * x
            out.append(acc)
        return out


@dataclass(frozen=True)
class ApproxCertificate:
    j: int
    m: tuple[int, ...]
    residual: tuple[Real, ...]
    sup_norm: Real
    negative_index: int
    eps: Fraction
    from_convergent: bool

    def to_json(self) -> dict:
        return {
            "j": self.j,
            "m": list(self.m),
            "residual": [real_to_json(x) for x in self.residual],
            "sup_norm": real_to_json(self.sup_norm),
            "negative_index": self.negative_index,
            "eps": rat_str(self.eps),
            "from_convergent": self.from_convergent,
        }


@dataclass(frozen=True)
class NotFoundUpTo:
    cap: int

    def to_json(self) -> dict:
        return {"status": "not-found", "cap": self.cap}


def _abs(x: Real) -> Real:
    return -x if x < 0 else x


def check_certificate(inst: ApproxInstance, j: int, m: Sequence[int]) -> tuple[bool, list[Real]]:
    if j <= 0 or any(mk < 0 for mk in m):
        return False, []
    res = inst.residual(j, m)
    ok = all(_abs(x) < inst.eps for x in res) and any(x < 0 for x in res)
    return ok, res


def _nearest(x: Real) -> int:
    return exact_floor(x + Fraction(1, 2))


def _try(inst: ApproxInstance, j: int, from_convergent: bool) -> ApproxCertificate | None:
    base = [_nearest(j * x) for x in inst.d]
    options = [sorted({max(0, b + s) for s in (0, -1, 1)}, key=lambda t, b=b: (abs(t - b), t)) for b in base]
    for m in itertools.product(*options):
        ok, res = check_certificate(inst, j, m)
        if ok:
            sup = max((_abs(x) for x in res), key=lambda v: v)
            neg = next(i for i, x in enumerate(res) if x < 0)
            return ApproxCertificate(j, tuple(m), tuple(res), sup, neg, inst.eps, from_convergent)
    return None


def candidate_denominators(inst: ApproxInstance, cap: int) -> list[int]:
    qs = set()
    for x in inst.d:
        if is_irrational(x):
            qs.update(q for _, q in convergents(x, cap))
    return sorted(qs)


def approximate(inst: ApproxInstance, cap: int = 100000) -> ApproxCertificate | NotFoundUpTo:
    """Convergent denominators first, then every j up to ``cap``; lowest j wins in each phase."""
    tried = set()
    for j in candidate_denominators(inst, cap):
        tried.add(j)
        cert = _try(inst, j, True)
        if cert is not None:
            return cert
    for j in range(1, cap + 1):
        if j in tried:
            continue
        cert = _try(inst, j, False)
        if cert is not None:
            return cert
    return NotFoundUpTo(cap)
