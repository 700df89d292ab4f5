"""Graded algebras of toric divisors: truncation, characteristic sequences,
finite generation, restricted algebras and saturation.

All b-divisor content lives on one fixed fan; verdicts hold relative to the
stated horizon only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .diophantine import ApproxCertificate, ApproxInstance, NotFoundUpTo, approximate
from .errors import ClaimViolation, EmptyLinearSystem, InputError, NotSaturated, SNotIrreducible
from .fan import Fan, TorusDivisor, h0, mob_fix
from .kernel import QuadReal, Real, as_rat, convergents, exact_ceil, exact_floor, frac_part, is_irrational, rat_str, real_to_json
from .pairs import ToricPair

SINGLE_MODEL_NOTE = "evaluated on one fixed toric model; not a statement about all models"


def truncate(dims: Sequence[int], I: int) -> list[int]:
    """Degrees 0, I, 2I, ... of a graded dimension table (degree 0 kept)."""
    if I < 1:
        raise InputError("truncation index must be positive")
    return list(dims[::I])


# ---------------------------------------------------------------------------
# characteristic sequences


@dataclass
class CharacteristicSequence:
    """Mobile parts M_m (index m = 1..horizon) on a fixed fan; D_m = M_m / m.

    ``None`` marks an empty linear system.  ``limit`` is an optional declared
    limit of D_m, with rational or quadratic coefficients.
    """

    fan: Fan
    I: int
    mobiles: dict[int, TorusDivisor | None]
    limit: tuple[Real, ...] | None = None
    source: TorusDivisor | None = None

    @property
    def horizon(self) -> int:
        return max(self.mobiles, default=0)

    def M(self, m: int) -> TorusDivisor | None:
        return self.mobiles.get(m)

    def D(self, m: int) -> TorusDivisor | None:
        M = self.M(m)
        return None if M is None else M / m

    @classmethod
    def from_divisor(cls, fan: Fan, D: TorusDivisor, I: int = 1, horizon: int = 10, limit=None) -> "CharacteristicSequence":
        """M_m = Mob(floor(m I D))."""
        if I < 1:
            raise InputError("I must be positive")
        mobiles: dict[int, TorusDivisor | None] = {}
        for m in range(1, horizon + 1):
            try:
                mobiles[m] = mob_fix(fan, (D * (m * I)).floor())[0]
            except EmptyLinearSystem:
                mobiles[m] = None
        return cls(fan, I, mobiles, limit, D)

    @classmethod
    def from_pair(cls, pair: ToricPair, I: int = 1, horizon: int = 10) -> "CharacteristicSequence":
        return cls.from_divisor(pair.fan, pair.log_canonical_divisor(), I, horizon)

    @classmethod
    def explicit(cls, fan: Fan, mobiles: Sequence[TorusDivisor | None], limit=None, I: int = 1) -> "CharacteristicSequence":
        return cls(fan, I, {m + 1: M for m, M in enumerate(mobiles)}, limit)

    def superadditive(self) -> bool:
        for m in range(1, self.horizon + 1):
            for n in range(1, self.horizon - m + 1):
                a, b, c = self.M(m), self.M(n), self.M(m + n)
                if a is None or b is None:
                    continue
                if c is None or not c >= a + b:
                    return False
        return True


@dataclass(frozen=True)
class FGWitness:
    index: int
    checked_multiples: int

    def to_json(self) -> dict:
        return {"status": "fg-witness", "index": self.index, "checked_multiples": self.checked_multiples}


@dataclass(frozen=True)
class NoWitnessUpTo:
    horizon: int

    def to_json(self) -> dict:
        return {"status": "no-witness", "horizon": self.horizon}


def fg_test_stabilization(seq: CharacteristicSequence, horizon: int | None = None) -> FGWitness | NoWitnessUpTo:
    """Least i with M_ik = k M_i for 1 <= k <= horizon / i.

    An index needs at least two checked multiples; otherwise every sequence
    would witness itself at its last index.
    """
    horizon = seq.horizon if horizon is None else min(horizon, seq.horizon)
    for i in range(1, horizon // 2 + 1):
        Mi = seq.M(i)
        if Mi is None:
            continue
        top = horizon // i
        if all(seq.M(i * k) == Mi * k for k in range(2, top + 1)):
            return FGWitness(i, top)
    return NoWitnessUpTo(horizon)


# ---------------------------------------------------------------------------
# restricted algebras


@dataclass
class RestrictedAlgebraTable:
    fan: Fan
    divisor: TorusDivisor
    S: int
    I: int
    dims: list[int]
    fixed_degrees: list[int] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "S": self.S,
            "I": self.I,
            "divisor": self.divisor.to_json(),
            "dims": self.dims,
            "S_in_fixed_locus": self.fixed_degrees,
        }


def restricted_dims(pair: ToricPair, I: int, horizon: int, D: TorusDivisor | None = None) -> RestrictedAlgebraTable:
    """h_n = h0(floor(nI D)) - h0(floor(nI D) - S), D = K + Delta by default.

    Degrees where |nI D| is nonempty but every section vanishes on S are
    listed in ``fixed_degrees``.
    """
    reduced = pair.reduced_part
    if len(reduced) != 1:
        raise SNotIrreducible(f"floor(Delta) has {len(reduced)} components, need exactly one")
    if I < 1:
        raise InputError("I must be positive")
    s = reduced[0]
    fan = pair.fan
    D = pair.log_canonical_divisor() if D is None else D
    S = TorusDivisor.prime(fan.nrays, s)
    dims, fixed = [], []
    for n in range(horizon + 1):
        B = (D * (n * I)).floor()
        full = h0(fan, B)
        h = full - h0(fan, B - S)
        dims.append(h)
        if full > 0 and h == 0:
            fixed.append(n)
    return RestrictedAlgebraTable(fan, D, s, I, dims, fixed)


# ---------------------------------------------------------------------------
# the one-dimensional case


@dataclass(frozen=True)
class AdjointSequenceA1:
    """d_1..d_N for D_i = d_i P on the affine line with boundary b P."""

    b: Fraction
    table: tuple[Fraction, ...]
    limit: Real

    def __init__(self, b, table: Sequence, limit):
        b = as_rat(b)
        table = tuple(as_rat(x) for x in table)
        if isinstance(limit, QuadReal):
            limit = limit.a if limit.is_rational else limit
        else:
            limit = as_rat(limit)
        if not 0 <= b < 1:
            raise InputError("b must lie in [0, 1)")
        if any(x < 0 for x in table):
            raise InputError("table entries must be nonnegative")
        if any(x > limit for x in table):
            raise InputError("table entries may not exceed the limit")
        N = len(table)
        for i in range(1, N + 1):
            for j in range(1, N - i + 1):
                if (i + j) * table[i + j - 1] < i * table[i - 1] + j * table[j - 1]:
                    raise InputError(f"concavity fails at ({i}, {j})")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "limit", limit)

    @property
    def horizon(self) -> int:
        return len(self.table)

    @property
    def q(self) -> int:
        return exact_floor(1 / (1 - self.b))

    def d(self, i: int) -> Fraction:
        return self.table[i - 1]

    @classmethod
    def from_limit(cls, b, limit, horizon: int) -> "AdjointSequenceA1":
        """The table d_j = floor(j d) / j."""
        return cls(b, [Fraction(exact_floor(j * limit), j) for j in range(1, horizon + 1)], limit)


@dataclass(frozen=True)
class Saturated:
    horizon: int

    def to_json(self) -> dict:
        return {"status": "saturated", "horizon": self.horizon, "scope": SINGLE_MODEL_NOTE}


@dataclass(frozen=True)
class Violation:
    i: int | None  # None: the limit form
    j: int

    def to_json(self) -> dict:
        return {"status": "violation", "i": "limit" if self.i is None else self.i, "j": self.j}


def saturation_check_a1(seq: AdjointSequenceA1) -> Saturated | Violation:
    """ceil(j d_i - b) <= j d_j for N >= i >= j >= 1, then ceil(j d - b) <= j d_j."""
    b = seq.b
    for j in range(1, seq.horizon + 1):
        rhs = j * seq.d(j)
        for i in range(j, seq.horizon + 1):
            if exact_ceil(j * seq.d(i) - b) > rhs:
                return Violation(i, j)
        if exact_ceil(j * seq.limit - b) > rhs:
            return Violation(None, j)
    return Saturated(seq.horizon)


@dataclass(frozen=True)
class FGResultA1:
    denominator: int
    numerator: int
    generator_degree: int
    q: int

    @property
    def statement(self) -> str:
        return f"R^({self.denominator}) = R(A^1, {self.numerator}P)"

    def to_json(self) -> dict:
        return {
            "status": "finitely-generated",
            "v": self.denominator,
            "u": self.numerator,
            "generator_degree": self.generator_degree,
            "q": self.q,
            "truncation": self.statement,
        }


@dataclass(frozen=True)
class RationalityRefutation:
    j: int
    fractional_part: Real
    b: Fraction

    def to_json(self) -> dict:
        return {
            "status": "rationality-refutation",
            "j": self.j,
            "fractional_part": real_to_json(self.fractional_part),
            "b": rat_str(self.b),
        }


def _refute(d: QuadReal, b: Fraction) -> RationalityRefutation:
    # convergents from above make {jd} close to 1; then scan below for the least j
    bound = None
    for scale in (10**3, 10**6, 10**12):
        for _, qk in convergents(d, scale):
            if frac_part(qk * d) > b:
                bound = qk
                break
        if bound is not None:
            break
    if bound is None:
        raise ClaimViolation("no index with {jd} > b found among convergents")
    j = next(j for j in range(1, bound + 1) if frac_part(j * d) > b)
    return RationalityRefutation(j, frac_part(j * d), b)


def fg_a1(seq: AdjointSequenceA1) -> FGResultA1 | RationalityRefutation:
    """Finite generation on the affine line.

    An irrational limit is refuted by an index j with {jd} > b, which no
    saturated algebra admits.  A rational limit u/v must have v | q! and
    d_v = d, and then R^(v) = R(A^1, uP).
    """
    if is_irrational(seq.limit):
        return _refute(seq.limit, seq.b)
    verdict = saturation_check_a1(seq)
    if isinstance(verdict, Violation):
        raise NotSaturated(f"saturation fails at {verdict.to_json()}", verdict)
    d = seq.limit
    u, v = d.numerator, d.denominator
    q = seq.q
    if math.factorial(q) % v:
        raise ClaimViolation(f"denominator {v} does not divide {q}!")
    if v > seq.horizon:
        raise ClaimViolation(f"table of length {seq.horizon} does not reach index {v}")
    if seq.d(v) != d:
        raise ClaimViolation(f"d_{v} = {seq.d(v)} differs from the limit {d}")
    return FGResultA1(v, u, v, q)


# ---------------------------------------------------------------------------
# saturation on a toric model


@dataclass(frozen=True)
class ToricViolation:
    i: int
    j: int
    mobile: TorusDivisor | None
    bound: TorusDivisor | None

    def to_json(self) -> dict:
        return {
            "status": "violation",
            "i": self.i,
            "j": self.j,
            "mobile": None if self.mobile is None else self.mobile.to_json(),
            "bound": None if self.bound is None else self.bound.to_json(),
        }


def _mob_or_none(fan: Fan, B: TorusDivisor) -> TorusDivisor | None:
    try:
        return mob_fix(fan, B)[0]
    except EmptyLinearSystem:
        return None


def saturation_check_toric(seq: CharacteristicSequence, F: TorusDivisor, horizon: int | None = None) -> Saturated | ToricViolation:
    """Mob ceil(j D_i + F) <= j D_j for horizon >= i >= j >= 1."""
    if not F.ceil().is_effective:
        raise InputError("ceil(F) must be effective")
    horizon = seq.horizon if horizon is None else min(horizon, seq.horizon)
    fan = seq.fan
    for i in range(1, horizon + 1):
        Di = seq.D(i)
        if Di is None:
            continue
        for j in range(1, i + 1):
            mob = _mob_or_none(fan, (Di * j + F).ceil())
            if mob is None:
                continue
            bound = seq.M(j)
            if bound is None or not mob <= bound:
                return ToricViolation(i, j, mob, bound)
    return Saturated(horizon)


@dataclass(frozen=True)
class FGCertificate:
    j: int
    limit: TorusDivisor

    def to_json(self) -> dict:
        return {"status": "fg-certificate", "j": self.j, "limit": self.limit.to_json(), "scope": SINGLE_MODEL_NOTE}


@dataclass(frozen=True)
class IrrationalRefutation:
    certificate: ApproxCertificate
    support: tuple[int, ...]

    def to_json(self) -> dict:
        return {"status": "refutation", "support": list(self.support), "certificate": self.certificate.to_json()}


@dataclass(frozen=True)
class Inconclusive:
    horizon: int
    reason: str

    def to_json(self) -> dict:
        return {"status": "inconclusive", "horizon": self.horizon, "reason": self.reason}


def sequence_limit(seq: CharacteristicSequence) -> tuple[Real, ...]:
    """Declared limit, else the coefficientwise supremum of the table."""
    if seq.limit is not None:
        return tuple(seq.limit)
    Ds = [seq.D(m) for m in range(1, seq.horizon + 1) if seq.D(m) is not None]
    if not Ds:
        raise InputError("sequence has no nonempty term")
    return tuple(max(D[k] for D in Ds) for k in range(seq.fan.nrays))


def fg6_pipeline(seq: CharacteristicSequence, F: TorusDivisor, cap: int = 100000):
    """Certify finite generation by the squeeze
    j D_j <= j D <= Mob(ceil(j D + F)) <= j D_j, or refute an irrational limit.
    """
    verdict = saturation_check_toric(seq, F)
    if isinstance(verdict, ToricViolation):
        raise NotSaturated(f"saturation fails at {verdict.to_json()}", verdict)
    limit = sequence_limit(seq)
    fan = seq.fan
    irr = [k for k, x in enumerate(limit) if is_irrational(x)]
    if irr:
        support = tuple(k for k, x in enumerate(limit) if x != 0)
        eps = min([Fraction(1, 2)] + [(F[k] + 1) / 2 for k in support])
        E = [[int(a == b) for b in range(len(support))] for a in range(len(support))]
        cert = approximate(ApproxInstance(E, [limit[k] for k in support], eps), cap)
        if isinstance(cert, NotFoundUpTo):
            return Inconclusive(seq.horizon, f"no approximation certificate up to {cap}")
        return IrrationalRefutation(cert, support)
    D = TorusDivisor(limit)
    den = math.lcm(*[x.denominator for x in D]) if len(D) else 1
    for j in range(den, seq.horizon + 1, den):
        jD = D * j
        Mj = seq.M(j)
        if Mj is None or not Mj <= jD:
            continue
        mob = _mob_or_none(fan, (jD + F).ceil())
        if mob is None or not (jD <= mob and mob <= Mj):
            continue
        if mob_fix(fan, jD)[0] != jD:
            continue
        return FGCertificate(j, D)
    return Inconclusive(seq.horizon, "squeeze not certified within the horizon")
