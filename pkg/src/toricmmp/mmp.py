"""Mori cone, contractions, flips and the MMP driver on toric pairs.

Curve classes are recorded as the vector of intersection numbers with all
torus-invariant prime divisors; wall curves generate the cone of curves.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import (
    BudgetExceeded,
    FlipVerificationFailed,
    InputError,
    NotExtremal,
    NotFlipping,
    NotNegative,
)
from .fan import Fan, TorusDivisor, Wall, intersection_number, is_nef
from .kernel import EmptyFeasible, dot, integer_kernel, lp_solve, primitive, rank, rat_str
from .pairs import LogDiscrepancyFunction, ToricPair, classify

DIVISORIAL, FLIPPING, FIBRATION = "divisorial", "flipping", "fibration"
MINIMAL_MODEL, MORI_FIBRE_SPACE = "minimal-model", "mori-fibre-space"


def _class_key(c: Sequence[Fraction]) -> tuple[Fraction, ...]:
    lead = next(abs(x) for x in c if x != 0)
    return tuple(x / lead for x in c)


@dataclass(frozen=True)
class ExtremalRay:
    """A ray of the cone of curves, with every wall whose class spans it."""

    walls: tuple[Wall, ...]
    curve_class: tuple[Fraction, ...]
    pairing: Fraction
    extra: tuple[tuple[str, Fraction], ...] = ()
    extremal: bool = True
    certificate: tuple[tuple[int, ...], ...] = ()

    @property
    def representative(self) -> Wall:
        return self.walls[0]

    @property
    def key(self) -> tuple[int, ...]:
        w = self.representative
        return tuple(sorted(w.shared + w.opposite))

    def pairing_with(self, name: str) -> Fraction:
        return dict(self.extra)[name]

    def to_json(self) -> dict:
        return {
            "wall": list(self.representative.shared),
            "rays": list(self.key),
            "class": [rat_str(x) for x in self.curve_class],
            "pairing": rat_str(self.pairing),
            "extremal": self.extremal,
        }


def _in_cone_of(target, gens) -> bool:
    """Is ``target`` a nonnegative combination of ``gens``?  (exact LP)"""
    if not gens:
        return False
    k = len(gens)
    eqs = [([g[r] for g in gens], target[r]) for r in range(len(target))]
    ineqs = [([int(i == j) for j in range(k)], 0) for i in range(k)]
    try:
        lp_solve([0] * k, ineqs=ineqs, eqs=eqs, nvars=k)
    except EmptyFeasible:
        return False
    return True


def mori_cone_generators(pair: ToricPair, divisors: dict[str, TorusDivisor] | None = None) -> list[ExtremalRay]:
    """Wall classes up to positive proportionality, paired with K + Delta.

    Each candidate carries an extremality flag: a class that is a positive
    combination of the other classes is not extremal.
    """
    fan = pair.fan
    KD = pair.log_canonical_divisor()
    groups: dict[tuple, list[Wall]] = {}
    for w in fan.walls:
        groups.setdefault(_class_key(w.curve_class(fan.nrays)), []).append(w)
    keys = list(groups)
    out = []
    for key in keys:
        walls = sorted(groups[key], key=lambda w: tuple(sorted(w.shared + w.opposite)))
        rep = walls[0]
        cls = rep.curve_class(fan.nrays)
        others = [k for k in keys if k != key]
        extremal = not _in_cone_of(key, others)
        extra = tuple(
            (name, intersection_number(fan, D, rep)) for name, D in sorted((divisors or {}).items())
        )
        out.append(
            ExtremalRay(
                walls=tuple(walls),
                curve_class=cls,
                pairing=intersection_number(fan, KD, rep),
                extra=extra,
                extremal=extremal,
                certificate=tuple(tuple(sorted(w.shared)) for w in walls),
            )
        )
    out.sort(key=lambda r: r.key)
    return out


# ---------------------------------------------------------------------------
# contractions


@dataclass(frozen=True)
class FibrationBase:
    rank: int
    rays: tuple[tuple[int, ...], ...]
    cones: tuple[tuple[int, ...], ...]
    projection: tuple[tuple[int, ...], ...]

    def to_json(self) -> dict:
        return {"rank": self.rank, "rays": [list(r) for r in self.rays], "cones": [list(c) for c in self.cones]}


@dataclass(frozen=True)
class ContractionStep:
    kind: str
    ray: ExtremalRay
    removed: tuple[int, ...]
    merged: tuple[tuple[int, ...], ...]
    negative: tuple[int, ...]
    positive: tuple[int, ...]
    target: Fan | None = None
    base: FibrationBase | None = None
    exceptional_degree: Fraction | None = None

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            "ray": self.ray.to_json(),
            "removed": list(self.removed),
            "merged": [list(c) for c in self.merged],
        }
        if self.target is not None:
            out["target"] = fan_json(self.target)
        if self.base is not None:
            out["base"] = self.base.to_json()
        return out


def fan_json(fan: Fan) -> dict:
    return {"rank": fan.rank, "rays": [list(r) for r in fan.rays], "cones": [list(c) for c in fan.cones]}


def contract(pair: ToricPair, ray: ExtremalRay) -> ContractionStep:
    if not ray.extremal:
        raise NotExtremal("the class is not extremal in the cone of curves")
    if ray.pairing >= 0:
        raise NotNegative(f"(K+Delta).C = {ray.pairing} is not negative")
    fan = pair.fan
    neg = tuple(k for k, x in enumerate(ray.curve_class) if x < 0)
    pos = tuple(k for k, x in enumerate(ray.curve_class) if x > 0)
    merged = tuple(sorted({tuple(sorted(set(fan.cones[w.cones[0]]) | set(fan.cones[w.cones[1]]))) for w in ray.walls}))
    if not neg:
        base = _fibration_base(fan, pos)
        return ContractionStep(FIBRATION, ray, (), merged, neg, pos, base=base)
    if len(neg) == 1:
        i = neg[0]
        E = TorusDivisor.prime(fan.nrays, i)
        degree = intersection_number(fan, E, ray.representative)
        if degree >= 0:
            raise FlipVerificationFailed(f"exceptional divisor has E.C = {degree} >= 0")
        target = _blow_down(fan, i, merged)
        return ContractionStep(DIVISORIAL, ray, (i,), merged, neg, pos, target=target, exceptional_degree=degree)
    return ContractionStep(FLIPPING, ray, (), merged, neg, pos)


def _blow_down(fan: Fan, i: int, merged) -> Fan:
    keep = [c for c in fan.cones if i not in c]
    consumed = {c for c in fan.cones if i in c}
    new_cones = set()
    for m in merged:
        cone = tuple(j for j in m if j != i)
        new_cones.add(cone)
        consumed -= {c for c in consumed if set(c) <= set(m)}
    if consumed:
        raise InputError(f"cones {sorted(consumed)} containing the exceptional ray are not merged")
    index = {old: new for new, old in enumerate(j for j in range(fan.nrays) if j != i)}
    rays = [r for j, r in enumerate(fan.rays) if j != i]
    cones = [tuple(index[j] for j in c) for c in list(keep) + sorted(new_cones)]
    return Fan(rays, cones, fan.rank)


def _fibration_base(fan: Fan, support: Sequence[int]) -> FibrationBase:
    gens = [fan.rays[k] for k in support]
    Q = integer_kernel(gens, fan.rank)  # rows: functionals vanishing on the fibre span
    d = len(Q)
    if d >= fan.rank:
        raise InputError("fibration must have positive-dimensional fibres")
    if d == 0:
        return FibrationBase(0, (), (), ())
    images = []
    for v in fan.rays:
        img = tuple(dot(q, v) for q in Q)
        images.append(primitive(img).coords if any(img) else None)
    rays = sorted({im for im in images if im is not None})
    idx = {r: k for k, r in enumerate(rays)}
    cones = set()
    for c in fan.cones:
        imgs = sorted({idx[images[j]] for j in c if images[j] is not None})
        if rank([list(rays[k]) for k in imgs]) == d and len(imgs) == d:
            cones.add(tuple(imgs))
    return FibrationBase(d, tuple(rays), tuple(sorted(cones)), tuple(Q))


# ---------------------------------------------------------------------------
# flips


def flip_circuit(fan: Fan, walls: Sequence[Wall], negative: Sequence[int], positive: Sequence[int]) -> Fan:
    """Replace the triangulation of each circuit by the opposite one.

    For a wall with circuit rays C = negative + positive and remaining rays
    Z, the cones (C + Z) - {j}, j positive, become (C + Z) - {j}, j negative.
    """
    circuit = set(negative) | set(positive)
    remove, add = set(), set()
    for w in walls:
        full = set(fan.cones[w.cones[0]]) | set(fan.cones[w.cones[1]])
        if set(w.relation) != circuit:
            raise FlipVerificationFailed("walls of the ray do not share one circuit")
        for j in positive:
            remove.add(tuple(sorted(full - {j})))
        for j in negative:
            add.add(tuple(sorted(full - {j})))
    present = set(fan.cones)
    missing = remove - present
    if missing:
        raise FlipVerificationFailed(f"expected cones {sorted(missing)} are not in the fan")
    cones = sorted((present - remove) | add)
    try:
        return Fan(fan.rays, cones, fan.rank)
    except InputError as exc:
        raise FlipVerificationFailed(f"re-triangulation is not a fan: {exc}") from exc


@dataclass
class FlipReport:
    small: bool
    new_walls: list[tuple[tuple[int, ...], Fraction]]
    relative_picard: int
    samples: int
    strict: int
    monotone: bool

    @property
    def ok(self) -> bool:
        return (
            self.small
            and bool(self.new_walls)
            and all(x > 0 for _, x in self.new_walls)
            and self.relative_picard == 1
            and self.monotone
        )

    def to_json(self) -> dict:
        return {
            "small": self.small,
            "flipped_walls": [{"wall": list(k), "pairing": rat_str(x)} for k, x in self.new_walls],
            "relative_picard": self.relative_picard,
            "valuations_sampled": self.samples,
            "valuations_strict": self.strict,
            "monotone": self.monotone,
        }


def _minimal_face(fan: Fan, v) -> frozenset[int] | None:
    for ci, cone in enumerate(fan.cones):
        lam = fan.coordinates_in(ci, v)
        if lam is not None and all(x >= 0 for x in lam):
            return frozenset(i for i, x in zip(cone, lam) if x > 0)
    return None


def sample_valuations(fan: Fan, rays: Sequence[int], count: int, seed: int = 0) -> list[tuple[int, ...]]:
    """Distinct primitive vectors of cone(rays), from seeded random nonnegative combinations."""
    rng = random.Random(seed)
    seen: dict[tuple[int, ...], None] = {}
    rays = list(rays)
    attempts = 0
    while len(seen) < count and attempts < 50 * count:
        attempts += 1
        coeffs = [rng.randint(0, 6) for _ in rays]
        if not any(coeffs):
            continue
        v = tuple(sum(c * fan.rays[j][k] for c, j in zip(coeffs, rays)) for k in range(fan.rank))
        if not any(v):
            continue
        seen.setdefault(primitive(v).coords, None)
    return list(seen)


def verify_flip(old: ToricPair, new: ToricPair, step: ContractionStep, samples: int = 100, seed: int = 0) -> FlipReport:
    """Check smallness, relative ampleness of K+Delta, relative Picard rank one
    and monotonicity of discrepancies on sampled toric valuations."""
    fan, fan_p = old.fan, new.fan
    small = fan.rays == fan_p.rays
    circuit = set(step.negative) | set(step.positive)
    old_cones = set(fan.cones)
    KD = new.log_canonical_divisor()
    flipped = []
    classes = set()
    for w in fan_p.walls:
        c0, c1 = fan_p.cones[w.cones[0]], fan_p.cones[w.cones[1]]
        if c0 in old_cones or c1 in old_cones or set(w.relation) != circuit:
            continue
        flipped.append((tuple(sorted(w.shared)), intersection_number(fan_p, KD, w)))
        classes.add(_class_key(w.curve_class(fan_p.nrays)))
    region = set()
    for cone in step.merged:
        region |= set(cone)
    ld, ld_p = LogDiscrepancyFunction(old), LogDiscrepancyFunction(new)
    vals = sample_valuations(fan, sorted(region), samples, seed)
    monotone = True
    strict = 0
    for v in vals:
        a, a_p = ld(v), ld_p(v)
        same_face = _minimal_face(fan, v) == _minimal_face(fan_p, v)
        if a_p < a or (same_face and a_p != a) or (not same_face and a_p <= a):
            monotone = False
        if a_p > a:
            strict += 1
    return FlipReport(small, flipped, len(classes), len(vals), strict, monotone)


def flip(pair: ToricPair, step: ContractionStep, samples: int = 100, seed: int = 0) -> ToricPair:
    if step.kind != FLIPPING:
        raise NotFlipping(f"step is {step.kind}, not flipping")
    fan_p = flip_circuit(pair.fan, step.ray.walls, step.negative, step.positive)
    new = ToricPair(fan_p, pair.boundary, strict=pair.strict)
    report = verify_flip(pair, new, step, samples, seed)
    if not report.ok:
        raise FlipVerificationFailed(f"flip checks failed: {report.to_json()}")
    return new


def flip_with_report(pair: ToricPair, step: ContractionStep, samples: int = 100, seed: int = 0):
    new = flip(pair, step, samples, seed)
    return new, verify_flip(pair, new, step, samples, seed)


# ---------------------------------------------------------------------------
# the driver


@dataclass
class MMPStep:
    fan: Fan
    boundary: TorusDivisor
    ray: ExtremalRay
    kind: str
    picard_before: int
    picard_after: int | None
    scaling: Fraction | None = None
    flip_report: FlipReport | None = None

    def to_json(self) -> dict:
        out = {
            "fan": fan_json(self.fan),
            "boundary": self.boundary.to_json(),
            "ray": self.ray.to_json(),
            "kind": self.kind,
            "picard_before": self.picard_before,
            "picard_after": self.picard_after,
        }
        if self.scaling is not None:
            out["lambda"] = rat_str(self.scaling)
        if self.flip_report is not None:
            out["flip_checks"] = self.flip_report.to_json()
        return out


@dataclass
class MMPTrace:
    steps: list[MMPStep] = field(default_factory=list)
    verdict: str | None = None
    final: ToricPair | None = None
    mode: str = "plain"

    @property
    def kinds(self) -> list[str]:
        return [s.kind for s in self.steps]

    @property
    def lambdas(self) -> list[Fraction]:
        return [s.scaling for s in self.steps if s.scaling is not None]

    def to_json(self) -> dict:
        out = {"mode": self.mode, "verdict": self.verdict, "steps": [s.to_json() for s in self.steps]}
        if self.final is not None:
            out["final"] = {"fan": fan_json(self.final.fan), "boundary": self.final.boundary.to_json()}
        return out


def _pick(rays: list[ExtremalRay], tie_break: str) -> ExtremalRay:
    if tie_break == "lex":
        return min(rays, key=lambda r: r.key)
    if tie_break == "revlex":
        return max(rays, key=lambda r: r.key)
    raise InputError(f"unknown tie-break rule {tie_break!r}")


def run_mmp(
    pair: ToricPair,
    mode: str = "plain",
    scale: TorusDivisor | None = None,
    budget: int = 1000,
    tie_break: str = "lex",
    samples: int = 100,
) -> MMPTrace:
    """Run the (K+Delta)-MMP, optionally with scaling of ``scale``.

    Stops at a minimal model (K+Delta nef) or a Mori fibre space; raises
    :class:`BudgetExceeded` carrying the partial trace after ``budget`` steps.
    """
    if mode not in ("plain", "scaling"):
        raise InputError(f"unknown mode {mode!r}")
    if not classify(pair).is_lc:
        raise InputError("the MMP driver needs an lc pair")
    A = scale
    if mode == "scaling":
        if A is None:
            raise InputError("scaling mode needs a divisor to scale")
        if not is_nef(pair.fan, pair.log_canonical_divisor() + A):
            raise InputError("K + Delta + A must be nef to start an MMP with scaling")
    trace = MMPTrace(mode=mode)
    current = pair
    while True:
        fan = current.fan
        KD = current.log_canonical_divisor()
        if is_nef(fan, KD):
            trace.verdict, trace.final = MINIMAL_MODEL, current
            return trace
        if len(trace.steps) >= budget:
            trace.final = current
            raise BudgetExceeded(f"no verdict within {budget} steps", trace)
        divisors = {"A": A} if A is not None else None
        rays = [r for r in mori_cone_generators(current, divisors) if r.extremal and r.pairing < 0]
        if not rays:
            raise InputError("K + Delta is not nef but no negative extremal ray was found")
        lam = None
        if mode == "scaling":
            ratios = [(-r.pairing / r.pairing_with("A"), r) for r in rays]
            lam = max(t for t, _ in ratios)
            rays = [r for t, r in ratios if t == lam]
        ray = _pick(rays, tie_break)
        step = contract(current, ray)
        rec = MMPStep(fan, current.boundary, ray, step.kind, fan.picard_number, None, lam)
        trace.steps.append(rec)
        if step.kind == FIBRATION:
            trace.verdict, trace.final = MORI_FIBRE_SPACE, current
            return trace
        if step.kind == DIVISORIAL:
            i = step.removed[0]
            current = ToricPair(step.target, current.boundary.drop(i), strict=current.strict)
            if A is not None:
                A = A.drop(i)
        else:
            new, report = flip_with_report(current, step, samples)
            rec.flip_report = report
            current = new
        rec.picard_after = current.fan.picard_number
