"""Acceptance criteria 1-8 with their runtime limits.

Each test prints one ``[PASS]``/``[FAIL]`` line.  Run standalone with
``python3 -m tests.test_acceptance`` or through pytest.
"""

from __future__ import annotations

import math
import random
import time
from fractions import Fraction

import pytest
import sympy

from toricmmp.adjoint import (
    AdjointSequenceA1,
    CharacteristicSequence,
    FGResultA1,
    FGWitness,
    RationalityRefutation,
    Saturated,
    fg_a1,
    fg_test_stabilization,
    restricted_dims,
    saturation_check_a1,
)
from toricmmp.corpus import circuit_3fold, hirzebruch, p1xp1, p2, surface_corpus, threefold_corpus
from toricmmp.diophantine import ApproxCertificate, ApproxInstance, approximate, check_certificate
from toricmmp.errors import EmptyLinearSystem
from toricmmp.fan import TorusDivisor, divisor, find_ample, h0, mob_fix
from toricmmp.kernel import QuadReal, exact_floor, frac_part
from toricmmp.mmp import FLIPPING, MINIMAL_MODEL, MORI_FIBRE_SPACE, contract, flip_with_report, mori_cone_generators, run_mmp
from toricmmp.pairs import ToricPair, nef_threshold
from toricmmp.strips import X, Y, candidate_forms, strip_vanishing_verify

from .oracles import brute_fix, brute_lattice_points, least_generating_index, mp_certificate_ok, restriction_rank

F = Fraction
SEED = 20240601
pytestmark = pytest.mark.acceptance


def _report(capsys, number: int, title: str, ok: bool, elapsed: float, limit: float, detail: str = ""):
    status = "PASS" if ok and elapsed < limit else "FAIL"
    line = f"[{status}] criterion {number}: {title} ({elapsed:.1f}s < {limit:.0f}s) {detail}".rstrip()
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)


def _timed(fn):
    t0 = time.perf_counter()
    ok, detail = fn()
    return ok, detail, time.perf_counter() - t0


# ---------------------------------------------------------------------------
# 1. rationality bound


def criterion_1():
    rng = random.Random(SEED)
    surfaces = surface_corpus(SEED, 100)
    threefolds = threefold_corpus(SEED, 20)
    checked = 0
    for fan in surfaces + threefolds:
        a = rng.choice([1, 2, 3])
        pair = ToricPair(fan, TorusDivisor(tuple(F(rng.randrange(a), a) for _ in range(fan.nrays))))
        res = nef_threshold(pair, find_ample(fan), a)
        if not 0 < res.v <= a * (fan.rank + 1):
            return False, f"v = {res.v} exceeds {a * (fan.rank + 1)}"
        checked += 1
    tight = nef_threshold(ToricPair.trivial(p2()), divisor(1, 0, 0), 1)
    return tight.v == 3 == tight.bound and checked == 120, f"{checked} pairs, P^2 v = {tight.v}"


# ---------------------------------------------------------------------------
# 2. strip lemma


def criterion_2():
    rng = random.Random(SEED + 2)
    cases = vanishing = 0
    for _ in range(60):
        v = rng.randint(1, 6)
        u = rng.randint(1, 12)
        while math.gcd(u, v) != 1:
            u += 1
        r = F(u, v)
        a = rng.randint(1, 2)
        eps = rng.choice([F(1, 2), F(1), F(2)])
        planted = candidate_forms(a, r, eps)
        extra = rng.choice([X + Y + 3, 2 * X - Y + 5, X**2 + Y**2 + 1])
        P = sympy.expand(sympy.Mul(*planted) * extra)
        n = sympy.Poly(P, X, Y).total_degree()
        verdict = strip_vanishing_verify(P, a, r, eps, 40, n)
        found = {sympy.expand(f) for f, _ in verdict.factors}
        if not {sympy.expand(f) for f in planted} <= found:
            return False, f"missed a planted factor for r = {r}"
        if verdict.vanishes and not (verdict.bound_ok and v <= F(a * (n + 1)) / eps):
            return False, f"denominator bound fails for r = {r}"
        vanishing += verdict.vanishes
        cases += 1
    return cases >= 50 and vanishing > 0, f"{cases} polynomials, {vanishing} vanish on their strip"


# ---------------------------------------------------------------------------
# 3. the one-dimensional proposition


def criterion_3():
    rng = random.Random(SEED + 3)
    third = 0
    for _ in range(200):
        b = F(rng.randint(0, 19), 20)
        q = exact_floor(1 / (1 - b))
        v = rng.randint(1, q)
        u = rng.randint(0, 4 * v)
        d = F(u, v)
        seq = AdjointSequenceA1.from_limit(b, d, v + rng.randint(0, 6))
        if saturation_check_a1(seq) != Saturated(seq.horizon):
            third += 1
            continue
        res = fg_a1(seq)
        if not (isinstance(res, FGResultA1) and math.factorial(q) % res.denominator == 0 and seq.d(res.denominator) == d):
            third += 1
    for _ in range(50):
        b = F(rng.randint(0, 9), 10)
        d = QuadReal(F(rng.randint(0, 3)), F(rng.randint(1, 9), rng.randint(1, 9)), rng.choice([2, 3, 5, 6, 7]))
        res = fg_a1(AdjointSequenceA1.from_limit(b, d, rng.randint(1, 5)))
        if not (isinstance(res, RationalityRefutation) and frac_part(res.j * d) > b):
            third += 1
    return third == 0, f"{third} third outcomes"


# ---------------------------------------------------------------------------
# 4. approximation certificates


def criterion_4():
    rng = random.Random(SEED + 4)
    fixture = approximate(ApproxInstance([[1]], [QuadReal(-1, 1, 2)], F(1, 10)))
    if (fixture.j, fixture.m) != (12, (5,)):
        return False, f"fixture gave j = {fixture.j}, m = {fixture.m}"
    verified = 0
    for k in range(25):
        disc = (2, 3, 5)[k % 3]
        eps = (F(1, 10), F(1, 100))[k % 2]
        x = QuadReal(F(rng.randint(0, 3)), F(rng.randint(1, 5), rng.randint(1, 5)), disc)
        if rng.random() < 0.5:
            d, E = [x], [[1]]
        else:
            # a second coordinate that is a rational multiple of the first, or rational
            y = x * F(rng.randint(1, 3)) if rng.random() < 0.5 else F(rng.randint(0, 4), 2)
            d, E = [x, y], [[1, 0], [rng.randint(0, 1), 1]]
        inst = ApproxInstance(E, d, eps)
        cert = approximate(inst, 100000)
        if not isinstance(cert, ApproxCertificate):
            return False, f"no certificate for instance {k}"
        if not check_certificate(inst, cert.j, cert.m)[0] or not mp_certificate_ok(E, d, eps, cert.j, cert.m):
            return False, f"certificate {k} fails re-verification"
        verified += 1
    return verified == 25, f"{verified} certificates, fixture j = 12, m = 5"


# ---------------------------------------------------------------------------
# 5. MMP driver


def criterion_5():
    for fan in surface_corpus(SEED, 100):
        trace = run_mmp(ToricPair.trivial(fan))
        if FLIPPING in trace.kinds or len(trace.steps) > fan.nrays - 3 + 1:
            return False, f"surface with {fan.nrays} rays took {trace.kinds}"
        if trace.verdict not in (MINIMAL_MODEL, MORI_FIBRE_SPACE):
            return False, "no verdict"
    pair = ToricPair(circuit_3fold(), divisor("1/2", 0, 0, 0))
    (ray,) = mori_cone_generators(pair)
    step = contract(pair, ray)
    new, report = flip_with_report(pair, step, samples=100)
    ok = step.kind == FLIPPING and report.ok and report.samples == 100
    return ok, f"100 surfaces, flip checks {report.to_json()['flipped_walls']}"


# ---------------------------------------------------------------------------
# 6. Mob / Fix


def criterion_6():
    rng = random.Random(SEED + 6)
    count = 0
    fans = surface_corpus(SEED, 100) + threefold_corpus(SEED, 5)
    for fan in fans:
        for _ in range(2):
            top = 3 if fan.rank == 2 else 1
            D = TorusDivisor(tuple(rng.randint(-1, top) for _ in range(fan.nrays)))
            pts = brute_lattice_points(fan.rays, D)
            try:
                mob, fix = mob_fix(fan, D)
            except EmptyLinearSystem:
                if pts:
                    return False, "empty system reported for a nonempty polytope"
                continue
            if h0(fan, D) != len(pts) or h0(fan, mob) != h0(fan, D) or tuple(fix) != brute_fix(fan.rays, D):
                return False, f"mismatch on divisor {D.to_json()}"
            count += 1
    return count > 0, f"{count} divisors"


# ---------------------------------------------------------------------------
# 7. finite-generation criterion


def fg_fixtures():
    rng = random.Random(SEED + 7)
    fixtures = [
        (p2(), divisor(1, 0, 0)),
        (hirzebruch(2), divisor(1, 3, 0, 0)),
        (hirzebruch(2), divisor("1/2", 1, 0, "1/2")),
        (p1xp1(), divisor("1/3", "1/2", 0, 0)),
    ]
    for fan in surface_corpus(SEED + 7, 26, 2):
        D = TorusDivisor(tuple(F(rng.randint(0, 3), rng.choice([1, 1, 2, 3])) for _ in range(fan.nrays)))
        fixtures.append((fan, D))
    return fixtures


def criterion_7():
    agree = 0
    fixtures = fg_fixtures()
    for fan, D in fixtures:
        seq = CharacteristicSequence.from_divisor(fan, D, 1, 20)
        verdict = fg_test_stabilization(seq)
        got = verdict.index if isinstance(verdict, FGWitness) else None
        expected = least_generating_index(lambda k: brute_lattice_points(fan.rays, D * k), 20)
        if got != expected:
            return False, f"disagreement on {D.to_json()}: {got} vs {expected}"
        agree += 1
    return agree == len(fixtures) == 30, f"{agree} fixtures"


# ---------------------------------------------------------------------------
# 8. restricted algebras


def criterion_8():
    rng = random.Random(SEED + 8)
    fans = surface_corpus(SEED + 8, 18, 2) + [p2(), p1xp1()]
    matched = 0
    for fan in fans:
        s = rng.randrange(fan.nrays)
        pair = ToricPair(fan, TorusDivisor.prime(fan.nrays, s))
        D = TorusDivisor(tuple(F(rng.randint(0, 3), rng.choice([1, 2])) for _ in range(fan.nrays)))
        I = rng.choice([1, 2])
        table = restricted_dims(pair, I, 4, D)
        for n, h in enumerate(table.dims):
            B = (D * (n * I)).floor()
            if h != restriction_rank(fan.rays, B, s):
                return False, f"degree {n} of {D.to_json()}"
            if sum(1 for m in brute_lattice_points(fan.rays, B) if sum(x * y for x, y in zip(m, fan.rays[s])) == -B[s]) != h:
                return False, "facet count differs"
        matched += 1
    return matched == 20, f"{matched} fixtures"


CRITERIA = [
    (1, "rationality bound v <= a(n+1)", criterion_1, 60),
    (2, "strip vanishing factors and denominator bound", criterion_2, 30),
    (3, "affine-line saturation and finite generation", criterion_3, 10),
    (4, "approximation certificates", criterion_4, 20),
    (5, "MMP driver on surfaces and the circuit flip", criterion_5, 60),
    (6, "Mob/Fix against brute force", criterion_6, 30),
    (7, "finite-generation criterion against semigroup generation", criterion_7, 60),
    (8, "restricted algebra against restriction rank", criterion_8, 30),
]


@pytest.mark.parametrize("number,title,fn,limit", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, title, fn, limit, capsys):
    ok, detail, elapsed = _timed(fn)
    _report(capsys, number, title, ok, elapsed, limit, detail)
    assert ok, detail
    assert elapsed < limit, f"took {elapsed:.1f}s (limit {limit}s)"


if __name__ == "__main__":
    for number, title, fn, limit in CRITERIA:
        ok, detail, elapsed = _timed(fn)
        _report(None, number, title, ok, elapsed, limit, detail)
