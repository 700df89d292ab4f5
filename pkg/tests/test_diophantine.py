import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toricmmp.diophantine import (
    ApproxCertificate,
    ApproxInstance,
    NotFoundUpTo,
    approximate,
    candidate_denominators,
    check_certificate,
)
from toricmmp.errors import InputError
from toricmmp.kernel import QuadReal

from .oracles import mp_certificate_ok

F = Fraction
SQRT2_MINUS_1 = QuadReal(-1, 1, 2)


def test_sqrt2_fixture():
    cert = approximate(ApproxInstance([[1]], [SQRT2_MINUS_1], "1/10"))
    assert (cert.j, cert.m) == (12, (5,))
    assert cert.residual == (QuadReal(-17, 12, 2),)
    assert cert.from_convergent
    assert mp_certificate_ok([[1]], [SQRT2_MINUS_1], F(1, 10), 12, (5,))


def test_two_coordinates():
    cert = approximate(ApproxInstance([[1, 0], [0, 1]], [SQRT2_MINUS_1, 1], "1/10"))
    assert (cert.j, cert.m) == (12, (5, 12))


def test_lowest_j_overall_for_fixture():
    # no j < 12 works, checked directly
    inst = ApproxInstance([[1]], [SQRT2_MINUS_1], "1/10")
    for j in range(1, 12):
        assert not any(check_certificate(inst, j, (m,))[0] for m in range(0, j + 1))


def test_instance_validation():
    with pytest.raises(InputError):
        ApproxInstance([[1]], ["1/2"], "1/10")
    with pytest.raises(InputError):
        ApproxInstance([[0]], [SQRT2_MINUS_1], "1/10")
    with pytest.raises(InputError):
        ApproxInstance([[1]], [SQRT2_MINUS_1], 0)
    with pytest.raises(InputError):
        ApproxInstance([[1, 1]], [SQRT2_MINUS_1, QuadReal(0, 1, 3)], "1/10")
    with pytest.raises(InputError):
        ApproxInstance([[-1]], [SQRT2_MINUS_1], "1/10")


def test_not_found_is_a_budget_outcome():
    res = approximate(ApproxInstance([[1]], [SQRT2_MINUS_1], "1/1000"), cap=20)
    assert res == NotFoundUpTo(20)


def test_candidates_are_convergent_denominators():
    inst = ApproxInstance([[1]], [SQRT2_MINUS_1], "1/10")
    assert candidate_denominators(inst, 100) == [1, 2, 5, 12, 29, 70]


def test_combined_support():
    # D = d1 P1 + d2 P2 with P1 = G1 + G2, P2 = G2
    d = [QuadReal(0, F(1, 3), 5), QuadReal(1, F(1, 2), 5)]
    E = [[1, 0], [1, 1]]
    cert = approximate(ApproxInstance(E, d, "1/10"))
    assert isinstance(cert, ApproxCertificate)
    assert mp_certificate_ok(E, d, F(1, 10), cert.j, cert.m)


discs = st.sampled_from([2, 3, 5])
coeffs = st.fractions(min_value=F(1, 7), max_value=3, max_denominator=7)


@settings(max_examples=25)
@given(discs, coeffs, st.fractions(min_value=0, max_value=2, max_denominator=5), st.sampled_from([F(1, 10), F(1, 100)]))
def test_certificates_reverify(disc, b, a, eps):
    d = QuadReal(a, b, disc)
    inst = ApproxInstance([[1]], [d], eps)
    cert = approximate(inst, 10_000)
    assert isinstance(cert, ApproxCertificate)
    ok, _ = check_certificate(inst, cert.j, cert.m)
    assert ok
    assert mp_certificate_ok(inst.E, inst.d, eps, cert.j, cert.m)
    # a certificate at eps/2 also certifies eps
    half = approximate(ApproxInstance([[1]], [d], eps / 2), 10_000)
    assert check_certificate(inst, half.j, half.m)[0]
