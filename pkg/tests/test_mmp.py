from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toricmmp.corpus import circuit_3fold, hirzebruch, p1xp1, p2, product, p1, surface_corpus
from toricmmp.errors import BudgetExceeded, InputError, NotExtremal, NotFlipping, NotNegative
from toricmmp.fan import Fan, TorusDivisor, divisor, fans_isomorphic, is_nef
from toricmmp.mmp import (
    DIVISORIAL,
    FIBRATION,
    FLIPPING,
    MINIMAL_MODEL,
    MORI_FIBRE_SPACE,
    contract,
    flip,
    flip_circuit,
    flip_with_report,
    mori_cone_generators,
    run_mmp,
)
from toricmmp.pairs import ToricPair

F = Fraction


def _extremal(pair):
    return [r for r in mori_cone_generators(pair) if r.extremal]


@pytest.mark.parametrize("fan,count", [(p2(), 1), (p1xp1(), 2), (hirzebruch(1), 2), (hirzebruch(3), 2)])
def test_extremal_ray_counts(fan, count):
    assert len(_extremal(ToricPair.trivial(fan))) == count


def test_f1_contractions():
    pair = ToricPair.trivial(hirzebruch(1))
    steps = {contract(pair, r).kind: contract(pair, r) for r in _extremal(pair)}
    assert set(steps) == {DIVISORIAL, FIBRATION}
    div = steps[DIVISORIAL]
    assert div.removed == (1,) and div.exceptional_degree == -1
    assert fans_isomorphic(div.target, p2())
    assert steps[FIBRATION].base.rank == 1


def test_fibrations_to_point_and_line():
    step = contract(ToricPair.trivial(p2()), _extremal(ToricPair.trivial(p2()))[0])
    assert step.kind == FIBRATION and step.base.rank == 0
    for r in _extremal(ToricPair.trivial(p1xp1())):
        s = contract(ToricPair.trivial(p1xp1()), r)
        assert s.kind == FIBRATION and s.base.rank == 1 and len(s.base.rays) == 2


def test_contract_rejects_bad_rays():
    pair = ToricPair.trivial(hirzebruch(1))
    non = [r for r in mori_cone_generators(pair) if not r.extremal]
    with pytest.raises(NotExtremal):
        contract(pair, non[0])
    flipped, _ = flip_with_report(ToricPair(circuit_3fold(), divisor("1/2", 0, 0, 0)), _flip_step())
    (ray,) = mori_cone_generators(flipped)
    with pytest.raises(NotNegative):
        contract(flipped, ray)


def _flip_step():
    pair = ToricPair(circuit_3fold(), divisor("1/2", 0, 0, 0))
    (ray,) = mori_cone_generators(pair)
    return contract(pair, ray)


def test_circuit_flip():
    pair = ToricPair(circuit_3fold(), divisor("1/2", 0, 0, 0))
    step = _flip_step()
    assert step.kind == FLIPPING and step.negative == (0, 1) and step.positive == (2, 3)
    new, report = flip_with_report(pair, step)
    assert sorted(new.fan.cones) == [(0, 2, 3), (1, 2, 3)]
    assert report.ok and report.small and report.relative_picard == 1
    assert [x for _, x in report.new_walls] == [F(1, 2)]
    assert report.samples == 100 and report.monotone


def test_flip_twice_restores():
    pair = ToricPair(circuit_3fold(), divisor("1/2", 0, 0, 0))
    step = _flip_step()
    new = flip(pair, step)
    back = flip_circuit(new.fan, [w for w in new.fan.walls], step.positive, step.negative)
    assert sorted(back.cones) == sorted(circuit_3fold().cones)


def test_flip_requires_flipping_step():
    pair = ToricPair.trivial(hirzebruch(1))
    step = contract(pair, _extremal(pair)[0])
    with pytest.raises(NotFlipping):
        flip(pair, step)


def test_run_mmp_f1():
    trace = run_mmp(ToricPair.trivial(hirzebruch(1)))
    assert trace.kinds == [DIVISORIAL, FIBRATION] and trace.verdict == MORI_FIBRE_SPACE
    assert fans_isomorphic(trace.final.fan, p2())


def test_run_mmp_with_scaling_p2():
    trace = run_mmp(ToricPair.trivial(p2()), "scaling", divisor(3, 0, 0))
    assert trace.lambdas == [1] and trace.verdict == MORI_FIBRE_SPACE


def test_run_mmp_circuit_reaches_minimal_model():
    trace = run_mmp(ToricPair(circuit_3fold(), divisor("1/2", 0, 0, 0)))
    assert trace.kinds == [FLIPPING] and trace.verdict == MINIMAL_MODEL
    assert trace.steps[0].flip_report.ok


def test_minimal_model_when_already_nef():
    pair = ToricPair(p1(), divisor(1, 1))
    assert run_mmp(pair).verdict == MINIMAL_MODEL and run_mmp(pair).steps == []


def test_budget():
    with pytest.raises(BudgetExceeded) as info:
        run_mmp(ToricPair.trivial(hirzebruch(1)), budget=1)
    assert info.value.trace.kinds == [DIVISORIAL]


def test_driver_input_errors():
    with pytest.raises(InputError):
        run_mmp(ToricPair.trivial(p2()), "scaling")
    with pytest.raises(InputError):
        run_mmp(ToricPair.trivial(p2()), "scaling", divisor(1, 0, 0))  # K + A not nef
    with pytest.raises(InputError):
        run_mmp(ToricPair.trivial(p2()), tie_break="random")


def test_scaling_lambdas_decrease_on_corpus():
    for fan in surface_corpus(21, 8):
        pair = ToricPair.trivial(fan)
        from toricmmp.fan import find_ample

        H = find_ample(fan)
        k = 1
        while not is_nef(fan, pair.log_canonical_divisor() + H * k):
            k += 1
        trace = run_mmp(pair, "scaling", H * k)
        lams = trace.lambdas
        assert all(a >= b for a, b in zip(lams, lams[1:]))
        assert all(0 < x <= 1 for x in lams)


def test_threefold_product_fibration():
    pair = ToricPair.trivial(product(p2(), p1()))
    trace = run_mmp(pair)
    assert trace.verdict == MORI_FIBRE_SPACE and trace.kinds == [FIBRATION]


@settings(max_examples=15)
@given(st.integers(0, 10_000), st.sampled_from(["lex", "revlex"]))
def test_surface_mmp_terminates_without_flips(seed, tie):
    (fan,) = surface_corpus(seed, 1)
    trace = run_mmp(ToricPair.trivial(fan), tie_break=tie)
    assert FLIPPING not in trace.kinds
    assert len(trace.steps) <= fan.nrays - 3 + 1
    assert trace.verdict in (MINIMAL_MODEL, MORI_FIBRE_SPACE)
    picards = [s.picard_before for s in trace.steps]
    assert picards == sorted(picards, reverse=True)
