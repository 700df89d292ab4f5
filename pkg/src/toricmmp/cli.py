"""Command-line entry point.

Exit codes: 0 success, 2 negative verdict (report still printed), 1 input error.
"""

from __future__ import annotations

import argparse
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

from . import adjoint, diophantine, mmp, pairs, strips
from .corpus import surface_corpus, threefold_corpus
from .errors import (
    AlreadyNef,
    BoundViolation,
    BudgetExceeded,
    ClaimViolation,
    FlipVerificationFailed,
    InputError,
    NotKlt,
    NotSaturated,
    ToricMMPError,
)
from .fan import find_ample
from .io import (
    ParseError,
    SchemaError,
    dumps,
    load_json,
    lookup_divisor,
    make_pair,
    parse_divisor,
    parse_divisors,
    parse_fan,
    parse_int_matrix,
    parse_rat,
    parse_real,
)
from .kernel import QuadReal, rat_str

SUCCESS, INPUT_ERROR, NEGATIVE = 0, 1, 2

COMMANDS = (
    "classify",
    "lct",
    "nef-threshold",
    "strip-verify",
    "mmp-run",
    "flip",
    "adjoint-check",
    "approx",
    "corpus-test",
)


@dataclass
class RunConfig:
    command: str
    input: Path | None = None
    output: Path | None = None
    pair: str = "trivial"
    divisor: str | None = None
    H: str | None = None
    a: int = 1
    mode: str = "plain"
    scale: str | None = None
    tie_break: str = "lex"
    budget: int = 1000
    horizon: int | None = None
    cap: int = 100000
    seed: int = 0
    samples: int = 100
    decimal: bool = False


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="toricmmp", description="Exact MMP and adjoint-algebra computations on toric pairs.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, needs_input=True):
        if needs_input:
            sp.add_argument("--input", type=Path, required=True, help="JSON input file")
        sp.add_argument("--output", type=Path, help="write the report here instead of stdout")
        sp.add_argument("--decimal", action="store_true", help="append decimal renderings for reading")

    def with_pair(sp):
        sp.add_argument("--pair", default="trivial", help="'trivial' or the name of a divisor used as boundary")

    sp = sub.add_parser("classify", help="singularity class of a pair")
    common(sp)
    with_pair(sp)
    sp = sub.add_parser("lct", help="log canonical threshold")
    common(sp)
    with_pair(sp)
    sp.add_argument("--D", dest="divisor", required=True)
    sp = sub.add_parser("nef-threshold", help="max t with H + t(K + Delta) nef")
    common(sp)
    with_pair(sp)
    sp.add_argument("--H", required=True)
    sp.add_argument("--a", type=int, default=1)
    sp = sub.add_parser("strip-verify", help="vanishing of a polynomial on a lattice strip")
    common(sp)
    sp = sub.add_parser("mmp-run", help="run the (K + Delta)-MMP")
    common(sp)
    with_pair(sp)
    sp.add_argument("--mode", choices=("plain", "scaling"), default="plain")
    sp.add_argument("--A", dest="scale", help="divisor for the MMP with scaling")
    sp.add_argument("--budget", type=int, default=1000)
    sp.add_argument("--tie-break", choices=("lex", "revlex"), default="lex")
    sp.add_argument("--samples", type=int, default=100)
    sp = sub.add_parser("flip", help="flip the first (K + Delta)-negative flipping ray")
    common(sp)
    with_pair(sp)
    sp.add_argument("--tie-break", choices=("lex", "revlex"), default="lex")
    sp.add_argument("--samples", type=int, default=100)
    sp = sub.add_parser("adjoint-check", help="saturation and finite generation of a sequence")
    common(sp)
    sp.add_argument("--mode", choices=("a1", "toric"), required=True)
    sp.add_argument("--horizon", type=int)
    sp.add_argument("--cap", type=int, default=100000)
    sp = sub.add_parser("approx", help="approximation certificate for a real divisor")
    common(sp)
    sp.add_argument("--cap", type=int, default=100000)
    sp = sub.add_parser("corpus-test", help="regenerate the seeded corpora and check the rationality bound")
    common(sp, needs_input=False)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--surfaces", type=int, default=100)
    sp.add_argument("--threefolds", type=int, default=20)
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    fields = RunConfig.__dataclass_fields__
    return RunConfig(**{k: v for k, v in vars(ns).items() if k in fields})


# ---------------------------------------------------------------------------
# commands


def _fan_and_divisors(cfg: RunConfig):
    obj = load_json(cfg.input)
    fan = parse_fan(obj)
    return obj, fan, parse_divisors(obj, fan)


def cmd_classify(cfg: RunConfig, ns) -> tuple[dict, int]:
    _, fan, divs = _fan_and_divisors(cfg)
    pair = make_pair(fan, divs, cfg.pair, strict=False)
    rep = pairs.classify(pair)
    return rep.to_json(), NEGATIVE if rep.cls == pairs.NOT_LC else SUCCESS


def cmd_lct(cfg: RunConfig, ns) -> tuple[dict, int]:
    _, fan, divs = _fan_and_divisors(cfg)
    pair = make_pair(fan, divs, cfg.pair)
    D = lookup_divisor(divs, cfg.divisor, fan)
    try:
        value = pairs.lct(pair, D)
    except NotKlt as exc:
        return {"status": "not-klt", "message": str(exc)}, NEGATIVE
    return {"lct": "inf" if value == pairs.LCT_INFINITY else rat_str(value)}, SUCCESS


def cmd_nef_threshold(cfg: RunConfig, ns) -> tuple[dict, int]:
    _, fan, divs = _fan_and_divisors(cfg)
    pair = make_pair(fan, divs, cfg.pair)
    H = lookup_divisor(divs, cfg.H, fan)
    try:
        res = pairs.nef_threshold(pair, H, cfg.a)
    except AlreadyNef as exc:
        return {"status": "already-nef", "message": str(exc)}, NEGATIVE
    except BoundViolation as exc:
        return {"status": "bound-violation", "message": str(exc)}, NEGATIVE
    return res.to_json(), SUCCESS


def cmd_strip_verify(cfg: RunConfig, ns) -> tuple[dict, int]:
    obj = load_json(cfg.input)
    P = obj.get("P")
    if not isinstance(P, str):
        raise SchemaError("expected a polynomial string in x, y", "$.P")
    a = obj.get("a", 1)
    N = obj.get("N", 30)
    n = obj.get("n")
    for key, val in (("a", a), ("N", N)):
        if not isinstance(val, int) or isinstance(val, bool):
            raise SchemaError("expected an integer", f"$.{key}")
    r = parse_real(_get(obj, "r"), "$.r")
    eps = parse_rat(_get(obj, "eps"), "$.eps")
    v = strips.strip_vanishing_verify(P, a, r, eps, N, n)
    return v.to_json(), SUCCESS if v.status == strips.FACTORS else NEGATIVE


def _get(obj: dict, key: str):
    if key not in obj:
        raise SchemaError(f"missing key {key!r}", "$")
    return obj[key]


def cmd_mmp_run(cfg: RunConfig, ns) -> tuple[dict, int]:
    _, fan, divs = _fan_and_divisors(cfg)
    pair = make_pair(fan, divs, cfg.pair)
    A = lookup_divisor(divs, cfg.scale, fan) if cfg.scale else None
    try:
        trace = mmp.run_mmp(pair, cfg.mode, A, cfg.budget, cfg.tie_break, cfg.samples)
    except BudgetExceeded as exc:
        out = exc.trace.to_json() if exc.trace is not None else {}
        out["status"] = "budget-exceeded"
        return out, NEGATIVE
    return trace.to_json(), SUCCESS


def cmd_flip(cfg: RunConfig, ns) -> tuple[dict, int]:
    _, fan, divs = _fan_and_divisors(cfg)
    pair = make_pair(fan, divs, cfg.pair)
    rays = [r for r in mmp.mori_cone_generators(pair) if r.extremal and r.pairing < 0]
    flipping = []
    for r in rays:
        step = mmp.contract(pair, r)
        if step.kind == mmp.FLIPPING:
            flipping.append(step)
    if not flipping:
        return {"status": "no-flipping-ray", "rays": [r.to_json() for r in rays]}, NEGATIVE
    flipping.sort(key=lambda s: s.ray.key, reverse=cfg.tie_break == "revlex")
    step = flipping[0]
    try:
        new, report = mmp.flip_with_report(pair, step, cfg.samples)
    except FlipVerificationFailed as exc:
        return {"status": "flip-failed", "message": str(exc)}, NEGATIVE
    return {
        "status": "flipped",
        "ray": step.ray.to_json(),
        "fan": mmp.fan_json(new.fan),
        "checks": report.to_json(),
    }, SUCCESS


def parse_a1(obj: dict) -> adjoint.AdjointSequenceA1:
    b = parse_rat(_get(obj, "b"), "$.b")
    limit = parse_real(_get(obj, "limit"), "$.limit")
    table = _get(obj, "table")
    if not isinstance(table, list):
        raise SchemaError("expected a list", "$.table")
    table = [parse_rat(x, f"$.table[{i}]") for i, x in enumerate(table)]
    if "horizon" in obj:
        h = obj["horizon"]
        if not isinstance(h, int) or h < 0 or h > len(table):
            raise SchemaError("horizon must be an integer no larger than the table", "$.horizon")
        table = table[:h]
    try:
        return adjoint.AdjointSequenceA1(b, table, limit)
    except SchemaError:
        raise
    except InputError as exc:
        raise SchemaError(str(exc), "$") from None


def parse_toric_sequence(obj: dict) -> tuple[adjoint.CharacteristicSequence, Any]:
    fan = parse_fan(_get(obj, "fan"), "$.fan")
    n = fan.nrays
    F = parse_divisor(obj.get("F", ["0"] * n), n, "$.F")
    limit = None
    if "limit" in obj:
        raw = obj["limit"]
        if not isinstance(raw, list) or len(raw) != n:
            raise SchemaError(f"expected {n} coefficients", "$.limit")
        limit = tuple(parse_real(x, f"$.limit[{i}]") for i, x in enumerate(raw))
    if "mobiles" in obj:
        mobs = obj["mobiles"]
        if not isinstance(mobs, list):
            raise SchemaError("expected a list", "$.mobiles")
        mobiles = [None if m is None else parse_divisor(m, n, f"$.mobiles[{i}]") for i, m in enumerate(mobs)]
        seq = adjoint.CharacteristicSequence.explicit(fan, mobiles, limit)
    else:
        D = parse_divisor(_get(obj, "divisor"), n, "$.divisor")
        I = obj.get("I", 1)
        horizon = obj.get("horizon", 10)
        for key, val in (("I", I), ("horizon", horizon)):
            if not isinstance(val, int) or isinstance(val, bool) or val < 1:
                raise SchemaError("expected a positive integer", f"$.{key}")
        seq = adjoint.CharacteristicSequence.from_divisor(fan, D, I, horizon, limit)
    return seq, F


def cmd_adjoint_check(cfg: RunConfig, ns) -> tuple[dict, int]:
    obj = load_json(cfg.input)
    if cfg.mode == "a1":
        seq = parse_a1(obj)
        sat = adjoint.saturation_check_a1(seq)
        out: dict[str, Any] = {"mode": "a1", "horizon": seq.horizon, "saturation": sat.to_json()}
        if isinstance(sat, adjoint.Violation) and not isinstance(seq.limit, QuadReal):
            return out, NEGATIVE
        try:
            res = adjoint.fg_a1(seq)
        except ClaimViolation as exc:
            out["finite_generation"] = {"status": "claim-violation", "message": str(exc)}
            return out, NEGATIVE
        out["finite_generation"] = res.to_json()
        return out, NEGATIVE if isinstance(res, adjoint.RationalityRefutation) else SUCCESS
    seq, F = parse_toric_sequence(obj)
    sat = adjoint.saturation_check_toric(seq, F, cfg.horizon)
    out = {
        "mode": "toric",
        "horizon": seq.horizon,
        "saturation": sat.to_json(),
        "stabilization": adjoint.fg_test_stabilization(seq, cfg.horizon).to_json(),
    }
    if isinstance(sat, adjoint.ToricViolation):
        return out, NEGATIVE
    try:
        res = adjoint.fg6_pipeline(seq, F, cfg.cap)
    except NotSaturated as exc:
        out["finite_generation"] = {"status": "not-saturated", "message": str(exc)}
        return out, NEGATIVE
    out["finite_generation"] = res.to_json()
    return out, SUCCESS if isinstance(res, adjoint.FGCertificate) else NEGATIVE


def cmd_approx(cfg: RunConfig, ns) -> tuple[dict, int]:
    obj = load_json(cfg.input)
    E = parse_int_matrix(_get(obj, "E"), "$.E")
    d = _get(obj, "d")
    if not isinstance(d, list):
        raise SchemaError("expected a list", "$.d")
    d = [parse_real(x, f"$.d[{i}]") for i, x in enumerate(d)]
    eps = parse_rat(_get(obj, "eps"), "$.eps")
    try:
        inst = diophantine.ApproxInstance(E, d, eps)
    except InputError as exc:
        raise SchemaError(str(exc), "$") from None
    res = diophantine.approximate(inst, cfg.cap)
    if isinstance(res, diophantine.NotFoundUpTo):
        return res.to_json(), NEGATIVE
    out = res.to_json()
    out["status"] = "certificate"
    return out, SUCCESS


def corpus_report(seed: int, surfaces: int = 100, threefolds: int = 20) -> dict:
    """Nef thresholds of seeded pairs on the corpora, with the bound v <= a(n+1)."""
    rng = random.Random(seed)
    rows = []
    worst = Fraction(0)
    for kind, fans in (("surface", surface_corpus(seed, surfaces)), ("threefold", threefold_corpus(seed, threefolds))):
        for idx, fan in enumerate(fans):
            a = rng.choice([1, 2])
            boundary = pairs.TorusDivisor(tuple(Fraction(rng.randrange(a), a) for _ in range(fan.nrays)))
            pair = pairs.ToricPair(fan, boundary)
            H = find_ample(fan)
            res = pairs.nef_threshold(pair, H, a)
            worst = max(worst, Fraction(res.v, res.bound))
            rows.append({"kind": kind, "index": idx, "a": a, "r": rat_str(res.r), "v": res.v, "bound": res.bound})
    return {"seed": seed, "count": len(rows), "max_v_over_bound": rat_str(worst), "results": rows}


def cmd_corpus_test(cfg: RunConfig, ns) -> tuple[dict, int]:
    try:
        rep = corpus_report(cfg.seed, ns.surfaces, ns.threefolds)
    except BoundViolation as exc:
        return {"status": "bound-violation", "message": str(exc)}, NEGATIVE
    return rep, SUCCESS


HANDLERS = {
    "classify": cmd_classify,
    "lct": cmd_lct,
    "nef-threshold": cmd_nef_threshold,
    "strip-verify": cmd_strip_verify,
    "mmp-run": cmd_mmp_run,
    "flip": cmd_flip,
    "adjoint-check": cmd_adjoint_check,
    "approx": cmd_approx,
    "corpus-test": cmd_corpus_test,
}


def _decimalise(x: Any) -> Any:
    if isinstance(x, dict):
        if set(x) == {"a", "b", "disc"}:
            return float(QuadReal(Fraction(x["a"]), Fraction(x["b"]), x["disc"]))
        return {k: _decimalise(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_decimalise(v) for v in x]
    if isinstance(x, str) and "/" in x:
        try:
            return float(Fraction(x))
        except ValueError:
            return x
    return x


def _emit(report: dict, cfg: RunConfig | None, stream) -> None:
    if cfg is not None and cfg.decimal:
        report = dict(report, decimal=_decimalise(report))
    text = dumps(report)
    if cfg is not None and cfg.output is not None:
        cfg.output.write_text(text)
    else:
        stream.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return INPUT_ERROR if exc.code else SUCCESS
    cfg = config_from_args(ns)
    try:
        report, code = HANDLERS[cfg.command](cfg, ns)
    except (ParseError, SchemaError) as exc:
        _emit(exc.to_json(), None, sys.stderr)
        return INPUT_ERROR
    except FileNotFoundError as exc:
        _emit({"error": "io", "message": str(exc)}, None, sys.stderr)
        return INPUT_ERROR
    except InputError as exc:
        _emit({"error": type(exc).__name__, "message": str(exc)}, None, sys.stderr)
        return INPUT_ERROR
    except ToricMMPError as exc:
        _emit({"status": type(exc).__name__, "message": str(exc)}, cfg, sys.stdout)
        return NEGATIVE
    _emit(report, cfg, sys.stdout)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
