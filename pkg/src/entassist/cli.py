"""Command-line entry point: ``entassist {treasure,decompose,membership,props,instance}``.

Every command prints a JSON run report with the parameters, results and a
list of numeric checks (measured value and tolerance). Exit status is 0 when
all checks pass, 1 when a mathematical check fails and 2 for bad usage or
unreadable input.
"""

from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import jsonio, membership, props, simulate, treasure
from .channels import ClassicalChannel, expected_reward
from .errors import InfeasibleError, NumericalError, ParseError, ResourceError, UsageError

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE = 0, 1, 2
BUILTIN = "treasure"
BUILTIN_ALIASES = (BUILTIN, "appendix")


@dataclass
class RunReport:
    command: str
    parameters: dict
    results: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    seed: int | None = None

    def check(self, name: str, passed: bool, measured, tolerance) -> None:
        self.checks.append({"name": name, "passed": bool(passed), "measured": measured, "tolerance": tolerance})

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def to_json(self) -> str:
        d = asdict(self)
        if self.seed is None:
            d.pop("seed")
        return jsonio.dumps(d)


def cmd_treasure() -> RunReport:
    rep = RunReport("treasure", {})
    per = {str(c): treasure.win_probability(c) for c in treasure.CONFIGS}
    overall = treasure.overall_win_probability()
    classical, strategy = membership.best_classical_value(treasure.treasure_game(exact=True), 2)
    via_channel = expected_reward(treasure.treasure_game(), treasure.induced_channel())
    expected = (4 + math.sqrt(2)) / 6
    rep.results = {
        "config_order": [str(c) for c in treasure.CONFIGS],
        "per_config": per,
        "overall": overall,
        "overall_via_channel": via_channel,
        "classical_2": float(classical),
        "classical_2_exact": str(classical),
        "classical_2_strategy": [y + 1 for y in strategy.assignment],
        "gap": overall - float(classical),
    }
    rep.check("overall == (4+sqrt2)/6", abs(overall - expected) <= 1e-9, abs(overall - expected), 1e-9)
    rep.check("overall via induced channel", abs(via_channel - overall) <= 1e-12, abs(via_channel - overall), 1e-12)
    rep.check("classical_2 == 5/6", classical == Fraction(5, 6), float(classical), 0.0)
    rep.check("quantum beats classical", overall > float(classical), overall - float(classical), 0.0)
    return rep


def _load_instance(src: str) -> simulate.TheoremInstance:
    if src in BUILTIN_ALIASES:
        return treasure.theorem_instance()
    return jsonio.instance_from_json(jsonio.load_file(src), src)


def _load_channel(src: str) -> ClassicalChannel:
    if src in BUILTIN_ALIASES:
        return treasure.induced_channel()
    return jsonio.channel_from_json(jsonio.load_file(src), src)


def cmd_decompose(src: str = BUILTIN, out: str | None = None, tol: float = simulate.RECONSTRUCTION_TOL) -> RunReport:
    rep = RunReport("decompose", {"in": src, "out": out, "tol": tol})
    inst = _load_instance(src)
    dec = simulate.decompose_theorem(inst)
    err = dec.reconstruction_error(inst.target)
    support = dec.max_support()
    hall = simulate.hall_condition(inst)
    cert = membership.verify_cn_sr_certificate(inst.target, dec, 4, tol)
    rep.results = {
        "d": inst.d, "k": inst.k, "l": inst.l,
        "components": len(dec),
        "weight_sum": float(np.sum(dec.weights)),
        "reconstruction_error": err,
        "max_support": support,
        "hall_min_slack": hall.min_slack,
    }
    rep.check("reconstruction_error", err <= tol, err, tol)
    rep.check("max_support <= 4", support <= 4, support, 4)
    rep.check("weights sum to 1", abs(np.sum(dec.weights) - 1) <= 1e-9, abs(float(np.sum(dec.weights)) - 1), 1e-9)
    rep.check("hall condition", hall.min_slack >= -1e-10, hall.min_slack, 1e-10)
    rep.check("certificate validates (n=4)", bool(cert), cert.diagnostic or "ok", tol)
    if out:
        Path(out).write_text(jsonio.dumps(jsonio.decomposition_to_json(dec)))
    return rep


def cmd_membership(src: str = BUILTIN, n: int = 2, tol: float = membership.LP_TOL) -> RunReport:
    rep = RunReport("membership", {"in": src, "n": n, "tol": tol})
    ch = _load_channel(src)
    res = membership.in_cn_sr(ch, n, tol)
    rep.results = {"feasible": res.feasible, "n": n, "channel": jsonio.channel_to_json(ch)}
    if res.feasible:
        rep.results["certificate"] = jsonio.decomposition_to_json(res.certificate)
        ok = membership.verify_cn_sr_certificate(ch, res.certificate, n, 1e-8)
        rep.check("certificate validates", bool(ok), ok.diagnostic or "ok", 1e-8)
    else:
        value = expected_reward(res.witness, ch)
        best, _ = membership.best_classical_value(res.witness, n)
        rep.results["witness"] = {"q": res.witness.q.tolist(), "reward": res.witness.reward.tolist()}
        rep.results["witness_gap"] = res.gap
        rep.check("witness separates", value - best > tol, value - best, tol)
    return rep


def cmd_property_suite(suite: str, trials: int, seed: int = 0) -> RunReport:
    rep = RunReport("props", {"suite": suite, "trials": trials}, seed=seed)
    res = props.run_suite(suite, trials, seed)
    rep.results = res
    if suite == "lemma2":
        rep.check("min slack", res["min_slack"] >= -1e-10, res["min_slack"], 1e-10)
    elif suite == "gamma":
        rep.check("right inverse", res["max_right_inverse_residual"] <= 1e-9, res["max_right_inverse_residual"], 1e-9)
        rep.check("unit", res["max_unit_residual"] <= 1e-9, res["max_unit_residual"], 1e-9)
        rep.check("positivity", res["min_eigenvalue_psd_image"] >= -1e-9, res["min_eigenvalue_psd_image"], 1e-9)
        rep.check("povm validity", res["povm_failures"] == 0, res["povm_failures"], 0)
    elif suite == "nonsignaling":
        rep.check("max violation", res["max_violation"] <= 1e-10, res["max_violation"], 1e-10)
    else:
        for cand, hits in res["maximally_mixed"].items():
            rep.check(f"{cand} on 1/d", hits == 0, hits, 0)
        for cand, hit in res["skewed"].items():
            if hit is not None:
                rep.check(f"{cand} hit re-verified", hit["recomputed"] < -simulate.VIOLATION_TOL,
                          hit["recomputed"], simulate.VIOLATION_TOL)
    return rep


def cmd_instance(seed: int, d: int, k: int, l: int, out: str | None) -> RunReport:
    rep = RunReport("instance", {"d": d, "k": k, "l": l, "out": out}, seed=seed)
    inst = simulate.random_theorem_instance(np.random.default_rng(seed), d, k, l)
    text = jsonio.dumps(jsonio.instance_to_json(inst))
    if out:
        Path(out).write_text(text)
    rep.results = {"target": jsonio.channel_to_json(inst.target)}
    return rep


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entassist", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("treasure", help="value of the four-box game with and without entanglement")

    p = sub.add_parser("decompose", help="write a two-bit shared-randomness simulation of an assisted bit")
    p.add_argument("--in", dest="src", default=BUILTIN, help="theorem instance JSON, or 'treasure' for the built-in four-box one")
    p.add_argument("--out", help="where to write the decomposition JSON")
    p.add_argument("--tol", type=float, default=simulate.RECONSTRUCTION_TOL)

    p = sub.add_parser("membership", help="decide membership of a channel in C_n^SR")
    p.add_argument("--in", dest="src", default=BUILTIN, help="channel JSON, or 'treasure' for the built-in four-box one")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--tol", type=float, default=membership.LP_TOL)

    p = sub.add_parser("props", help="run a randomized property suite")
    p.add_argument("suite", help=f"one of {', '.join(props.SUITES)}")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("instance", help="write a random theorem instance JSON")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--l", type=int, default=6)
    p.add_argument("--out")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "treasure":
            rep = cmd_treasure()
        elif args.command == "decompose":
            rep = cmd_decompose(args.src, args.out, args.tol)
        elif args.command == "membership":
            rep = cmd_membership(args.src, args.n, args.tol)
        elif args.command == "props":
            rep = cmd_property_suite(args.suite, args.trials, args.seed)
        else:
            rep = cmd_instance(args.seed, args.d, args.k, args.l, args.out)
    except (ParseError, UsageError, ResourceError) as exc:
        print(f"entassist: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InfeasibleError, NumericalError) as exc:
        print(f"entassist: check failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    sys.stdout.write(rep.to_json())
    return EXIT_OK if rep.passed else EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
