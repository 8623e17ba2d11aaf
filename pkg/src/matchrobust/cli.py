"""Command-line interface: one executable, one subcommand per analysis.

Exit codes follow the sysexits convention: 0 success, 2 parameter
validation errors, 64 unknown subcommand / usage, 65 malformed input file.
All stochastic subcommands take a --seed (default 1729) and identical
invocations produce byte-identical outputs. File schemas are documented in
docs/formats.md and carry a top-level "schema": 1 field.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import communication as comm
from . import embedding as emb
from .markets import (
    ExtensionalProfile,
    MatchingMarket,
    RankBasedProfile,
    UtilityProfile,
    geometric_market,
)
from .metric import (
    MetricSpace,
    Placement,
    build_generating_space,
    is_polarized,
    space_from_json_dict,
    space_to_json_dict,
)
from .ordinal import OrdinalProfile, enumerate_stable, phi
from .planar import genus_lower_bound, is_planar
from .robustness import (
    CriticalSpikeSampler,
    DivisionByZeroUtility,
    adversarial_witness,
    critical_market,
    preservation_probability,
    robustness,
    robustness_by_search,
)
from .seeding import DEFAULT_SEED

COMMANDS = (
    "solve",
    "stable-set",
    "robustness",
    "witness",
    "appendix-a",
    "polarity",
    "genspace",
    "planarity",
    "embed",
    "distortion",
    "banach-search",
    "commreq",
    "bound-table",
)

EX_OK = 0
EX_VALIDATION = 2
EX_USAGE = 64
EX_DATAERR = 65


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems should not SystemExit(2)
        raise CliError(EX_USAGE, message)


def _fail_data(message: str):
    raise CliError(EX_DATAERR, message)


def _fail_validation(message: str):
    raise CliError(EX_VALIDATION, message)


def _load_json(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        _fail_data(f"{path}: {exc}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        _fail_data(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}")


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _ordinal_from_dict(data: dict, path: str) -> OrdinalProfile:
    try:
        return OrdinalProfile.from_json_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        _fail_data(f"{path}: bad ordinal profile: {exc}")


def _load_ordinal_market(path: str) -> tuple[OrdinalProfile, OrdinalProfile]:
    data = _load_json(path)
    for key in ("men", "women"):
        if key not in data:
            _fail_data(f"{path}: missing '{key}' profile")
    men = _ordinal_from_dict(data["men"], path)
    women = _ordinal_from_dict(data["women"], path)
    if men.n != women.n:
        _fail_data(f"{path}: sides disagree on n")
    return men, women


def _market_profile_from_dict(data: dict, path: str):
    kind = data.get("kind")
    try:
        if kind == "rank":
            return RankBasedProfile(int(data["n"]), [float(v) for v in data["rank_utilities"]])
        if kind == "extensional":
            table = {}
            for entry in data["entries"]:
                r = OrdinalProfile.from_json_dict({"n": data["n"], "ranks": entry["ranks"]})
                u = UtilityProfile.from_json_dict({"n": data["n"], "values": entry["values"]})
                table[r] = u
            return ExtensionalProfile(int(data["n"]), table)
    except (KeyError, TypeError, ValueError) as exc:
        _fail_data(f"{path}: bad market profile: {exc}")
    _fail_data(f"{path}: market profile kind must be 'rank' or 'extensional'")


def _load_market(args) -> MatchingMarket:
    if getattr(args, "geometric_base", None) is not None:
        if args.n is None:
            _fail_validation("--geometric-base requires --n")
        return geometric_market(args.n, args.geometric_base)
    if not getattr(args, "infile", None):
        _fail_validation("provide --in FILE or --geometric-base with --n")
    data = _load_json(args.infile)
    for key in ("men", "women"):
        if key not in data:
            _fail_data(f"{args.infile}: missing '{key}' market profile")
    return MatchingMarket(
        _market_profile_from_dict(data["men"], args.infile),
        _market_profile_from_dict(data["women"], args.infile),
    )


def _load_utilities(path: str) -> UtilityProfile:
    data = _load_json(path)
    try:
        return UtilityProfile.from_json_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        _fail_data(f"{path}: bad utility profile: {exc}")


def _load_space(path: str) -> tuple[MetricSpace, Placement | None]:
    data = _load_json(path)
    try:
        return space_from_json_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        _fail_data(f"{path}: bad metric space: {exc}")


def _assignment_json(a) -> list[int]:
    return list(a.pairing)


def _cmd_solve(args) -> int:
    men, women = _load_ordinal_market(args.infile)
    pair = phi(men, women)
    payload = {
        "schema": 1,
        "male_optimal": _assignment_json(pair.male_optimal),
        "female_optimal": _assignment_json(pair.female_optimal),
    }
    if args.format == "text":
        lines = [
            "male-optimal:   " + " ".join(f"{m}->{w}" for m, w in enumerate(pair.male_optimal.pairing)),
            "female-optimal: " + " ".join(f"{m}->{w}" for m, w in enumerate(pair.female_optimal.pairing)),
        ]
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit(_json_text(payload), args.out)
    return EX_OK


def _cmd_stable_set(args) -> int:
    men, women = _load_ordinal_market(args.infile)
    if men.n > args.cap:
        _fail_validation(f"n={men.n} exceeds enumeration cap {args.cap}")
    stable = sorted(enumerate_stable(men, women, cap=args.cap), key=lambda a: a.pairing)
    payload = {"schema": 1, "count": len(stable), "stable": [_assignment_json(a) for a in stable]}
    _emit(_json_text(payload), args.out)
    return EX_OK


def _cmd_robustness(args) -> int:
    market = _load_market(args)
    try:
        xi = robustness(market)
    except DivisionByZeroUtility as exc:
        _fail_validation(str(exc))
    cross = robustness_by_search(market, tol=args.tol)
    payload = {
        "schema": 1,
        "n": market.n,
        "robustness": xi if math.isfinite(xi) else "inf",
        "bisection": cross if math.isfinite(cross) else "inf",
        "difference": abs(xi - cross) if math.isfinite(xi) and math.isfinite(cross) else 0.0,
        "tol": args.tol,
    }
    _emit(_json_text(payload), args.out)
    return EX_OK


def _cmd_witness(args) -> int:
    market = _load_market(args)
    if args.c < 1.0:
        _fail_validation("--c must be >= 1")
    witness = adversarial_witness(market, args.c)
    if witness is None:
        payload = {"schema": 1, "c": args.c, "witness": None}
    else:
        payload = {
            "schema": 1,
            "c": args.c,
            "witness": {
                "side": witness.side,
                "profile": witness.profile.to_json_dict(),
                "perturbation": witness.perturbation.to_json_dict(),
                "perturbed_profile": witness.perturbed_profile.to_json_dict(),
                "distinguishing": witness.distinguishing.to_json_dict(),
                "tie_created": witness.tie_created,
            },
        }
    _emit(_json_text(payload), args.out)
    return EX_OK


def _cmd_appendix_a(args) -> int:
    if args.n < 2 or args.c < 1.0 or args.eps <= 0 or args.trials < 1:
        _fail_validation("need --n >= 2, --c >= 1, --eps > 0, --trials >= 1")
    market = critical_market(args.n, args.c, args.eps)
    sampler = CriticalSpikeSampler(market, args.n, args.c, args.eps)
    fraction = preservation_probability(market, sampler, args.trials, args.seed)
    lines = [
        "n,c,eps,trials,preserved_fraction,seed",
        f"{args.n},{args.c:.10g},{args.eps:.10g},{args.trials},{fraction:.10g},{args.seed}",
    ]
    _emit("\n".join(lines) + "\n", args.out)
    return EX_OK


def _cmd_polarity(args) -> int:
    u = _load_utilities(args.infile)
    check = is_polarized(u)
    payload = {"schema": 1, "polarized": check.ok}
    if not check.ok:
        a, ap, x, xp = check.violation
        payload["violation"] = {"a": a, "a_prime": ap, "x": x, "x_prime": xp}
    _emit(_json_text(payload), args.out)
    return EX_OK


def _cmd_genspace(args) -> int:
    u = _load_utilities(args.infile)
    check = is_polarized(u)
    if not check.ok:
        _fail_validation(f"utilities are not polarized at quadruple {check.violation}")
    space, placement = build_generating_space(u)
    payload = space_to_json_dict(space, placement)
    _emit(_json_text(payload), args.out)
    if args.dot:
        Path(args.dot).write_text(space.to_dot())
    return EX_OK


def _cmd_planarity(args) -> int:
    space, _placement = _load_space(args.infile)
    payload = {
        "schema": 1,
        "vertices": space.n_vertices,
        "edges": len(space.edges),
        "planar": is_planar(space),
        "genus_lower_bound": genus_lower_bound(space),
    }
    _emit(_json_text(payload), args.out)
    return EX_OK


def _cmd_embed(args) -> int:
    space, _placement = _load_space(args.infile)
    if not space.is_connected():
        _fail_validation("space must be connected for embedding")
    placement = emb.bourgain_embed(space, quality=args.quality, seed=args.seed)
    lines = ["vertex," + ",".join(f"c{i}" for i in range(placement.dim))]
    for v in range(space.n_vertices):
        coords = ",".join(f"{c:.10g}" for c in placement.points[v])
        lines.append(f"{v},{coords}")
    lines.append(f"# seed={args.seed} quality={args.quality}")
    _emit("\n".join(lines) + "\n", args.out)
    return EX_OK


def _cmd_distortion(args) -> int:
    space, _placement = _load_space(args.infile)
    if not space.is_connected():
        _fail_validation("space must be connected for embedding")
    placement = emb.bourgain_embed(space, quality=args.quality, seed=args.seed)
    report = emb.measure_distortion(space, placement)
    payload = {
        "schema": 1,
        "vertices": space.n_vertices,
        "dim": placement.dim,
        "max_expansion": report.max_expansion,
        "max_contraction": report.max_contraction,
        "scale": report.scale,
        "quality": args.quality,
        "seed": args.seed,
    }
    _emit(_json_text(payload), args.out)
    return EX_OK


def _cmd_banach_search(args) -> int:
    if not (1 <= args.dim <= 10):
        _fail_validation("--dim must lie in 1..10")
    result = emb.maximize_euclidean_robustness(args.dim, args.restarts, args.iters, args.seed)
    payload = {
        "schema": 1,
        "dim": args.dim,
        "restarts": args.restarts,
        "iters": args.iters,
        "seed": args.seed,
        "feasible_restarts": result.feasible_restarts,
        "best_value": result.best_value if math.isfinite(result.best_value) else None,
        "alpha": [list(p) for p in result.alpha] if result.alpha else None,
        "beta": [list(p) for p in result.beta] if result.beta else None,
    }
    _emit(_json_text(payload), args.out)
    return EX_OK


def _functions_from_args(args):
    if args.config:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            _fail_data(f"{args.config}: {exc}")
        try:
            return comm.functions_from_config(comm.parse_config(text))
        except ValueError as exc:
            _fail_data(f"{args.config}: {exc}")
    try:
        h = comm.HardnessFunction(args.hardness, args.hardness_scale, args.hardness_exponent)
        d = comm.DecayFunction(args.decay, args.decay_scale, args.decay_exponent)
    except ValueError as exc:
        _fail_validation(str(exc))
    return h, d, comm.BoundConstants()


def _cmd_commreq(args) -> int:
    h, d, _constants = _functions_from_args(args)
    if args.xi < 1.0:
        _fail_validation("--xi must be >= 1")
    xi = math.inf if args.xi_infinite else args.xi
    t = comm.communication_requirement(xi, h, d, args.n)
    payload = {
        "schema": 1,
        "n": args.n,
        "xi": "inf" if math.isinf(xi) else xi,
        "hardness": {"family": h.family, "scale": h.scale, "exponent": h.exponent},
        "decay": {"family": d.family, "scale": d.scale, "exponent": d.exponent},
        "requirement": t,
    }
    _emit(_json_text(payload), args.out)
    return EX_OK


def _cmd_bound_table(args) -> int:
    h, d, constants = _functions_from_args(args)
    try:
        table = comm.bound_table(args.n, args.space_size, args.genus, h, d, constants)
    except ValueError as exc:
        _fail_validation(str(exc))
    _emit(table.to_csv() if args.format == "csv" else table.to_text(), args.out)
    return EX_OK


def _add_common(p, seed=False):
    p.add_argument("--out", help="output path (default: stdout)")
    if seed:
        p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="64-bit seed (default 1729)")


def _add_market_inputs(p):
    p.add_argument("--in", dest="infile", help="matching-market JSON (see docs/formats.md)")
    p.add_argument("--n", type=int, help="market size for --geometric-base")
    p.add_argument("--geometric-base", type=float, help="build a geometric rank market instead of reading a file")


def _add_function_flags(p):
    p.add_argument("--config", help="key-value config file with [hardness]/[decay]/[constants] sections")
    p.add_argument("--hardness", default="constant", choices=comm.HARDNESS_FAMILIES)
    p.add_argument("--hardness-scale", type=float, default=1.0)
    p.add_argument("--hardness-exponent", type=float, default=1.0)
    p.add_argument("--decay", default="linear", choices=comm.DECAY_FAMILIES)
    p.add_argument("--decay-scale", type=float, default=1.0)
    p.add_argument("--decay-exponent", type=float, default=1.0)


def build_parser() -> _Parser:
    parser = _Parser(prog="matchrobust", description=__doc__)
    sub = parser.add_subparsers(dest="command")

    def add(name, help):
        return sub.add_parser(name, help=help, description=help)

    p = add("solve", help="deferred-acceptance operator: both optimal stable assignments")
    p.add_argument("--in", dest="infile", required=True, help="ordinal market JSON")
    p.add_argument("--format", choices=("json", "text"), default="json")
    _add_common(p)
    p.set_defaults(func=_cmd_solve)

    p = add("stable-set", help="brute-force enumeration of all stable assignments")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--cap", type=int, default=7, help="refuse above this n (n! search)")
    _add_common(p)
    p.set_defaults(func=_cmd_stable_set)

    p = add("robustness", help="ratio-minimum robustness with bisection cross-check")
    _add_market_inputs(p)
    p.add_argument("--tol", type=float, default=1e-6)
    _add_common(p)
    p.set_defaults(func=_cmd_robustness)

    p = add("witness", help="single-entry perturbation that provably changes a stable pair")
    _add_market_inputs(p)
    p.add_argument("--c", type=float, required=True, help="perturbation level")
    _add_common(p)
    p.set_defaults(func=_cmd_witness)

    p = add("appendix-a", help="critical market + spike sampler Monte Carlo (preservation fraction)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--trials", type=int, required=True)
    _add_common(p, seed=True)
    p.set_defaults(func=_cmd_appendix_a)

    p = add("polarity", help="check the polarity inequality over all quadruples")
    p.add_argument("--in", dest="infile", required=True, help="utility profile JSON")
    _add_common(p)
    p.set_defaults(func=_cmd_polarity)

    p = add("genspace", help="bipartite generating metric space of a polarized profile")
    p.add_argument("--in", dest="infile", required=True, help="utility profile JSON")
    p.add_argument("--dot", help="also write DOT text here")
    _add_common(p)
    p.set_defaults(func=_cmd_genspace)

    p = add("planarity", help="planarity and Euler genus lower bound of a space")
    p.add_argument("--in", dest="infile", required=True, help="metric space JSON")
    _add_common(p)
    p.set_defaults(func=_cmd_planarity)

    p = add("embed", help="distance-to-subset Euclidean embedding (CSV placement)")
    p.add_argument("--in", dest="infile", required=True, help="metric space JSON")
    p.add_argument("--quality", type=int, default=10)
    _add_common(p, seed=True)
    p.set_defaults(func=_cmd_embed)

    p = add("distortion", help="embed and report normalized distortion")
    p.add_argument("--in", dest="infile", required=True, help="metric space JSON")
    p.add_argument("--quality", type=int, default=10)
    _add_common(p, seed=True)
    p.set_defaults(func=_cmd_distortion)

    p = add("banach-search", help="multistart search for the Euclidean robustness cap (<= 3)")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--restarts", type=int, default=100)
    p.add_argument("--iters", type=int, default=200)
    _add_common(p, seed=True)
    p.set_defaults(func=_cmd_banach_search)

    p = add("commreq", help="communication requirement T = D^-1(H(n)/xi)")
    p.add_argument("--xi", type=float, default=1.0)
    p.add_argument("--xi-infinite", action="store_true", help="use the infinite-robustness sentinel")
    p.add_argument("--n", type=int, required=True)
    _add_function_flags(p)
    _add_common(p)
    p.set_defaults(func=_cmd_commreq)

    p = add("bound-table", help="communication lower bounds by |X|, genus, and n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--space-size", type=int, required=True)
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--format", choices=("csv", "text"), default="csv")
    _add_function_flags(p)
    _add_common(p)
    p.set_defaults(func=_cmd_bound_table)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    head = next((a for a in argv if not a.startswith("-")), None)
    if head is not None and head not in COMMANDS:
        sys.stderr.write(f"error: {EX_USAGE}: unknown subcommand {head!r}\n")
        return EX_USAGE
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            parser.print_usage(sys.stderr)
            return EX_USAGE
        return args.func(args)
    except CliError as exc:
        sys.stderr.write(f"error: {exc.code}: {exc}\n")
        return exc.code
    except ValueError as exc:
        sys.stderr.write(f"error: {EX_VALIDATION}: {exc}\n")
        return EX_VALIDATION


def entrypoint():
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
