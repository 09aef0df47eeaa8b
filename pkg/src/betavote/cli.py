"""Command-line front end.

Exit codes: 0 success or criterion holds, 1 criterion falsified, 2 input
error, 3 domain error (bad ``k``, missing ``--seed``, too few voters).
"""

from __future__ import annotations

import argparse
import datetime as _dt
import hashlib
import json
import sys
from fractions import Fraction
from pathlib import Path

from betavote import __version__
from betavote.ballots import (BallotError, DomainError, Election, PreferenceProfile,
                              honest_ballots, parse_election, parse_profile)
from betavote.criteria import (CriterionVerdict, InsufficientVoters, check_monotonicity,
                               check_pareto, dictatorship_probe, unanimous_candidates)
from betavote.kanalysis import all_winning_intervals, potential_winners
from betavote.simulate import SEARCH_CRITERIA, SimConfig, run_agreement, search_counterexample
from betavote.tally import beta_score, score, select_winner, winners

EXIT_OK, EXIT_FALSIFIED, EXIT_INPUT, EXIT_DOMAIN = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def qstr(q) -> str | None:
    return None if q is None else str(Fraction(q))


def qdec(q) -> float | None:
    return None if q is None else float(q)


def parse_k(text: str | None) -> Fraction | None:
    if text is None:
        return None
    try:
        k = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise CliError(f"--k: not a rational number: {text!r}", EXIT_INPUT) from None
    if k < 1:
        raise CliError(f"--k must be >= 1, got {k}", EXIT_DOMAIN)
    return k


def read_input(path: str) -> tuple[bytes, Election | PreferenceProfile]:
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror}", EXIT_INPUT) from None
    try:
        stripped = data.lstrip()
        if stripped.startswith(b"{"):
            obj = json.loads(data)
            if "voters" in obj:
                return data, parse_profile(data)
            return data, parse_election(data, "json")
        return data, parse_election(data, "csv")
    except (BallotError, json.JSONDecodeError, KeyError, TypeError, UnicodeDecodeError) as e:
        raise CliError(f"{path}: {e}", EXIT_INPUT) from None


def as_election(obj) -> Election:
    return honest_ballots(obj) if isinstance(obj, PreferenceProfile) else obj


def manifest(args, digest: str | None, seed) -> dict:
    return {
        "command": args.command,
        "argv": args.argv,
        "input_digest": digest,
        "seed": seed,
        "version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }


def sha256(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def emit(out, man: dict, payload, fmt: str = "json"):
    if fmt == "tsv":
        out.write("# manifest: " + json.dumps(man, sort_keys=True) + "\n")
        out.write(payload)
    else:
        json.dump({"manifest": man, "payload": payload}, out, indent=2, sort_keys=True)
        out.write("\n")


# -- commands ---------------------------------------------------------------

def cmd_tally(args, out) -> int:
    data, obj = read_input(args.file)
    election = as_election(obj)
    k = parse_k(args.k)
    if args.rule == "beta":
        if k is None:
            raise CliError("--k is required for --rule beta", EXIT_INPUT)
        sv = beta_score(election, k)
    else:
        sv = score(election, args.rule)
    ws = winners(sv)
    ids = election.candidates.ids
    payload = {
        "rule": args.rule,
        "k": qstr(k) if args.rule == "beta" else None,
        "k_decimal": qdec(k) if args.rule == "beta" else None,
        "scores": {ids[j]: qstr(v) for j, v in enumerate(sv.values)},
        "scores_decimal": {ids[j]: qdec(v) for j, v in enumerate(sv.values)},
        "winners": [ids[j] for j in sorted(ws.indices)],
    }
    if args.seed is not None:
        payload["selected"] = ids[select_winner(ws, args.seed)]
    emit(out, manifest(args, sha256(data), args.seed), payload)
    return EXIT_OK


def interval_json(iv) -> dict:
    return {"lo": qstr(iv.lo), "hi": "inf" if iv.hi is None else qstr(iv.hi),
            "lo_closed": iv.lo_closed, "hi_closed": iv.hi_closed,
            "lo_decimal": qdec(iv.lo), "hi_decimal": None if iv.hi is None else qdec(iv.hi)}


def breakpoint_table(report, ids) -> str:
    bps = list(report.breakpoints)
    pts = [Fraction(1)]
    for b in bps:
        if pts[-1] < b:
            pts.append((pts[-1] + b) / 2)
        if b != pts[-1]:
            pts.append(b)
    pts.append((bps[-1] if bps else Fraction(1)) + 1)
    lines = ["k\tk_decimal\twinners"]
    for k in pts:
        ws = ",".join(ids[j] for j in sorted(report.winners_at(k)))
        lines.append(f"{k}\t{float(k):.6f}\t{ws}")
    return "\n".join(lines) + "\n"


def cmd_intervals(args, out) -> int:
    data, obj = read_input(args.file)
    election = as_election(obj)
    ids = election.candidates.ids
    report = potential_winners(election)
    man = manifest(args, sha256(data), None)
    if args.format == "tsv":
        emit(out, man, breakpoint_table(report, ids), "tsv")
        return EXIT_OK
    closed = all_winning_intervals(election)
    payload = {
        "intervals": [{"candidate": ids[j], "intervals": [interval_json(iv) for iv in closed[j]]}
                      for j in range(election.c) if closed[j]],
        "excluded": [ids[j] for j in range(election.c) if not closed[j]],
        "breakpoints": [qstr(b) for b in report.breakpoints],
        "chain_ratios": [qstr(r) for r in report.chain_ratios],
        "groups": [[ids[j] for j in g] for g in report.groups],
        "coincident": report.coincident,
    }
    emit(out, man, payload)
    return EXIT_OK


def cmd_check(args, out) -> int:
    data, obj = read_input(args.file)
    k = parse_k(args.k)
    crit = args.criterion
    if crit in ("pareto", "monotonicity", "unanimous_winner") and k is None:
        raise CliError(f"--k is required for --criterion {crit}", EXIT_INPUT)
    if crit == "pareto":
        if not isinstance(obj, PreferenceProfile):
            raise CliError("pareto needs a preference-profile file", EXIT_INPUT)
        verdict = check_pareto(obj, k)
    elif crit == "monotonicity":
        if args.seed is None:
            raise CliError("--seed is required for randomized checks", EXIT_DOMAIN)
        verdict = check_monotonicity(as_election(obj), k, args.trials, args.seed)
    elif crit == "unanimous_winner":
        election = as_election(obj)
        una = unanimous_candidates(election, k)
        ws = winners(beta_score(election, k)).indices
        ids = election.candidates.ids
        lost = sorted(una - ws)
        witness = ({"election": election.to_json_obj(), "k": qstr(k),
                    "unanimous": [ids[j] for j in lost]} if lost else None)
        verdict = CriterionVerdict("unanimous_winner", not lost, witness,
                                   {"unanimous": [ids[j] for j in sorted(una)],
                                    "winners": [ids[j] for j in sorted(ws)]})
    else:
        election = as_election(obj)
        try:
            verdict = dictatorship_probe(election.c, election.n,
                                         ks=[k] if k is not None else None)
        except InsufficientVoters as e:
            raise CliError(str(e), EXIT_DOMAIN) from None
        except ValueError as e:
            raise CliError(str(e), EXIT_DOMAIN) from None
    emit(out, manifest(args, sha256(data), args.seed), verdict.to_json_obj())
    return EXIT_OK if verdict.holds else EXIT_FALSIFIED


def load_config(args) -> tuple[bytes, SimConfig]:
    try:
        data = Path(args.config).read_bytes()
        obj = json.loads(data)
    except OSError as e:
        raise CliError(f"cannot read {args.config}: {e.strerror}", EXIT_INPUT) from None
    except json.JSONDecodeError as e:
        raise CliError(f"{args.config}: {e}", EXIT_INPUT) from None
    if args.seed is not None:
        obj["seed"] = args.seed
    if "seed" not in obj:
        raise CliError("a seed is required (--seed or config 'seed')", EXIT_DOMAIN)
    try:
        return data, SimConfig.from_json_obj(obj)
    except (ValueError, TypeError) as e:
        raise CliError(f"{args.config}: {e}", EXIT_INPUT) from None


def cmd_simulate(args, out) -> int:
    data, config = load_config(args)
    stats = run_agreement(config)
    man = manifest(args, sha256(data), config.seed)
    if args.format == "tsv":
        emit(out, man, stats.to_tsv(), "tsv")
    else:
        emit(out, man, {"config": config.to_json_obj(), "stats": stats.to_json_obj()})
    return EXIT_OK


def cmd_search(args, out) -> int:
    data, config = load_config(args)
    try:
        w = search_counterexample(args.criterion, config, args.k)
    except ValueError as e:
        raise CliError(str(e), EXIT_INPUT) from None
    payload = {"criterion": args.criterion, "witness": None if w is None else w.to_json_obj()}
    emit(out, manifest(args, sha256(data), config.seed), payload)
    return EXIT_OK if w is None else EXIT_FALSIFIED


# -- entry point ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="betavote", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tally", help="score an election under one rule")
    p.add_argument("file")
    p.add_argument("--rule", choices=("plurality", "approval", "beta"), default="beta")
    p.add_argument("--k")
    p.add_argument("--seed", type=int, help="also draw a single winner from the winner set")

    p = sub.add_parser("intervals", help="winning ranges of k for every candidate")
    p.add_argument("file")
    p.add_argument("--format", choices=("json", "tsv"), default="json")

    p = sub.add_parser("check", help="check a voting criterion")
    p.add_argument("file", help="ballot CSV/JSON or preference-profile JSON")
    p.add_argument("--criterion", required=True,
                   choices=("pareto", "monotonicity", "unanimous_winner", "non_dictatorship"))
    p.add_argument("--k")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int, default=1000)

    p = sub.add_parser("simulate", help="Monte Carlo agreement statistics")
    p.add_argument("config")
    p.add_argument("--seed", type=int)
    p.add_argument("--format", choices=("json", "tsv"), default="json")

    p = sub.add_parser("search", help="search for a counterexample profile")
    p.add_argument("config")
    p.add_argument("--criterion", required=True, choices=SEARCH_CRITERIA)
    p.add_argument("--k", help="k expression, e.g. 'c' or '1+1/(2n)'")
    p.add_argument("--seed", type=int)
    return parser


COMMANDS = {"tally": cmd_tally, "intervals": cmd_intervals, "check": cmd_check,
            "simulate": cmd_simulate, "search": cmd_search}


def main(argv=None, out=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    args.argv = argv
    try:
        return COMMANDS[args.command](args, out)
    except CliError as e:
        print(f"betavote {args.command}: {e}", file=sys.stderr)
        return e.code
    except DomainError as e:
        print(f"betavote {args.command}: {e}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
