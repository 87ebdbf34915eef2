"""Command-line entry point (``lurgme``).

Exit codes: 0 success, 2 input error, 3 a bound provider exceeded the
measured variance sum.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from .analysis import (
    DEMOS,
    ConfigError,
    compare_fullsep,
    demo_setup,
    format_number,
    load_config,
    setup_sweep,
    setup_threshold,
    write_csv,
)
from .bounds import provider_from_string
from .criteria import UnsoundBound, enumerate_bipartitions, gme_criterion, spin_gme_criterion
from .observables import SpinConfig, family_from_dict
from .states import NoiseFamily, PureState, fully_separable_threshold, load_state

EXIT_OK, EXIT_INPUT, EXIT_UNSOUND = 0, 2, 3


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lurgme", description="GME detection via local sum uncertainty relations")
    sub = p.add_subparsers(dest="command", required=True)

    demo = sub.add_parser("demo", help="tabulate a built-in example as CSV")
    demo.add_argument("name", choices=DEMOS)
    demo.add_argument("--grid", type=int, default=101)
    demo.add_argument("--out", help="CSV path (default: stdout)")

    ev = sub.add_parser("evaluate", help="evaluate one state, print a JSON report")
    ev.add_argument("--state", required=True, help="state JSON (matrix or amplitudes)")
    ev.add_argument("--observables", required=True, help="observable family JSON")
    ev.add_argument("--bounds", default="zero",
                    help="zero | constant:<file> | commutator | family-min | reference")
    ev.add_argument("--reference", help="pure-state JSON used by family-min / reference bounds")
    ev.add_argument("--grid", type=int, default=1001, help="q grid for family-min")

    sw = sub.add_parser("sweep", help="sweep a configured noise family, write CSV")
    sw.add_argument("--config", required=True)
    sw.add_argument("--grid", type=int)
    sw.add_argument("--out", help="CSV path (default: stdout)")

    th = sub.add_parser("threshold", help="bisect for the detection threshold")
    src = th.add_mutually_exclusive_group(required=True)
    src.add_argument("--config")
    src.add_argument("--demo", choices=DEMOS)

    pa = sub.add_parser("partitions", help="list bipartitions of N sites")
    pa.add_argument("--n", type=int, required=True)

    fs = sub.add_parser("fullsep", help="full-separability bound of the noisy W state")
    fs.add_argument("--n", type=int, required=True)

    cmp_ = sub.add_parser("compare", help="GME thresholds of the W demos against full separability")
    cmp_.add_argument("--n", type=int, nargs="+", default=[3, 4, 5, 6])
    return p


def _cmd_demo(args):
    rows = setup_sweep(demo_setup(args.name), args.grid)
    text = write_csv(rows, args.out)
    if args.out is None:
        sys.stdout.write(text)


def _cmd_evaluate(args):
    state = load_state(args.state)
    rho = state.density() if isinstance(state, PureState) else state
    obs_doc = json.loads(Path(args.observables).read_text())
    reference = None
    if args.reference:
        reference = load_state(args.reference)
        if not isinstance(reference, PureState):
            raise ConfigError("--reference: must be a pure state given by 'amplitudes'")
    if obs_doc.get("criterion") == "spin" or (obs_doc.get("pattern") == "spin" and "criterion" not in obs_doc):
        try:
            report = spin_gme_criterion(rho, obs_doc["j"], SpinConfig(obs_doc["h"], obs_doc["g"]))
        except KeyError as exc:
            raise ConfigError(f"observables.{exc.args[0]}: required field missing") from exc
    else:
        family = family_from_dict(obs_doc)
        noise = NoiseFamily(reference) if reference is not None else None
        provider = provider_from_string(args.bounds, noise=noise, reference=reference, grid=args.grid)
        report = gme_criterion(rho, family, provider)
    print(json.dumps(report.to_dict(), indent=2))


def _cmd_sweep(args):
    setup = load_config(args.config)
    doc = json.loads(Path(args.config).read_text())
    grid = args.grid if args.grid is not None else int(doc.get("grid", 101))
    text = write_csv(setup_sweep(setup, grid), args.out)
    if args.out is None:
        sys.stdout.write(text)


def _cmd_threshold(args):
    setup = demo_setup(args.demo) if args.demo else load_config(args.config)
    result = setup_threshold(setup)
    print(json.dumps(asdict(result)))


def _cmd_partitions(args):
    for p in enumerate_bipartitions(args.n):
        print(p.label())


def _cmd_fullsep(args):
    print(format_number(fully_separable_threshold(args.n)))


def _cmd_compare(args):
    print("n,q_gme,q_fullsep")
    for row in compare_fullsep(args.n):
        q_gme = "" if row.q_gme is None else format_number(row.q_gme)
        print(f"{row.n},{q_gme},{format_number(row.q_fullsep)}")


COMMANDS = {
    "demo": _cmd_demo,
    "evaluate": _cmd_evaluate,
    "sweep": _cmd_sweep,
    "threshold": _cmd_threshold,
    "partitions": _cmd_partitions,
    "fullsep": _cmd_fullsep,
    "compare": _cmd_compare,
}


def run_cli(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        COMMANDS[args.command](args)
    except UnsoundBound as exc:
        where = f" at q={exc.q}" if hasattr(exc, "q") else ""
        print(f"error: {exc}{where}", file=sys.stderr)
        return EXIT_UNSOUND
    except (ValueError, KeyError, OSError) as exc:
        where = f" at q={exc.q}" if hasattr(exc, "q") else ""
        print(f"error: {exc}{where}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
