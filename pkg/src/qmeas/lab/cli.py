"""``qmeas run`` and ``qmeas list``.

Exit status: 0 when every check passes, 1 when a check fails, 2 for
usage or config errors.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor

from ..errors import ConfigInvalid, DegenerateConfig, QMeasError, UnknownScenario
from .config import load
from .report import RENDERERS
from .scenarios import REGISTRY, effective_config, list_scenarios, run_scenario

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qmeas", description="Topological measure and quasi-integral lab.")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario, or 'all' of them")
    run.add_argument("scenario")
    run.add_argument("--config", metavar="FILE", help="JSON config layered over the defaults")
    run.add_argument("--grid-n", type=int, metavar="N")
    run.add_argument("--thresholds", type=int, metavar="K")
    run.add_argument("--seed", type=int, metavar="S")
    run.add_argument("--format", choices=sorted(RENDERERS), default="json")
    run.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    run.add_argument("--parallel", action="store_true", help="run scenarios in worker processes")
    run.add_argument("--timing", action="store_true",
                     help="include wall time in JSON and CSV output (breaks bit-identical reruns)")

    ls = sub.add_parser("list", help="list scenarios whose name contains FILTER")
    ls.add_argument("filter", nargs="?", default="")
    return p


def _overrides(args) -> dict:
    cfg = load(args.config) if args.config else {}
    if args.grid_n is not None:
        cfg.setdefault("grid", {})["n"] = args.grid_n
    if args.thresholds is not None:
        cfg.setdefault("thresholds", {})["k"] = args.thresholds
    if args.seed is not None:
        cfg["seed"] = args.seed
    return cfg


def _run(args) -> int:
    names = list(REGISTRY) if args.scenario == "all" else [args.scenario]
    overrides = _overrides(args)
    for name in names:
        effective_config(name, overrides)        # fail fast on bad names or configs
    if args.parallel and len(names) > 1:
        with ProcessPoolExecutor() as pool:
            reports = list(pool.map(run_scenario, names, [overrides] * len(names)))
    else:
        reports = [run_scenario(n, overrides) for n in names]
    text = RENDERERS[args.format](reports, args.timing or args.format == "table")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.command == "list":
            for s in list_scenarios(args.filter):
                print(f"{s.name:<20} {s.summary}")
            return EXIT_OK
        return _run(args)
    except (ConfigInvalid, UnknownScenario, DegenerateConfig) as err:
        print(f"qmeas: {err}", file=sys.stderr)
        return EXIT_USAGE
    except QMeasError as err:
        print(f"qmeas: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
