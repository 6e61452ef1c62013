"""Command-line entry point: ``run``, ``verify``, ``compare``, ``sweep``.

Exit codes: 0 success, 1 verification failure, 2 bad configuration,
3 numerical divergence.
"""
import argparse
import json
import logging
import sys

from asgo.bench import config as config_mod
from asgo.bench.config import ConfigError
from asgo.bench.experiments import compare, sweep
from asgo.bench.runner import run_all, write_records
from asgo.bench.verify import SUITES, run_suite

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_DIVERGED = 3

log = logging.getLogger("asgo.bench")


def _cmd_run(args):
    cfg = config_mod.load(args.config)
    records = run_all(cfg)
    summary = write_records(cfg, records, args.out)
    for rec in records:
        log.info("seed %d: final loss %s%s", rec.seed, rec.final_loss, " (diverged)" if rec.diverged else "")
    return EXIT_DIVERGED if summary["diverged"] else EXIT_OK


def _cmd_verify(args):
    manifest = run_suite(args.suite, args.seed)
    text = json.dumps(manifest, indent=2, sort_keys=True, default=float)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    for check in manifest["checks"]:
        log.info("%s %s", "PASS" if check["passed"] else "FAIL", check["check"])
    return EXIT_OK if manifest["passed"] else EXIT_VERIFY_FAILED


def _cmd_compare(args):
    configs = [config_mod.load(p) for p in args.configs]
    result = compare(configs, args.out)
    for label, score in result["final"].items():
        log.info("%s: mean final %s", label, score)
    return EXIT_DIVERGED if any(v is None for v in result["final"].values()) else EXIT_OK


def _cmd_sweep(args):
    cfg = config_mod.load(args.config)
    ranked = sweep(cfg, args.out)
    for entry in ranked:
        log.info("#%d %s score=%s", entry["rank"], entry["params"], entry["score"])
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="asgo-bench", description=__doc__.splitlines()[0])
    parser.add_argument("-q", "--quiet", action="store_true", help="only print warnings and errors")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one experiment config")
    p.add_argument("config")
    p.add_argument("--out", help="output directory (default: the config's output_path)")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the manifest here instead of stdout")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("compare", help="run configs on the same problem and align their metrics")
    p.add_argument("configs", nargs="+")
    p.add_argument("--out", default="runs/compare")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("sweep", help="run a config's hyperparameter grid and rank the cells")
    p.add_argument("config")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_sweep)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(levelname)s %(message)s",
                        stream=sys.stderr)
    try:
        return args.func(args)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
