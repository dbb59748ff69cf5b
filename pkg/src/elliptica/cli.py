"""``elliptica`` command line.

The report is JSON on stdout (or in ``--json OUT``); ``--human`` switches
stdout to one line per case.  The last line is always a ``SUMMARY`` row.
Exit status: 0 when every asserted case passes, 1 otherwise, 2 on usage or
configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from . import __version__
from .harness import ALL, SUITES, ConfigError, HarnessConfig, parse_config, run_suite

ALGEBRA_CHECKS = ("jacobi", "grading", "cocycle", "borel")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="elliptica", description="Exact verification suites.")
    p.add_argument("suite", choices=SUITES + (ALL, "algebra"))
    p.add_argument("--version", action="version", version=f"elliptica {__version__}")
    p.add_argument("--config", type=Path, help="key = value configuration file")
    p.add_argument("--window", type=int, help="mode / exponent window W")
    p.add_argument("--degree", type=int, help="maximal state degree")
    p.add_argument("--count", type=int, help="number of random states besides the two vacua")
    p.add_argument("--seed", type=int)
    p.add_argument("--r", type=int, choices=(0, 1))
    p.add_argument("--variant", choices=("original", "sigma_twisted_b", "mixed"))
    p.add_argument("--constants", choices=("paper", "oracle"))
    p.add_argument("--split-level", action="store_true", help="realize: also calibrate with a free level")
    p.add_argument("--check", help="algebra: jacobi|grading|cocycle|borel; jk: rep")
    p.add_argument("--compare", action="store_true", help="jk: compare with the r = 1 realization")
    p.add_argument("--phi", type=Path, help='jk: trace functional as JSON {"t^0": "1", "u t^-1": "2/3"}')
    p.add_argument("--kmax", type=int, help="pollaczek: largest k")
    p.add_argument("--ode-order", type=int, help="pollaczek: series order for the ODE residuals")
    p.add_argument("--threads", type=int, help="worker processes (ELLIPTICA_THREADS wins)")
    p.add_argument("--json", dest="json_out", help="write the report document to this file")
    p.add_argument("--human", action="store_true", help="one line per case instead of JSON on stdout")
    return p


def _resolve_suite(args, parser) -> str:
    if args.suite == "algebra":
        if args.check not in ALGEBRA_CHECKS:
            parser.error(f"algebra needs --check {{{'|'.join(ALGEBRA_CHECKS)}}}")
        return args.check
    if args.suite == "jk":
        if args.compare:
            return "jk-compare"
        if args.check not in (None, "rep"):
            parser.error("jk supports --check rep or --compare")
        return "jk"
    if args.check is not None or args.compare:
        parser.error(f"--check/--compare do not apply to {args.suite}")
    return args.suite


def build_config(args, suite: str) -> HarnessConfig:
    cfg = HarnessConfig()
    if args.config is not None:
        try:
            text = args.config.read_text()
        except OSError as exc:
            raise ConfigError(f"{args.config}: {exc.strerror}") from None
        cfg = parse_config(text, str(args.config))
    kw = {}
    for name in ("degree", "seed", "r", "count", "threads"):
        v = getattr(args, name)
        if v is not None:
            kw[name] = v
    if args.variant is not None:
        kw["heis_variant"] = args.variant
    if args.constants is not None:
        kw["constants_source"] = args.constants
    if args.split_level:
        kw["split_level"] = True
    if args.ode_order is not None:
        kw["ode_order"] = args.ode_order
    windows = dict(cfg.windows)
    if args.window is not None:
        windows[suite if suite != ALL else "*"] = args.window
    if args.kmax is not None:
        windows["pollaczek"] = args.kmax
    kw["windows"] = tuple(sorted(windows.items()))
    if args.phi is not None:
        try:
            obj = json.loads(args.phi.read_text())
        except (OSError, ValueError) as exc:
            raise ConfigError(f"{args.phi}: {exc}") from None
        if not isinstance(obj, dict):
            raise ConfigError(f"{args.phi}: expected a JSON object")
        kw["phi"] = tuple(sorted((str(k), str(v)) for k, v in obj.items()))
    return cfg.with_(**kw)


def render_human(doc) -> List[str]:
    lines = []
    for c in doc.cases:
        tag = {"pass": "PASS", "fail": "FAIL", "report": "REPORT"}[c["verdict"]]
        lines.append(f"{tag:6} {c['case']}")
    return lines


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    suite = _resolve_suite(args, parser)
    try:
        cfg = build_config(args, suite)
        if args.phi is not None:
            from .jk import TraceFunctional
            TraceFunctional.from_json(dict(cfg.phi))
        doc = run_suite(suite, cfg)
    except (ConfigError, ValueError) as exc:
        print(f"elliptica: error: {exc}", file=sys.stderr)
        print(f"SUMMARY suite={suite} status=error")
        return 2
    text = doc.dumps()
    if args.json_out:
        Path(args.json_out).write_text(text)
    if args.human or args.json_out:
        for line in render_human(doc):
            print(line)
    else:
        sys.stdout.write(text)
    print(doc.summary_line())
    return 0 if doc.ok else 1


if __name__ == "__main__":
    sys.exit(main())
