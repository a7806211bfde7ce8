"""Command-line front end.

    wreath-approx folner CONFIG
    wreath-approx lift CONFIG [--epsilon p/q] [--seed N] [--out PATH]
    wreath-approx coamenable CONFIG [--epsilon p/q] [--seed N] [--out PATH]
    wreath-approx props [--seed N] [--sizes 2,3] [--pairs N]

Exit codes: 0 pass, 1 certificate fail, 2 config error, 3 construction error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .amenable import NoFolnerSet, folner_for, parse_backend
from .certify import _enc
from .coamenable import CoamenableError
from .groups import GroupError
from .lift import LiftError
from .pipelines import ConfigError, run_coamenable, run_lift, summary
from .props import run_properties
from .serialize import rational_from_json

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_CONSTRUCTION = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_CONFIG)


def _load(path: str) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    return doc


def _overrides(config: dict, args) -> dict:
    config = dict(config)
    if getattr(args, "epsilon", None) is not None:
        config["epsilon"] = args.epsilon
    if getattr(args, "seed", None) is not None:
        config["seed"] = args.seed
    return config


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_folner(args) -> int:
    config = _load(args.config)
    try:
        H = parse_backend(config["H"])
        targets = [H.from_json(t) for t in config["targets"]]
        bound = rational_from_json(config["bound"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad folner config: {exc}") from exc
    B = folner_for(H, targets, bound)
    doc = {
        "H": H.describe(),
        "bound": _enc(bound),
        "size": len(B),
        "elements": [H.to_json(b) for b in B.elements],
        "ratios": [[H.to_json(t), _enc(r)] for t, r in B.ratios()],
    }
    if args.out:
        _write(json.dumps(doc, sort_keys=True, indent=2) + "\n", args.out)
    lines = [f"Følner set for {H.describe()} at bound {_enc(bound)}: {len(B)} elements"]
    if len(B) <= 20:
        lines.append(f"  elements: {doc['elements']}")
    else:
        lines.append(f"  elements: {doc['elements'][0]} .. {doc['elements'][-1]}")
    lines.append("  target  ratio")
    lines.extend(f"  {json.dumps(t)}  {r}" for t, r in doc["ratios"])
    print("\n".join(lines))
    return EXIT_PASS


def _run_pipeline(fn, args) -> int:
    config = _overrides(_load(args.config), args)
    cert = fn(config)
    text = cert.dumps()
    if args.out:
        _write(text, args.out)
        sys.stdout.write(summary(cert))
    else:
        sys.stdout.write(text)
        sys.stderr.write(summary(cert))
    return EXIT_PASS if cert.passed else EXIT_FAIL


def cmd_lift(args) -> int:
    return _run_pipeline(run_lift, args)


def cmd_coamenable(args) -> int:
    return _run_pipeline(run_coamenable, args)


def cmd_props(args) -> int:
    try:
        sizes = tuple(int(s) for s in args.sizes.split(",") if s.strip())
        results = run_properties(seed=args.seed or 0, sizes=sizes, pairs=args.pairs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    text = "\n".join(r.line() for r in results) + "\n"
    _write(text, args.out)
    if args.out:
        sys.stdout.write(text)
    return EXIT_PASS if all(r.passed for r in results) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wreath-approx", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("folner", help="build a Følner set and print its boundary ratios")
    p.add_argument("config")
    p.add_argument("--out")
    p.set_defaults(func=cmd_folner)

    for name, func, text in (("lift", cmd_lift, "certify the lift of G wr H"),
                             ("coamenable", cmd_coamenable, "certify the co-amenable construction")):
        p = sub.add_parser(name, help=text)
        p.add_argument("config")
        p.add_argument("--epsilon", help="override epsilon, as p/q")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="write the certificate here instead of stdout")
        p.set_defaults(func=func)

    p = sub.add_parser("props", help="run the property suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sizes", default="2,3", help="comma-separated index-set sizes (1..6)")
    p.add_argument("--pairs", type=int, default=1000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_props)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (GroupError, LiftError, CoamenableError, NoFolnerSet) as exc:
        print(f"construction error: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION


if __name__ == "__main__":
    sys.exit(main())
