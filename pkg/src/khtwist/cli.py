"""Command line interface: ``kh <command> [inputs] [options]``.

Inputs are given with ``--pd FILE``, ``--braid WORD`` (with ``--strands``)
or ``--family SPEC``; ``compare`` takes two of them, in order.

Exit codes: 0 success or equal, 1 different (or a failed check),
2 unreadable input, 3 crossing cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from .diagram import Diagram, DiagramError, parse_braid, parse_pd, to_pd
from .family import format_family, gcd_annotation, generate_family, parse_family, twist_action
from .homology import ENGINES, compare_tables, compute, diagonal_width
from .les import build_les, check_rank_exactness, check_ses_chain_level
from .limits import CapExceeded
from .polynomials import homflypt, kauffman_jones

EXIT_OK, EXIT_DIFFERENT, EXIT_PARSE, EXIT_CAP = 0, 1, 2, 3


class _Input(argparse.Action):
    """Collect --pd/--braid/--family in the order given."""

    def __call__(self, parser, namespace, values, option_string=None):
        items = list(getattr(namespace, "inputs", None) or [])
        items.append((self.dest, values))
        namespace.inputs = items


def _fixture_path(name: str) -> Path:
    p = Path(name)
    if p.exists():
        return p
    packaged = resources.files("khtwist") / "fixtures" / p.name
    if packaged.is_file():
        return Path(str(packaged))
    raise DiagramError(f"no such PD file: {name}")


def load_input(kind: str, value: str, strands: int | None) -> tuple[Diagram, str]:
    """Turn one command-line input into a diagram and a display label."""
    if kind == "pd":
        path = _fixture_path(value)
        try:
            text = path.read_text()
        except OSError as exc:
            raise DiagramError(str(exc)) from None
        return parse_pd(text), path.stem
    if kind == "braid":
        if strands is None:
            from .diagram import parse_braid_word

            strands = max([abs(g) for g in parse_braid_word(value)] + [1]) + 1
        return parse_braid(value, strands), f"braid {value}"
    spec = parse_family(value)
    return generate_family(spec).diagram, format_family(spec)


def _inputs(args, need: int | None = 1) -> list[tuple[Diagram, str]]:
    items = getattr(args, "inputs", None) or []
    if need is not None and len(items) != need:
        raise DiagramError(f"{args.command} expects {need} input(s), got {len(items)}")
    return [load_input(kind, value, args.strands) for kind, value in items]


def _table(d, label, args):
    return compute(d, workers=args.threads, cap=args.cap, label=label,
                   rational=args.coefficients == "q", engine=args.engine)


def _emit(args, text_lines, payload):
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True))
    else:
        print("\n".join(text_lines))


# -- commands ---------------------------------------------------------------------

def cmd_compute(args) -> int:
    (d, label), = _inputs(args)
    t = _table(d, label, args)
    if args.format == "json":
        payload = json.loads(t.to_json())
        if args.diagonals:
            payload["diagonals"] = {"values": t.diagonals(), "width": diagonal_width(t)}
        print(json.dumps(payload, sort_keys=True))
    else:
        print(f"{label}: {len(d.crossings)} crossings, writhe {d.writhe}")
        print(t.format())
        if args.diagonals:
            print(f"diagonals q-2u: {' '.join(map(str, t.diagonals()))} (width {diagonal_width(t)})")
    return EXIT_OK


def cmd_compare(args) -> int:
    (da, la), (db, lb) = _inputs(args, need=2)
    ta, tb = _table(da, la, args), _table(db, lb, args)
    verdict = compare_tables(ta, tb)
    payload = {"a": la, "b": lb, "equal": verdict.equal,
               "diff": [{"u": u, "q": q, "a": [ea[0], list(ea[1])], "b": [eb[0], list(eb[1])]}
                        for (u, q), ea, eb in verdict.diff]}
    _emit(args, [f"{la} vs {lb}: {verdict.format()}"], payload)
    return EXIT_OK if verdict.equal else EXIT_DIFFERENT


def cmd_family(args) -> int:
    base = parse_family(args.spec)
    if args.l_values:
        powers = [(2 * l, l) for l in args.l_values]
    else:
        powers = [(k, k // 2 if k % 2 == 0 else None) for k in range(args.max_k + 1)]
    rows, lines = [], []
    n = None if base.braid_word_override is not None else base.braid_n
    for k, l in powers:
        spec = twist_action(base, "right", k)
        d = generate_family(spec).diagram
        row = {"spec": format_family(spec), "k": spec.twist_power, "crossings": len(d.crossings),
               "writhe": d.writhe, "pd": to_pd(d)}
        note = ""
        if l is not None and n is not None:
            row["l"] = l
            row["gcd"] = gcd_annotation(n, l)
            note = f" l={l} gcd(l,{2 * n + 1})={row['gcd']}"
        rows.append(row)
        lines.append(f"# {row['spec']} crossings={row['crossings']} writhe={row['writhe']}{note}")
        lines.append(row["pd"])
    _emit(args, lines, {"family": rows})
    return EXIT_OK


def _poly_command(args, evaluate, name) -> int:
    got = [(label, evaluate(d)) for d, label in _inputs(args, need=None)]
    if not got or len(got) > 2:
        raise DiagramError(f"{args.command} expects one or two inputs")
    lines = [f"{label}: {p.format()}" for label, p in got]
    payload = {"inputs": [{"label": label, name: p.to_pairs()} for label, p in got]}
    code = EXIT_OK
    if len(got) == 2:
        same = got[0][1] == got[1][1]
        lines.append("equal" if same else "distinct")
        payload["equal"] = same
        code = EXIT_OK if same else EXIT_DIFFERENT
    _emit(args, lines, payload)
    return code


def cmd_jones(args) -> int:
    return _poly_command(args, lambda d: kauffman_jones(d, cap=args.cap), "jones")


def cmd_homfly(args) -> int:
    return _poly_command(args, lambda d: homflypt(d, cap=args.cap, seed=args.seed), "homflypt")


def cmd_les_check(args) -> int:
    (d, label), = _inputs(args)
    inst = build_les(d, args.crossing, workers=args.threads, cap=args.cap)
    verdict = check_rank_exactness(inst)
    ses = check_ses_chain_level(inst)
    ok = verdict.exact and ses.ok
    if args.format == "json":
        payload = inst.to_dict()
        payload.update({"knot": label, "exactness": verdict.to_dict(),
                        "ses": {"ok": ses.ok, "mismatches": ses.mismatches}})
        print(json.dumps(payload, sort_keys=True))
    else:
        print(f"{label}: crossing {args.crossing} sign {inst.sign:+d} c={inst.c} "
              f"sub shift {inst.sub_shift} quotient shift {inst.quotient_shift}")
        print(verdict.format())
        print("chain-level SES: " + ("match" if ses.ok else "MISMATCH " + ses.mismatches[0]))
    return EXIT_OK if ok else EXIT_DIFFERENT


# -- parser -----------------------------------------------------------------------

def _add_inputs(p: argparse.ArgumentParser):
    p.add_argument("--pd", action=_Input, metavar="FILE", help="PD code file (packaged fixture names work too)")
    p.add_argument("--braid", action=_Input, metavar="WORD", help='braid word such as "s1 -s2 s1"')
    p.add_argument("--family", action=_Input, metavar="SPEC", help='family spec such as "n=1 k=2"')
    p.add_argument("--strands", type=int, help="strand count for --braid (default: smallest possible)")


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.add_argument("--cap", type=int, default=None, help="crossing cap (default $KH_CAP or 14)")
    p.add_argument("--threads", type=int, default=1, help="worker processes for homology slots")
    p.add_argument("--coefficients", choices=("z", "q"), default="z",
                   help="z: integral with torsion, q: rational ranks only")
    p.add_argument("--engine", choices=ENGINES, default="cube",
                   help="cube: full cube of resolutions; local: crossing-by-crossing reduction")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kh", description="Khovanov homology of link diagrams.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="homology table of one diagram")
    _add_inputs(p)
    _add_common(p)
    p.add_argument("--diagonals", action="store_true", help="report the q-2u diagonals carrying homology")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("compare", help="compare the homology of two diagrams")
    _add_inputs(p)
    _add_common(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("family", help="PD codes along the twist orbit of a family")
    p.add_argument("spec", help='family spec, e.g. "n=2 T= U="')
    group = p.add_mutually_exclusive_group()
    group.add_argument("--max-k", type=int, default=2, help="emit k = 0..K (default 2)")
    group.add_argument("--l", dest="l_values", type=int, nargs="+", help="emit k = 2l for these l")
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(func=cmd_family)

    for name, func, what in (("jones", cmd_jones, "unnormalised Jones polynomial"),
                             ("homfly", cmd_homfly, "HOMFLYPT polynomial")):
        p = sub.add_parser(name, help=f"{what} of one diagram, or a comparison of two")
        _add_inputs(p)
        p.add_argument("--format", choices=("table", "json"), default="table")
        p.add_argument("--cap", type=int, default=None)
        if name == "homfly":
            p.add_argument("--seed", type=int, default=0, help="base-point choice for the skein recursion")
        p.set_defaults(func=func)

    p = sub.add_parser("les-check", help="long exact sequence checks at one crossing")
    _add_inputs(p)
    _add_common(p)
    p.add_argument("--crossing", type=int, default=0, help="crossing index (0-based)")
    p.set_defaults(func=cmd_les_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapExceeded as exc:
        print(f"kh: {exc}", file=sys.stderr)
        return EXIT_CAP
    except DiagramError as exc:
        print(f"kh: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
