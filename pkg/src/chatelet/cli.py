"""Command-line front end: classify, census, table1, verify."""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from chatelet.brauer import classify
from chatelet.census import census_csv, census_json, run_census
from chatelet.local import Undecided
from chatelet.surface import InvalidTuple, orbit, signature_str, stratify, validate

SHARDS_ENV = "CHATELET_SHARDS"
EXIT_INVALID = 2
EXIT_UNDECIDED = 3


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {n}")
    return n


def _checkpoints(text: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad checkpoint list: {text!r}") from None
    if not values or any(v < 1 for v in values) or values != sorted(set(values)):
        raise argparse.ArgumentTypeError("checkpoints must be positive and strictly ascending")
    return values


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _emit(args, text: str, sidecar: str | None = None) -> None:
    if args.out is None:
        sys.stdout.write(text)
        return
    out = Path(args.out)
    _write_atomic(out, text)
    if sidecar is not None:
        _write_atomic(out.with_suffix(".json"), sidecar)


def _shards(args) -> int:
    env = os.environ.get(SHARDS_ENV)
    if env is None:
        return args.shards
    try:
        return _positive(env)
    except argparse.ArgumentTypeError as exc:
        raise SystemExit(f"{SHARDS_ENV}: {exc}") from None


def _classification_json(u) -> dict:
    cl = classify(u)
    st = stratify(u)
    return {
        "tuple": list(u),
        "det": u.det,
        "verdict": cl.verdict.value,
        "label": cl.label,
        "witness": None if cl.witness is None else str(cl.witness),
        "real_set": sorted(cl.real_set.values, reverse=True),
        "two_adic_set": None if cl.two_adic_set is None else sorted(cl.two_adic_set.values, reverse=True),
        "checked_odd_primes": list(cl.checked_odd_primes),
        "stratum": {
            "epsilon": signature_str(st.epsilon),
            "beta": st.beta,
            "gamma": st.gamma,
            "delta": st.delta,
            "det_sign": st.det_sign,
            "xi": list(st.xi),
        },
        "orbit": sorted(list(v) for v in orbit(u)),
    }


def cmd_classify(args) -> int:
    try:
        u = validate(args.a, args.b, args.c, args.d)
    except InvalidTuple as exc:
        print(f"invalid tuple ({args.a}, {args.b}, {args.c}, {args.d}): {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        print(json.dumps(_classification_json(u), indent=2))
    except Undecided as exc:
        print(f"undecided: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED
    return 0


def cmd_census(args) -> int:
    checkpoints = args.checkpoints or [args.max_norm]
    if checkpoints[-1] > args.max_norm:
        print("checkpoints must not exceed --max-norm", file=sys.stderr)
        return EXIT_INVALID
    try:
        reports = run_census(args.max_norm, checkpoints, shards=_shards(args), depth_cap=args.depth_cap)
    except Undecided as exc:
        print(f"undecided: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED
    if args.format == "json":
        _emit(args, census_json(reports))
    else:
        _emit(args, census_csv(reports), census_json(reports))
    return 0


def _table1_csv(rows) -> str:
    import csv
    import io

    cols = ("beta_class", "gamma_class", "delta_class", "T", "H", "Htilde", "paper_H", "paper_Htilde", "match")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([str(r[c]).lower() if c == "match" else r[c] for c in cols])
    return buf.getvalue()


def cmd_table1(args) -> int:
    from chatelet.density import DeterminacyError, compute_table

    try:
        table = compute_table()
    except DeterminacyError as exc:
        print(f"determinacy violation: {exc}", file=sys.stderr)
        return 1
    rows = table.table1()
    if args.format == "json":
        _emit(args, json.dumps(rows, indent=2) + "\n")
    else:
        _emit(args, _table1_csv(rows))
    return 1 if table.invariant_failures else 0


def _summary(claims) -> str:
    lines = []
    for c in claims:
        computed = c["computed_value"]
        pub = c["paper_value"]
        lines.append(f"{c['verdict']:>8}  {c['claim_id']}: computed {computed}"
                     + ("" if pub is None else f", published {pub}"))
        if "evidence" in c:
            ev = c["evidence"]
            lines.append(f"{'':>10}rational points on {ev['classes_with_rational_point']}"
                         f"/{ev['unobstructed_classes']} unobstructed classes"
                         f" (published counts allow {ev['published_ceiling']})")
    return "\n".join(lines) + "\n"


def cmd_verify(args) -> int:
    from chatelet.density import DeterminacyError, compute_table, hard_invariants_ok, verify_paper

    try:
        table = compute_table()
        reports = None
        if args.max_norm:
            checkpoints = args.checkpoints or [args.max_norm]
            reports = run_census(args.max_norm, checkpoints, shards=_shards(args), depth_cap=args.depth_cap)
        claims = verify_paper(table, reports, seed=args.seed)
    except DeterminacyError as exc:
        print(f"determinacy violation: {exc}", file=sys.stderr)
        return 1
    except Undecided as exc:
        print(f"undecided: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED
    text = json.dumps(claims, indent=2) + "\n"
    if args.out is not None:
        _write_atomic(Path(args.out), text)
    sys.stdout.write(text if args.format == "json" else _summary(claims))
    return 0 if hard_invariants_ok(claims) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chatelet", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify one tuple (a, b, c, d)")
    for name in "abcd":
        p.add_argument(name, type=int)
    p.set_defaults(func=cmd_classify)

    def run_flags(p, default_norm, fmt_choices, fmt_default):
        p.add_argument("--max-norm", type=int, default=default_norm)
        p.add_argument("--checkpoints", type=_checkpoints)
        p.add_argument("--shards", type=_positive, default=1)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--depth-cap", type=_positive)
        p.add_argument("--out")
        p.add_argument("--format", choices=fmt_choices, default=fmt_default)

    p = sub.add_parser("census", help="count tuples up to a height")
    run_flags(p, None, ("csv", "json"), "csv")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("table1", help="class counts mod 16 next to the published table")
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("verify", help="claim-by-claim comparison with the published values")
    run_flags(p, 2000, ("text", "json"), "text")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    norm = getattr(args, "max_norm", 0)
    if args.command == "census" and (norm is None or norm < 1):
        parser.error("census needs --max-norm >= 1")
    if args.command == "verify" and norm < 0:
        parser.error("--max-norm must be >= 0 (0 skips the census)")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
