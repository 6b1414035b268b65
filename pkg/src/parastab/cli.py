"""Command-line runner: ``parastab verify|compute|report``.

Exit codes: 0 every check passed, 1 some check failed, 2 usage error, 3 capacity exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Any, Callable, Sequence

import numpy as np

from . import checks as ck
from . import hecke as hk
from .dlstable import dual_chart, series_csv, sl2_data
from .grpfin import CapacityError, enumerate_group, character_table, table_csv
from .liestable import FinLieAlgebra

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAPACITY = 0, 1, 2, 3

SUITES = (
    "ft",
    "stable-algebra",
    "vanishing-lie",
    "vanishing-group",
    "res-diagram",
    "root-claims",
    "series",
    "hecke",
    "ktype-params",
)


class UsageError(ValueError):
    pass


def _clean(x: Any) -> Any:
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.generic):
        return _clean(x.item())
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    return x


def render_json(reports: Sequence[ck.CheckReport], seed: int) -> str:
    doc = {
        "version": ck.VERSION,
        "environment": {"psi": "t -> exp(2 pi i t / p)", "mu": "mu(I+) = 1", "seed": seed},
        "checks": [_clean(r.to_dict()) for r in reports],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def render_csv(reports: Sequence[ck.CheckReport]) -> str:
    lines = ["id,params,status,residual"]
    for r in reports:
        params = ";".join(f"{k}={v}" for k, v in sorted(r.params.items()))
        lines.append(f"{r.id},{params},{r.status},{r.residual}")
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _algebras(args: argparse.Namespace, configured: Sequence[tuple[int, int]]) -> list[tuple[int, int]]:
    pairs = list(configured)
    if args.algebra:
        if args.algebra not in ("sl2", "sl3"):
            raise UsageError("--algebra must be sl2 or sl3")
        n = int(args.algebra[2])
        pairs = [pq for pq in pairs if pq[0] == n]
    if args.q is not None:
        pairs = [pq for pq in pairs if pq[1] == args.q]
        if not pairs and args.algebra:
            pairs = [(int(args.algebra[2]), args.q)]
    if not pairs:
        raise UsageError("no configured algebra matches the given flags")
    return pairs


def _qs(args: argparse.Namespace, default: Sequence[int], allowed: Sequence[int]) -> list[int]:
    if args.q is None:
        return list(default)
    if args.q not in allowed:
        raise UsageError(f"--q must be one of {list(allowed)}")
    return [args.q]


def _plan(args: argparse.Namespace) -> list[Callable[[], ck.CheckReport]]:
    s, seed, t = args.suite, args.seed, args.timings
    kw = {"seed": seed, "timings": t}
    if s == "ft":
        return [lambda n=n, q=q: ck.check_ft(n, q, **kw) for n, q in _algebras(args, ck.LIE_FT)]
    if s == "stable-algebra":
        return [lambda n=n, q=q: ck.check_stable_algebra(n, q, **kw) for n, q in _algebras(args, ck.LIE_STABLE)]
    if s == "vanishing-lie":
        return [lambda n=n, q=q: ck.check_vanishing_lie(n, q, **kw) for n, q in _algebras(args, ck.LIE_VANISHING)]
    if s == "res-diagram":
        if args.group:
            return [lambda q=q: ck.check_res_diagram_group(q, **kw) for q in _qs(args, (3, 5), (3, 5, 7))]
        return [lambda n=n, q=q: ck.check_res_diagram_lie(n, q, **kw) for n, q in _algebras(args, ck.LIE_STABLE)]
    if s == "vanishing-group":
        return [lambda q=q: ck.check_vanishing_group(q, **kw) for q in _qs(args, (3, 5), (3, 5, 7))]
    if s == "series":
        out: list[Callable[[], ck.CheckReport]] = []
        for q in _qs(args, (3, 5), (3, 5, 7)):
            out += [lambda q=q: ck.check_series(q, **kw), lambda q=q: ck.check_dl_constraints(q, **kw)]
        return out
    if s == "root-claims":
        types = [args.type] if args.type else ["A1", "A2"]
        if any(x not in ("A1", "A2") for x in types):
            raise UsageError("--type must be A1 or A2")
        return [lambda x=x: ck.check_root_claims(x, args.length_max, args.n_max, **kw) for x in types]
    p = args.p if args.p is not None else (args.q if args.q is not None else 3)
    if p != 3 and s in ("hecke", "ktype-params"):
        raise UsageError("the Hecke window is configured for p = 3")
    rs = [args.r] if args.r is not None else [0, 1]
    if any(r not in (0, 1) for r in rs):
        raise UsageError("--r must be 0 or 1")
    if s == "hecke":
        return [lambda r=r: ck.check_hecke(p, r, args.window, **kw) for r in rs]
    if s == "ktype-params":
        return [lambda r=r: ck.check_ktype_params(p, r, **kw) for r in rs]
    raise UsageError(f"unknown suite {s!r}")


def _run_reports(thunks: Sequence[Callable[[], ck.CheckReport]]) -> list[ck.CheckReport]:
    return [t() for t in thunks]


def cmd_verify(args: argparse.Namespace) -> int:
    reports = _run_reports(_plan(args))
    text = render_csv(reports) if args.format == "csv" else render_json(reports, args.seed)
    _emit(text, args.out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_report(args: argparse.Namespace) -> int:
    reports = ck.run_suite(seed=args.seed, timings=args.timings)
    text = render_csv(reports) if args.format == "csv" else render_json(reports, args.seed)
    _emit(text, args.out)
    if any(r.status == "inconclusive" for r in reports):
        return EXIT_CAPACITY
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def _parse_ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc


def cmd_compute(args: argparse.Namespace) -> int:
    what = args.what
    if what == "dl-param":
        p = args.p or 3
        r = 1 if args.r is None else args.r
        P = args.parahoric
        if P not in hk.PARAHORICS:
            raise UsageError(f"--parahoric must be one of {list(hk.PARAHORICS)}")
        if args.chi is None:
            raise UsageError("--chi is required")
        chi = _parse_ints(args.chi)
        dim = (1 if P == "I" else 3) if r > 0 else 1
        if len(chi) != dim:
            raise UsageError(f"--chi needs {dim} coordinate(s)")
        k = hk.ktype(P, r, chi, p)
        doc = {"parahoric": P, "r": r, "chi": list(chi), "theta": hk.theta_of_ktype(k, p), "nondegenerate": k.nondegenerate}
        _emit(json.dumps(doc, sort_keys=True) + "\n", args.out)
        return EXIT_OK
    if what == "chart":
        if args.algebra:
            n = int(args.algebra[2])
            g = FinLieAlgebra(n, args.q or 3, None, allow_degenerate=True)
            rows = [list(pt) for pt in g.chart_points]
            if args.format == "csv":
                _emit("point\n" + "\n".join(" ".join(map(str, r)) for r in rows) + "\n", args.out)
            else:
                _emit(json.dumps({"algebra": g.name, "points": rows}) + "\n", args.out)
            return EXIT_OK
        q = args.q or 3
        if args.format == "csv":
            _emit(series_csv(sl2_data(q, args.seed)), args.out)
        else:
            pts = [{"coordinate": c.coordinate, "split": c.split, "order": c.order} for c in dual_chart(q)]
            _emit(json.dumps({"q": q, "points": pts}) + "\n", args.out)
        return EXIT_OK
    if what == "char-table":
        n = int((args.group or "sl2")[2])
        G = enumerate_group(n, args.q or 3)
        chars = character_table(G, args.seed)
        if args.format == "json":
            doc = {"order": G.order, "class_sizes": G.class_sizes.tolist(), "degrees": [c.degree for c in chars]}
            _emit(json.dumps(_clean(doc)) + "\n", args.out)
        else:
            _emit(table_csv(chars), args.out)
        return EXIT_OK
    raise UsageError(f"unknown quantity {what!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="parastab", description="Stable functions and limit elements at desk scale.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", type=int)
    common.add_argument("--p", type=int)
    common.add_argument("--algebra", choices=["sl2", "sl3"])
    common.add_argument("--group", choices=["sl2", "sl3"])
    common.add_argument("--r", type=int)
    common.add_argument("--type", choices=["A1", "A2"])
    common.add_argument("--length-max", type=int, default=6)
    common.add_argument("--n-max", type=int, default=2)
    common.add_argument("--window", type=int)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--timings", action="store_true", help="record elapsed_ms (reports are then not byte-stable)")
    sub = parser.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", parents=[common], help="run one verification suite")
    v.add_argument("suite", choices=SUITES)
    v.set_defaults(func=cmd_verify)
    c = sub.add_parser("compute", parents=[common], help="compute a table or parameter")
    c.add_argument("what", choices=["dl-param", "chart", "char-table"])
    c.add_argument("--parahoric", default="hs1")
    c.add_argument("--chi")
    c.set_defaults(func=cmd_compute)
    r = sub.add_parser("report", parents=[common], help="run the default suite")
    r.set_defaults(func=cmd_report)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"parastab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        label = getattr(args, "suite", None) or getattr(args, "what", None) or args.command
        print(f"parastab: capacity exceeded in {label}: {exc}", file=sys.stderr)
        return EXIT_CAPACITY


if __name__ == "__main__":
    sys.exit(main())
