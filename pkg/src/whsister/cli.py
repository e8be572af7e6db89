"""Command line: ``whsister {walk,equations,apoly,verify,batch}``.

Exit codes: 0 success, 2 bad or excluded slope (or time limit), 3 internal
invariant failure.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .algebra import from_json
from .eliminate import check_slope, compute_apoly
from .errors import (
    ShapeMismatch,
    SlopeError,
    TimeLimitExceeded,
    VerificationFailed,
    WhsisterError,
)
from .farey import parse_slope, walk_to
from .ptolemy import default_parent, equation_system, load_parent, render_system, system_to_dict

OUT_ENV = "WHSISTER_OUT"
EXIT_OK, EXIT_USER, EXIT_INTERNAL = 0, 2, 3


def _data(args):
    return load_parent(args.data) if getattr(args, "data", None) else default_parent()


def _emit(text, out=None):
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_walk(args):
    walk = walk_to(parse_slope(args.slope))
    if args.json:
        print(json.dumps(walk.as_dict(), indent=2))
        return EXIT_OK
    print(f"target {walk.target}: {len(walk.steps)} layered steps, turns {walk.turns or '-'}")
    print(f"{'k':>3}  {'old':>7} {'heading':>7} {'pivot':>7} {'fan':>7}  turn")
    for k, st in enumerate(walk.steps):
        print(f"{k:>3}  {str(st.old):>7} {str(st.heading):>7} {str(st.pivot):>7} {str(st.fan):>7}  {st.turn}")
    a, b = walk.fold_edge
    print(f"fold edge ({a}, {b})")
    return EXIT_OK


def cmd_equations(args):
    slope = check_slope(args.slope)
    system = equation_system(slope, _data(args))
    if args.format == "json":
        text = json.dumps(system_to_dict(system, args.rep), indent=2)
    else:
        text = "\n".join(render_system(system, args.rep, args.format))
    _emit(text, args.out)
    return EXIT_OK


def cmd_apoly(args):
    try:
        res = compute_apoly(args.slope, args.basis, _data(args), max_seconds=args.max_seconds)
    except TimeLimitExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(json.dumps({"partial": exc.partial}), file=sys.stderr)
        return EXIT_USER
    if args.format == "json":
        text = json.dumps(res.as_dict(args.rep))
    else:
        text = res.render(args.rep, args.format)
    _emit(text, args.out)
    if args.stats:
        print(json.dumps(res.stats), file=sys.stderr)
    return EXIT_OK


def cmd_verify(args):
    from .verify import run_checks

    try:
        data = _data(args)
    except (ShapeMismatch, OSError) as exc:
        print(f"FAIL  load parent data: {exc}")
        return EXIT_INTERNAL
    checks = run_checks(data, seed=args.seed, trials=args.trials)
    if args.json:
        print(json.dumps([c.as_dict() for c in checks], indent=2))
    else:
        width = max(len(c.name) for c in checks)
        for c in checks:
            print(f"{'PASS' if c.ok else 'FAIL'}  {c.name:<{width}}  {c.seconds:7.2f}s  {c.detail}")
    failed = [c.name for c in checks if not c.ok]
    if failed:
        print(f"{len(failed)} check(s) failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


def _slope_file(slope):
    return f"slope_{str(slope).replace('-', 'm').replace('/', '_')}.json"


def _batch_one(job):
    slope, basis, data_path, max_seconds, out_dir = job
    data = load_parent(data_path) if data_path else default_parent()
    try:
        res = compute_apoly(slope, basis, data, max_seconds=max_seconds, check=False)
    except TimeLimitExceeded as exc:
        return {"slope": slope, "ok": False, "error": str(exc), "partial": exc.partial, "code": EXIT_USER}
    except SlopeError as exc:
        return {"slope": slope, "ok": False, "error": str(exc), "code": EXIT_USER}
    recon = res.reconstruction_ok()
    doc = res.as_dict()
    doc["meta"]["reconstruction_ok"] = recon
    path = Path(out_dir) / _slope_file(res.slope)
    path.write_text(json.dumps(doc))
    # the file must read back to the same polynomial
    roundtrip = from_json(json.loads(path.read_text())) == res.polynomial
    ok = recon and roundtrip
    return {
        "slope": slope,
        "ok": ok,
        "file": str(path),
        "stats": res.stats,
        "reconstruction_ok": recon,
        "roundtrip_ok": roundtrip,
        "ms": round(res.ms, 1),
        "code": EXIT_OK if ok else EXIT_INTERNAL,
    }


def cmd_batch(args):
    out_dir = args.out or os.environ.get(OUT_ENV) or "results"
    Path(out_dir).mkdir(parents=True, exist_ok=True)
    lo, hi = sorted((args.from_n, args.to_n))
    slopes = [str(parse_slope(f"1/{n}")) for n in range(lo, hi + 1) if n != 0]
    jobs = [(s, args.basis, args.data, args.max_seconds, out_dir) for s in slopes]
    workers = max(1, min(args.jobs or os.cpu_count() or 1, len(jobs)))
    if workers == 1:
        results = [_batch_one(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_batch_one, jobs))
    summary_path = Path(out_dir) / "summary.json"
    summary_path.write_text(json.dumps(results, indent=2))
    for r in results:
        if r["ok"]:
            st = r["stats"]
            print(f"ok    {r['slope']:>6}  terms={st['terms']} deg_L={st['deg_L']} deg_M={st['deg_M']}  {r['file']}")
        else:
            print(f"FAIL  {r['slope']:>6}  {r.get('error', 'invariant check failed')}")
    codes = [r["code"] for r in results]
    return max(codes) if codes else EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="whsister", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, rep=True, fmt=True):
        sp.add_argument("--data", help="parent data JSON (default: shipped copy)")
        if rep:
            sp.add_argument("--rep", choices=["sl2", "psl2"], default="sl2")
        if fmt:
            sp.add_argument("--format", choices=["plain", "latex", "json"], default="plain")
            sp.add_argument("--out", help="write output to this file")

    w = sub.add_parser("walk", help="Farey walk for a slope")
    w.add_argument("slope")
    w.add_argument("--json", action="store_true")
    w.set_defaults(func=cmd_walk)

    e = sub.add_parser("equations", help="Ptolemy equation system for a slope")
    e.add_argument("slope")
    common(e)
    e.set_defaults(func=cmd_equations)

    a = sub.add_parser("apoly", help="A-polynomial factor for a slope")
    a.add_argument("slope")
    a.add_argument("--basis", choices=["triangulation", "standard"], default="triangulation")
    a.add_argument("--max-seconds", type=float, default=300)
    a.add_argument("--stats", action="store_true", help="print term count and degrees to stderr")
    common(a)
    a.set_defaults(func=cmd_apoly)

    v = sub.add_parser("verify", help="run the built-in check suite")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--trials", type=int, default=20)
    v.add_argument("--json", action="store_true")
    common(v, rep=False, fmt=False)
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("batch", help="compute 1/n for a range of n (negative n gives -1/|n|)")
    b.add_argument("--from", dest="from_n", type=int, required=True)
    b.add_argument("--to", dest="to_n", type=int, required=True)
    b.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./results)")
    b.add_argument("--basis", choices=["triangulation", "standard"], default="triangulation")
    b.add_argument("--jobs", type=int, default=None)
    b.add_argument("--max-seconds", type=float, default=300)
    b.add_argument("--data")
    b.set_defaults(func=cmd_batch)
    return p


_NEG_SLOPE = re.compile(r"^-(\d+)/(\d+)$")


def _protect_negative_slopes(argv):
    # argparse would read "-1/2" as an option; "1/-2" is the same slope
    return [_NEG_SLOPE.sub(r"\1/-\2", a) for a in argv]


def main(argv=None):
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_protect_negative_slopes(argv))
    try:
        return args.func(args)
    except SlopeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USER
    except (VerificationFailed, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except ShapeMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USER
    except WhsisterError as exc:
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
