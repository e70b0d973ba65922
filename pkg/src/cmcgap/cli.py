"""Command-line front end.

    cmcgap constants --n 4..6 --H 1 --c 1 --format csv
    cmcgap verify --suite all --seed 0 --format json
    cmcgap classify --n 4 --H 1 --c 1 --S 7.7
    cmcgap scan --n 4..8 --H 0.1..2:0.1 --c 1

Exit codes: 0 all checks passed, 1 a verification failed, 2 usage or
precondition error.  Ranges are ``a..b[:step]`` and inclusive; the step
defaults to 1 for integers and is required for reals.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from . import __version__
from . import constants as pc
from . import gap
from .errors import GapToolkitError, UsageError
from .report import jsonable, round_sig
from .suites import MARGIN_TOL, SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
LEMMA3_RTOL = 1e-10

CSV_HEADERS = {
    "constants": ["n", "H", "c", "alpha", "ring_alpha", "beta", "b_n", "delta", "lemma3_residual",
                  "alpha_k", "lambda_k"],
    "verify": ["check_id", "passed", "worst_margin", "tolerance", "samples", "seed", "witness"],
    "classify": ["n", "H", "c", "S", "tag", "alpha", "alpha_plus_delta", "dist_alpha", "dist_band_top",
                 "model_k", "model_lambda", "model_S"],
    "scan": ["n", "H", "c", "alpha", "alpha_plus_delta", "alpha_2", "problem_rhs", "problem_margin",
             "band_phi_margin", "band_eta_margin"],
}


class CliUsageError(Exception):
    pass


def _count(lo: float, hi: float, step: float) -> int:
    if step <= 0:
        raise CliUsageError(f"range step must be positive, got {step}")
    if hi < lo:
        return 0
    return int(math.floor((hi - lo) / step + 1e-9)) + 1


def parse_int_range(text: str) -> list[int]:
    try:
        if ".." not in text:
            return [int(text)]
        body, _, step = text.partition(":")
        lo, hi = (int(p) for p in body.split("..", 1))
        step = int(step) if step else 1
    except ValueError:
        raise CliUsageError(f"bad integer range {text!r}; expected N or A..B[:STEP]") from None
    return [lo + i * step for i in range(_count(lo, hi, step))]


def parse_real_range(text: str) -> list[float]:
    try:
        if ".." not in text:
            return [float(text)]
        body, sep, step = text.partition(":")
        if not sep:
            raise CliUsageError(f"real range {text!r} needs an explicit step, e.g. 0.1..2:0.1")
        lo, hi = (float(p) for p in body.split("..", 1))
        step = float(step)
    except ValueError:
        raise CliUsageError(f"bad real range {text!r}; expected X or A..B:STEP") from None
    if not all(math.isfinite(v) for v in (lo, hi, step)):
        raise CliUsageError(f"range {text!r} must be finite")
    # round away the accumulation error of lo + i*step
    return [round_sig(lo + i * step, 12) for i in range(_count(lo, hi, step))]


def parse_real(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise CliUsageError(f"expected a real number, got {text!r}") from None
    if not math.isfinite(v):
        raise CliUsageError(f"expected a finite number, got {text!r}")
    return v


# -- commands ----------------------------------------------------------------


def cmd_constants(args) -> tuple[list[dict], dict]:
    ns, Hs, c = parse_int_range(args.n), parse_real_range(args.H), parse_real(args.c)
    rows, skipped = [], []
    for n in ns:
        for H in Hs:
            if n < 3 or H * H + c <= 0:
                skipped.append({"n": n, "H": H, "c": c})
                continue
            ctx = pc.SpaceFormContext(n, c)
            theorem = n >= 4
            rows.append({
                "n": n,
                "H": H,
                "c": c,
                "alpha": pc.alpha_general(ctx, H),
                "ring_alpha": pc.ring_alpha(ctx, H),
                "beta": pc.beta(n, H),
                "b_n": pc.b_n(n) if theorem else None,
                "delta": pc.delta_band(ctx, H) if theorem else None,
                "lemma3_residual": pc.lemma3_residual(ctx, H),
                "alpha_k": [pc.alpha_k(n, H, k) for k in range(1, n)],
                "lambda_k": [pc.lambda_k(n, H, k) for k in range(1, n)],
            })
    _no_valid_points(rows, skipped)
    rel = [pc.lemma3_relative_residual(pc.SpaceFormContext(r["n"], r["c"]), r["H"]) for r in rows]
    failed = sum(1 for x in rel if x >= LEMMA3_RTOL)
    worst = max(rel, default=0.0)
    return rows, {"passed": len(rows) - failed, "failed": failed, "worst_margin": LEMMA3_RTOL - worst, "skipped": skipped}


def cmd_verify(args) -> tuple[list[dict], dict]:
    ns = tuple(parse_int_range(args.n)) if args.n else None
    if args.samples < 1:
        raise CliUsageError("--samples must be >= 1")
    if args.seed < 0:
        raise CliUsageError("--seed must be >= 0")
    reports = run_suite(args.suite, samples=args.samples, seed=args.seed, grid=args.grid, ns=ns,
                        workers=args.workers)
    rows = [r.to_dict() for r in reports]
    failed = sum(1 for r in reports if not r.passed)
    worst = min((r.worst_margin for r in reports), default=math.inf)
    return rows, {"passed": len(reports) - failed, "failed": failed, "worst_margin": worst}


def cmd_classify(args) -> tuple[list[dict], dict]:
    n = int(args.n)
    H, c, S = parse_real(args.H), parse_real(args.c), parse_real(args.S)
    if n < 4:
        raise CliUsageError(f"classify needs n >= 4, got {n}")
    if H * H + c <= 0:
        raise CliUsageError(f"precondition H^2 + c > 0 violated (H={H}, c={c})")
    if S < n * H * H:
        raise CliUsageError(f"precondition S >= n H^2 violated (S={S} < {n * H * H})")
    region = gap.classify(n, H, c, S, rtol=args.rtol)
    row = {
        "n": n, "H": H, "c": c, "S": S,
        "tag": region.tag.value,
        "alpha": region.alpha,
        "alpha_plus_delta": region.alpha + region.delta,
        "dist_alpha": region.margins["to_alpha"],
        "dist_band_top": region.margins["to_band_top"],
        "model_k": None, "model_lambda": None, "model_S": None,
    }
    if region.tag in (gap.GapTag.RIGID_BOUNDARY, gap.GapTag.ABOVE):
        k, lam, s_model = gap.nearest_model(n, H, c, S)
        row.update(model_k=k, model_lambda=lam, model_S=s_model)
    return [row], {"passed": 1, "failed": 0, "worst_margin": None}


def cmd_scan(args) -> tuple[list[dict], dict]:
    ns, Hs, c = parse_int_range(args.n), parse_real_range(args.H), parse_real(args.c)
    if args.grid < 2:
        raise CliUsageError("--grid must be >= 2")
    rows, skipped = [], []
    for n in ns:
        for H in Hs:
            if n < 4 or H * H + c <= 0:
                skipped.append({"n": n, "H": H, "c": c})
                continue
            ctx = pc.SpaceFormContext(n, c)
            alpha = pc.alpha_general(ctx, H)
            phi_m, eta_m = gap.band_margins(n, H, c, args.grid)
            rows.append({
                "n": n, "H": H, "c": c,
                "alpha": alpha,
                "alpha_plus_delta": alpha + pc.delta_band(ctx, H),
                "alpha_2": pc.alpha_k(n, H, 2),
                "problem_rhs": 2 * n + 3 * n * H * H,
                "problem_margin": pc.problem_gap_check(n, H),
                "band_phi_margin": phi_m,
                "band_eta_margin": eta_m,
            })
    _no_valid_points(rows, skipped)
    failed = 0
    worst = math.inf
    for r in rows:
        band_ok = min(r["band_phi_margin"], r["band_eta_margin"]) >= -MARGIN_TOL
        problem_ok = r["problem_margin"] > 0 or r["H"] == 0
        failed += not (band_ok and problem_ok)
        worst = min(worst, r["band_phi_margin"], r["band_eta_margin"])
    return rows, {"passed": len(rows) - failed, "failed": failed, "worst_margin": worst, "skipped": skipped}


def _no_valid_points(rows, skipped):
    if not rows and skipped:
        bad = skipped[0]
        raise CliUsageError(
            f"no admissible grid point: need n >= 3 (n >= 4 for band quantities) and H^2 + c > 0, "
            f"e.g. n={bad['n']}, H={bad['H']}, c={bad['c']} fails"
        )


COMMANDS = {
    "constants": cmd_constants,
    "verify": cmd_verify,
    "classify": cmd_classify,
    "scan": cmd_scan,
}


# -- rendering ---------------------------------------------------------------


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        r = round_sig(v)
        return "" if r is None else f"{v:.12g}"
    if isinstance(v, (list, tuple)) or hasattr(v, "tolist"):
        return ";".join(_cell(x) for x in (v.tolist() if hasattr(v, "tolist") else v))
    return str(v)


def render(command: str, config: dict, rows: list[dict], summary: dict, fmt: str) -> str:
    if fmt == "json":
        doc = {
            "tool_version": __version__,
            "command": command,
            "config": config,
            "results": rows,
            "summary": summary,
        }
        return json.dumps(jsonable(doc), indent=2, ensure_ascii=False, allow_nan=False) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        header = CSV_HEADERS[command]
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_cell(r.get(h)) for h in header])
        return buf.getvalue()
    return _render_text(command, rows, summary)


def _render_text(command, rows, summary) -> str:
    out = []
    if command == "verify":
        for r in rows:
            status = "PASS" if r["passed"] else "FAIL"
            out.append(f"{status}  {r['check_id']:<32} worst_margin={_cell(r['worst_margin'])} "
                       f"tol={_cell(r['tolerance'])} samples={r['samples']}")
    elif command == "classify":
        r = rows[0]
        out.append(f"{r['tag']}  S={_cell(r['S'])}  band=({_cell(r['alpha'])}, {_cell(r['alpha_plus_delta'])}]")
        out.append(f"  S - alpha = {_cell(r['dist_alpha'])}   S - (alpha + delta) = {_cell(r['dist_band_top'])}")
        if r["model_k"] is not None:
            out.append(f"  nearest model: k={r['model_k']} lambda={_cell(r['model_lambda'])} S={_cell(r['model_S'])}")
    else:
        header = CSV_HEADERS[command]
        out.append("  ".join(header))
        for r in rows:
            out.append("  ".join(_cell(r.get(h)) for h in header))
    if summary.get("failed") is not None and command != "classify":
        out.append(f"summary: {summary['passed']} passed, {summary['failed']} failed, "
                   f"worst margin {_cell(summary.get('worst_margin'))}")
    return "\n".join(out) + "\n"


# -- argument parsing ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default="text")
    common.add_argument("--output", "-o", help="write the report here instead of standard output")

    p = argparse.ArgumentParser(prog="cmcgap", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("constants", parents=[common], help="tabulate pinching constants")
    s.add_argument("--n", required=True, help="dimension or range A..B[:STEP]")
    s.add_argument("--H", required=True, help="mean curvature or range A..B:STEP")
    s.add_argument("--c", default="1", help="ambient curvature (default 1)")

    s = sub.add_parser("verify", parents=[common], help="run verification suites")
    s.add_argument("--suite", choices=(*SUITES, "all"), default="all")
    s.add_argument("--n", help="override the dimensions searched by lemma1/lemma2")
    s.add_argument("--samples", type=int, default=10_000, help="random starts per search (default 10000)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--grid", type=int, default=None, help="grid size for envelope/band sweeps")
    s.add_argument("--workers", type=int, default=1, help="processes for the searches")

    s = sub.add_parser("classify", parents=[common], help="locate S relative to the forbidden band")
    s.add_argument("--n", required=True, type=int)
    s.add_argument("--H", required=True)
    s.add_argument("--c", default="1")
    s.add_argument("--S", required=True)
    s.add_argument("--rtol", type=float, default=gap.CLASSIFY_RTOL)

    s = sub.add_parser("scan", parents=[common], help="sweep band margins and the alpha_{n//2} < 2n + 3nH^2 margin")
    s.add_argument("--n", required=True)
    s.add_argument("--H", required=True)
    s.add_argument("--c", default="1")
    s.add_argument("--grid", type=int, default=1000)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("output", "format")}
    try:
        rows, summary = COMMANDS[args.command](args)
    except (CliUsageError, GapToolkitError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = render(args.command, config, rows, summary, args.format)
    try:
        if args.output:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_FAIL if summary.get("failed") else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
