"""Command-line front end.

Subcommands:

* ``simulate-error``  Monte-Carlo bias/RMSE of the ML or martingale
  estimator, written as CSV.
* ``token-error``     the same for estimation from sparse hash tokens.
* ``mvp-table``       tabulate the space-efficiency closed forms.
* ``sketch-info``     parameters, fill statistics, and estimates of a
  serialized sketch file.
* ``merge-files``     merge two sketch files (optionally auto-reducing
  to common parameters first).
* ``reduce-file``     losslessly shrink a sketch file to smaller d/p.

Checkpoint lists accept plain or scientific notation
(``--checkpoints 1e4,2e4``) and the ladder shorthand
``ladder:KMIN..KMAX`` for {1,2,5} * 10**k.  All commands are
deterministic given their flags.
"""

from __future__ import annotations

import argparse
import sys

from .params import Params
from .sim import SimPlan, run_plan
from .sketch import Sketch
from .estimator import estimate_distinct
from .theory import mvp_grid_argmin, mvp_martingale, mvp_ml


def parse_checkpoints(text: str) -> tuple[int, ...]:
    """Parse a checkpoint list; see module docstring for the syntax."""
    values: set[int] = set()
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if part.startswith("ladder:"):
            span = part[len("ladder:"):]
            try:
                lo_text, hi_text = span.split("..")
                lo, hi = int(lo_text), int(hi_text)
            except ValueError:
                raise ValueError(
                    f"ladder syntax is ladder:KMIN..KMAX, got {part!r}"
                ) from None
            if lo > hi:
                raise ValueError(f"empty ladder range {part!r}")
            for k in range(lo, hi + 1):
                for lead in (1, 2, 5):
                    values.add(lead * 10 ** k)
        else:
            number = float(part)
            if number != int(number) or number < 1:
                raise ValueError(f"checkpoint must be a positive integer: {part!r}")
            values.add(int(number))
    if not values:
        raise ValueError("no checkpoints given")
    return tuple(sorted(values))


def _parse_range(text: str) -> tuple[int, int]:
    try:
        lo_text, hi_text = text.split(":")
        lo, hi = int(lo_text), int(hi_text)
    except ValueError:
        raise ValueError(f"range syntax is LO:HI, got {text!r}") from None
    if lo > hi:
        raise ValueError(f"empty range {text!r}")
    return lo, hi


def _write_report(report, out: str) -> None:
    if out == "-":
        report.write_csv(sys.stdout)
    else:
        report.write_csv(out)


def _cmd_simulate_error(args) -> int:
    params = Params(args.t, args.d, args.p)
    plan = SimPlan(
        params=params,
        estimator=args.estimator,
        checkpoints=parse_checkpoints(args.checkpoints),
        runs=args.runs,
        seed=args.seed,
        direct_limit=int(args.direct_limit),
    )
    _write_report(run_plan(plan, workers=args.workers), args.out)
    return 0


def _cmd_token_error(args) -> int:
    plan = SimPlan(
        params=None,
        estimator="tokens",
        token_r=args.r,
        checkpoints=parse_checkpoints(args.checkpoints),
        runs=args.runs,
        seed=args.seed,
    )
    _write_report(run_plan(plan, workers=args.workers), args.out)
    return 0


def _cmd_mvp_table(args) -> int:
    fn = mvp_ml if args.kind == "ml" else mvp_martingale
    t_lo, t_hi = _parse_range(args.t_range)
    d_lo, d_hi = _parse_range(args.d_range)
    if args.argmin:
        t, d, value = mvp_grid_argmin(args.kind, (t_lo, t_hi), (d_lo, d_hi))
        print(f"t={t} d={d} mvp={value:.4f}")
        return 0
    header = "d\\t " + " ".join(f"{t:>7d}" for t in range(t_lo, t_hi + 1))
    print(header)
    for d in range(d_lo, d_hi + 1):
        cells = " ".join(f"{fn(t, d):7.4f}" for t in range(t_lo, t_hi + 1))
        print(f"{d:>4d} {cells}")
    return 0


def _load_sketch(path: str) -> Sketch:
    with open(path, "rb") as handle:
        return Sketch.deserialize(handle.read())


def _cmd_sketch_info(args) -> int:
    sketch = _load_sketch(args.file)
    params = sketch.params
    values = sketch.register_values()
    nonzero = int((values != 0).sum())
    max_k = int(values.max()) >> params.d
    print(f"t={params.t} d={params.d} p={params.p} registers={params.m} "
          f"register_bits={params.register_bits}")
    print(f"nonzero_registers={nonzero} fill={nonzero / params.m:.4f} "
          f"max_update_value={max_k}")
    print(f"estimate_ml={estimate_distinct(sketch):.6g}")
    print(f"estimate_ml_raw={estimate_distinct(sketch, bias_correction=False):.6g}")
    return 0


def _cmd_merge_files(args) -> int:
    a = _load_sketch(args.file_a)
    b = _load_sketch(args.file_b)
    if args.auto_reduce:
        if a.params.t != b.params.t:
            raise ValueError(
                f"cannot auto-reduce across different t: "
                f"{a.params.t} vs {b.params.t}"
            )
        d = min(a.params.d, b.params.d)
        p = min(a.params.p, b.params.p)
        a = a.reduce(d, p)
        b = b.reduce(d, p)
    merged = a.merge(b)
    with open(args.out, "wb") as handle:
        handle.write(merged.serialize())
    return 0


def _cmd_reduce_file(args) -> int:
    sketch = _load_sketch(args.file)
    reduced = sketch.reduce(args.d, args.p)
    with open(args.out, "wb") as handle:
        handle.write(reduced.serialize())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="exaloglog",
        description="ExaLogLog sketch utilities, theory tables, and "
                    "error simulation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate-error",
                         help="Monte-Carlo estimation error as CSV")
    sim.add_argument("--t", type=int, default=2)
    sim.add_argument("--d", type=int, default=20)
    sim.add_argument("--p", type=int, default=8)
    sim.add_argument("--estimator", choices=("ml", "martingale"), default="ml")
    sim.add_argument("--runs", type=int, default=1000)
    sim.add_argument("--checkpoints", default="1e4")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--direct-limit", type=float, default=1e6)
    sim.add_argument("--workers", type=int, default=1)
    sim.add_argument("--out", default="-", help="CSV path, or - for stdout")
    sim.set_defaults(fn=_cmd_simulate_error)

    tok = sub.add_parser("token-error",
                         help="error of estimation from hash tokens as CSV")
    tok.add_argument("--r", type=int, required=True)
    tok.add_argument("--runs", type=int, default=1000)
    tok.add_argument("--checkpoints", default="1e4")
    tok.add_argument("--seed", type=int, default=0)
    tok.add_argument("--workers", type=int, default=1)
    tok.add_argument("--out", default="-")
    tok.set_defaults(fn=_cmd_token_error)

    mvp = sub.add_parser("mvp-table", help="space-efficiency closed forms")
    mvp.add_argument("--kind", choices=("ml", "martingale"), default="ml")
    mvp.add_argument("--t-range", default="0:3")
    mvp.add_argument("--d-range", default="0:32")
    mvp.add_argument("--argmin", action="store_true",
                     help="print only the grid minimum")
    mvp.set_defaults(fn=_cmd_mvp_table)

    info = sub.add_parser("sketch-info", help="inspect a sketch file")
    info.add_argument("file")
    info.set_defaults(fn=_cmd_sketch_info)

    merge = sub.add_parser("merge-files", help="merge two sketch files")
    merge.add_argument("file_a")
    merge.add_argument("file_b")
    merge.add_argument("--out", required=True)
    merge.add_argument("--auto-reduce", action="store_true",
                       help="reduce both inputs to common (d, p) first")
    merge.set_defaults(fn=_cmd_merge_files)

    red = sub.add_parser("reduce-file", help="reduce a sketch file to "
                                             "smaller d and/or p")
    red.add_argument("file")
    red.add_argument("--out", required=True)
    red.add_argument("--d", type=int, required=True)
    red.add_argument("--p", type=int, required=True)
    red.set_defaults(fn=_cmd_reduce_file)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
