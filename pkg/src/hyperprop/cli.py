"""Command line interface.

Exit codes: 0 success (or connected), 2 usage or domain error, 3 not
connected, 4 internal error.
"""
from __future__ import annotations

import argparse
import csv
import logging
import math
import sys

from . import chain as chain_mod
from .harness import SweepConfig, run_sweep
from .hypergraph import dumps, generate, load, save
from .model import ModelParams, critical_r, threshold_report
from .propagation import (
    Engine,
    StartMode,
    census,
    format_certificate,
    is_propagation_connected,
)
from .rng import RngStream

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NOT_CONNECTED = 3
EXIT_INTERNAL = 4

log = logging.getLogger("hyperprop")


class DomainError(ValueError):
    pass


def _params(args) -> ModelParams:
    return ModelParams(args.n, args.epsilon, args.r)


def cmd_gen(args) -> int:
    h = generate(_params(args), RngStream(args.seed))
    if args.out in (None, "-"):
        sys.stdout.write(dumps(h))
    else:
        save(h, args.out)
        print(f"wrote n={h.n} e2={h.m2} e3={h.m3} to {args.out}")
    return EXIT_OK


def cmd_check(args) -> int:
    h = load(args.input)
    if h.n < 2:
        raise DomainError("connectivity needs n >= 2")
    result = is_propagation_connected(h)
    print("connected" if result.connected else "not connected")
    print(f"closures computed: {result.closures_computed}, largest closure: {result.max_closure}")
    if args.certificate:
        text = format_certificate(h, result)
        if args.certificate == "-":
            sys.stdout.write(text)
        else:
            with open(args.certificate, "w", encoding="utf-8") as fh:
                fh.write(text)
    return EXIT_OK if result.connected else EXIT_NOT_CONNECTED


def cmd_census(args) -> int:
    if args.input:
        h = load(args.input)
        params = ModelParams(h.n, args.epsilon, args.r)
    else:
        if args.n is None:
            raise DomainError("census needs --in FILE or --n with --epsilon and --r")
        params = _params(args)
        h = generate(params, RngStream(args.seed).child(0))
    cen = census(
        h, params, args.samples, RngStream(args.seed).child(1),
        mode=StartMode(args.mode), engine=Engine(args.engine),
    )
    print(f"n={h.n} e2={h.m2} e3={h.m3} engine={cen.engine.value} mode={cen.mode.value}")
    print(f"samples={cen.samples} max={cen.max_size} good={cen.good_count} "
          f"(threshold K0 ln n = {cen.good_threshold:.3f})")
    for b, count in sorted(cen.histogram.items()):
        print(f"  size [{2 ** b}, {2 ** (b + 1)}): {count}")
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["sample", "seed", "size"])
            for i, (seed, size) in enumerate(cen.rows()):
                w.writerow([i, seed, size])
    return EXIT_OK


def cmd_chain(args) -> int:
    params = _params(args)
    horizon = args.horizon if args.horizon is not None else int(math.floor(math.log(args.n)))
    est, se = chain_mod.survival_prob(params, args.y0, horizon, args.trials, RngStream(args.seed))
    print(f"horizon={horizon} trials={args.trials} y0={args.y0}")
    print(f"survival={est:.6f} se={se:.6f}")
    return EXIT_OK


def cmd_threshold(args) -> int:
    if args.target is not None:
        if args.r is not None:
            raise DomainError("give either --r or --target, not both")
        print(f"critical_r={critical_r(args.epsilon, args.target):.12f}")
        return EXIT_OK
    if args.r is None:
        raise DomainError("threshold needs --r or --target")
    rep = threshold_report(args.epsilon, args.r)
    print(f"I={rep.I:.12f}")
    print(f"regime={rep.regime_label}")
    print(f"K0={rep.k0:.12f}")
    print(f"K1={rep.k1:.12f}")
    print(f"critical_r={rep.critical_r:.12f}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = SweepConfig.from_json(args.config)
    out = args.out or config.output_path
    if out is None:
        raise DomainError("sweep needs output_path in the config or --out")
    records = run_sweep(config, workers=args.workers, output=out)
    errors = sum(r.failed for r in records)
    print(f"wrote {len(records)} rows to {out} ({errors} errors)")
    return EXIT_OK


def cmd_verify_lemmas(args) -> int:
    bad = 0
    for name, dist, n in chain_mod.default_cycle_suite():
        rep = chain_mod.verify_cycle_lemma(dist, n, budget=args.budget, name=name)
        print(rep.text())
        bad += not rep.holds
    for case in chain_mod.default_dominance_suite():
        rep = chain_mod.verify_dominance_lemma(case)
        print(rep.text())
        bad += not rep.ok
    print("all lemma checks passed" if not bad else f"{bad} lemma checks FAILED")
    return EXIT_OK if not bad else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hyperprop", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def model_flags(sp, required=True):
        sp.add_argument("--n", type=int, required=required)
        sp.add_argument("--epsilon", type=float, required=True)
        sp.add_argument("--r", type=float, required=True)

    sp = sub.add_parser("gen", help="sample a hypergraph")
    model_flags(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None, help="output file (default stdout)")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("check", help="decide propagation connectivity")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--certificate", default=None, help="write witness or obstruction ('-' for stdout)")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("census", help="component sizes from sampled starts")
    sp.add_argument("--in", dest="input", default=None)
    model_flags(sp, required=False)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--samples", type=int, default=100)
    sp.add_argument("--mode", choices=[m.value for m in StartMode], default=StartMode.SINGLE.value)
    sp.add_argument("--engine", choices=[e.value for e in Engine], default=Engine.CLOSURE.value)
    sp.add_argument("--csv", default=None, help="per-sample CSV output")
    sp.set_defaults(func=cmd_census)

    sp = sub.add_parser("chain", help="survival estimate for the increment chain")
    model_flags(sp)
    sp.add_argument("--y0", type=int, default=1)
    sp.add_argument("--horizon", type=int, default=None, help="default floor(ln n)")
    sp.add_argument("--trials", type=int, default=10000)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_chain)

    sp = sub.add_parser("threshold", help="threshold value and regime")
    sp.add_argument("--epsilon", type=float, required=True)
    sp.add_argument("--r", type=float, default=None)
    sp.add_argument("--target", type=float, default=None)
    sp.set_defaults(func=cmd_threshold)

    sp = sub.add_parser("sweep", help="run a parameter sweep from a JSON config")
    sp.add_argument("--config", required=True)
    sp.add_argument("--out", default=None)
    sp.add_argument("--workers", type=int, default=None)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("verify-lemmas", help="exact checks of the two chain lemmas")
    sp.add_argument("--budget", type=int, default=chain_mod.DEFAULT_BUDGET)
    sp.set_defaults(func=cmd_verify_lemmas)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError, chain_mod.EnumerationBudgetExceeded) as exc:
        # parameter domains, file formats and I/O
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # pragma: no cover - last resort
        log.exception("internal error")
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
