"""Command-line front end.

Subcommands: solve, compare, theorem2, nfl, capacity. CSV goes to ``--output``
(or stdout), a human-readable summary to stderr.

Exit status: 0 ok, 1 an expectation checked by theorem2/nfl failed, 2 bad
configuration, 3 budget ceiling refusal, 4 operation unsupported on a real carrier.
"""

from __future__ import annotations

import argparse
import csv
import io
import re
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

from . import capacity as cap
from .core import (
    BoundSequence,
    BudgetExceeded,
    ConfigError,
    ContractViolation,
    FAError,
    Metric,
    SampleSet,
    UnsupportedCarrier,
    approximation_error,
)
from .experiments import nfl_means, theorem2_sweep
from .io import load_space, load_target
from .solvers import BuilderSpec, SolveResult, a_asp_solve, asp_solve, ml_solve, pac_solve
from .spaces import SearchSpace, SequenceSkeleton, transformation_generators

CSV_HEADER = ["solver", "space", "target", "n", "error", "evaluated", "wall_ms", "best"]

EXIT_OK, EXIT_EXPECTATION, EXIT_CONFIG, EXIT_BUDGET, EXIT_UNSUPPORTED = 0, 1, 2, 3, 4


@dataclass
class ExperimentConfig:
    space: SearchSpace
    samples: SampleSet
    target_label: str
    solver: str
    n: int
    metric: Metric
    seed: int = 0
    budget_ceiling: Optional[int] = None
    workers: int = 1


@dataclass
class ReportRow:
    solver: str
    space: str
    target: str
    n: int
    error: float
    evaluated: int
    wall_ms: int
    best: str

    def cells(self) -> list:
        return [self.solver, self.space, self.target, self.n, repr(float(self.error)), self.evaluated, self.wall_ms, self.best]


def parse_skeleton(text: str) -> SequenceSkeleton:
    ids = tuple(s.strip() for s in re.split(r"[·,]", text) if s.strip())
    if not ids:
        raise ConfigError(f"empty skeleton {text!r}", "solver")
    return SequenceSkeleton(ids)


def parse_builder(text: str, seed: int) -> BuilderSpec:
    """``STRAT[:ARG...][:hist]`` with STRAT one of exhaustive, greedy, beam, random, egreedy."""
    parts = text.split(":")
    hist = parts[-1] == "hist"
    if hist:
        parts = parts[:-1]
    strat, args = parts[0], parts[1:]
    try:
        if strat == "exhaustive" and not args:
            return BuilderSpec.exhaustive(hist)
        if strat == "greedy" and not args:
            return BuilderSpec.greedy(hist)
        if strat == "beam" and len(args) == 1:
            return BuilderSpec.beam(int(args[0]), hist)
        if strat == "random" and len(args) == 1:
            return BuilderSpec("random", budget=int(args[0]), seed=seed, history_aware=hist)
        if strat in ("egreedy", "epsilon-greedy") and len(args) in (1, 2):
            budget = int(args[1]) if len(args) == 2 else 10**6
            return BuilderSpec.epsilon_greedy(float(args[0]), budget, seed, hist)
    except ValueError:
        pass
    raise ConfigError(f"cannot parse set builder {text!r}", "solver")


def run_solver(cfg: ExperimentConfig) -> tuple[SolveResult, int]:
    """Dispatch on the solver selector; returns the result and the sequence length used."""
    s = cfg.solver
    if s == "asp":
        return asp_solve(cfg.space, cfg.n, cfg.samples, cfg.metric, cfg.budget_ceiling, cfg.workers), cfg.n
    if s == "pac":
        return pac_solve(cfg.space, cfg.samples), 1
    if s.startswith("ml:"):
        sk = parse_skeleton(s[3:])
        for pid in sk.step_ids:
            cfg.space.primitive(pid)
        return ml_solve(cfg.space, sk, cfg.samples, cfg.metric), len(sk)
    if s.startswith("a-asp:"):
        builder = parse_builder(s[len("a-asp:"):], cfg.seed)
        return a_asp_solve(cfg.space, cfg.n, cfg.samples, cfg.metric, builder, cfg.budget_ceiling), cfg.n
    raise ConfigError(f"unknown solver {s!r}; expected asp, pac, ml:SKELETON or a-asp:STRAT[:ARG]", "solver")


def cmd_solve(cfg: ExperimentConfig, timing: bool = False) -> ReportRow:
    result, n = run_solver(cfg)
    check = approximation_error(cfg.space, result.best, cfg.samples, Metric("01") if cfg.solver == "pac" else cfg.metric)
    if check != result.error:
        raise AssertionError(f"error round-trip failed: {result.error!r} != {check!r}")
    return ReportRow(
        cfg.solver, cfg.space.name, cfg.target_label, n, result.error, result.evaluated,
        result.wall_ms if timing else 0, result.best.render(),
    )


def cmd_compare(cfg: ExperimentConfig, solvers: List[str], timing: bool = False) -> tuple[list, Optional[float]]:
    """One row per solver, sorted by error then wall time; also the ASP error if ASP ran."""
    if len(solvers) < 2:
        raise ConfigError("compare needs at least two solvers", "solvers")
    rows = []
    for s in solvers:
        cfg.solver = s
        rows.append(cmd_solve(cfg, timing))
    asp_err = next((r.error for r in rows if r.solver == "asp"), None)
    rows.sort(key=lambda r: (r.error, r.wall_ms))
    return rows, asp_err


# ---------------------------------------------------------------------------
# argparse plumbing


def _common(p: argparse.ArgumentParser, target: bool = True):
    p.add_argument("--space", required=True, help="space JSON path or catalog:NAME")
    if target:
        p.add_argument("--target", required=True, help="target JSON path")
    p.add_argument("-n", type=int, default=1, help="maximum sequence length")
    p.add_argument("--metric", default="abs", choices=["abs", "sq", "01"])
    p.add_argument("--signed-fallback", action="store_true", help="score undefined outputs as the raw target value")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=None, help="ceiling on bound sequences for exhaustive search")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--output", default=None, help="CSV path (default stdout)")
    p.add_argument("--timing", action="store_true", help="record wall_ms in the CSV (otherwise 0, keeping output reproducible)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fasearch", description="Search compositions of primitives that approximate a target.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run one solver")
    _common(p)
    p.add_argument("--solver", required=True, help="ml:SKELETON | asp | a-asp:STRAT[:ARG] | pac")

    p = sub.add_parser("compare", help="run several solvers on the same input")
    _common(p)
    p.add_argument("--solvers", nargs="+", required=True)

    p = sub.add_parser("theorem2", help="sweep every target on Z_K with the generator catalog and its ablations")
    p.add_argument("-K", type=int, required=True, choices=[2, 3])
    p.add_argument("-n", type=int, default=None, help="sequence length (default: closure fixpoint depth)")
    p.add_argument("--no-cache", action="store_true")

    p = sub.add_parser("nfl", help="mean zero-one error of fixed sequences over every target on Z_K")
    p.add_argument("-K", type=int, required=True, choices=[2, 3])
    p.add_argument("--space", default=None, help="space JSON path or catalog:NAME (default tK-generators)")
    p.add_argument("--seq", action="append", required=True, help="bound sequence, e.g. 'not[0]·not[0]'")

    p = sub.add_parser("capacity", help="information capacity, potential, growth and VC dimension")
    p.add_argument("--space", required=True)
    p.add_argument("--skeleton", default=None)
    p.add_argument("-n", type=int, default=1)
    p.add_argument("--collapsed", action="store_true")
    p.add_argument("--potential", action="store_true")
    p.add_argument("--growth", action="store_true")
    p.add_argument("--vc", action="store_true")
    p.add_argument("--points", default=None, help="comma-separated domain points for --vc (default: whole carrier)")
    p.add_argument("--max-d", type=int, default=None)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--output", default=None)
    return ap


def _write_csv(header: list, rows: list, output: Optional[str]):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    if output:
        with open(output, "w", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


def _config(args) -> ExperimentConfig:
    if args.n < 1:
        raise ConfigError("n must be >= 1", "-n")
    if args.workers < 1:
        raise ConfigError("workers must be >= 1", "--workers")
    space = load_space(args.space)
    samples, label = load_target(args.target)
    return ExperimentConfig(
        space, samples, label, getattr(args, "solver", ""), args.n,
        Metric(args.metric, signed_fallback=args.signed_fallback), args.seed, args.budget, args.workers,
    )


def _run(args) -> int:
    if args.command == "solve":
        cfg = _config(args)
        row = cmd_solve(cfg, args.timing)
        _write_csv(CSV_HEADER, [row.cells()], args.output)
        print(f"{row.solver}: best {row.best} error {row.error:.6g} ({row.evaluated} scored)", file=sys.stderr)
        return EXIT_OK

    if args.command == "compare":
        cfg = _config(args)
        rows, asp_err = cmd_compare(cfg, args.solvers, args.timing)
        header = CSV_HEADER + (["regret"] if asp_err is not None else [])
        cells = [r.cells() + ([repr(r.error - asp_err)] if asp_err is not None else []) for r in rows]
        _write_csv(header, cells, args.output)
        for r in rows:
            print(f"{r.solver:>24}  error {r.error:.6g}  scored {r.evaluated}  best {r.best}", file=sys.stderr)
        return EXIT_OK

    if args.command == "theorem2":
        summary = theorem2_sweep(args.K, args.n, use_cache=not args.no_cache)
        print(f"K={summary.K} n={summary.n}: {summary.exact}/{summary.targets} targets at error 0 with the full catalog")
        for pid, bad in summary.ablations.items():
            print(f"  without {pid}: {bad} target(s) with error > 0")
        print("PASS" if summary.ok else "FAIL")
        return EXIT_OK if summary.ok else EXIT_EXPECTATION

    if args.command == "nfl":
        space = load_space(args.space) if args.space else transformation_generators(args.K)
        if not space.carrier.is_finite or space.carrier.m != args.K:
            raise ConfigError(f"space must live on Z_{args.K}", "--space")
        seqs = [space.validate(BoundSequence.parse(s)) for s in args.seq]
        means = nfl_means(space, seqs)
        expected = Fraction(args.K - 1, args.K)
        for s, m in zip(seqs, means):
            print(f"{s.render()}: mean error {m} over {args.K ** args.K} targets")
        ok = all(m == expected for m in means)
        print(f"expected {expected}: {'PASS' if ok else 'FAIL'}")
        return EXIT_OK if ok else EXIT_EXPECTATION

    if args.command == "capacity":
        return _capacity(args)
    raise ConfigError(f"unknown command {args.command!r}")


def _capacity(args) -> int:
    space = load_space(args.space)
    if args.n < 1:
        raise ConfigError("n must be >= 1", "-n")
    if args.vc:
        points = space.carrier.values() if args.points is None else [float(p) if "." in p else int(p) for p in args.points.split(",")]
        max_d = args.max_d or len(points)
        rep = cap.vc_report(space, args.n, points, max_d, args.budget)
        witnesses = " ".join(f"{''.join(map(str, k))}={v.render()}" for k, v in rep.witnesses.items())
        _write_csv(["n", "max_d", "dimension", "points", "witnesses"],
                   [[args.n, max_d, rep.dimension, " ".join(map(str, rep.points)), witnesses]], args.output)
        print(f"VC dimension {rep.dimension} ({rep.dichotomies} dichotomies realized)", file=sys.stderr)
        return EXIT_OK
    if args.growth:
        g = cap.potential_growth(space, args.n, args.collapsed, args.budget)
        _write_csv(["n", "cardinality"], [[i + 1, c] for i, c in enumerate(g.cardinalities)], args.output)
        where = f"n={g.saturation}" if g.saturation is not None else f"not within n<={args.n} (fixpoint {g.fixpoint})"
        print(f"saturation at {where}", file=sys.stderr)
        return EXIT_OK
    if args.potential:
        p = cap.information_potential(space, args.n, args.collapsed, args.budget)
        _write_csv(["n", "collapsed", "sampled", "cardinality"], [[args.n, args.collapsed, p.sampled, p.cardinality]], args.output)
        print(f"information potential {p.cardinality}", file=sys.stderr)
        return EXIT_OK
    if args.skeleton is None:
        raise ConfigError("capacity needs --skeleton, --potential, --growth or --vc", "--skeleton")
    rep = cap.information_capacity(space, parse_skeleton(args.skeleton), args.collapsed)
    _write_csv(["skeleton", "collapsed", "sampled", "cardinality", "factors"],
               [[args.skeleton, rep.collapsed, rep.sampled, rep.cardinality, "x".join(map(str, rep.factor_sizes))]], args.output)
    print(f"information capacity {rep.cardinality} = {' x '.join(map(str, rep.factor_sizes))}", file=sys.stderr)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except BudgetExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except UnsupportedCarrier as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (ConfigError, ContractViolation, cap.EmptyCapacity) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except FAError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
