"""Solvers for the function approximation problem.

* :func:`ml_solve` - grid search over the parameters of one fixed skeleton.
* :func:`asp_solve` - exhaustive search over every bound sequence of length <= n.
* :func:`a_asp_solve` - search restricted to what a set builder proposes.
* :func:`pac_solve` - zero-one error over length-1 hypotheses only.

All solvers break ties by the canonical order (shorter first, then skeleton
lexicographic by primitive index, then parameter odometer), so results do not
depend on evaluation order or on how work is split between processes.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .core import (
    BoundSequence,
    BudgetExceeded,
    ConfigError,
    Metric,
    SampleSet,
    eval_primitive,
    mean_error,
)
from .rng import SplitMix64, sample_without_replacement
from .spaces import (
    SearchSpace,
    SequenceSkeleton,
    bound_sequence_at,
    count_expanded,
    enumerate_assignments,
    enumerate_bound,
)

DEFAULT_BUDGET_CEILING = 10**8


def budget_ceiling(override: Optional[int] = None) -> int:
    if override is not None:
        return override
    env = os.environ.get("FA_BUDGET_CEILING")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"FA_BUDGET_CEILING must be an integer, got {env!r}", "FA_BUDGET_CEILING") from None
    return DEFAULT_BUDGET_CEILING


@dataclass
class SolveResult:
    best: BoundSequence
    error: float
    evaluated: int
    frontier_trace: List[dict] = field(default_factory=list)
    wall_ms: int = 0


# ---------------------------------------------------------------------------
# Scoring


class _Scorer:
    """Scores bound sequences on a sample set, stepping whole output vectors at once."""

    def __init__(self, space: SearchSpace, samples: SampleSet, metric: Metric):
        if samples.carrier != space.carrier:
            raise ConfigError(f"target lives on {samples.carrier}, space on {space.carrier}", "target")
        self.space = space
        self.metric = metric
        self.xs = samples.xs
        self.ys = samples.ys
        self.alphabet = space.alphabet
        self.ids = space.ids
        if space.carrier.is_finite:
            xs = space.carrier.values()
            self._tables = [
                [eval_primitive(space.primitives[i], j, x) for x in xs] for i, j in self.alphabet
            ]
        else:
            self._tables = None
        self._letter = {(space.primitives[i].id, j): li for li, (i, j) in enumerate(self.alphabet)}

    def step(self, letter: int, values: list) -> list:
        if self._tables is not None:
            t = self._tables[letter]
            return [None if v is None else t[v] for v in values]
        i, j = self.alphabet[letter]
        prim = self.space.primitives[i]
        return [None if v is None else eval_primitive(prim, j, v) for v in values]

    def letters(self, seq: BoundSequence) -> Tuple[int, ...]:
        try:
            return tuple(self._letter[s] for s in seq.steps)
        except KeyError:
            self.space.validate(seq)
            raise

    def outputs(self, seq: BoundSequence) -> list:
        values = self.xs
        for li in self.letters(seq):
            values = self.step(li, values)
        return values

    def score(self, seq: BoundSequence) -> float:
        return mean_error(self.outputs(seq), self.ys, self.metric)

    def key(self, letters: Tuple[int, ...]) -> tuple:
        return (
            len(letters),
            tuple(self.alphabet[li][0] for li in letters),
            tuple(self.alphabet[li][1] for li in letters),
        )

    def sequence(self, letters: Tuple[int, ...]) -> BoundSequence:
        return BoundSequence(tuple((self.ids[self.alphabet[li][0]], self.alphabet[li][1]) for li in letters))


def _ms_since(t0: float) -> int:
    return int(round((time.perf_counter() - t0) * 1000))


# ---------------------------------------------------------------------------
# ML


def ml_solve(space: SearchSpace, fixed: SequenceSkeleton, samples: SampleSet, metric: Metric) -> SolveResult:
    t0 = time.perf_counter()
    if not fixed.step_ids:
        raise ConfigError("ml needs a nonempty skeleton", "solver")
    scorer = _Scorer(space, samples, metric)
    best, best_err, evaluated = None, None, 0
    for seq in enumerate_assignments(space, fixed):
        err = scorer.score(seq)
        evaluated += 1
        if best_err is None or err < best_err:
            best, best_err = seq, err
    return SolveResult(best, best_err, evaluated, wall_ms=_ms_since(t0))


# ---------------------------------------------------------------------------
# ASP


def _asp_partition(space: SearchSpace, n: int, samples: SampleSet, metric: Metric, first_letters):
    """Exhaustive depth-first search over sequences starting with one of ``first_letters``.

    Returns ``(error, key, letters, evaluated)`` for the lexicographically smallest
    ``(error, canonical key)`` in the partition.
    """
    scorer = _Scorer(space, samples, metric)
    ys = scorer.ys
    P = len(scorer.alphabet)
    best = [None, None, None]
    count = 0

    def visit(letters, values):
        nonlocal count
        err = mean_error(values, ys, metric)
        count += 1
        if best[0] is None or err <= best[0]:
            key = scorer.key(letters)
            if best[0] is None or err < best[0] or key < best[1]:
                best[:] = [err, key, letters]
        if len(letters) < n:
            for li in range(P):
                visit(letters + (li,), scorer.step(li, values))

    for li in first_letters:
        visit((li,), scorer.step(li, scorer.xs))
    return best[0], best[1], best[2], count


def asp_solve(
    space: SearchSpace,
    n: int,
    samples: SampleSet,
    metric: Metric,
    ceiling: Optional[int] = None,
    workers: int = 1,
) -> SolveResult:
    t0 = time.perf_counter()
    total = count_expanded(space, n)[1]
    limit = budget_ceiling(ceiling)
    if total > limit:
        raise BudgetExceeded(total, limit)
    P = len(space.alphabet)
    workers = max(1, min(workers, P))
    if workers == 1:
        parts = [_asp_partition(space, n, samples, metric, range(P))]
    else:
        chunks = [list(range(w, P, workers)) for w in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_asp_partition, space, n, samples, metric, c) for c in chunks]
            parts = [f.result() for f in futures]
    err, _, letters, _ = min((p for p in parts if p[0] is not None), key=lambda p: (p[0], p[1]))
    evaluated = sum(p[3] for p in parts)
    scorer = _Scorer(space, samples, metric)
    return SolveResult(scorer.sequence(letters), err, evaluated, wall_ms=_ms_since(t0))


# ---------------------------------------------------------------------------
# a-ASP


STRATEGIES = ("exhaustive", "greedy", "beam", "random", "epsilon-greedy")


@dataclass(frozen=True)
class BuilderSpec:
    """How a-ASP picks the sequences it scores.

    ``width`` applies to beam, ``budget`` to random and epsilon-greedy (the maximum
    number of sequences scored), ``seed`` to the randomized strategies.
    """

    strategy: str
    width: int = 1
    budget: Optional[int] = None
    seed: int = 0
    epsilon: float = 0.0
    history_aware: bool = False

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"unknown builder strategy {self.strategy!r}", "solver")
        if self.width < 1:
            raise ConfigError("beam width must be >= 1", "solver")
        if self.strategy in ("random", "epsilon-greedy") and (self.budget is None or self.budget < 1):
            raise ConfigError(f"{self.strategy} needs a budget >= 1", "solver")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ConfigError("epsilon must lie in [0, 1]", "solver")

    @classmethod
    def exhaustive(cls, history_aware: bool = False):
        return cls("exhaustive", history_aware=history_aware)

    @classmethod
    def greedy(cls, history_aware: bool = False):
        return cls("greedy", history_aware=history_aware)

    @classmethod
    def beam(cls, width: int, history_aware: bool = False):
        return cls("beam", width=width, history_aware=history_aware)

    @classmethod
    def random(cls, budget: int, seed: int = 0):
        return cls("random", budget=budget, seed=seed)

    @classmethod
    def epsilon_greedy(cls, epsilon: float, budget: int, seed: int = 0, history_aware: bool = False):
        return cls("epsilon-greedy", budget=budget, seed=seed, epsilon=epsilon, history_aware=history_aware)

    @property
    def label(self) -> str:
        s = {
            "beam": f"beam:{self.width}",
            "random": f"random:{self.budget}",
            "epsilon-greedy": f"egreedy:{self.epsilon}:{self.budget}",
        }.get(self.strategy, self.strategy)
        return s + (":hist" if self.history_aware else "")


def _best(entries):
    """Entry with the smallest (error, canonical key); entries are (seq, err, key)."""
    return min(entries, key=lambda e: (e[1], e[2]))


def _extensions(space: SearchSpace, seq: BoundSequence) -> List[BoundSequence]:
    return [
        BoundSequence(seq.steps + ((p.id, j),)) for p in space.primitives for j in range(len(p.params))
    ]


def _length_one(space: SearchSpace) -> List[BoundSequence]:
    return [BoundSequence(((p.id, j),)) for p in space.primitives for j in range(len(p.params))]


def builder_step(
    builder: BuilderSpec,
    history: List[Tuple[BoundSequence, float]],
    space: SearchSpace,
    n: int,
    ceiling: Optional[int] = None,
) -> List[BoundSequence]:
    """Next candidates to score given everything scored so far; empty means stop.

    A pure function of its arguments: rounds are recovered from ``history``
    (every round of greedy, beam and epsilon-greedy scores one sequence length)
    and random draws are keyed by ``(seed, round)``.
    """
    strategy = builder.strategy
    if strategy in ("exhaustive", "random"):
        if history:
            return []
        total = count_expanded(space, n)[1]
        if strategy == "exhaustive":
            limit = budget_ceiling(ceiling)
            if total > limit:
                raise BudgetExceeded(total, limit)
            return list(enumerate_bound(space, n))
        return [bound_sequence_at(space, i) for i in sample_without_replacement(builder.seed, total, builder.budget)]

    remaining = None
    if strategy == "epsilon-greedy":
        remaining = builder.budget - len(history)
        if remaining <= 0:
            return []
    if not history:
        return _length_one(space)[:remaining]

    entries = [(s, e, space.canonical_key(s)) for s, e in history]
    k = max(len(s) for s, _ in history)
    last = [e for e in entries if len(e[0]) == k]
    if k >= n:
        return []
    if strategy == "greedy":
        top = _best(last)
        if k > 1:
            earlier = _best([e for e in entries if len(e[0]) < k])
            if not top[1] < earlier[1]:
                return []
        return _extensions(space, top[0])
    if strategy == "beam":
        kept = sorted(last, key=lambda e: (e[1], e[2]))[: builder.width]
        kept.sort(key=lambda e: e[2])
        return [c for e in kept for c in _extensions(space, e[0])]
    # epsilon-greedy: follow the best sequence of the round, or with probability
    # epsilon a uniformly chosen one
    rng = SplitMix64(builder.seed ^ (k * 0xD1B54A32D192ED03))
    if rng.random() < builder.epsilon:
        last.sort(key=lambda e: e[2])
        parent = last[rng.below(len(last))]
    else:
        parent = _best(last)
    return _extensions(space, parent[0])[:remaining]


def a_asp_solve(
    space: SearchSpace,
    n: int,
    samples: SampleSet,
    metric: Metric,
    builder: BuilderSpec,
    ceiling: Optional[int] = None,
) -> SolveResult:
    """Score only what ``builder`` proposes, round by round.

    History-aware builders rank candidates on every other sample point; the
    per-length leaders (``width`` of them for beam, one otherwise) are then
    rescored on the full sample set and the best of those is returned.
    """
    t0 = time.perf_counter()
    if n < 1:
        raise ConfigError("sequence length n must be >= 1", "n")
    ranking = samples.subsample() if builder.history_aware else samples
    scorer = _Scorer(space, ranking, metric)
    history: List[Tuple[BoundSequence, float]] = []
    seen = set()
    trace = []
    while True:
        cands = builder_step(builder, history, space, n, ceiling)
        fresh = [c for c in cands if c not in seen]
        if not fresh:
            break
        round_entries = []
        for seq in fresh:
            seen.add(seq)
            err = scorer.score(seq)
            history.append((seq, err))
            round_entries.append((seq, err, space.canonical_key(seq)))
        top = _best(round_entries)
        trace.append(
            {"round": len(trace) + 1, "candidates": len(fresh), "best": top[0].render(), "best_error": top[1]}
        )

    entries = [(s, e, space.canonical_key(s)) for s, e in history]
    evaluated = len(history)
    if builder.history_aware:
        per_len = {}
        for e in entries:
            per_len.setdefault(len(e[0]), []).append(e)
        width = builder.width if builder.strategy == "beam" else 1
        shortlist = []
        for k in sorted(per_len):
            shortlist += sorted(per_len[k], key=lambda e: (e[1], e[2]))[:width]
        full = _Scorer(space, samples, metric)
        entries = [(s, full.score(s), key) for s, _, key in shortlist]
        evaluated += len(entries)
    best = _best(entries)
    return SolveResult(best[0], best[1], evaluated, frontier_trace=trace, wall_ms=_ms_since(t0))


# ---------------------------------------------------------------------------
# PAC


def pac_solve(hypotheses: SearchSpace, samples: SampleSet) -> SolveResult:
    """Best length-1 hypothesis under the zero-one metric; ties go to catalog order."""
    t0 = time.perf_counter()
    scorer = _Scorer(hypotheses, samples, Metric("01"))
    best, best_err, evaluated = None, None, 0
    for seq in _length_one(hypotheses):
        err = scorer.score(seq)
        evaluated += 1
        if best_err is None or err < best_err:
            best, best_err = seq, err
    return SolveResult(best, best_err, evaluated, wall_ms=_ms_since(t0))
