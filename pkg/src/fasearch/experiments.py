"""Experiment recipes built on the solvers: generator sweeps, averaging over all targets, fixtures."""

from __future__ import annotations

import itertools
import json
import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .core import BoundSequence, Carrier, ContractViolation, Metric, Primitive, SampleSet, approximation_error, eval_sequence
from .solvers import BuilderSpec, a_asp_solve, asp_solve
from .spaces import SearchSpace, closure_fixpoint, count_expanded, transformation_generators

ZERO_ONE = Metric("01")


def all_targets(K: int) -> List[SampleSet]:
    """Every total function Z_K -> Z_K sampled on all of Z_K, in lexicographic table order."""
    c = Carrier.finite(K)
    return [SampleSet(c, tuple(enumerate(t))) for t in itertools.product(range(K), repeat=K)]


# ---------------------------------------------------------------------------
# Fixpoint cache


def _cache_file() -> Path:
    base = os.environ.get("FA_CACHE_DIR") or os.path.join(
        os.environ.get("XDG_CACHE_HOME", os.path.expanduser("~/.cache")), "fasearch"
    )
    return Path(base) / "fixpoints.json"


def fixpoint_depth(space: SearchSpace, use_cache: bool = True) -> int:
    """Closure fixpoint depth, cached in a sidecar JSON keyed by the space digest."""
    path = _cache_file()
    key = space.digest()
    cache = {}
    if use_cache and path.exists():
        try:
            cache = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError):
            cache = {}
        if key in cache:
            return int(cache[key])
    depth, _ = closure_fixpoint(space)
    if use_cache:
        cache[key] = depth
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(cache, sort_keys=True, indent=1))
        except OSError:
            pass
    return depth


# ---------------------------------------------------------------------------
# Generator sweep


@dataclass
class Theorem2Summary:
    K: int
    n: int
    targets: int
    exact: int
    ablations: Dict[str, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.exact == self.targets and all(v >= 1 for v in self.ablations.values())


def theorem2_sweep(K: int, n: Optional[int] = None, space: Optional[SearchSpace] = None, use_cache: bool = True) -> Theorem2Summary:
    """ASP over every total target on Z_K with the generator catalog, then with each generator removed.

    ``exact`` counts targets reached with zero error by the full catalog; each
    ablation entry counts targets left with nonzero error.
    """
    space = space or transformation_generators(K)
    if n is None:
        n = fixpoint_depth(space, use_cache)
    targets = all_targets(K)
    exact = sum(1 for t in targets if asp_solve(space, n, t, ZERO_ONE).error == 0)
    ablations = {}
    for pid in space.ids:
        reduced = space.without(pid)
        ablations[pid] = sum(1 for t in targets if asp_solve(reduced, n, t, ZERO_ONE).error > 0)
    return Theorem2Summary(K, n, len(targets), exact, ablations)


# ---------------------------------------------------------------------------
# Averaging over all targets


def nfl_means(space: SearchSpace, sequences: List[BoundSequence]) -> List[Fraction]:
    """Exact mean zero-one error of each fixed sequence over every target table on Z_K."""
    c = space.carrier
    if not c.is_finite:
        raise ContractViolation("averaging over all targets needs a finite carrier")
    K = c.m
    for seq in sequences:
        space.validate(seq)
        if any(eval_sequence(space, seq, x) is None for x in range(K)):
            raise ContractViolation(f"sequence {seq.render()} is partial on Z_{K}; a total table is required")
    targets = all_targets(K)
    return [
        sum((approximation_error(space, seq, t, ZERO_ONE, exact=True) for t in targets), Fraction(0)) / len(targets)
        for seq in sequences
    ]


# ---------------------------------------------------------------------------
# Randomized fixtures


def random_space(rng: random.Random, m: int, n_prims: int, max_params: int = 2, restrict_p: float = 0.2) -> SearchSpace:
    c = Carrier.finite(m)
    prims = []
    for i in range(n_prims):
        k = rng.randint(1, max_params)
        table = tuple(rng.randrange(m) for _ in range(m * k))
        restriction = None
        if m > 1 and rng.random() < restrict_p:
            restriction = frozenset({rng.randrange(m)})
        prims.append(Primitive(f"p{i}", c, params=tuple((j,) for j in range(k)), table=table, restriction=restriction))
    return SearchSpace(c, tuple(prims), f"rand{n_prims}")


def random_fixture(seed: int) -> Tuple[SearchSpace, SampleSet, int]:
    """A small random (space, target, n) with at most 3 primitives and n <= 4."""
    rng = random.Random(seed)
    m = rng.choice((2, 3, 4))
    space = random_space(rng, m, rng.randint(1, 3))
    n = rng.randint(1, 4)
    xs = sorted(rng.sample(range(m), rng.randint(1, m)))
    target = SampleSet(space.carrier, tuple((x, rng.randrange(m)) for x in xs))
    return space, target, n


def find_greedy_trap(seed: int = 0, m: int = 4, max_tries: int = 100_000):
    """Search random small spaces on Z_m for one where greedy fails but ASP is exact.

    Targets are drawn as random length-2 compositions of the space's own
    primitives, so ASP at n = 2 always reaches zero error.
    Returns ``(space, target, n, tries)``.
    """
    rng = random.Random(seed)
    c = Carrier.finite(m)
    for tries in range(1, max_tries + 1):
        space = random_space(rng, m, rng.randint(2, 3), max_params=1, restrict_p=0.0)
        a, b = rng.choice(space.ids), rng.choice(space.ids)
        seq = BoundSequence(((a, 0), (b, 0)))
        target = SampleSet(c, tuple((x, eval_sequence(space, seq, x)) for x in range(m)))
        n = 2
        if asp_solve(space, n, target, ZERO_ONE).error != 0:
            continue
        if a_asp_solve(space, n, target, ZERO_ONE, BuilderSpec.greedy()).error > 0:
            return space, target, n, tries
    raise RuntimeError(f"no greedy trap found in {max_tries} tries")


def covering_check(space: SearchSpace, n: int, target: SampleSet, metric: Metric = ZERO_ONE):
    """Errors of ASP, full-width beam and full-budget random on one fixture."""
    total = count_expanded(space, n)[1]
    width = len(space.alphabet) ** n
    return (
        asp_solve(space, n, target, metric).error,
        a_asp_solve(space, n, target, metric, BuilderSpec.beam(width)).error,
        a_asp_solve(space, n, target, metric, BuilderSpec.random(total, seed=7)).error,
    )
