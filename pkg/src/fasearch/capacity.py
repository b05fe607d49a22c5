"""Counting how much a sequence or a search space can express.

* information capacity of one skeleton: product of domain, per-step parameter
  grids and realized per-step images;
* information potential of a space: the union of trace tuples over every bound
  sequence of length <= n;
* brute-force VC dimension of the dichotomies a space realizes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Tuple

from .core import (
    BoundSequence,
    BudgetExceeded,
    ConfigError,
    ContractViolation,
    FAError,
    UnsupportedCarrier,
    Value,
    eval_primitive,
    eval_sequence,
)
from .solvers import budget_ceiling
from .spaces import SearchSpace, SequenceSkeleton, closure_fixpoint, count_expanded, enumerate_bound


class EmptyCapacity(FAError):
    """Some step has nothing left in its image once the restriction set is removed."""


@dataclass(frozen=True)
class CapacityReport:
    cardinality: int
    factor_sizes: Tuple[int, ...]
    collapsed: bool = False
    sampled: bool = False


def information_capacity(space: SearchSpace, skeleton: SequenceSkeleton, collapsed: bool = False) -> CapacityReport:
    """Size of dom x pi_1 x img_1 x ... x pi_n x img_n for one skeleton.

    Images are the outputs actually reached from the incoming domain (over all
    parameters), minus the restriction set. The collapsed form is
    dom x Pi x img_n with Pi the union of the steps' parameter tuples. Real
    carriers are measured on their sample grid (``sampled=True``).
    """
    if not skeleton.step_ids:
        raise ConfigError("skeleton must have at least one step", "skeleton")
    dom = space.carrier.values()
    incoming = set(dom)
    factors = [len(dom)]
    union_params = set()
    for pos, pid in enumerate(skeleton.step_ids):
        prim = space.primitive(pid)
        image = {eval_primitive(prim, j, x) for x in incoming for j in range(len(prim.params))}
        image.discard(None)
        if not image:
            raise EmptyCapacity(f"step {pos} ({pid!r}) has an empty image after restriction")
        factors += [len(prim.params), len(image)]
        union_params.update(prim.params)
        incoming = image
    if collapsed:
        factors = [factors[0], len(union_params), factors[-1]]
    return CapacityReport(math.prod(factors), tuple(factors), collapsed, not space.carrier.is_finite)


class Potential(NamedTuple):
    cardinality: int
    sampled: bool


def _check_budget(space: SearchSpace, n: int, ceiling: Optional[int]):
    total = count_expanded(space, n)[1]
    limit = budget_ceiling(ceiling)
    if total > limit:
        raise BudgetExceeded(total, limit)


def trace_tuples(space: SearchSpace, n: int, collapsed: bool = False, ceiling: Optional[int] = None) -> set:
    """Materialize the potential as a set.

    Strict elements are ``(x, ((p_1, y_1), ..., (p_k, y_k)))``: length-tagged by
    construction, so different lengths never collide. Collapsed elements are
    ``(x, "Pi", y_k)``, the parameter union acting as a single token.
    """
    _check_budget(space, n, ceiling)
    xs = space.carrier.values()
    alphabet = space.alphabet
    prims = space.primitives
    out = set()

    def visit(traces, depth):
        for i, j in alphabet:
            nxt = []
            for x, steps, y in traces:
                z = eval_primitive(prims[i], j, y)
                if z is not None:
                    nxt.append((x, steps + ((j, z),), z))
            for x, steps, z in nxt:
                out.add((x, "Pi", z) if collapsed else (x, steps))
            if depth < n and nxt:
                visit(nxt, depth + 1)

    visit([(x, (), x) for x in xs], 1)
    return out


def information_potential(space: SearchSpace, n: int, collapsed: bool = False, ceiling: Optional[int] = None) -> Potential:
    if n < 1:
        raise ConfigError("sequence length n must be >= 1", "n")
    return Potential(len(trace_tuples(space, n, collapsed, ceiling)), not space.carrier.is_finite)


@dataclass(frozen=True)
class Growth:
    cardinalities: Tuple[int, ...]
    saturation: Optional[int]
    fixpoint: int


def potential_growth(space: SearchSpace, n_max: int, collapsed: bool = False, ceiling: Optional[int] = None) -> Growth:
    """Potential for n = 1..n_max plus the saturation point.

    Strict potentials keep growing with n because trace tuples are length-tagged,
    so saturation is read off the realized functions: the first n after which
    longer sequences compute nothing new (the closure fixpoint). It is reported
    when it falls within ``1..n_max``.
    """
    if not space.carrier.is_finite:
        raise UnsupportedCarrier("potential growth is only defined on finite carriers")
    if n_max < 1:
        raise ConfigError("n_max must be >= 1", "n")
    _check_budget(space, n_max, ceiling)
    cards = tuple(information_potential(space, n, collapsed, ceiling).cardinality for n in range(1, n_max + 1))
    depth, _ = closure_fixpoint(space)
    return Growth(cards, depth if depth <= n_max else None, depth)


# ---------------------------------------------------------------------------
# VC dimension


@dataclass
class VCReport:
    dimension: int
    points: Tuple[Value, ...] = ()
    witnesses: Dict[Tuple[int, ...], BoundSequence] = field(default_factory=dict)
    dichotomies: int = 0


def realized_dichotomies(space: SearchSpace, n: int, points, ceiling: Optional[int] = None) -> Dict[Tuple[int, ...], BoundSequence]:
    """Every 0/1 labelling of ``points`` realized by some bound sequence, with the first such sequence."""
    _check_budget(space, n, ceiling)
    found: Dict[Tuple[int, ...], BoundSequence] = {}
    for seq in enumerate_bound(space, n):
        labels = []
        for x in points:
            y = eval_sequence(space, seq, x)
            if y is None or y not in (0, 1):
                raise ContractViolation(f"sequence {seq.render()} outputs {y!r} at {x!r}; VC needs 0/1 outputs")
            labels.append(int(y))
        found.setdefault(tuple(labels), seq)
    return found


def vc_report(space: SearchSpace, n: int, domain_points, max_d: int, ceiling: Optional[int] = None) -> VCReport:
    """Largest d <= max_d such that some d-subset of ``domain_points`` is shattered.

    Shattering is hereditary, so the ascending scan stops at the first size with
    no shattered subset.
    """
    points = [space.carrier.normalize(x, f"domain_points[{i}]") for i, x in enumerate(domain_points)]
    if len(set(points)) != len(points):
        raise ConfigError("domain points must be distinct", "domain_points")
    if max_d < 1 or len(points) < max_d:
        raise ConfigError(f"need 1 <= max_d <= |domain_points| = {len(points)}", "max_d")
    found = realized_dichotomies(space, n, points, ceiling)
    # the empty set is shattered by any single sequence
    report = VCReport(0, (), {(): next(iter(found.values()))} if found else {}, len(found))
    for d in range(1, max_d + 1):
        hit = None
        for subset in itertools.combinations(range(len(points)), d):
            proj: Dict[Tuple[int, ...], BoundSequence] = {}
            for labels, seq in found.items():
                proj.setdefault(tuple(labels[i] for i in subset), seq)
            if len(proj) == 2**d:
                hit = (subset, proj)
                break
        if hit is None:
            break
        subset, proj = hit
        report = VCReport(d, tuple(points[i] for i in subset), dict(sorted(proj.items())), len(found))
    return report


def vc_dimension(space: SearchSpace, n: int, domain_points, max_d: int, ceiling: Optional[int] = None) -> int:
    return vc_report(space, n, domain_points, max_d, ceiling).dimension
