"""Search spaces, canonical enumeration of the expanded space, closure and built-in catalogs."""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass
from typing import Iterator, Optional, Tuple

from .core import (
    BoundSequence,
    Carrier,
    ConfigError,
    Primitive,
    UnsupportedCarrier,
    eval_primitive,
)


@dataclass(frozen=True)
class SequenceSkeleton:
    step_ids: Tuple[str, ...]

    def __len__(self):
        return len(self.step_ids)


@dataclass(frozen=True)
class SearchSpace:
    """Ordered, immutable set of primitives over one carrier.

    List order is the canonical index set used for enumeration and tie-breaking.
    """

    carrier: Carrier
    primitives: Tuple[Primitive, ...]
    name: str = "space"

    def __post_init__(self):
        prims = tuple(self.primitives)
        if not prims:
            raise ConfigError("a search space needs at least one primitive", "primitives")
        seen = set()
        for i, p in enumerate(prims):
            if p.carrier != self.carrier:
                raise ConfigError(f"primitive {p.id!r} lives on {p.carrier}, space on {self.carrier}", f"primitives[{i}]")
            if p.id in seen:
                raise ConfigError(f"duplicate primitive id {p.id!r}", f"primitives[{i}].id")
            seen.add(p.id)
        object.__setattr__(self, "primitives", prims)
        object.__setattr__(self, "_index", {p.id: i for i, p in enumerate(prims)})

    @property
    def ids(self) -> Tuple[str, ...]:
        return tuple(p.id for p in self.primitives)

    def primitive(self, pid: str) -> Primitive:
        try:
            return self.primitives[self._index[pid]]
        except KeyError:
            raise ConfigError(f"unknown primitive id {pid!r} in space {self.name!r}") from None

    def index_of(self, pid: str) -> int:
        self.primitive(pid)
        return self._index[pid]

    @property
    def alphabet(self) -> Tuple[Tuple[int, int], ...]:
        """Every (primitive index, parameter index) pair, primitive-major."""
        return tuple((i, j) for i, p in enumerate(self.primitives) for j in range(len(p.params)))

    def validate(self, seq: BoundSequence) -> BoundSequence:
        for pid, p in seq.steps:
            prim = self.primitive(pid)
            if not 0 <= p < len(prim.params):
                raise ConfigError(f"parameter index {p} out of range for {pid!r} (|params| = {len(prim.params)})")
        return seq

    def canonical_key(self, seq: BoundSequence) -> tuple:
        """Sort key realizing the canonical order: length, skeleton lexicographic, then odometer."""
        return (len(seq), tuple(self._index[i] for i, _ in seq.steps), tuple(p for _, p in seq.steps))

    def without(self, pid: str) -> "SearchSpace":
        return SearchSpace(self.carrier, tuple(p for p in self.primitives if p.id != pid), f"{self.name}-{pid}")

    def with_primitive(self, prim: Primitive) -> "SearchSpace":
        return SearchSpace(self.carrier, self.primitives + (prim,), f"{self.name}+{prim.id}")

    def digest(self) -> str:
        from .io import dump_space

        blob = json.dumps(dump_space(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


# ---------------------------------------------------------------------------
# Enumeration


def count_expanded(space: SearchSpace, n: int) -> Tuple[int, int]:
    """(structures, bound sequences) of length 1..n, by closed form.

    A bound step is one letter of the (primitive, parameter) alphabet, so there are
    ``P**k`` bound sequences of length ``k`` where ``P = sum(|params_i|)``.
    Python integers are unbounded, so no overflow can occur.
    """
    if n < 1:
        raise ConfigError("sequence length n must be >= 1", "n")
    m = len(space.primitives)
    P = len(space.alphabet)
    return sum(m**k for k in range(1, n + 1)), sum(P**k for k in range(1, n + 1))


def structure_at(space: SearchSpace, n: int, index: int) -> SequenceSkeleton:
    """The skeleton at position ``index`` of the canonical order."""
    m = len(space.primitives)
    for k in range(1, n + 1):
        if index < m**k:
            digits = []
            for _ in range(k):
                index, d = divmod(index, m)
                digits.append(d)
            return SequenceSkeleton(tuple(space.primitives[d].id for d in reversed(digits)))
        index -= m**k
    raise IndexError("skeleton index out of range")


def enumerate_structures(space: SearchSpace, n: int, start: int = 0, stop: Optional[int] = None) -> Iterator[SequenceSkeleton]:
    """Skeletons of length 1..n: ascending length, then lexicographic by primitive index.

    ``start``/``stop`` select a contiguous index range of that order, so disjoint
    ranges can be handed to separate workers.
    """
    if n < 1:
        raise ConfigError("sequence length n must be >= 1", "n")
    total = count_expanded(space, n)[0]
    stop = total if stop is None else min(stop, total)
    if start >= stop:
        return
    ids = space.ids
    m = len(ids)
    first = structure_at(space, n, start)
    k = len(first)
    digits = [space.index_of(i) for i in first.step_ids]
    for _ in range(stop - start):
        yield SequenceSkeleton(tuple(ids[d] for d in digits))
        pos = k - 1
        while pos >= 0 and digits[pos] == m - 1:
            digits[pos] = 0
            pos -= 1
        if pos < 0:
            k += 1
            digits = [0] * k
        else:
            digits[pos] += 1


def enumerate_assignments(space: SearchSpace, skeleton: SequenceSkeleton) -> Iterator[BoundSequence]:
    """Every per-step parameter choice, last step varying fastest."""
    sizes = [len(space.primitive(i).params) for i in skeleton.step_ids]
    for combo in itertools.product(*(range(s) for s in sizes)):
        yield BoundSequence(tuple(zip(skeleton.step_ids, combo)))


def enumerate_bound(space: SearchSpace, n: int) -> Iterator[BoundSequence]:
    """The whole expanded space in canonical order."""
    for sk in enumerate_structures(space, n):
        yield from enumerate_assignments(space, sk)


def bound_sequence_at(space: SearchSpace, index: int) -> BoundSequence:
    """Unrank ``index`` into a bound sequence: shorter first, then words over the alphabet.

    This is a bijection onto the expanded space used for uniform sampling. It
    agrees with the canonical order on lengths but not within a length.
    """
    alpha = space.alphabet
    P = len(alpha)
    k = 1
    while index >= P**k:
        index -= P**k
        k += 1
    letters = []
    for _ in range(k):
        index, d = divmod(index, P)
        letters.append(alpha[d])
    return BoundSequence(tuple((space.primitives[i].id, j) for i, j in reversed(letters)))


# ---------------------------------------------------------------------------
# Closure


def step_tables(space: SearchSpace) -> list:
    """Function table of every alphabet letter over the whole finite carrier."""
    if not space.carrier.is_finite:
        raise UnsupportedCarrier("closure is only defined on finite carriers")
    xs = space.carrier.values()
    return [tuple(eval_primitive(space.primitives[i], j, x) for x in xs) for i, j in space.alphabet]


def _compose(prefix: tuple, step: tuple) -> tuple:
    return tuple(None if v is None else step[v] for v in prefix)


def closure_levels(space: SearchSpace) -> Iterator[frozenset]:
    """Yield, for k = 1, 2, ..., the tables first realized at length k (possibly empty)."""
    steps = step_tables(space)
    seen = set(steps)
    frontier = list(dict.fromkeys(steps))
    yield frozenset(frontier)
    while True:
        nxt = []
        for t in frontier:
            for s in steps:
                c = _compose(t, s)
                if c not in seen:
                    seen.add(c)
                    nxt.append(c)
        frontier = nxt
        yield frozenset(frontier)


def closure(space: SearchSpace, n: int) -> frozenset:
    """Distinct function tables realized by sequences of length <= n.

    Entries are carrier elements or ``None`` where the sequence is undefined.
    Breadth-first: only tables new at length ``k`` are extended to length ``k+1``.
    """
    if n < 1:
        raise ConfigError("sequence length n must be >= 1", "n")
    out = set()
    for k, new in enumerate(closure_levels(space), start=1):
        out |= new
        if k == n or not new:
            break
    return frozenset(out)


def closure_fixpoint(space: SearchSpace) -> Tuple[int, frozenset]:
    """Smallest n with closure(n) == closure(n + 1), with that closure."""
    out = set()
    for k, new in enumerate(closure_levels(space), start=1):
        if not new:
            return k - 1, frozenset(out)
        out |= new


def total_tables(tables) -> frozenset:
    return frozenset(t for t in tables if None not in t)


# ---------------------------------------------------------------------------
# Catalogs


def transformation_generators(K: int) -> SearchSpace:
    """Generators of the full transformation monoid on Z_K.

    A transposition and a K-cycle generate every permutation; adding one rank K-1
    idempotent (merge 1 into 0) generates every map Z_K -> Z_K.
    """
    c = Carrier.finite(K)
    if K == 1:
        return SearchSpace(c, (Primitive("id", c, table=(0,)),), "t1-generators")
    if K == 2:
        prims = (Primitive("not", c, table=(1, 0)), Primitive("const0", c, table=(0, 0)))
    else:
        swap = [1, 0] + list(range(2, K))
        cycle = [(x + 1) % K for x in range(K)]
        merge = [0, 0] + list(range(2, K))
        prims = (
            Primitive("swap01", c, table=tuple(swap)),
            Primitive("cycle", c, table=tuple(cycle)),
            Primitive("merge10", c, table=tuple(merge)),
        )
    return SearchSpace(c, prims, f"t{K}-generators")


# default grids for the real catalog; heuristic, not a generating set
REAL_BASIC_GRIDS = {
    "affine": tuple((a, b) for a in (-2.0, -1.0, -0.5, 0.5, 1.0, 2.0) for b in (-1.0, -0.5, 0.0, 0.5, 1.0)),
    "scale": ((-2.0,), (-1.0,), (0.5,), (2.0,)),
    "sin": ((),),
    "exp": ((),),
    "relu": ((),),
}


def real_basic(lo: float = -1.0, hi: float = 1.0) -> SearchSpace:
    c = Carrier.real(lo, hi)
    prims = tuple(Primitive(name, c, params=grid, builtin=name) for name, grid in REAL_BASIC_GRIDS.items())
    return SearchSpace(c, prims, "real-basic")


CATALOGS = ("t2-generators", "t3-generators", "t4-generators", "real-basic")


def elementary_catalog(name: str) -> SearchSpace:
    if name in ("t2-generators", "t3-generators", "t4-generators"):
        return transformation_generators(int(name[1]))
    if name == "real-basic":
        return real_basic()
    raise ConfigError(f"unknown catalog {name!r}; known: {', '.join(CATALOGS)}", "catalog")
