"""Value model, primitive and sequence evaluation, metrics and the approximation error.

Values are plain Python scalars: ``int`` for elements of a finite carrier Z_m,
``float`` for real carriers, and ``None`` for *undefined* (evaluation fell
outside a domain or into a restriction set).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence, Tuple, Union

Value = Union[int, float, None]
UNDEFINED = None

ZERO_ONE_REAL_TOL = 1e-9


class FAError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(FAError, ValueError):
    """Invalid configuration: bad JSON document, unknown id, bad parameter index."""

    def __init__(self, message: str, key: str | None = None):
        self.key = key
        self.message = message
        super().__init__(f"{key}: {message}" if key else message)


class BudgetExceeded(FAError):
    """The expanded search space is larger than the configured ceiling."""

    def __init__(self, count: int, ceiling: int, what: str = "bound sequences"):
        self.count = count
        self.ceiling = ceiling
        super().__init__(
            f"refusing to enumerate {count} {what} (ceiling {ceiling}); "
            "use a-asp with a set builder or raise the ceiling"
        )


class UnsupportedCarrier(FAError):
    """Operation is only defined on finite carriers."""


class ContractViolation(FAError):
    """An input broke an operation's precondition."""


# ---------------------------------------------------------------------------
# Carrier


@dataclass(frozen=True)
class Carrier:
    kind: str
    m: Optional[int] = None
    lo: Optional[float] = None
    hi: Optional[float] = None
    grid: int = 64

    def __post_init__(self):
        if self.kind == "finite":
            if not isinstance(self.m, int) or isinstance(self.m, bool) or self.m < 1:
                raise ConfigError(f"finite carrier needs integer m >= 1, got {self.m!r}", "carrier.m")
        elif self.kind == "real":
            if self.lo is None or self.hi is None or not float(self.lo) < float(self.hi):
                raise ConfigError(f"real carrier needs lo < hi, got [{self.lo}, {self.hi}]", "carrier")
            if self.grid < 2:
                raise ConfigError("real carrier grid needs at least 2 points", "carrier.grid")
            object.__setattr__(self, "lo", float(self.lo))
            object.__setattr__(self, "hi", float(self.hi))
        else:
            raise ConfigError(f"unknown carrier kind {self.kind!r}", "carrier.kind")

    @classmethod
    def finite(cls, m: int) -> "Carrier":
        return cls("finite", m=m)

    @classmethod
    def real(cls, lo: float, hi: float, grid: int = 64) -> "Carrier":
        return cls("real", lo=lo, hi=hi, grid=grid)

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    def contains(self, v: Value) -> bool:
        if v is None or isinstance(v, bool):
            return False
        if self.is_finite:
            return isinstance(v, int) and 0 <= v < self.m
        return isinstance(v, (int, float)) and math.isfinite(v)

    def normalize(self, v, key: str | None = None) -> Value:
        """Coerce a raw (e.g. JSON) value into this carrier, or raise."""
        if self.is_finite:
            if isinstance(v, float) and v.is_integer():
                v = int(v)
            if not self.contains(v):
                raise ConfigError(f"{v!r} is not an element of Z_{self.m}", key)
            return v
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ConfigError(f"{v!r} is not a finite real number", key)
        return float(v)

    def values(self) -> list:
        """All elements (finite) or the evenly spaced sample grid (real), endpoints included."""
        if self.is_finite:
            return list(range(self.m))
        g = self.grid
        span = self.hi - self.lo
        return [self.lo + span * i / (g - 1) if i < g - 1 else self.hi for i in range(g)]

    def to_doc(self) -> dict:
        if self.is_finite:
            return {"kind": "finite", "m": self.m}
        doc = {"kind": "real", "lo": self.lo, "hi": self.hi}
        if self.grid != 64:
            doc["grid"] = self.grid
        return doc

    def __str__(self):
        return f"Z_{self.m}" if self.is_finite else f"R[{self.lo}, {self.hi}]"


# ---------------------------------------------------------------------------
# Primitives

def _relu(x: float) -> float:
    return x if x > 0.0 else 0.0


# name -> (arity, rule(x, *params))
BUILTINS: dict[str, Tuple[int, Callable[..., float]]] = {
    "affine": (2, lambda x, a, b: a * x + b),
    "scale": (1, lambda x, c: c * x),
    "sin": (0, math.sin),
    "exp": (0, math.exp),
    "relu": (0, _relu),
    "constant": (1, lambda x, c: float(c)),
}


@dataclass(frozen=True)
class Primitive:
    """One parameterized unary function with its parameter grid and restriction set.

    Finite carriers use ``table``, laid out parameter-major: the output for input
    ``x`` under parameter index ``p`` is ``table[p * m + x]``. Real carriers use a
    ``builtin`` rule. ``restriction`` holds excluded outputs: integers for finite
    carriers, closed ``(lo, hi)`` intervals for real ones. ``domain`` optionally
    bounds the accepted inputs of a real primitive.
    """

    id: str
    carrier: Carrier
    params: Tuple[tuple, ...] = ((),)
    table: Optional[Tuple[int, ...]] = None
    builtin: Optional[str] = None
    restriction: Optional[frozenset] = None
    domain: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        key = f"primitive {self.id!r}"
        if not self.params:
            raise ConfigError("parameter grid is empty", f"{key}.params")
        params = tuple(tuple(p) for p in self.params)
        if len(set(params)) != len(params):
            raise ConfigError("parameter grid has duplicates", f"{key}.params")
        object.__setattr__(self, "params", params)
        c = self.carrier
        if c.is_finite:
            if self.table is None or self.builtin is not None:
                raise ConfigError("finite-carrier primitives need a lookup table", f"{key}.rule")
            table = tuple(self.table)
            expected = c.m * len(params)
            if len(table) != expected:
                raise ConfigError(
                    f"table has {len(table)} entries, expected m*|params| = {expected}", f"{key}.rule.table"
                )
            for i, y in enumerate(table):
                if not c.contains(y):
                    raise ConfigError(f"table entry {y!r} outside Z_{c.m}", f"{key}.rule.table[{i}]")
            object.__setattr__(self, "table", table)
            if self.restriction is not None:
                object.__setattr__(self, "restriction", frozenset(self.restriction))
        else:
            if self.builtin not in BUILTINS or self.table is not None:
                raise ConfigError(
                    f"real-carrier primitives need a builtin from {sorted(BUILTINS)}", f"{key}.rule"
                )
            arity = BUILTINS[self.builtin][0]
            for i, p in enumerate(params):
                if len(p) != arity:
                    raise ConfigError(f"{self.builtin} takes {arity} parameters, got {len(p)}", f"{key}.params[{i}]")
            if self.restriction is not None:
                object.__setattr__(
                    self, "restriction", tuple((float(a), float(b)) for a, b in self.restriction)
                )

    def excluded(self, y: Value) -> bool:
        if not self.restriction:
            return False
        if self.carrier.is_finite:
            return y in self.restriction
        return any(a <= y <= b for a, b in self.restriction)


def eval_primitive(prim: Primitive, param_index: int, x: Value) -> Value:
    if not isinstance(param_index, int) or not 0 <= param_index < len(prim.params):
        raise ConfigError(f"parameter index {param_index!r} out of range for {prim.id!r}")
    if x is None:
        raise ContractViolation("eval_primitive called on an undefined input")
    c = prim.carrier
    if c.is_finite:
        y = prim.table[param_index * c.m + x]
    else:
        if prim.domain is not None and not prim.domain[0] <= x <= prim.domain[1]:
            return None
        rule = BUILTINS[prim.builtin][1]
        try:
            y = float(rule(x, *prim.params[param_index]))
        except OverflowError:
            return None
        if not math.isfinite(y):
            return None
    if prim.excluded(y):
        return None
    return y


# ---------------------------------------------------------------------------
# Bound sequences

_STEP_RE = re.compile(r"^\s*([A-Za-z0-9_.\-]+)\[(\d+)\]\s*$")


@dataclass(frozen=True)
class BoundSequence:
    """Ordered (primitive id, parameter index) steps; the first step is applied first."""

    steps: Tuple[Tuple[str, int], ...]

    def __post_init__(self):
        steps = tuple((str(i), int(p)) for i, p in self.steps)
        if not steps:
            raise ConfigError("a bound sequence needs at least one step")
        object.__setattr__(self, "steps", steps)

    def __len__(self):
        return len(self.steps)

    @property
    def skeleton(self) -> Tuple[str, ...]:
        return tuple(i for i, _ in self.steps)

    def render(self) -> str:
        return "·".join(f"{i}[{p}]" for i, p in self.steps)

    @classmethod
    def parse(cls, text: str) -> "BoundSequence":
        """Inverse of :meth:`render`. Steps may be separated by ``·`` or ``,``."""
        steps = []
        for part in re.split(r"[·,]", text):
            mt = _STEP_RE.match(part)
            if not mt:
                raise ConfigError(f"cannot parse step {part!r} in sequence {text!r}")
            steps.append((mt.group(1), int(mt.group(2))))
        return cls(tuple(steps))

    def __str__(self):
        return self.render()


def eval_sequence(space, seq: BoundSequence, x: Value) -> Value:
    for pid, p in seq.steps:
        x = eval_primitive(space.primitive(pid), p, x)
        if x is None:
            return None
    return x


# ---------------------------------------------------------------------------
# Metrics

_METRIC_ALIASES = {
    "abs": "abs", "abs-diff": "abs",
    "sq": "sq", "squared-diff": "sq",
    "01": "01", "zero-one": "01",
}


@dataclass(frozen=True)
class Metric:
    """Pointwise discrepancy ``d`` plus the rule used where ``f(x)`` is undefined.

    By default an undefined ``f(x)`` scores ``|g(x)|``, ``g(x)**2`` or 1 for the
    abs, squared and zero-one kinds. ``signed_fallback`` switches to the literal
    ``d = g(x)``, which can go negative on negative targets.
    """

    kind: str = "abs"
    signed_fallback: bool = False
    tol: float = field(default=ZERO_ONE_REAL_TOL, compare=False)

    def __post_init__(self):
        if self.kind not in _METRIC_ALIASES:
            raise ConfigError(f"unknown metric {self.kind!r}; expected one of abs, sq, 01", "metric")
        object.__setattr__(self, "kind", _METRIC_ALIASES[self.kind])


def metric_eval(metric: Metric, a: Value, b: Value):
    if b is None:
        raise ContractViolation("target values are never undefined")
    if a is None:
        if metric.signed_fallback:
            return b
        if metric.kind == "abs":
            return abs(b)
        if metric.kind == "sq":
            return b * b
        return 1
    if isinstance(a, float) != isinstance(b, float):
        raise ConfigError(f"carrier mismatch between {a!r} and {b!r}", "metric")
    if metric.kind == "abs":
        return abs(a - b)
    if metric.kind == "sq":
        d = a - b
        return d * d
    if isinstance(a, float):
        return 0 if abs(a - b) <= metric.tol else 1
    return 0 if a == b else 1


def mean_error(outputs: Sequence[Value], targets: Sequence[Value], metric: Metric, exact: bool = False):
    """Mean metric over paired outputs/targets, summed in listed order.

    With ``exact=True`` the result is a :class:`~fractions.Fraction`; only valid
    when every contribution is an integer (finite carriers).
    """
    total = 0
    for a, b in zip(outputs, targets):
        total += metric_eval(metric, a, b)
    if exact:
        if not isinstance(total, int):
            raise ContractViolation("exact error needs integer contributions (finite carrier)")
        return Fraction(total, len(targets))
    return total / len(targets)


@dataclass(frozen=True)
class SampleSet:
    """The sample set sigma together with the target's value at each point."""

    carrier: Carrier
    points: Tuple[Tuple[Value, Value], ...]

    def __post_init__(self):
        if not self.points:
            raise ConfigError("sample set is empty", "sigma")
        pts = []
        seen = set()
        for i, (x, y) in enumerate(self.points):
            x = self.carrier.normalize(x, f"sigma[{i}].x")
            y = self.carrier.normalize(y, f"sigma[{i}].y")
            if x in seen:
                raise ConfigError(f"duplicate sample point {x!r}", f"sigma[{i}]")
            seen.add(x)
            pts.append((x, y))
        object.__setattr__(self, "points", tuple(pts))

    @classmethod
    def from_function(cls, carrier: Carrier, fn: Callable[[Value], Value], xs: Iterable[Value] | None = None):
        xs = carrier.values() if xs is None else list(xs)
        return cls(carrier, tuple((x, fn(x)) for x in xs))

    @property
    def xs(self) -> list:
        return [x for x, _ in self.points]

    @property
    def ys(self) -> list:
        return [y for _, y in self.points]

    def __len__(self):
        return len(self.points)

    def subsample(self) -> "SampleSet":
        """Every other point starting with the first; used by history-aware builders."""
        return SampleSet(self.carrier, self.points[::2])


def approximation_error(space, seq: BoundSequence, samples: SampleSet, metric: Metric, exact: bool = False):
    outputs = [eval_sequence(space, seq, x) for x in samples.xs]
    return mean_error(outputs, samples.ys, metric, exact=exact)
