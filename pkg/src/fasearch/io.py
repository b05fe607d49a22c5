"""JSON space and target documents (``format_version`` 1)."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Mapping, Tuple, Union

from .core import BoundSequence, Carrier, ConfigError, Primitive, SampleSet, eval_sequence
from .spaces import CATALOGS, SearchSpace, elementary_catalog

FORMAT_VERSION = 1

Doc = Union[Mapping, str, Path]


def _read(doc: Doc, what: str) -> Tuple[dict, Path | None]:
    if isinstance(doc, Mapping):
        return dict(doc), None
    path = Path(doc)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read {what} file: {e.strerror}", str(path)) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON: {e}", str(path)) from None
    if not isinstance(data, dict):
        raise ConfigError(f"{what} document must be a JSON object", str(path))
    return data, path


def _check_version(data: dict):
    v = data.get("format_version", FORMAT_VERSION)
    if v != FORMAT_VERSION:
        raise ConfigError(f"unsupported format_version {v!r}", "format_version")


def parse_carrier(raw, key: str = "carrier") -> Carrier:
    if not isinstance(raw, Mapping):
        raise ConfigError("carrier must be an object", key)
    kind = raw.get("kind")
    if kind == "finite":
        return Carrier.finite(raw.get("m"))
    if kind == "real":
        return Carrier.real(raw.get("lo"), raw.get("hi"), raw.get("grid", 64))
    raise ConfigError(f"carrier.kind must be 'finite' or 'real', got {kind!r}", f"{key}.kind")


def _parse_primitive(raw, carrier: Carrier, key: str) -> Primitive:
    if not isinstance(raw, Mapping):
        raise ConfigError("primitive must be an object", key)
    pid = raw.get("id")
    if not isinstance(pid, str) or not pid:
        raise ConfigError("primitive id must be a nonempty string", f"{key}.id")
    rule = raw.get("rule")
    if not isinstance(rule, Mapping) or len(rule) != 1 or not ({"table", "builtin"} & set(rule)):
        raise ConfigError('rule must be {"table": [...]} or {"builtin": NAME}', f"{key}.rule")
    params = raw.get("params", [[]])
    if not isinstance(params, list):
        raise ConfigError("params must be a list of tuples", f"{key}.params")
    if not params:
        raise ConfigError("parameter grid is empty", f"{key}.params")
    try:
        params = tuple(tuple(p) if isinstance(p, (list, tuple)) else (p,) for p in params)
    except TypeError:
        raise ConfigError("params must be a list of tuples", f"{key}.params") from None
    restriction = raw.get("restriction")
    if restriction is not None and not isinstance(restriction, list):
        raise ConfigError("restriction must be a list or null", f"{key}.restriction")
    try:
        if carrier.is_finite:
            table = rule.get("table")
            if not isinstance(table, list):
                raise ConfigError("finite carriers need a table rule", f"{key}.rule")
            return Primitive(pid, carrier, params=params, table=tuple(table), restriction=restriction)
        if restriction is not None:
            restriction = [(r, r) if isinstance(r, (int, float)) else tuple(r) for r in restriction]
        domain = raw.get("domain")
        return Primitive(
            pid, carrier, params=params, builtin=rule.get("builtin"),
            restriction=restriction, domain=tuple(domain) if domain is not None else None,
        )
    except ConfigError as e:
        prefix = f"primitive {pid!r}"
        if e.key and e.key.startswith(prefix):
            raise ConfigError(e.message, key + e.key.removeprefix(prefix)) from None
        raise


def load_space(doc: Doc, name: str | None = None) -> SearchSpace:
    """Build a validated space from a parsed document, a JSON path, or a catalog name."""
    if isinstance(doc, str) and doc in CATALOGS:
        return elementary_catalog(doc)
    if isinstance(doc, str) and doc.startswith("catalog:"):
        return elementary_catalog(doc.split(":", 1)[1])
    data, path = _read(doc, "space")
    _check_version(data)
    if "carrier" not in data:
        raise ConfigError("missing key", "carrier")
    carrier = parse_carrier(data["carrier"])
    prims = data.get("primitives")
    if not isinstance(prims, list):
        raise ConfigError("primitives must be a list", "primitives")
    parsed = tuple(_parse_primitive(p, carrier, f"primitives[{i}]") for i, p in enumerate(prims))
    label = name or data.get("name") or (path.stem if path else "space")
    return SearchSpace(carrier, parsed, label)


def dump_space(space: SearchSpace) -> dict:
    prims = []
    for p in space.primitives:
        entry = {"id": p.id}
        entry["rule"] = {"table": list(p.table)} if p.table is not None else {"builtin": p.builtin}
        entry["params"] = [list(t) for t in p.params]
        if p.carrier.is_finite:
            entry["restriction"] = sorted(p.restriction) if p.restriction else None
        else:
            entry["restriction"] = [list(r) for r in p.restriction] if p.restriction else None
            if p.domain is not None:
                entry["domain"] = list(p.domain)
        prims.append(entry)
    return {
        "format_version": FORMAT_VERSION,
        "name": space.name,
        "carrier": space.carrier.to_doc(),
        "primitives": prims,
    }


# ---------------------------------------------------------------------------
# Targets


def _finite_builtin(name: str, m: int, args: list):
    if name == "identity":
        return lambda x: x
    if name == "const":
        return lambda x: args[0] % m
    if name == "shift":
        return lambda x: (x + args[0]) % m
    if name == "mul":
        return lambda x: (x * args[0]) % m
    if name == "square":
        return lambda x: (x * x) % m
    if name == "threshold":
        return lambda x: 1 if x >= args[0] else 0
    return None


def _real_builtin(name: str, args: list):
    table = {
        "identity": lambda x: x,
        "sin": math.sin,
        "cos": math.cos,
        "exp": math.exp,
        "tanh": math.tanh,
        "square": lambda x: x * x,
        "abs": abs,
        "relu": lambda x: max(x, 0.0),
    }
    if name in table:
        return table[name]
    if name == "affine":
        return lambda x: args[0] * x + args[1]
    if name == "const":
        return lambda x: float(args[0])
    return None


FINITE_TARGETS = ("identity", "const", "shift", "mul", "square", "threshold")
REAL_TARGETS = ("identity", "sin", "cos", "exp", "tanh", "square", "abs", "relu", "affine", "const")


def load_target(doc: Doc, base_dir: Path | None = None) -> Tuple[SampleSet, str]:
    """Resolve a target document into a total sample set and a label.

    Sources: ``builtin`` (named function on a carrier), ``table`` (explicit
    ``points``), ``sequence`` (a bound sequence over a named space). ``sigma``
    defaults to the whole finite carrier or its real sample grid.
    """
    data, path = _read(doc, "target")
    _check_version(data)
    if path is not None and base_dir is None:
        base_dir = path.parent
    label = data.get("label") or (path.stem if path else "target")
    source = data.get("source")
    if source == "table":
        carrier = parse_carrier(data.get("carrier"))
        points = data.get("points")
        if not isinstance(points, list):
            raise ConfigError("table targets need a points list", "points")
        if any(not isinstance(p, (list, tuple)) or len(p) != 2 for p in points):
            raise ConfigError("each point must be an [x, y] pair", "points")
        return SampleSet(carrier, tuple(tuple(p) for p in points)), label

    if source == "builtin":
        carrier = parse_carrier(data.get("carrier"))
        name = data.get("name")
        args = data.get("args", [])
        if carrier.is_finite:
            fn = _finite_builtin(name, carrier.m, args)
            known = FINITE_TARGETS
        else:
            fn = _real_builtin(name, args)
            known = REAL_TARGETS
        if fn is None:
            raise ConfigError(f"unknown builtin target {name!r}; known: {', '.join(known)}", "name")
        xs = _sigma(data, carrier)
        return SampleSet(carrier, tuple((x, fn(x)) for x in xs)), data.get("label") or name

    if source == "sequence":
        ref = data.get("space")
        if ref is None:
            raise ConfigError("sequence targets need a space", "space")
        if isinstance(ref, str) and ref not in CATALOGS and not ref.startswith("catalog:") and base_dir is not None:
            ref = str(base_dir / ref)
        space = load_space(ref)
        seq = space.validate(BoundSequence.parse(str(data.get("sequence", ""))))
        xs = _sigma(data, space.carrier)
        points = []
        for i, x in enumerate(xs):
            y = eval_sequence(space, seq, x)
            if y is None:
                raise ConfigError(f"target sequence undefined at {x!r}", f"sigma[{i}]")
            points.append((x, y))
        return SampleSet(space.carrier, tuple(points)), label

    raise ConfigError(f"source must be builtin, table or sequence, got {source!r}", "source")


def _sigma(data: dict, carrier: Carrier) -> list:
    sigma = data.get("sigma")
    if sigma is None:
        return carrier.values()
    if not isinstance(sigma, list) or not sigma:
        raise ConfigError("sigma must be a nonempty list", "sigma")
    return [carrier.normalize(x, f"sigma[{i}]") for i, x in enumerate(sigma)]


def dump_target(samples: SampleSet, label: str = "target") -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "label": label,
        "source": "table",
        "carrier": samples.carrier.to_doc(),
        "points": [list(p) for p in samples.points],
    }
