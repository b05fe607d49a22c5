from fasearch.core import Carrier, Primitive, SampleSet
from fasearch.spaces import SearchSpace


def table_space(m, *prims, name="space"):
    """Space over Z_m from ``(id, table)`` or ``(id, table, params, restriction)`` tuples."""
    c = Carrier.finite(m)
    out = []
    for spec in prims:
        pid, table, *rest = spec
        params = rest[0] if rest else ((),)
        restriction = rest[1] if len(rest) > 1 else None
        out.append(Primitive(pid, c, params=params, table=tuple(table), restriction=restriction))
    return SearchSpace(c, tuple(out), name)


def full_target(m, fn):
    c = Carrier.finite(m)
    return SampleSet(c, tuple((x, fn(x)) for x in range(m)))
