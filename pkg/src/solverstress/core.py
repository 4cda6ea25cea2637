"""Typed graph-backed problem instances, attack actions, and canonical serialization.

Instances are immutable values: every mutation-like operation (``apply_action``)
returns a fresh, fully re-validated instance. The serialized form is
line-oriented JSON with a fixed record order (header, node table, edge table
sorted by (src, dst)), so two serializations of equal instances are
byte-identical.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

FORMAT_VERSION = 1

# Absolute tolerance for cost comparisons throughout the package. Edge
# halving is exact in binary floating point; the tolerance covers sums.
COST_ATOL = 1e-9


class Kind(str, enum.Enum):
    DAG = "dag"
    ATSP = "atsp"
    BIPARTITE = "bipartite_coverage"


class Sense(str, enum.Enum):
    MIN = "minimize"
    MAX = "maximize"


class Color(str, enum.Enum):
    BLACK = "black"
    WHITE = "white"


class Op(str, enum.Enum):
    REMOVE_EDGE = "remove_edge"
    HALVE_EDGE = "halve_edge"
    ADD_EDGE = "add_edge"


class FormatError(ValueError):
    """Base for serialization-format failures."""


class ParseError(FormatError):
    """Malformed document; carries the 1-based line number and offending field."""

    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        self.line = line
        self.field = field
        loc = []
        if line is not None:
            loc.append(f"line {line}")
        if field is not None:
            loc.append(f"field {field!r}")
        super().__init__(f"{message}" + (f" ({', '.join(loc)})" if loc else ""))


class ValidationError(FormatError):
    """Structurally well-formed document violating a kind invariant."""


class ActionError(ValueError):
    """Attack action incompatible with the instance it is applied to."""


def _is_finite(x) -> bool:
    return isinstance(x, (int, float)) and x == x and x not in (float("inf"), float("-inf"))


@dataclass(frozen=True)
class NodeAttr:
    """Per-node attributes; which fields are set depends on the graph kind."""

    duration: Optional[float] = None
    resource: Optional[float] = None
    weight: Optional[float] = None
    color: Optional[Color] = None


_EMPTY_ATTR = NodeAttr()


@dataclass(frozen=True)
class GraphInstance:
    kind: Kind
    node_count: int
    nodes: tuple[NodeAttr, ...]
    edges: tuple[tuple[int, int, float], ...]
    # Bipartite partition marker: node ids [0, set_count) are set nodes,
    # the rest are element nodes. None for non-bipartite kinds.
    set_count: Optional[int] = None

    def __post_init__(self):
        _validate_graph(self)

    def edge_index(self) -> dict[tuple[int, int], int]:
        return {(u, v): i for i, (u, v, _) in enumerate(self.edges)}


def _toposort_ok(n: int, edges: Sequence[tuple[int, int, float]]) -> bool:
    indeg = [0] * n
    succ: list[list[int]] = [[] for _ in range(n)]
    for u, v, _ in edges:
        succ[u].append(v)
        indeg[v] += 1
    stack = [v for v in range(n) if indeg[v] == 0]
    seen = 0
    while stack:
        u = stack.pop()
        seen += 1
        for v in succ[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                stack.append(v)
    return seen == n


def _validate_graph(g: GraphInstance) -> None:
    n = g.node_count
    if n < 0:
        raise ValidationError("node_count must be >= 0")
    if len(g.nodes) != n:
        raise ValidationError(f"expected {n} node attribute rows, got {len(g.nodes)}")
    prev = None
    for u, v, w in g.edges:
        if not (0 <= u < n and 0 <= v < n):
            raise ValidationError(f"edge ({u},{v}) references unknown node id")
        if not _is_finite(w):
            raise ValidationError(f"edge ({u},{v}) has non-finite weight")
        if prev is not None and (u, v) <= prev:
            if (u, v) == prev:
                raise ValidationError(f"duplicate edge ({u},{v})")
            raise ValidationError("edges not sorted by (src, dst)")
        prev = (u, v)

    if g.kind is Kind.DAG:
        if g.set_count is not None:
            raise ValidationError("set_count only valid for bipartite graphs")
        for i, a in enumerate(g.nodes):
            if not (_is_finite(a.duration) and a.duration > 0):
                raise ValidationError(f"node {i}: duration must be finite and > 0")
            if not (_is_finite(a.resource) and 0 < a.resource <= 1.0):
                raise ValidationError(f"node {i}: resource must lie in (0, 1]")
        if not _toposort_ok(n, g.edges):
            raise ValidationError("dag contains a cycle")
    elif g.kind is Kind.ATSP:
        if g.set_count is not None:
            raise ValidationError("set_count only valid for bipartite graphs")
        if len(g.edges) != n * (n - 1):
            raise ValidationError(
                f"atsp graph must be complete: expected {n * (n - 1)} edges, got {len(g.edges)}"
            )
        for u, v, w in g.edges:
            if u == v:
                raise ValidationError(f"atsp graph may not contain self-loop ({u},{v})")
            if not w > 0:
                raise ValidationError(f"edge ({u},{v}): atsp weights must be > 0")
        # Sorted + no duplicates + no self-loops + right count => complete.
    elif g.kind is Kind.BIPARTITE:
        s = g.set_count
        if s is None or not (0 <= s <= n):
            raise ValidationError("bipartite graph requires 0 <= set_count <= node_count")
        for i, a in enumerate(g.nodes):
            if i < s:
                if a != _EMPTY_ATTR:
                    raise ValidationError(f"set node {i} must not carry attributes")
            else:
                if not (_is_finite(a.weight) and a.weight >= 0):
                    raise ValidationError(f"element node {i}: weight must be finite and >= 0")
                if a.color not in (Color.BLACK, Color.WHITE):
                    raise ValidationError(f"element node {i}: missing color")
        for u, v, _ in g.edges:
            if not (u < s <= v):
                raise ValidationError(f"edge ({u},{v}) must connect a set node to an element node")
    else:  # pragma: no cover - enum is closed
        raise ValidationError(f"unknown kind {g.kind}")


@dataclass(frozen=True)
class ProblemInstance:
    """A CO problem: a typed graph plus problem-level scalar parameters."""

    graph: GraphInstance
    k_sets: Optional[int] = None   # max-coverage set budget
    k_white: Optional[int] = None  # separate-constraint white-coverage cap

    def __post_init__(self):
        g = self.graph
        if g.kind is Kind.BIPARTITE:
            if (self.k_sets is None) == (self.k_white is None):
                raise ValidationError("bipartite instance needs exactly one of k_sets/k_white")
            if self.k_sets is not None:
                if not (isinstance(self.k_sets, int) and 1 <= self.k_sets <= g.set_count):
                    raise ValidationError("k_sets must satisfy 1 <= k_sets <= number of set nodes")
                for i in range(g.set_count, g.node_count):
                    if g.nodes[i].color is not Color.BLACK:
                        raise ValidationError("plain coverage instances are black-only")
            else:
                if not (isinstance(self.k_white, int) and self.k_white >= 0):
                    raise ValidationError("k_white must be an integer >= 0")
        else:
            if self.k_sets is not None or self.k_white is not None:
                raise ValidationError(f"{g.kind.value} instance takes no coverage parameters")

    @property
    def problem(self) -> str:
        """One of 'dag', 'atsp', 'mc', 'mcscc'."""
        if self.graph.kind is Kind.DAG:
            return "dag"
        if self.graph.kind is Kind.ATSP:
            return "atsp"
        return "mc" if self.k_sets is not None else "mcscc"

    @property
    def sense(self) -> Sense:
        return Sense.MIN if self.graph.kind in (Kind.DAG, Kind.ATSP) else Sense.MAX

    def params(self) -> dict:
        if self.k_sets is not None:
            return {"k_sets": self.k_sets}
        if self.k_white is not None:
            return {"k_white": self.k_white}
        return {}


@dataclass(frozen=True)
class Solution:
    """Solver output: a payload, its re-evaluated cost, and the objective sense.

    ``status`` is "ok" for a feasible solution, "infeasible" or "timeout" for
    flagged worst-case outputs (cost +inf when minimizing, 0 when maximizing).
    """

    payload: tuple[int, ...]
    cost: float
    sense: Sense
    status: str = "ok"

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass(frozen=True, order=True)
class AttackAction:
    """One edge modification, identified by its endpoint node ids."""

    op: Op
    a1: int
    a2: int


_OP_FOR_PROBLEM = {
    "dag": Op.REMOVE_EDGE,
    "atsp": Op.HALVE_EDGE,
    "mc": Op.ADD_EDGE,
    "mcscc": Op.ADD_EDGE,
}


def op_for_problem(problem: str) -> Op:
    return _OP_FOR_PROBLEM[problem]


def apply_action(instance: ProblemInstance, action: AttackAction) -> ProblemInstance:
    """Return a new instance with the action applied; the input is untouched."""
    g = instance.graph
    expected = op_for_problem(instance.problem)
    if action.op is not expected:
        raise ActionError(
            f"op {action.op.value} incompatible with {instance.problem} instance"
        )
    key = (action.a1, action.a2)
    if action.op is Op.ADD_EDGE:
        if not (0 <= action.a1 < g.set_count and g.set_count <= action.a2 < g.node_count):
            raise ActionError(f"add_edge endpoints {key} must be (set node, element node)")
        if instance.problem == "mcscc" and g.nodes[action.a2].color is not Color.BLACK:
            raise ActionError(f"add_edge target {action.a2} must be a black element")
        edges = list(g.edges)
        idx = _bisect_edges(edges, key)
        if idx < len(edges) and (edges[idx][0], edges[idx][1]) == key:
            raise ActionError(f"edge {key} already present")
        edges.insert(idx, (action.a1, action.a2, 1.0))
    else:
        edges = list(g.edges)
        idx = _bisect_edges(edges, key)
        if idx >= len(edges) or (edges[idx][0], edges[idx][1]) != key:
            raise ActionError(f"edge {key} not present")
        if action.op is Op.REMOVE_EDGE:
            del edges[idx]
        else:
            u, v, w = edges[idx]
            edges[idx] = (u, v, w / 2.0)
    new_graph = GraphInstance(
        kind=g.kind,
        node_count=g.node_count,
        nodes=g.nodes,
        edges=tuple(edges),
        set_count=g.set_count,
    )
    return ProblemInstance(graph=new_graph, k_sets=instance.k_sets, k_white=instance.k_white)


def _bisect_edges(edges: list[tuple[int, int, float]], key: tuple[int, int]) -> int:
    lo, hi = 0, len(edges)
    while lo < hi:
        mid = (lo + hi) // 2
        if (edges[mid][0], edges[mid][1]) < key:
            lo = mid + 1
        else:
            hi = mid
    return lo


# ---------------------------------------------------------------------------
# Construction helpers


def dag_instance(jobs: Sequence[tuple[float, float]],
                 edges: Iterable[tuple[int, int]]) -> ProblemInstance:
    """Build a DAG scheduling instance from (duration, resource) pairs."""
    nodes = tuple(NodeAttr(duration=float(d), resource=float(r)) for d, r in jobs)
    es = tuple(sorted((int(u), int(v), 1.0) for u, v in edges))
    g = GraphInstance(Kind.DAG, len(nodes), nodes, es)
    return ProblemInstance(graph=g)


def atsp_instance(matrix: Sequence[Sequence[float]]) -> ProblemInstance:
    n = len(matrix)
    edges = []
    for i in range(n):
        if len(matrix[i]) != n:
            raise ValidationError("distance matrix must be square")
        for j in range(n):
            if i != j:
                edges.append((i, j, float(matrix[i][j])))
    g = GraphInstance(Kind.ATSP, n, tuple(_EMPTY_ATTR for _ in range(n)), tuple(edges))
    return ProblemInstance(graph=g)


def coverage_instance(memberships: Sequence[Iterable[int]],
                      weights: Sequence[float],
                      colors: Optional[Sequence[Color]] = None,
                      k_sets: Optional[int] = None,
                      k_white: Optional[int] = None) -> ProblemInstance:
    """Build an MC (k_sets) or MCSCC (k_white) instance.

    ``memberships[j]`` lists element indices (0-based, before the node-id
    offset) covered by set j; element node ids start at len(memberships).
    """
    m = len(memberships)
    n_e = len(weights)
    if colors is None:
        colors = [Color.BLACK] * n_e
    nodes = [_EMPTY_ATTR] * m + [
        NodeAttr(weight=float(w), color=c) for w, c in zip(weights, colors)
    ]
    edges = []
    for j, members in enumerate(memberships):
        for e in members:
            edges.append((j, m + int(e), 1.0))
    g = GraphInstance(Kind.BIPARTITE, m + n_e, tuple(nodes), tuple(sorted(edges)), set_count=m)
    return ProblemInstance(graph=g, k_sets=k_sets, k_white=k_white)


# ---------------------------------------------------------------------------
# Serialization

_JSON = dict(sort_keys=True, separators=(",", ":"))


def _node_obj(kind: Kind, i: int, a: NodeAttr, set_count: Optional[int]) -> dict:
    if kind is Kind.DAG:
        return {"node": i, "duration": a.duration, "resource": a.resource}
    if kind is Kind.ATSP:
        return {"node": i}
    if i < set_count:
        return {"node": i}
    return {"node": i, "weight": a.weight, "color": a.color.value}


def instance_to_obj(instance: ProblemInstance) -> dict:
    """Plain-dict form used by the wire protocol; canonical field content."""
    g = instance.graph
    return {
        "format_version": FORMAT_VERSION,
        "kind": g.kind.value,
        "node_count": g.node_count,
        "set_count": g.set_count,
        "params": instance.params(),
        "nodes": [_node_obj(g.kind, i, a, g.set_count) for i, a in enumerate(g.nodes)],
        "edges": [[u, v, w] for u, v, w in g.edges],
    }


def serialize_instance(instance: ProblemInstance) -> bytes:
    """Canonical line-oriented encoding: header, node table, edge table."""
    g = instance.graph
    header = {
        "format_version": FORMAT_VERSION,
        "kind": g.kind.value,
        "node_count": g.node_count,
        "set_count": g.set_count,
        "params": instance.params(),
    }
    lines = [json.dumps(header, **_JSON)]
    for i, a in enumerate(g.nodes):
        lines.append(json.dumps(_node_obj(g.kind, i, a, g.set_count), **_JSON))
    for u, v, w in g.edges:
        lines.append(json.dumps({"edge": [u, v], "weight": w}, **_JSON))
    return ("\n".join(lines) + "\n").encode("utf-8")


def _req(obj: dict, key: str, lineno: int):
    if key not in obj:
        raise ParseError(f"missing {key!r}", line=lineno, field=key)
    return obj[key]


def _num(obj: dict, key: str, lineno: int) -> float:
    v = _req(obj, key, lineno)
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise ParseError(f"{key!r} must be a number", line=lineno, field=key)
    return float(v)


def deserialize_instance(data) -> ProblemInstance:
    """Parse the canonical encoding; raises ParseError / ValidationError."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    lines = [ln for ln in data.split("\n") if ln.strip()]
    if not lines:
        raise ParseError("empty document", line=1)

    def load(lineno: int) -> dict:
        try:
            obj = json.loads(lines[lineno - 1])
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON: {e.msg}", line=lineno) from e
        if not isinstance(obj, dict):
            raise ParseError("record must be a JSON object", line=lineno)
        return obj

    header = load(1)
    if _req(header, "format_version", 1) != FORMAT_VERSION:
        raise ParseError(f"unsupported format_version", line=1, field="format_version")
    kind_raw = _req(header, "kind", 1)
    try:
        kind = Kind(kind_raw)
    except ValueError:
        raise ParseError(f"unknown kind {kind_raw!r}", line=1, field="kind") from None
    node_count = _req(header, "node_count", 1)
    if not isinstance(node_count, int) or node_count < 0:
        raise ParseError("node_count must be a non-negative integer", line=1, field="node_count")
    set_count = header.get("set_count")
    params = _req(header, "params", 1)
    if not isinstance(params, dict):
        raise ParseError("params must be an object", line=1, field="params")

    if len(lines) < 1 + node_count:
        raise ParseError(
            f"truncated document: expected {node_count} node records", line=len(lines)
        )
    nodes = []
    for i in range(node_count):
        lineno = 2 + i
        obj = load(lineno)
        nid = _req(obj, "node", lineno)
        if nid != i:
            raise ParseError(f"node records out of order: expected id {i}", line=lineno, field="node")
        if kind is Kind.DAG:
            nodes.append(NodeAttr(duration=_num(obj, "duration", lineno),
                                  resource=_num(obj, "resource", lineno)))
        elif kind is Kind.ATSP:
            nodes.append(_EMPTY_ATTR)
        else:
            if set_count is not None and i < set_count:
                nodes.append(_EMPTY_ATTR)
            else:
                color_raw = _req(obj, "color", lineno)
                try:
                    color = Color(color_raw)
                except ValueError:
                    raise ParseError(f"unknown color {color_raw!r}", line=lineno, field="color") from None
                nodes.append(NodeAttr(weight=_num(obj, "weight", lineno), color=color))

    edges = []
    for k in range(1 + node_count, len(lines)):
        lineno = k + 1
        obj = load(lineno)
        ev = _req(obj, "edge", lineno)
        if (not isinstance(ev, list) or len(ev) != 2
                or not all(isinstance(x, int) for x in ev)):
            raise ParseError("edge must be a pair of node ids", line=lineno, field="edge")
        edges.append((ev[0], ev[1], _num(obj, "weight", lineno)))

    g = GraphInstance(kind, node_count, tuple(nodes), tuple(edges), set_count=set_count)
    extra = set(params) - {"k_sets", "k_white"}
    if extra:
        raise ParseError(f"unknown params {sorted(extra)}", line=1, field="params")
    return ProblemInstance(graph=g, k_sets=params.get("k_sets"), k_white=params.get("k_white"))
