"""Closed-form capacity bounds and the information flow graph.

Each storage node i is split into ``in_i -> out_i`` with capacity alpha.  A
replacement's ``in`` vertex receives beta from each helper's ``out``.  The
source feeds every initial ``in`` and each collector drains its chosen
``out`` vertices; those edges are "infinite", encoded as one more than the
sum of all finite capacities so that arithmetic stays exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx

from .coset_code import capacity_sum
from .errors import ParameterError

SOURCE = "s"


def _check(n: int | None, k: int, d: int, ell: int = 0) -> None:
    if n is not None and not d <= n - 1:
        raise ParameterError(f"parameter violation: need d <= n-1, got d={d} n={n}")
    if not 1 <= k <= d:
        raise ParameterError(f"parameter violation: need 1 <= k <= d, got k={k} d={d}")
    if not 0 <= ell < k:
        raise ParameterError(f"parameter violation: need 0 <= ell < k, got ell={ell} k={k}")


def _cut_sum(first: int, last: int, d: int, alpha: int, beta: int) -> int:
    return sum(min((d - i + 1) * beta, alpha) for i in range(first, last + 1))


def secrecy_upper_bound(k: int, d: int, alpha: int, beta: int, ell: int, n: int | None = None) -> int:
    """sum_{i=ell+1..k} min((d - i + 1) beta, alpha)."""
    _check(n, k, d, ell)
    return _cut_sum(ell + 1, k, d, alpha, beta)


def unsecure_capacity(k: int, d: int, alpha: int, beta: int, n: int | None = None) -> int:
    _check(n, k, d)
    return _cut_sum(1, k, d, alpha, beta)


def bw_limited_capacity(n: int, k: int, ell: int, Gamma) -> Fraction:
    """Secrecy capacity at d = n - 1 with repair bandwidth capped at Gamma."""
    if not 0 <= ell < k <= n - 1:
        raise ParameterError(f"parameter violation: need 0 <= ell < k <= n-1, got n={n} k={k} ell={ell}")
    Gamma = Fraction(Gamma)
    if Gamma <= 0:
        raise ParameterError("parameter violation: Gamma must be positive")
    return capacity_sum(n, ell + 1, k) * Gamma / (n - 1)


def static_capacity(k: int, ell: int, alpha: int) -> int:
    """Secure capacity of the failure-free system: (k - ell) alpha."""
    return (k - ell) * alpha


def bounds_report(n: int, k: int, ell: int, Gamma: int, d: int | None = None,
                  alpha: int | None = None, beta: int | None = None) -> dict:
    """The numbers printed by ``secure-regen params``."""
    d = n - 1 if d is None else d
    beta = Gamma // d if beta is None else beta
    alpha = Gamma if alpha is None else alpha
    if d * beta > Gamma:
        raise ParameterError(f"parameter violation: d*beta = {d * beta} exceeds Gamma = {Gamma}")
    theta = n * (n - 1) // 2
    M = capacity_sum(n, 1, k)
    R = capacity_sum(n, ell + 1, k)
    thm2 = bw_limited_capacity(n, k, ell, Gamma)
    return {
        "n": n, "k": k, "d": d, "ell": ell, "alpha": alpha, "beta": beta, "Gamma": Gamma,
        "theta": theta,
        "M": M,
        "R": R,
        "mu": M - R,
        "thm1_bound": secrecy_upper_bound(k, d, alpha, beta, ell, n),
        "thm2_capacity": int(thm2) if thm2.denominator == 1 else str(thm2),
        "unsecure_capacity": unsecure_capacity(k, d, alpha, beta, n),
        "static_capacity": static_capacity(k, ell, alpha),
    }


# --------------------------------------------------------------------------
# flow graph
# --------------------------------------------------------------------------


def x_in(i: int) -> str:
    return f"in{i}"


def x_out(i: int) -> str:
    return f"out{i}"


@dataclass
class FlowGraph:
    graph: nx.DiGraph
    n: int
    d: int
    alpha: int
    beta: int
    infinity: int
    collectors: dict[str, tuple[int, ...]] = field(default_factory=dict)
    replacements: list[tuple[int, int, tuple[int, ...]]] = field(default_factory=list)
    vertex_of: dict[int, int] = field(default_factory=dict)


def build_flow_graph(
    n: int,
    d: int,
    alpha: int,
    beta: int,
    trace=(),
    collectors=(),
) -> FlowGraph:
    """Flow graph after replaying ``trace``.

    ``trace`` entries are a failed vertex, or ``(vertex, helper_vertices)``
    to pin the helpers.  Without explicit helpers the ``d`` alive nodes with
    the largest physical ids are used (newest first), which is the choice
    that makes every replacement download from all earlier replacements.
    ``collectors`` is a list of vertex sets resolved against the nodes alive
    at the end of the trace; collector ``j`` is the graph vertex ``DC{j}``.
    """
    if not 1 <= d <= n - 1:
        raise ParameterError(f"parameter violation: need 1 <= d <= n-1, got d={d}")
    if alpha <= 0 or beta <= 0:
        raise ParameterError("parameter violation: alpha and beta must be positive")
    g = nx.DiGraph()
    alive = {v: v for v in range(1, n + 1)}  # vertex -> physical id
    vertex_of = {v: v for v in range(1, n + 1)}
    finite_edges: list[tuple[str, str, int]] = []
    for i in range(1, n + 1):
        finite_edges.append((x_in(i), x_out(i), alpha))
    replacements = []
    next_id = n + 1
    for entry in trace:
        if isinstance(entry, (tuple, list)):
            failed, helpers = int(entry[0]), [int(h) for h in entry[1]]
        else:
            failed, helpers = int(entry), None
        if failed not in alive:
            raise ParameterError(f"invalid trace: vertex {failed} out of range 1..{n}")
        if helpers is None:
            others = sorted((pid for v, pid in alive.items() if v != failed), reverse=True)
            helper_ids = others[:d]
        else:
            if len(set(helpers)) != d or failed in helpers or any(h not in alive for h in helpers):
                raise ParameterError(f"invalid trace: helpers {helpers} for vertex {failed}")
            helper_ids = [alive[h] for h in helpers]
        new = next_id
        next_id += 1
        for h in helper_ids:
            finite_edges.append((x_out(h), x_in(new), beta))
        finite_edges.append((x_in(new), x_out(new), alpha))
        replacements.append((new, failed, tuple(sorted(helper_ids))))
        alive[failed] = new
        vertex_of[new] = failed

    infinity = 1 + sum(c for _, _, c in finite_edges)
    for u, v, c in finite_edges:
        g.add_edge(u, v, capacity=c)
    g.add_node(SOURCE)
    for i in range(1, n + 1):
        g.add_edge(SOURCE, x_in(i), capacity=infinity)

    fg = FlowGraph(g, n, d, alpha, beta, infinity, replacements=replacements, vertex_of=vertex_of)
    for j, verts in enumerate(collectors):
        verts = tuple(sorted(set(int(v) for v in verts)))
        if any(v not in alive for v in verts):
            raise ParameterError(f"invalid collector {verts}")
        name = f"DC{j}"
        fg.collectors[name] = tuple(alive[v] for v in verts)
        g.add_node(name)
        for pid in fg.collectors[name]:
            g.add_edge(x_out(pid), name, capacity=infinity)
    if not nx.is_directed_acyclic_graph(g):  # pragma: no cover - construction only adds forward edges
        raise ParameterError("flow graph is not acyclic")
    return fg


def min_cut(fg: FlowGraph, collector: str | int = 0) -> int:
    """Exact integer max-flow from the source to one collector."""
    name = collector if isinstance(collector, str) else f"DC{collector}"
    if name not in fg.graph:
        raise ParameterError(f"unknown collector {collector!r}")
    if not nx.has_path(fg.graph, SOURCE, name):
        return 0
    value, _ = nx.maximum_flow(fg.graph, SOURCE, name, flow_func=nx.algorithms.flow.edmonds_karp)
    return int(value)


def worst_case_trace(k: int) -> list[int]:
    """Vertices 1..k fail in order; each replacement sees all earlier ones."""
    return list(range(1, k + 1))


def worst_case_min_cut(n: int, k: int, d: int, alpha: int, beta: int, first: int = 1) -> int:
    """Max-flow into a collector on replacements ``first..k`` of the worst-case trace."""
    verts = list(range(first, k + 1))
    fg = build_flow_graph(n, d, alpha, beta, worst_case_trace(k), [verts] if verts else [])
    return min_cut(fg, 0) if verts else 0


def empirical_secrecy_bound(n: int, k: int, d: int, alpha: int, beta: int, ell: int) -> int:
    """Flow into all k replacements minus the flow Eve's first ell replacements already carry."""
    _check(n, k, d, ell)
    total = worst_case_min_cut(n, k, d, alpha, beta)
    eve = worst_case_min_cut(n, ell, d, alpha, beta) if ell else 0
    return total - eve
