"""Inner repetition code: coded symbols are the edges of the complete graph K_n.

Symbol ``e`` lives on both endpoints of edge ``e``.  Edges are numbered
1..theta in lexicographic order of their (i, j), i < j, vertex pairs, so the
node at vertex ``v`` stores the n - 1 symbols of the edges touching ``v``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .errors import ParameterError


def n_edges(n: int) -> int:
    return n * (n - 1) // 2


def _check_vertex(v: int, n: int) -> None:
    if not 1 <= v <= n:
        raise ParameterError(f"vertex {v} out of range 1..{n}")


def edge_index(i: int, j: int, n: int) -> int:
    """Lexicographic rank (1-based) of the pair (i, j) among all pairs of 1..n."""
    if not (1 <= i < j <= n):
        raise ParameterError(f"invalid edge ({i}, {j}) for n={n}")
    return (i - 1) * n - i * (i - 1) // 2 + (j - i)


def node_symbols(v: int, n: int) -> frozenset[int]:
    _check_vertex(v, n)
    return frozenset(edge_index(min(u, v), max(u, v), n) for u in range(1, n + 1) if u != v)


def shared_symbol(u: int, v: int, n: int) -> int:
    _check_vertex(u, n)
    _check_vertex(v, n)
    if u == v:
        raise ParameterError("no shared symbol with self")
    return edge_index(min(u, v), max(u, v), n)


@dataclass(frozen=True)
class PlacementMap:
    n: int
    edge_of_index: tuple[tuple[int, int], ...] = field(init=False, repr=False)
    index_of_edge: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 2:
            raise ParameterError("placement needs at least two vertices")
        edges = tuple(combinations(range(1, self.n + 1), 2))
        object.__setattr__(self, "edge_of_index", edges)
        object.__setattr__(self, "index_of_edge", {e: i + 1 for i, e in enumerate(edges)})

    @property
    def theta(self) -> int:
        return len(self.edge_of_index)

    def edge(self, index: int) -> tuple[int, int]:
        if not 1 <= index <= self.theta:
            raise ParameterError(f"symbol index {index} out of range 1..{self.theta}")
        return self.edge_of_index[index - 1]

    def symbols(self, v: int) -> frozenset[int]:
        return node_symbols(v, self.n)

    def shared(self, u: int, v: int) -> int:
        return shared_symbol(u, v, self.n)

    def union(self, vertices) -> frozenset[int]:
        out: set[int] = set()
        for v in vertices:
            out |= node_symbols(v, self.n)
        return frozenset(out)

    def holders(self, index: int) -> tuple[int, int]:
        """The two vertices storing symbol ``index``."""
        return self.edge(index)

    def to_json(self) -> dict:
        return {"n": self.n, "edges": {str(i + 1): list(e) for i, e in enumerate(self.edge_of_index)}}
