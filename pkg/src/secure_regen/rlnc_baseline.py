"""Random linear network coded storage, the insecure baseline.

Every stored or transmitted symbol carries its coefficient row over
F_q^{R_f}, so Eve's knowledge is simply the span of the rows she sees.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import ParameterError
from .field import check_modulus, mat_mul, mat_rank

DEFAULT_Q = 65521


@dataclass(frozen=True)
class RlncParams:
    n: int
    k: int
    d: int
    beta: int
    alpha: int
    file_size: int
    q: int = DEFAULT_Q

    def __post_init__(self):
        if not (1 <= self.k <= self.d <= self.n - 1):
            raise ParameterError(f"parameter violation: need k <= d <= n-1 (n={self.n}, k={self.k}, d={self.d})")
        if self.alpha <= 0 or self.beta <= 0 or self.file_size <= 0:
            raise ParameterError("parameter violation: alpha, beta and file size must be positive")
        if self.beta > self.alpha:
            raise ParameterError("parameter violation: a helper cannot send more than it stores")
        check_modulus(self.q)


@dataclass
class RlncNode:
    id: int
    vertex: int
    coeffs: np.ndarray  # alpha x R_f
    values: np.ndarray  # alpha
    downloaded_coeffs: np.ndarray | None = None  # d*beta x R_f, replacements only
    alive: bool = True


@dataclass
class RlncState:
    params: RlncParams
    rng: np.random.Generator
    nodes: list[RlncNode] = field(default_factory=list)
    file: np.ndarray | None = None

    def node(self, node_id: int) -> RlncNode:
        if not 1 <= node_id <= len(self.nodes):
            raise ParameterError(f"unknown physical node id {node_id}")
        return self.nodes[node_id - 1]

    def alive_at(self, vertex: int) -> RlncNode:
        for nd in self.nodes:
            if nd.alive and nd.vertex == vertex:
                return nd
        raise ParameterError(f"no alive node at vertex {vertex}")


def rlnc_init(params: RlncParams, file, seed=0) -> RlncState:
    q = params.q
    file = np.asarray(file, dtype=np.int64).ravel() % q
    if file.size != params.file_size:
        raise ParameterError(f"file has {file.size} symbols, params say {params.file_size}")
    rng = np.random.default_rng(seed)
    state = RlncState(params, rng, file=file)
    for v in range(1, params.n + 1):
        C = rng.integers(0, q, size=(params.alpha, params.file_size), dtype=np.int64)
        state.nodes.append(RlncNode(v, v, C, mat_mul(C, file.reshape(-1, 1), q).ravel()))
    return state


@dataclass(frozen=True)
class RlncTranscript:
    failed_id: int
    new_id: int
    helper_ids: tuple[int, ...]
    coeffs: np.ndarray


def rlnc_repair(state: RlncState, failed_vertex: int, helper_vertices, seed=None) -> RlncTranscript:
    """Replace the node at ``failed_vertex`` using ``d`` helpers, each sending ``beta`` random mixes."""
    p = state.params
    q = p.q
    helper_vertices = sorted(set(int(v) for v in helper_vertices))
    if len(helper_vertices) != p.d:
        raise ParameterError(f"repair needs exactly d={p.d} helpers, got {len(helper_vertices)}")
    if failed_vertex in helper_vertices:
        raise ParameterError("failed vertex cannot help its own repair")
    rng = state.rng if seed is None else np.random.default_rng(seed)
    dead = state.alive_at(failed_vertex)
    helpers = [state.alive_at(v) for v in helper_vertices]

    rows, vals = [], []
    for h in helpers:
        mix = rng.integers(0, q, size=(p.beta, p.alpha), dtype=np.int64)
        rows.append(mat_mul(mix, h.coeffs, q))
        vals.append(mat_mul(mix, h.values.reshape(-1, 1), q).ravel())
    down_c = np.concatenate(rows)
    down_v = np.concatenate(vals)

    if p.alpha == p.d * p.beta:
        C, y = down_c, down_v
    else:
        mix = rng.integers(0, q, size=(p.alpha, p.d * p.beta), dtype=np.int64)
        C = mat_mul(mix, down_c, q)
        y = mat_mul(mix, down_v.reshape(-1, 1), q).ravel()

    dead.alive = False
    new = RlncNode(len(state.nodes) + 1, failed_vertex, C, y, downloaded_coeffs=down_c)
    state.nodes.append(new)
    return RlncTranscript(dead.id, new.id, tuple(h.id for h in helpers), down_c)


def observed_rows(state: RlncState, node_ids) -> np.ndarray:
    rows = []
    for i in sorted(set(int(x) for x in node_ids)):
        nd = state.node(i)
        rows.append(nd.coeffs if nd.downloaded_coeffs is None else np.concatenate([nd.downloaded_coeffs, nd.coeffs]))
    if not rows:
        return np.zeros((0, state.params.file_size), dtype=np.int64)
    return np.concatenate(rows)


def rlnc_attack(state: RlncState, eve_node_ids) -> int:
    """Rank of everything Eve sees; equal to R_f means she can decode the whole file."""
    rows = observed_rows(state, eve_node_ids)
    if rows.shape[0] == 0:
        return 0
    return mat_rank(rows, state.params.q)


def collector_decodable(state: RlncState, vertices) -> bool:
    rows = np.concatenate([state.alive_at(v).coeffs for v in vertices])
    return mat_rank(rows, state.params.q) == state.params.file_size


def scenario_params(q: int = DEFAULT_Q) -> RlncParams:
    """D(4,3) storing 6 symbols with d = 3, beta = 1, alpha = 3."""
    return RlncParams(n=4, k=3, d=3, beta=1, alpha=3, file_size=6, q=q)


def run_trials(trials: int = 100, q: int = DEFAULT_Q, seed: int = 0) -> dict:
    """Replay the two-successive-replacements attack over independent seeds.

    Trial ``t`` uses seed ``seed + t``.  Vertex 4 fails twice with helpers
    at vertices 1..3; Eve watches both replacements (physical ids 5 and 6).
    """
    params = scenario_params(q)
    hist: Counter = Counter()
    full = 0
    collector_failures = 0
    for t in range(trials):
        rng = np.random.default_rng(seed + t)
        file = rng.integers(0, q, size=params.file_size, dtype=np.int64)
        state = rlnc_init(params, file, seed=seed + t)
        rlnc_repair(state, 4, [1, 2, 3])
        rlnc_repair(state, 4, [1, 2, 3])
        r = rlnc_attack(state, [5, 6])
        hist[r] += 1
        full += r == params.file_size
        for B in combinations(range(1, params.n + 1), params.k):
            if not collector_decodable(state, B):
                collector_failures += 1
    return {
        "trials": trials,
        "q": q,
        "file_size": params.file_size,
        "eve_nodes": [5, 6],
        "full_recovery_count": int(full),
        "rank_histogram": {str(r): c for r, c in sorted(hist.items())},
        "collector_failures": collector_failures,
    }
