"""Dynamic storage system with exact repair at repair degree d = n - 1.

Physical nodes get ids 1..n at start and n+1, n+2, ... as replacements
arrive.  Each physical node occupies a logical vertex of the auxiliary
complete graph; a replacement inherits the vertex of the node it replaces,
which is what keeps the stored layout identical across repairs.

Files longer than R symbols are striped: every chunk of R secret symbols is
encoded independently with fresh keys and laid out with the same placement.
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from .coset_code import NestedMdsCode, decode_collector, encode
from .errors import ParameterError, SecureRegenError
from .field import check_modulus
from .placement import PlacementMap, shared_symbol

log = logging.getLogger(__name__)

StripeMap = dict[int, int]


@dataclass(frozen=True)
class SystemParams:
    n: int
    k: int
    d: int
    ell: int
    beta: int
    alpha: int
    Gamma: int
    q: int

    def __post_init__(self):
        self.validate()

    @property
    def gamma(self) -> int:
        return self.d * self.beta

    @classmethod
    def secure(cls, n: int, k: int, ell: int, Gamma: int, q: int) -> "SystemParams":
        """Bandwidth-limited operating point: d = n - 1, alpha = Gamma, beta = Gamma / (n - 1)."""
        if n < 2:
            raise ParameterError("parameter violation: n must be at least 2")
        if Gamma <= 0 or Gamma % (n - 1):
            raise ParameterError(f"parameter violation: Gamma={Gamma} must be a positive multiple of n-1={n - 1}")
        return cls(n=n, k=k, d=n - 1, ell=ell, beta=Gamma // (n - 1), alpha=Gamma, Gamma=Gamma, q=q)

    def validate(self) -> None:
        n, k, d, ell = self.n, self.k, self.d, self.ell
        if not (1 <= k <= d <= n - 1):
            raise ParameterError(f"parameter violation: need k <= d <= n-1, got n={n} k={k} d={d}")
        if not 0 <= ell < k:
            raise ParameterError(f"parameter violation: need 0 <= ell < k, got ell={ell} k={k}")
        if self.beta <= 0 or self.alpha <= 0:
            raise ParameterError("parameter violation: alpha and beta must be positive")
        if self.gamma > self.Gamma:
            raise ParameterError(f"parameter violation: gamma = d*beta = {self.gamma} exceeds Gamma = {self.Gamma}")
        check_modulus(self.q)

    def validate_construction(self) -> None:
        """The secure construction runs only at d = n - 1 and alpha = Gamma = (n - 1) beta."""
        if self.d != self.n - 1:
            raise ParameterError(f"construction requires d = n-1, got d={self.d}")
        if not (self.alpha == self.Gamma == (self.n - 1) * self.beta):
            raise ParameterError(
                f"construction requires alpha = Gamma = (n-1)*beta, got alpha={self.alpha} Gamma={self.Gamma} beta={self.beta}"
            )

    @property
    def secure_rate(self) -> Fraction:
        """Secret symbols stored per Gamma units by the construction."""
        return Fraction(sum(self.n - i for i in range(self.ell + 1, self.k + 1)) * self.Gamma, self.n - 1)

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class PhysicalNode:
    id: int
    vertex: int
    stored: list[StripeMap]
    downloaded: list[StripeMap]
    alive: bool = True
    replacement: bool = False

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "vertex": self.vertex,
            "alive": self.alive,
            "replacement": self.replacement,
            "stored": [{str(i): v for i, v in sorted(s.items())} for s in self.stored],
            "downloaded": [{str(i): v for i, v in sorted(s.items())} for s in self.downloaded],
        }

    @classmethod
    def from_json(cls, data: dict) -> "PhysicalNode":
        def maps(xs):
            return [{int(i): int(v) for i, v in s.items()} for s in xs]

        return cls(
            id=int(data["id"]),
            vertex=int(data["vertex"]),
            stored=maps(data["stored"]),
            downloaded=maps(data["downloaded"]),
            alive=bool(data["alive"]),
            replacement=bool(data.get("replacement", False)),
        )


@dataclass(frozen=True)
class Transfer:
    helper_id: int
    helper_vertex: int
    stripe: int
    index: int
    value: int


@dataclass(frozen=True)
class RepairTranscript:
    vertex: int
    failed_id: int
    new_id: int
    transfers: tuple[Transfer, ...]

    def symbols_per_stripe(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for t in self.transfers:
            out[t.stripe] = out.get(t.stripe, 0) + 1
        return out

    def to_json(self) -> dict:
        return {
            "vertex": self.vertex,
            "failed_id": self.failed_id,
            "new_id": self.new_id,
            "transfers": [asdict(t) for t in self.transfers],
        }


@dataclass
class SystemHistory:
    params: SystemParams
    code: NestedMdsCode
    placement: PlacementMap
    stripes: int
    seed: int | None = None
    nodes: list[PhysicalNode] = field(default_factory=list)
    failure_trace: list[tuple[int, int]] = field(default_factory=list)
    transcripts: list[RepairTranscript] = field(default_factory=list)

    def node(self, node_id: int) -> PhysicalNode:
        if not 1 <= node_id <= len(self.nodes):
            raise ParameterError(f"unknown physical node id {node_id}")
        return self.nodes[node_id - 1]

    def alive_at(self, vertex: int) -> PhysicalNode:
        if not 1 <= vertex <= self.params.n:
            raise ParameterError(f"unknown vertex {vertex}; valid range 1..{self.params.n}")
        hits = [nd for nd in self.nodes if nd.alive and nd.vertex == vertex]
        if len(hits) != 1:
            raise SecureRegenError(f"vertex {vertex} has {len(hits)} alive nodes")
        return hits[0]

    def alive_nodes(self) -> list[PhysicalNode]:
        return [nd for nd in self.nodes if nd.alive]

    def layout(self) -> dict[int, list[StripeMap]]:
        """vertex -> stored maps of its alive node."""
        return {nd.vertex: nd.stored for nd in self.alive_nodes()}

    def to_json(self) -> dict:
        return {
            "params": self.params.to_json(),
            "code": self.code.to_json(),
            "seed": self.seed,
            "stripes": self.stripes,
            "failure_trace": [list(p) for p in self.failure_trace],
            "nodes": [nd.to_json() for nd in self.nodes],
            "transcripts": [t.to_json() for t in self.transcripts],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, data: dict) -> "SystemHistory":
        params = SystemParams(**data["params"])
        code = NestedMdsCode.from_json(data["code"])
        hist = cls(
            params=params,
            code=code,
            placement=PlacementMap(params.n),
            stripes=int(data["stripes"]),
            seed=data.get("seed"),
            nodes=[PhysicalNode.from_json(nd) for nd in data["nodes"]],
            failure_trace=[tuple(p) for p in data["failure_trace"]],
        )
        hist.transcripts = [
            RepairTranscript(
                vertex=t["vertex"],
                failed_id=t["failed_id"],
                new_id=t["new_id"],
                transfers=tuple(Transfer(**x) for x in t["transfers"]),
            )
            for t in data.get("transcripts", [])
        ]
        return hist


def _check_compatible(params: SystemParams, code: NestedMdsCode, placement: PlacementMap) -> None:
    params.validate_construction()
    cp = code.params
    if (cp.n, cp.k, cp.ell, cp.q) != (params.n, params.k, params.ell, params.q):
        raise ParameterError(
            f"params/code mismatch: system (n={params.n}, k={params.k}, ell={params.ell}, q={params.q}) "
            f"vs code (n={cp.n}, k={cp.k}, ell={cp.ell}, q={cp.q})"
        )
    if placement.n != params.n or placement.theta != cp.theta:
        raise ParameterError("params/placement mismatch")


def init_system(
    params: SystemParams,
    code: NestedMdsCode,
    placement: PlacementMap,
    secret,
    seed: int | None = 0,
    *,
    keys=None,
) -> SystemHistory:
    """Encode ``secret`` stripe by stripe and lay it out on n fresh nodes.

    Keys are drawn from ``numpy.random.default_rng(seed)``, ``M - R``
    symbols per stripe in stripe order.  ``keys`` (one vector per stripe)
    overrides sampling, which is how fixed worked examples are reproduced.
    """
    _check_compatible(params, code, placement)
    R = code.params.R
    secret = np.asarray(secret, dtype=np.int64).ravel()
    if secret.size == 0 or secret.size % R:
        raise ParameterError(f"secret length {secret.size} is not a positive multiple of R={R}")
    if secret.min() < 0 or secret.max() >= params.q:
        raise ParameterError(f"secret symbols must lie in [0, {params.q})")
    stripes = secret.size // R
    if keys is not None and len(keys) != stripes:
        raise ParameterError(f"got {len(keys)} key vectors for {stripes} stripes")

    rng = np.random.default_rng(seed)
    codewords = []
    for s in range(stripes):
        kv = rng.integers(0, params.q, size=code.params.n_keys, dtype=np.int64) if keys is None else keys[s]
        codewords.append(encode(code, secret[s * R : (s + 1) * R], kv))

    hist = SystemHistory(params=params, code=code, placement=placement, stripes=stripes, seed=seed)
    for v in range(1, params.n + 1):
        idx = sorted(placement.symbols(v))
        stored = [{i: int(cw[i - 1]) for i in idx} for cw in codewords]
        hist.nodes.append(PhysicalNode(id=v, vertex=v, stored=stored, downloaded=[dict(m) for m in stored]))
    log.debug("initialized n=%d stripes=%d seed=%s", params.n, stripes, seed)
    return hist


def fail_and_repair(history: SystemHistory, failed_vertex: int) -> RepairTranscript:
    """Kill the node at ``failed_vertex`` and rebuild it from the n - 1 survivors."""
    n = history.params.n
    dead = history.alive_at(failed_vertex)
    dead.alive = False
    new_id = len(history.nodes) + 1

    transfers = []
    downloaded: list[StripeMap] = [dict() for _ in range(history.stripes)]
    for helper in sorted(history.alive_nodes(), key=lambda nd: nd.vertex):
        idx = shared_symbol(helper.vertex, failed_vertex, n)
        for s in range(history.stripes):
            val = helper.stored[s][idx]
            downloaded[s][idx] = val
            transfers.append(Transfer(helper.id, helper.vertex, s, idx, val))

    # alpha = Gamma: everything downloaded is kept verbatim.
    stored = [dict(m) for m in downloaded]
    if stored != dead.stored:
        raise SecureRegenError(f"exact repair violated at vertex {failed_vertex}")
    node = PhysicalNode(
        id=new_id,
        vertex=failed_vertex,
        stored=stored,
        downloaded=downloaded,
        replacement=True,
    )
    history.nodes.append(node)
    history.failure_trace.append((dead.id, new_id))
    transcript = RepairTranscript(failed_vertex, dead.id, new_id, tuple(transfers))
    history.transcripts.append(transcript)
    log.debug("repaired vertex %d: v%d -> v%d", failed_vertex, dead.id, new_id)
    return transcript


def collector_read(history: SystemHistory, vertices) -> np.ndarray:
    """Decode the whole striped secret from the alive nodes at ``vertices``."""
    vertices = sorted(set(int(v) for v in vertices))
    k = history.params.k
    if len(vertices) != k:
        raise ParameterError(f"collector must contact exactly k={k} distinct vertices, got {len(vertices)}")
    nodes = [history.alive_at(v) for v in vertices]
    out = []
    for s in range(history.stripes):
        observed: dict[int, int] = {}
        for nd in nodes:
            observed.update(nd.stored[s])
        out.append(decode_collector(history.code, observed))
    return np.concatenate(out)


def run_trace(
    params: SystemParams,
    code: NestedMdsCode,
    placement: PlacementMap,
    secret,
    trace,
    seed: int | None = 0,
    *,
    keys=None,
) -> SystemHistory:
    trace = [int(v) for v in trace]
    for v in trace:
        if not 1 <= v <= params.n:
            raise ParameterError(f"trace vertex {v} out of range 1..{params.n}")
    hist = init_system(params, code, placement, secret, seed, keys=keys)
    for v in trace:
        fail_and_repair(hist, v)
    return hist


def random_trace(n: int, length: int, rng: np.random.Generator) -> list[int]:
    return [int(v) for v in rng.integers(1, n + 1, size=length)]


def all_collectors(history: SystemHistory):
    return combinations(range(1, history.params.n + 1), history.params.k)
