"""Outer nested MDS coset code.

The generator ``G`` (M x theta) is split into key rows ``G_K`` (the top
M - R rows) and secret rows ``G_S`` (the bottom R rows).  A codeword is
``X = K @ G_K + S @ G_S``; the secret picks a coset of the key code.

Leakage of an observed coordinate set ``I`` is measured as
``rank(G[:, I]) - rank(G_K[:, I])``, which is the mutual information between
S and X_I in q-ary units when S and K are uniform.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .errors import DecodingError, ParameterError, SingularMatrixError
from .field import check_modulus, mat_mul, mat_rank, mat_solve


def capacity_sum(n: int, first: int, last: int) -> int:
    """sum_{i=first..last} (n - i); zero for an empty range."""
    return sum(n - i for i in range(first, last + 1))


@dataclass(frozen=True)
class CodeParams:
    n: int
    k: int
    ell: int
    q: int
    theta: int
    M: int
    R: int
    mu: int

    @classmethod
    def for_system(cls, n: int, k: int, ell: int, q: int, *, secret_rows: int | None = None) -> "CodeParams":
        """Derive theta, M, R, mu.  ``secret_rows`` overrides R (for negative controls only)."""
        if not (0 <= ell < k <= n):
            raise ParameterError(f"parameter violation: need 0 <= ell < k <= n, got n={n} k={k} ell={ell}")
        if n < 2:
            raise ParameterError("parameter violation: n must be at least 2")
        q = check_modulus(q)
        theta = n * (n - 1) // 2
        M = capacity_sum(n, 1, k)
        R = capacity_sum(n, ell + 1, k) if secret_rows is None else int(secret_rows)
        if not 1 <= R <= M:
            raise ParameterError(f"parameter violation: R={R} must lie in 1..{M}")
        return cls(n=n, k=k, ell=ell, q=q, theta=theta, M=M, R=R, mu=M - R)

    @property
    def n_keys(self) -> int:
        return self.M - self.R

    @property
    def secure(self) -> bool:
        """True when R matches the secrecy-capacity value for ell."""
        return self.R == capacity_sum(self.n, self.ell + 1, self.k)


@dataclass(frozen=True, eq=False)
class NestedMdsCode:
    params: CodeParams
    G: np.ndarray
    construction: str = "vandermonde"

    def __post_init__(self):
        p = self.params
        if self.G.shape != (p.M, p.theta):
            raise ParameterError(f"generator shape {self.G.shape} != ({p.M}, {p.theta})")
        self.G.setflags(write=False)

    @property
    def q(self) -> int:
        return self.params.q

    @property
    def gk_rows(self) -> np.ndarray:
        return self.G[: self.params.n_keys]

    @property
    def gs_rows(self) -> np.ndarray:
        return self.G[self.params.n_keys :]

    def __eq__(self, other):
        return (
            isinstance(other, NestedMdsCode)
            and other.params == self.params
            and np.array_equal(other.G, self.G)
        )

    def __hash__(self):
        return hash((self.params, self.G.tobytes()))

    def to_json(self) -> dict:
        p = self.params
        return {
            "n": p.n,
            "k": p.k,
            "ell": p.ell,
            "q": p.q,
            "theta": p.theta,
            "M": p.M,
            "R": p.R,
            "construction": self.construction,
            "generator": [int(v) for v in self.G.ravel()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "NestedMdsCode":
        params = CodeParams.for_system(data["n"], data["k"], data["ell"], data["q"], secret_rows=data["R"])
        if params.M != data["M"] or params.theta != data["theta"]:
            raise ParameterError("serialized code has inconsistent theta/M")
        G = np.asarray(data["generator"], dtype=np.int64).reshape(params.M, params.theta)
        if G.min(initial=0) < 0 or G.max(initial=0) >= params.q:
            raise ParameterError("generator entries out of field range")
        return cls(params, G, data.get("construction", "vandermonde"))


def vandermonde(rows: int, points, q: int) -> np.ndarray:
    """V[i][j] = points[j] ** i mod q (0 ** 0 == 1)."""
    points = [int(a) % q for a in points]
    V = np.empty((rows, len(points)), dtype=np.int64)
    for j, a in enumerate(points):
        acc = 1
        for i in range(rows):
            V[i, j] = acc
            acc = (acc * a) % q
    return V


def build_nested_mds(n: int, k: int, ell: int, q: int, *, secret_rows: int | None = None) -> NestedMdsCode:
    """Vandermonde nested code on evaluation points 1..theta.

    Any prefix of Vandermonde rows over distinct points is MDS, so both the
    full generator and its key rows are MDS without further checking.
    """
    params = CodeParams.for_system(n, k, ell, q, secret_rows=secret_rows)
    if params.q < params.theta:
        raise ParameterError(f"field too small: q={params.q} < theta={params.theta}")
    G = vandermonde(params.M, range(1, params.theta + 1), params.q)
    return NestedMdsCode(params, G, "vandermonde")


def build_systematic_fixture(n: int, k: int, ell: int, q: int) -> NestedMdsCode:
    """Single-parity code: keys stored in the clear, last symbol = S + sum(keys).

    Only defined when the collector sees every symbol (theta == M, i.e.
    k = n - 1) and exactly one secret symbol is stored (R == 1).
    """
    params = CodeParams.for_system(n, k, ell, q)
    if params.theta != params.M or params.R != 1:
        raise ParameterError(
            f"systematic fixture needs theta == M and R == 1, got theta={params.theta} M={params.M} R={params.R}"
        )
    t = params.theta
    G = np.zeros((t, t), dtype=np.int64)
    G[: t - 1, : t - 1] = np.eye(t - 1, dtype=np.int64)
    G[: t - 1, t - 1] = 1
    G[t - 1, t - 1] = 1
    return NestedMdsCode(params, G, "systematic")


def encode(code: NestedMdsCode, secret, keys) -> np.ndarray:
    p = code.params
    s = np.asarray(secret, dtype=np.int64).ravel()
    kv = np.asarray(keys, dtype=np.int64).ravel()
    if s.shape[0] != p.R:
        raise ParameterError(f"secret has {s.shape[0]} symbols, code expects R={p.R}")
    if kv.shape[0] != p.n_keys:
        raise ParameterError(f"key vector has {kv.shape[0]} symbols, code expects M-R={p.n_keys}")
    msg = np.concatenate([kv, s]) % p.q
    return mat_mul(msg, code.G, p.q)


def _dedupe(observed) -> dict[int, int]:
    items = observed.items() if isinstance(observed, dict) else observed
    seen: dict[int, int] = {}
    for idx, val in items:
        idx = int(idx)
        val = int(val)
        if idx in seen and seen[idx] != val:
            raise DecodingError(f"corrupt observation: index {idx} seen with values {seen[idx]} and {val}")
        seen[idx] = val
    return seen


def decode_message(code: NestedMdsCode, observed) -> np.ndarray:
    """Recover the full message [K | S] from at least M observed coordinates."""
    p = code.params
    seen = _dedupe(observed)
    for idx in seen:
        if not 1 <= idx <= p.theta:
            raise DecodingError(f"observed index {idx} outside 1..{p.theta}")
    if len(seen) < p.M:
        raise DecodingError(f"insufficient observations: {len(seen)} distinct indices, need M={p.M}")
    cols = sorted(seen)[: p.M]
    A = code.G[:, [c - 1 for c in cols]].T
    y = np.array([seen[c] for c in cols], dtype=np.int64) % p.q
    try:
        return mat_solve(A, y, p.q)
    except SingularMatrixError as exc:  # pragma: no cover - impossible for an MDS generator
        raise DecodingError("observed columns are not an information set") from exc


def decode_collector(code: NestedMdsCode, observed) -> np.ndarray:
    """The secret part S of the decoded message."""
    return decode_message(code, observed)[code.params.n_keys :]


def _columns(indices) -> list[int]:
    return sorted({int(i) - 1 for i in indices})


def leakage_rank(code: NestedMdsCode, indices) -> int:
    cols = _columns(indices)
    if not cols:
        return 0
    if cols[0] < 0 or cols[-1] >= code.params.theta:
        raise ParameterError(f"indices must lie in 1..{code.params.theta}")
    full = mat_rank(code.G[:, cols], code.q)
    keys = mat_rank(code.gk_rows[:, cols], code.q) if code.params.n_keys else 0
    return full - keys


def iter_column_subsets(theta: int, size: int, *, exhaustive_limit: int = 10**5, samples: int = 1000, rng=None):
    """Yield column subsets of a given size; all of them if few enough, else a random sample."""
    if comb(theta, size) <= exhaustive_limit:
        yield from combinations(range(theta), size)
        return
    rng = rng if rng is not None else np.random.default_rng(0)
    for _ in range(samples):
        yield tuple(sorted(rng.choice(theta, size=size, replace=False).tolist()))


def check_mds(matrix: np.ndarray, q: int, **kw) -> bool:
    """Every dim x dim column submatrix is invertible (exhaustive or sampled)."""
    dim, length = matrix.shape
    if dim == 0:
        return True
    for cols in iter_column_subsets(length, dim, **kw):
        if mat_rank(matrix[:, list(cols)], q) != dim:
            return False
    return True
