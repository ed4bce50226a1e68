"""Passive eavesdropper: views, leakage, and exhaustive adversary sweeps.

Eve's budget counts physical nodes.  Watching a node gives her everything it
stores plus everything it downloaded while being repaired.

Two independent leakage measures are provided.  :func:`leakage` uses the
rank gap of the generator restricted to the observed columns.
:func:`brute_force_mutual_information` enumerates every (keys, secret) pair
and tabulates the joint distribution of the secret and the observation, so
it shares no linear algebra with the rank route.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np

from . import _kernels
from .coset_code import NestedMdsCode, leakage_rank
from .dss_engine import SystemHistory
from .errors import BudgetExceededError, ParameterError, SecureRegenError

BRUTE_FORCE_BUDGET = 10**7
SWEEP_BUDGET = 200_000


@dataclass(frozen=True)
class EveView:
    node_ids: tuple[int, ...]
    observed: tuple[dict, ...]  # one {index: value} map per stripe

    def indices(self, stripe: int = 0) -> frozenset[int]:
        if not self.observed:
            return frozenset()
        return frozenset(self.observed[stripe])

    @property
    def observed_count(self) -> int:
        return sum(len(m) for m in self.observed)


def eve_view(history: SystemHistory, node_ids, *, override_budget: bool = False) -> EveView:
    ids = tuple(sorted(set(int(i) for i in node_ids)))
    if len(ids) > history.params.ell and not override_budget:
        raise ParameterError(
            f"exceeds adversary budget: {len(ids)} nodes requested, ell={history.params.ell}"
        )
    observed = [dict() for _ in range(history.stripes)] if ids else []
    for i in ids:
        nd = history.node(i)
        for s in range(history.stripes):
            for src in (nd.stored[s], nd.downloaded[s]):
                for idx, val in src.items():
                    prev = observed[s].setdefault(idx, val)
                    if prev != val:
                        raise SecureRegenError(f"inconsistent history: symbol {idx} has two values")
    return EveView(ids, tuple(observed))


def leakage(code: NestedMdsCode, view: EveView) -> int:
    """Leaked q-ary symbols summed over stripes; 0 means perfect secrecy against this view."""
    return sum(leakage_rank(code, m.keys()) for m in view.observed)


def _log_q_uniform(counts: np.ndarray, q: int) -> Fraction:
    """log_q of the support size of a uniform count distribution.

    Raises when the distribution is not uniform or its support is not a
    power of q; for a linear code under uniform inputs neither can happen,
    so reaching the error means the enumeration itself is broken.
    """
    if counts.size == 0 or not np.all(counts == counts[0]):
        raise SecureRegenError("brute-force distribution is not uniform")
    support = int(counts.size)
    e = 0
    while support % q == 0:
        support //= q
        e += 1
    if support != 1:
        raise SecureRegenError(f"support size {counts.size} is not a power of {q}")
    return Fraction(e)


def _rows_entropy(rows: np.ndarray, q: int) -> Fraction:
    if rows.shape[1] == 0:
        return Fraction(0)
    if q ** rows.shape[1] < 2**62:
        keys = np.zeros(rows.shape[0], dtype=np.int64)
        for j in range(rows.shape[1]):
            keys = keys * q + rows[:, j]
        _, counts = np.unique(keys, return_counts=True)
    else:
        _, counts = np.unique(rows, axis=0, return_counts=True)
    return _log_q_uniform(counts, q)


class BruteForceOracle:
    """Enumerates the message space once, then answers leakage queries by counting."""

    def __init__(self, code: NestedMdsCode, *, budget: int = BRUTE_FORCE_BUDGET):
        p = code.params
        states = p.q**p.M
        if states > budget:
            raise BudgetExceededError(
                f"instance too large for brute force: q^M = {p.q}^{p.M} = {states} > {budget}"
            )
        self.code = code
        msgs, self.words = _kernels.enumerate_codewords(code.G, p.q)
        self.secrets = msgs[:, p.n_keys :]
        self.h_secret = _rows_entropy(self.secrets, p.q)

    def mutual_information(self, indices) -> Fraction:
        """I(S; X_indices) = H(S) + H(X_I) - H(S, X_I), all in log-q units."""
        cols = sorted({int(i) - 1 for i in indices})
        if cols and (cols[0] < 0 or cols[-1] >= self.code.params.theta):
            raise ParameterError(f"indices must lie in 1..{self.code.params.theta}")
        obs = self.words[:, cols]
        q = self.code.q
        h_obs = _rows_entropy(obs, q)
        h_joint = _rows_entropy(np.concatenate([self.secrets, obs], axis=1), q)
        return self.h_secret + h_obs - h_joint


def brute_force_mutual_information(code: NestedMdsCode, indices, *, budget: int = BRUTE_FORCE_BUDGET) -> Fraction:
    return BruteForceOracle(code, budget=budget).mutual_information(indices)


@dataclass
class SweepResult:
    max_leakage: int
    witness: tuple[int, ...]
    subsets_checked: int
    mode: str  # "exhaustive" | "sampled"

    def to_json(self) -> dict:
        return {
            "max_leakage": self.max_leakage,
            "witness": list(self.witness),
            "subsets_checked": self.subsets_checked,
            "mode": self.mode,
            "perfect_secrecy": self.max_leakage == 0,
        }


def sweep_all_eves(
    history: SystemHistory,
    ell: int | None = None,
    *,
    budget: int = SWEEP_BUDGET,
    sample: bool = False,
    samples: int = 10_000,
    seed: int = 0,
) -> SweepResult:
    """Worst-case leakage over every ell-subset of physical nodes ever present.

    Ties are broken toward the lexicographically smallest witness so the
    result does not depend on evaluation order.  When the number of subsets
    exceeds ``budget`` a :class:`BudgetExceededError` is raised unless
    ``sample`` is set, in which case ``samples`` random subsets are tried and
    the result is marked ``"sampled"``.
    """
    ell = history.params.ell if ell is None else int(ell)
    ids = [nd.id for nd in history.nodes]
    if ell <= 0:
        return SweepResult(0, (), 0, "exhaustive")
    ell = min(ell, len(ids))
    total = comb(len(ids), ell)
    if total <= budget:
        subsets = combinations(ids, ell)
        mode = "exhaustive"
    elif sample:
        rng = np.random.default_rng(seed)
        subsets = (tuple(sorted(rng.choice(ids, size=ell, replace=False).tolist())) for _ in range(samples))
        mode = "sampled"
    else:
        raise BudgetExceededError(
            f"C({len(ids)}, {ell}) = {total} subsets exceeds sweep budget {budget}; use sampling mode"
        )

    cache: dict[tuple, int] = {}
    best, witness, checked = -1, (), 0
    for subset in subsets:
        view = eve_view(history, subset, override_budget=True)
        key = tuple(frozenset(m) for m in view.observed)
        if key not in cache:
            cache[key] = leakage(history.code, view)
        leak = cache[key]
        checked += 1
        if leak > best or (leak == best and subset < witness):
            best, witness = leak, tuple(subset)
    return SweepResult(max(best, 0), witness, checked, mode)
