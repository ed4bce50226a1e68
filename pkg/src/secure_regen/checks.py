"""Invariant suite behind ``secure-regen verify``.

Each check returns a :class:`CheckResult`; nothing here raises on a failed
property, so a run always reports every check.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .adversary import BruteForceOracle, sweep_all_eves
from .analysis import (
    bw_limited_capacity,
    empirical_secrecy_bound,
    secrecy_upper_bound,
    unsecure_capacity,
    worst_case_min_cut,
)
from .coset_code import NestedMdsCode, check_mds, decode_collector, encode, leakage_rank
from .dss_engine import SystemParams, all_collectors, collector_read, fail_and_repair, init_system, random_trace
from .errors import BudgetExceededError
from .placement import PlacementMap

log = logging.getLogger(__name__)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def check_placement(placement: PlacementMap, k: int, ell: int) -> CheckResult:
    n = placement.n
    for idx in range(1, placement.theta + 1):
        holders = [v for v in range(1, n + 1) if idx in placement.symbols(v)]
        if len(holders) != 2:
            return CheckResult("placement", False, f"symbol {idx} on {len(holders)} nodes")
    for u, v in combinations(range(1, n + 1), 2):
        if len(placement.symbols(u) & placement.symbols(v)) != 1:
            return CheckResult("placement", False, f"nodes {u},{v} do not share exactly one symbol")
    M = sum(n - i for i in range(1, k + 1))
    mu = sum(n - i for i in range(1, ell + 1))
    for size, want in ((k, M), (ell, mu)):
        for B in combinations(range(1, n + 1), size):
            if len(placement.union(B)) != want:
                return CheckResult("placement", False, f"union over {B} has wrong size")
    return CheckResult("placement", True, f"n={n} theta={placement.theta}")


def check_mds_property(code: NestedMdsCode) -> CheckResult:
    p = code.params
    mode = "exhaustive" if comb(p.theta, p.M) <= 10**5 else "sampled"
    ok = check_mds(code.G, p.q) and check_mds(code.gk_rows, p.q)
    return CheckResult("mds", ok, f"{mode} over C({p.theta},{p.M}) and C({p.theta},{p.n_keys})")


def check_round_trip(code: NestedMdsCode, rng: np.random.Generator, trials: int = 20) -> CheckResult:
    p = code.params
    subsets = list(combinations(range(1, p.theta + 1), p.M))
    if len(subsets) > 200:
        subsets = [tuple(sorted(rng.choice(np.arange(1, p.theta + 1), p.M, replace=False).tolist())) for _ in range(200)]
    for _ in range(trials):
        s = rng.integers(0, p.q, size=p.R)
        kv = rng.integers(0, p.q, size=p.n_keys)
        x = encode(code, s, kv)
        for cols in subsets:
            got = decode_collector(code, {c: int(x[c - 1]) for c in cols})
            if not np.array_equal(got, s):
                return CheckResult("decode_round_trip", False, f"subset {cols}")
    return CheckResult("decode_round_trip", True, f"{trials} messages x {len(subsets)} subsets")


def check_small_sets_secret(code: NestedMdsCode, limit: int = 20_000) -> CheckResult:
    p = code.params
    total = comb(p.theta, p.mu)
    rng = np.random.default_rng(1)
    if total <= limit:
        subsets = combinations(range(1, p.theta + 1), p.mu)
    else:
        subsets = (rng.choice(np.arange(1, p.theta + 1), p.mu, replace=False) for _ in range(limit))
    for cols in subsets:
        if leakage_rank(code, cols) != 0:
            return CheckResult("secrecy_at_mu", False, f"columns {tuple(cols)} leak")
    return CheckResult("secrecy_at_mu", True, f"all size-{p.mu} subsets" if total <= limit else f"{limit} sampled")


def check_oracle_equivalence(code: NestedMdsCode, max_size: int | None = None) -> CheckResult:
    try:
        oracle = BruteForceOracle(code)
    except BudgetExceededError as exc:
        return CheckResult("oracle_equivalence", False, str(exc))
    theta = code.params.theta
    sizes = range(0, theta + 1) if max_size is None else range(0, min(max_size, theta) + 1)
    count = 0
    for r in sizes:
        for cols in combinations(range(1, theta + 1), r):
            if oracle.mutual_information(cols) != leakage_rank(code, cols):
                return CheckResult("oracle_equivalence", False, f"mismatch on {cols}")
            count += 1
    return CheckResult("oracle_equivalence", True, f"{count} subsets, {code.q}^{code.params.M} states")


def check_dynamics(params: SystemParams, code: NestedMdsCode, seed: int, traces: int = 10, length: int = 20) -> list[CheckResult]:
    placement = PlacementMap(params.n)
    rng = np.random.default_rng(seed)
    repair_ok, collect_ok, bw_ok, secrecy_ok = True, True, True, True
    worst = 0
    for t in range(traces):
        secret = rng.integers(0, params.q, size=code.params.R * params.beta)
        hist = init_system(params, code, placement, secret, seed + t)
        initial = hist.layout()
        trace = random_trace(params.n, length, rng)
        for v in trace:
            tr = fail_and_repair(hist, v)
            if hist.layout() != initial:
                repair_ok = False
            if any(c != params.d for c in tr.symbols_per_stripe().values()):
                bw_ok = False
        for B in all_collectors(hist):
            if not np.array_equal(collector_read(hist, B), secret):
                collect_ok = False
        try:
            res = sweep_all_eves(hist, params.ell, sample=True, samples=2000, seed=seed + t)
            worst = max(worst, res.max_leakage)
        except BudgetExceededError:  # pragma: no cover - sample=True never raises
            secrecy_ok = False
    secrecy_ok = secrecy_ok and worst == 0
    return [
        CheckResult("exact_repair", repair_ok, f"{traces} traces of length {length}"),
        CheckResult("repair_bandwidth", bw_ok, f"d*beta = {params.d} symbols per stripe"),
        CheckResult("reconstruction", collect_ok, "all C(n,k) collectors after each trace"),
        CheckResult("sweep_secrecy", secrecy_ok, f"max leakage {worst}"),
    ]


def check_bounds(params: SystemParams) -> list[CheckResult]:
    n, k, d, a, b, ell = params.n, params.k, params.d, params.alpha, params.beta, params.ell
    thm1 = secrecy_upper_bound(k, d, a, b, ell, n)
    thm2 = bw_limited_capacity(n, k, ell, params.Gamma)
    cap = unsecure_capacity(k, d, a, b, n)
    out = [
        CheckResult("thm1_equals_thm2", thm1 == thm2 == params.secure_rate, f"{thm1} vs {thm2} vs rate {params.secure_rate}"),
        CheckResult("bound_below_capacity", thm1 <= cap and ((thm1 == cap) == (ell == 0)), f"{thm1} <= {cap}"),
        CheckResult("min_cut_matches_capacity", worst_case_min_cut(n, k, d, a, b) == cap, f"capacity {cap}"),
        CheckResult("empirical_bound", empirical_secrecy_bound(n, k, d, a, b, ell) == thm1, f"bound {thm1}"),
    ]
    return out


def run_all(params: SystemParams, code: NestedMdsCode, *, seed: int = 0, bruteforce: bool = False) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    results = [
        check_placement(PlacementMap(params.n), params.k, params.ell),
        check_mds_property(code),
        check_round_trip(code, rng),
        check_small_sets_secret(code),
    ]
    if bruteforce:
        results.append(check_oracle_equivalence(code, None if code.params.theta <= 10 else 3))
    results.extend(check_dynamics(params, code, seed))
    results.extend(check_bounds(params))
    for r in results:
        log.info("%-26s %s  %s", r.name, "PASS" if r.passed else "FAIL", r.detail)
    return results
