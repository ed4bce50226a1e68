from itertools import combinations

import numpy as np
import pytest

from secure_regen.coset_code import build_nested_mds, build_systematic_fixture, decode_collector
from secure_regen.dss_engine import (
    SystemHistory,
    SystemParams,
    collector_read,
    fail_and_repair,
    init_system,
    random_trace,
    run_trace,
)
from secure_regen.errors import ParameterError
from secure_regen.placement import PlacementMap

FIXTURE_KEYS = [[1, 1, 1, 1, 1]]


@pytest.fixture
def d43():
    params = SystemParams.secure(4, 3, 2, 3, 5)
    code = build_systematic_fixture(4, 3, 2, 5)
    return params, code, PlacementMap(4)


def test_secure_params():
    p = SystemParams.secure(5, 3, 1, 8, 11)
    assert (p.d, p.beta, p.alpha, p.gamma) == (4, 2, 8, 8)
    assert p.secure_rate == 10
    with pytest.raises(ParameterError, match="multiple"):
        SystemParams.secure(4, 3, 2, 4, 7)
    with pytest.raises(ParameterError):
        SystemParams(n=4, k=3, d=4, ell=1, beta=1, alpha=3, Gamma=3, q=7)
    with pytest.raises(ParameterError):
        SystemParams(n=4, k=3, d=3, ell=1, beta=2, alpha=3, Gamma=3, q=7)


def test_init_fixture_layout(d43):
    hist = init_system(*d43, [2], keys=FIXTURE_KEYS)
    assert hist.nodes[0].stored == [{1: 1, 2: 1, 3: 1}]
    assert hist.nodes[3].stored == [{3: 1, 5: 1, 6: 2}]
    assert all(nd.downloaded == nd.stored for nd in hist.nodes)


def test_init_zero(d43):
    placement = d43[2]
    code = build_nested_mds(4, 3, 2, 7)
    params = SystemParams.secure(4, 3, 2, 3, 7)
    hist = init_system(params, code, placement, [0], keys=[[0] * 5])
    assert all(v == 0 for nd in hist.nodes for m in nd.stored for v in m.values())


def test_striping():
    params = SystemParams.secure(4, 2, 1, 3, 7)
    code = build_nested_mds(4, 2, 1, 7)
    R = code.params.R
    secret = np.arange(2 * R) % 7
    hist = init_system(params, code, PlacementMap(4), secret, seed=3)
    assert hist.stripes == 2
    assert all(sum(len(m) for m in nd.stored) == 2 * 3 for nd in hist.nodes)
    for s in range(2):
        obs = {}
        for nd in hist.nodes[:2]:
            obs.update(nd.stored[s])
        assert decode_collector(code, obs).tolist() == secret[s * R : (s + 1) * R].tolist()


def test_init_errors(d43):
    params, code, placement = d43
    with pytest.raises(ParameterError, match="multiple"):
        init_system(SystemParams.secure(4, 2, 1, 3, 7), build_nested_mds(4, 2, 1, 7), placement, [1, 2, 3])
    with pytest.raises(ParameterError, match="mismatch"):
        init_system(SystemParams.secure(4, 3, 1, 3, 5), code, placement, [1])
    with pytest.raises(ParameterError):
        init_system(params, code, PlacementMap(5), [1])


def test_repair_fixture(d43):
    hist = init_system(*d43, [2], keys=FIXTURE_KEYS)
    tr = fail_and_repair(hist, 4)
    assert [(t.helper_vertex, t.index) for t in tr.transfers] == [(1, 3), (2, 5), (3, 6)]
    new = hist.node(5)
    assert new.vertex == 4 and new.replacement and new.alive
    assert new.stored == [{3: 1, 5: 1, 6: 2}] == hist.node(4).stored
    assert not hist.node(4).alive
    assert new.downloaded == new.stored
    assert hist.failure_trace == [(4, 5)]


def test_repair_twice_is_idempotent(d43):
    hist = init_system(*d43, [2], keys=FIXTURE_KEYS)
    fail_and_repair(hist, 2)
    fail_and_repair(hist, 2)
    assert hist.node(6).stored == hist.node(5).stored == hist.node(2).stored


def test_repair_unknown_vertex(d43):
    hist = init_system(*d43, [2], keys=FIXTURE_KEYS)
    with pytest.raises(ParameterError):
        fail_and_repair(hist, 9)


def test_random_trace_exact_repair_d53():
    params = SystemParams.secure(5, 3, 1, 4, 11)
    code = build_nested_mds(5, 3, 1, 11)
    rng = np.random.default_rng(7)
    hist = init_system(params, code, PlacementMap(5), rng.integers(0, 11, size=code.params.R), seed=7)
    snapshot = hist.layout()
    for v in random_trace(5, 20, rng):
        tr = fail_and_repair(hist, v)
        assert hist.layout() == snapshot
        assert tr.symbols_per_stripe() == {0: params.d * params.beta}
        assert len(hist.alive_nodes()) == 5


def test_collector_read_fixture(d43):
    hist = run_trace(*d43, [2], [4, 4, 1], keys=FIXTURE_KEYS)
    for B in combinations(range(1, 5), 3):
        assert collector_read(hist, B).tolist() == [2]
    with pytest.raises(ParameterError, match="exactly k"):
        collector_read(hist, [1, 2])
    with pytest.raises(ParameterError):
        collector_read(hist, [1, 2, 9])


def test_collector_read_d42():
    params = SystemParams.secure(4, 2, 1, 3, 7)
    code = build_nested_mds(4, 2, 1, 7)
    assert (code.params.M, code.params.R) == (5, 2)
    hist = run_trace(params, code, PlacementMap(4), [3, 5], [1, 2, 3], seed=11)
    for B in combinations(range(1, 5), 2):
        assert len(PlacementMap(4).union(B)) == 5
        assert collector_read(hist, B).tolist() == [3, 5]


def test_run_trace_counts_and_determinism(d43):
    assert len(run_trace(*d43, [2], [], keys=FIXTURE_KEYS).nodes) == 4
    assert len(run_trace(*d43, [2], [4], keys=FIXTURE_KEYS).nodes) == 5
    params = SystemParams.secure(4, 2, 1, 3, 7)
    code = build_nested_mds(4, 2, 1, 7)
    a = run_trace(params, code, PlacementMap(4), [1, 2, 3, 4], [1, 3, 3], seed=42)
    b = run_trace(params, code, PlacementMap(4), [1, 2, 3, 4], [1, 3, 3], seed=42)
    c = run_trace(params, code, PlacementMap(4), [1, 2, 3, 4], [1, 3, 3], seed=43)
    assert a.dumps() == b.dumps()
    assert a.dumps() != c.dumps()
    with pytest.raises(ParameterError):
        run_trace(params, code, PlacementMap(4), [1, 2], [5], seed=0)


def test_snapshot_round_trip(d43):
    hist = run_trace(*d43, [2], [4, 4, 1], keys=FIXTURE_KEYS)
    again = SystemHistory.from_json(hist.to_json())
    assert again.dumps() == hist.dumps()
    node = hist.to_json()["nodes"][4]
    assert set(node) >= {"id", "vertex", "alive", "stored", "downloaded"}
