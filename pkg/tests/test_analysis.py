from fractions import Fraction

import pytest

from secure_regen.analysis import (
    bounds_report,
    build_flow_graph,
    bw_limited_capacity,
    empirical_secrecy_bound,
    min_cut,
    secrecy_upper_bound,
    unsecure_capacity,
    worst_case_min_cut,
)
from secure_regen.errors import ParameterError


def test_secrecy_upper_bound_examples():
    assert secrecy_upper_bound(k=3, d=3, alpha=3, beta=1, ell=2, n=4) == 1
    assert secrecy_upper_bound(3, 3, 3, 1, 0, n=4) == unsecure_capacity(3, 3, 3, 1, n=4)
    assert secrecy_upper_bound(k=3, d=4, alpha=4, beta=1, ell=1, n=5) == 5
    with pytest.raises(ParameterError):
        secrecy_upper_bound(3, 3, 3, 1, 3, n=4)
    with pytest.raises(ParameterError):
        secrecy_upper_bound(3, 4, 3, 1, 1, n=4)


def test_bw_limited_examples():
    assert bw_limited_capacity(4, 3, 2, 3) == 1
    assert bw_limited_capacity(4, 3, 0, 3) == 6
    assert bw_limited_capacity(5, 3, 1, 8) == 10
    assert bw_limited_capacity(4, 3, 2, 2) == Fraction(2, 3)
    with pytest.raises(ParameterError):
        bw_limited_capacity(4, 4, 1, 3)


def test_unsecure_capacity_examples():
    assert unsecure_capacity(k=3, d=3, alpha=3, beta=1) == 6
    assert unsecure_capacity(k=2, d=3, alpha=2, beta=1) == 4
    assert unsecure_capacity(k=1, d=3, alpha=2, beta=1) == 2
    assert unsecure_capacity(k=1, d=3, alpha=5, beta=1) == 3


def test_bounds_grid():
    for n in range(3, 9):
        for k in range(1, n):
            for ell in range(k):
                for beta in (1, 2):
                    d, alpha = n - 1, (n - 1) * beta
                    ub = secrecy_upper_bound(k, d, alpha, beta, ell, n)
                    cap = unsecure_capacity(k, d, alpha, beta, n)
                    assert ub == bw_limited_capacity(n, k, ell, alpha)
                    assert ub <= cap and ((ub == cap) == (ell == 0))


def test_flow_graph_fig2():
    fg = build_flow_graph(4, 3, 2, 1, [1], [[2, 4]])
    g = fg.graph
    preds = [u for u in g.predecessors("in5")]
    assert sorted(preds) == ["out2", "out3", "out4"]
    assert all(g["out%d" % h]["in5"]["capacity"] == 1 for h in (2, 3, 4))
    assert g["in5"]["out5"]["capacity"] == 2
    assert min_cut(fg) == 4


def test_flow_graph_empty_trace():
    fg = build_flow_graph(4, 3, 2, 1, [], [[1, 3]])
    assert fg.replacements == []
    assert min_cut(fg, "DC0") == 4


def test_flow_graph_worst_case_topology():
    n, k = 6, 4
    fg = build_flow_graph(n, n - 1, 3, 1, list(range(1, k + 1)), [list(range(1, k + 1))])
    for i in range(2, k + 1):
        preds = set(fg.graph.predecessors(f"in{n + i}"))
        assert {f"out{n + j}" for j in range(1, i)} <= preds
        assert len(preds) == n - 1
    assert fg.collectors["DC0"] == tuple(range(n + 1, n + k + 1))


def test_flow_graph_explicit_helpers_and_errors():
    fg = build_flow_graph(5, 2, 3, 1, [(1, [2, 3])], [[1, 2]])
    assert fg.replacements == [(6, 1, (2, 3))]
    with pytest.raises(ParameterError):
        build_flow_graph(5, 2, 3, 1, [(1, [2, 1])])
    with pytest.raises(ParameterError):
        build_flow_graph(5, 2, 3, 1, [7])
    with pytest.raises(ParameterError):
        build_flow_graph(5, 2, 3, 1, [], [[9]])
    with pytest.raises(ParameterError):
        min_cut(fg, "DC5")


def test_min_cut_matches_capacity_grid():
    for n in range(3, 9):
        for k in range(1, n):
            for d in range(k, n):
                for alpha in range(1, d + 1):
                    for beta in (1, 2):
                        assert worst_case_min_cut(n, k, d, alpha, beta) == unsecure_capacity(k, d, alpha, beta, n)


def test_empirical_bound_matches_closed_form():
    for n in range(3, 8):
        for k in range(1, n):
            for ell in range(k):
                for d in range(k, n):
                    assert empirical_secrecy_bound(n, k, d, 2, 1, ell) == secrecy_upper_bound(k, d, 2, 1, ell, n)


def test_min_cut_monotone_under_capacity_decrease():
    fg = build_flow_graph(5, 4, 4, 1, [1, 2, 3], [[1, 2, 3]])
    base = min_cut(fg)
    for u, v, data in list(fg.graph.edges(data=True)):
        if data["capacity"] < fg.infinity and data["capacity"] > 0:
            data["capacity"] -= 1
            assert min_cut(fg) <= base
            data["capacity"] += 1


def test_bounds_report_d43():
    rep = bounds_report(4, 3, 2, 3)
    assert (rep["thm1_bound"], rep["thm2_capacity"], rep["M"], rep["R"], rep["mu"], rep["theta"]) == (1, 1, 6, 1, 5, 6)
    assert rep["unsecure_capacity"] == 6
    assert rep["static_capacity"] == 3
