"""Secure exact-repair regenerating codes for distributed storage with eavesdroppers."""

__version__ = "0.1.0"

from .adversary import EveView, brute_force_mutual_information, eve_view, leakage, sweep_all_eves
from .analysis import (
    build_flow_graph,
    bw_limited_capacity,
    min_cut,
    secrecy_upper_bound,
    unsecure_capacity,
)
from .coset_code import (
    CodeParams,
    NestedMdsCode,
    build_nested_mds,
    build_systematic_fixture,
    decode_collector,
    encode,
    leakage_rank,
)
from .dss_engine import SystemHistory, SystemParams, collector_read, fail_and_repair, init_system, run_trace
from .errors import (
    BudgetExceededError,
    DecodingError,
    FieldError,
    ParameterError,
    SecureRegenError,
    SingularMatrixError,
)
from .field import FieldElement, PrimeField, ff_inv, mat_rank, mat_solve
from .placement import PlacementMap, edge_index, node_symbols, shared_symbol
