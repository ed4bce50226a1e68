"""``secure-regen`` command line.

Every command prints one JSON document (stdout, or ``--out``).  Exit codes:
0 success, 2 validation error, 3 a ``verify`` property failed, 4 I/O error.
Set ``SECURE_REGEN_LOG=INFO`` (or DEBUG) for progress on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .adversary import BruteForceOracle, eve_view, leakage, sweep_all_eves, SWEEP_BUDGET
from .analysis import bounds_report
from .checks import run_all
from .coset_code import build_nested_mds, build_systematic_fixture
from .dss_engine import SystemHistory, SystemParams, run_trace
from .errors import BudgetExceededError, SecureRegenError
from .field import next_prime
from .placement import PlacementMap
from .rlnc_baseline import DEFAULT_Q, run_trials

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_PROPERTY = 3
EXIT_IO = 4

log = logging.getLogger("secure_regen")


class ValidationError(SecureRegenError):
    pass


def _setup_logging() -> None:
    level = os.environ.get("SECURE_REGEN_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def _int_list(text: str) -> list[int]:
    text = text.strip().strip("[]")
    return [int(t) for t in text.replace(" ", ",").split(",") if t]


def parse_secret(text: str, q: int) -> list[int]:
    """Comma-separated hex field elements, e.g. ``"2"`` or ``"0x1f,03"``; ``@path`` reads a file."""
    if text.startswith("@"):
        text = Path(text[1:]).read_text()
    try:
        vals = [int(t, 16) for t in text.replace("\n", ",").replace(" ", ",").split(",") if t.strip()]
    except ValueError as exc:
        raise ValidationError(f"secret is not a list of hex values: {exc}") from exc
    bad = [v for v in vals if not 0 <= v < q]
    if bad:
        raise ValidationError(f"secret values {bad} are not elements of F_{q}")
    return vals


def _load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


class Config:
    """Resolved run configuration: CLI flags win over a trace file, which wins over defaults."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        file_cfg: dict = {}
        self.trace: list[int] = []
        trace_arg = getattr(args, "trace", None)
        if trace_arg:
            if os.path.exists(trace_arg):
                file_cfg = _load_json(trace_arg)
                self.trace = [int(v) for v in file_cfg.get("trace", [])]
            else:
                try:
                    self.trace = _int_list(trace_arg)
                except ValueError as exc:
                    raise ValidationError(f"--trace is neither a file nor a vertex list: {trace_arg}") from exc
        fp = file_cfg.get("params", {})

        def pick(name, *aliases):
            v = getattr(args, name, None)
            if v is not None:
                return v
            for key in (name, *aliases):
                if key in fp:
                    return fp[key]
            return None

        self.n = pick("n")
        self.k = pick("k")
        self.ell = pick("ell")
        if None in (self.n, self.k, self.ell):
            raise ValidationError("-n, -k and -l/--ell are required (on the command line or in the trace file)")
        self.Gamma = pick("gamma", "Gamma")
        self.d = pick("d")
        self.beta = pick("beta")
        self.alpha = pick("alpha")
        if self.Gamma is None:
            self.Gamma = (self.n - 1) * (self.beta or 1)
        self.q = pick("q")
        seed = getattr(args, "seed", None)
        self.seed = seed if seed is not None else int(file_cfg.get("seed", 0))
        self.construction = getattr(args, "code", "vandermonde")

    def params(self) -> SystemParams:
        n = self.n
        if self.q is None:
            self.q = next_prime(n * (n - 1) // 2 + 1)
        if self.d is None and self.beta is None and self.alpha is None:
            return SystemParams.secure(n, self.k, self.ell, self.Gamma, self.q)
        d = self.d if self.d is not None else n - 1
        beta = self.beta if self.beta is not None else self.Gamma // d
        alpha = self.alpha if self.alpha is not None else self.Gamma
        return SystemParams(n=n, k=self.k, d=d, ell=self.ell, beta=beta, alpha=alpha, Gamma=self.Gamma, q=self.q)

    def code(self, params: SystemParams):
        if self.construction == "systematic":
            return build_systematic_fixture(params.n, params.k, params.ell, params.q)
        return build_nested_mds(params.n, params.k, params.ell, params.q)

    def secret(self, params: SystemParams, R: int) -> list[int]:
        text = getattr(self.args, "secret", None)
        if text:
            return parse_secret(text, params.q)
        stripes = getattr(self.args, "stripes", None) or params.beta
        rng = np.random.default_rng([self.seed, 0x5EC])
        return [int(v) for v in rng.integers(0, params.q, size=R * stripes)]

    def history(self) -> SystemHistory:
        hist_path = getattr(self.args, "history", None)
        if hist_path:
            return SystemHistory.from_json(_load_json(hist_path))
        params = self.params()
        code = self.code(params)
        return run_trace(params, code, PlacementMap(params.n), self.secret(params, code.params.R), self.trace, self.seed)


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_params(args) -> int:
    cfg = Config(args)
    _emit(bounds_report(cfg.n, cfg.k, cfg.ell, cfg.Gamma, d=cfg.d, alpha=cfg.alpha, beta=cfg.beta), args.out)
    return EXIT_OK


def cmd_build(args) -> int:
    cfg = Config(args)
    params = cfg.params()
    code = cfg.code(params)
    _emit({"params": params.to_json(), "code": code.to_json(), "placement": PlacementMap(params.n).to_json()}, args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    hist = Config(args).history()
    _emit(hist.to_json(), args.out)
    return EXIT_OK


def _history_for_attack(args) -> SystemHistory:
    if getattr(args, "history", None):
        return SystemHistory.from_json(_load_json(args.history))
    return Config(args).history()


def cmd_attack(args) -> int:
    hist = _history_for_attack(args)
    view = eve_view(hist, _int_list(args.nodes), override_budget=args.override_budget)
    if args.bruteforce:
        oracle = BruteForceOracle(hist.code)
        leak = sum(oracle.mutual_information(m.keys()) for m in view.observed)
        leak = int(leak) if leak.denominator == 1 else str(leak)
        which = "bruteforce"
    else:
        leak, which = leakage(hist.code, view), "rank"
    _emit({
        "node_ids": list(view.node_ids),
        "observed_count": view.observed_count,
        "leakage_qary": leak,
        "oracle": which,
        "perfect_secrecy": leak == 0,
    }, args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    hist = _history_for_attack(args)
    ell = args.ell if args.ell is not None else hist.params.ell
    res = sweep_all_eves(hist, ell, budget=args.budget, sample=True, samples=args.samples, seed=args.seed or 0)
    _emit(res.to_json(), args.out)
    return EXIT_OK


def cmd_rlnc(args) -> int:
    _emit(run_trials(args.trials, args.q or DEFAULT_Q, args.seed or 0), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = Config(args)
    params = cfg.params()
    code = cfg.code(params)
    results = run_all(params, code, seed=cfg.seed, bruteforce=args.bruteforce)
    passed = all(r.passed for r in results)
    _emit({"passed": passed, "checks": [r.to_json() for r in results]}, args.out)
    return EXIT_OK if passed else EXIT_PROPERTY


def _system_flags(p: argparse.ArgumentParser, *, required: bool = False) -> None:
    p.add_argument("-n", type=int, help="number of active storage nodes")
    p.add_argument("-k", type=int, help="nodes contacted by a data collector")
    p.add_argument("-d", type=int, help="repair degree (default n-1)")
    p.add_argument("-l", "--ell", type=int, help="nodes Eve may observe")
    p.add_argument("--beta", type=int)
    p.add_argument("--alpha", type=int)
    p.add_argument("--gamma", type=int, help="repair bandwidth cap Gamma (default n-1)")
    p.add_argument("-q", type=int, help="field prime (default: smallest prime > theta)")
    p.add_argument("--seed", type=int)
    p.add_argument("--stripes", type=int)
    p.add_argument("--trace", help="JSON trace file, or inline vertex list like 4,4,1")
    p.add_argument("--secret", help="hex field elements, comma separated, or @file")
    p.add_argument("--code", choices=("vandermonde", "systematic"), default="vandermonde")
    p.add_argument("--out", help="write JSON here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="secure-regen", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="capacity bounds for a parameter set")
    _system_flags(p)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("build", help="emit the nested MDS generator and placement")
    _system_flags(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("simulate", help="replay a failure trace, emit the history snapshot")
    _system_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("attack", help="leakage for one eavesdropper node set")
    _system_flags(p)
    p.add_argument("--history", help="history snapshot from `simulate`")
    p.add_argument("--nodes", required=True, help="physical node ids, e.g. 5,6")
    p.add_argument("--bruteforce", action="store_true", help="use the enumeration oracle")
    p.add_argument("--override-budget", action="store_true", help="allow more than ell nodes")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("sweep", help="worst-case leakage over every ell-subset of physical nodes")
    _system_flags(p)
    p.add_argument("--history")
    p.add_argument("--budget", type=int, default=SWEEP_BUDGET, help="max subsets before sampling")
    p.add_argument("--samples", type=int, default=10_000)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("rlnc", help="random network coding baseline attack trials")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("-q", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_rlnc)

    p = sub.add_parser("verify", help="run the invariant suite; exit 3 on any failure")
    _system_flags(p)
    p.add_argument("--bruteforce", action="store_true", help="include the enumeration oracle check")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SecureRegenError, BudgetExceededError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (OSError, json.JSONDecodeError) as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (KeyError, TypeError) as exc:
        print(f"error: malformed input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
