"""Command-line interface.

Subcommands: bounds, oracle, figure1, dqc1, channel, xstate, selftest, bench.
Exit codes: 0 success, 1 property failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import kernels
from .benchmark import format_benchmark, run_benchmark
from .bounds import (
    DqcParams,
    accessible_info_bounds,
    compute_bounds,
    discord_upper_weak,
    dqc1_bounds,
    x_state_discord,
)
from .correlation import lorentz_spectrum, q_matrix
from .errors import DiscordBoundsError, RegimeError
from .harness import run_figure1, run_selftest, thread_count, write_csv
from .oracle import accessible_info_oracle, minimize_povm, minimize_projective
from .qstate import XStateParams, make_dqc1, make_x_state, random_traceless_unitary, random_unitary
from .stateio import read_state, read_unitary


def _parse_vec(text: str) -> np.ndarray:
    parts = text.split(",")
    if len(parts) != 3:
        raise DiscordBoundsError(f"expected a three-component vector 'x,y,z', got {text!r}")
    return np.array([float(p) for p in parts])


def _emit(payload: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(payload, indent=2, default=_jsonify))
        return
    for key, value in payload.items():
        if isinstance(value, float):
            print(f"{key:>22}: {value:.12g}")
        elif isinstance(value, np.ndarray):
            print(f"{key:>22}: [{', '.join(f'{v:.10g}' for v in value)}]")
        else:
            print(f"{key:>22}: {value}")


def _jsonify(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def cmd_bounds(args) -> int:
    rho = read_state(args.statefile)
    bd = compute_bounds(rho)
    payload = {
        "lower": bd.lower,
        "lower_clamped": bd.lower_clamped,
        "upper": bd.upper,
        "coincide": bd.coincide,
        "direction": bd.direction.m,
        "q_spectrum": lorentz_spectrum(q_matrix(rho)),
        "L": bd.l_value,
        "q2_filtered": bd.q2,
        "t1_filtered": bd.t1,
        "bloch_x": bd.x,
        "entropy_a": bd.entropy_a,
        "entropy_b": bd.entropy_b,
        "entropy_ab": bd.entropy_ab,
    }
    if rho.dim_b == 2:
        payload["upper_weak"] = discord_upper_weak(rho)
    _emit(payload, args.json)
    return 0


def cmd_oracle(args) -> int:
    rho = read_state(args.statefile)
    proj = minimize_projective(rho)
    payload = {
        "projective": proj.value,
        "projective_direction": proj.argmin.m,
        "evaluations": proj.evaluations,
        "converged": proj.converged,
    }
    if args.povm:
        res = minimize_povm(rho, args.povm, seed=args.seed)
        payload["povm"] = res.value
        payload["povm_outcomes"] = len(res.argmin.elements)
        payload["povm_evaluations"] = res.evaluations
    _emit(payload, args.json)
    return 0


def cmd_figure1(args) -> int:
    report = run_figure1(args.n, args.rank, args.seed, include_povm=args.povm)
    if args.out:
        write_csv(report, args.out)
    payload = {
        "n": report.n,
        "rank": args.rank,
        "seed": args.seed,
        "threads": thread_count(),
        "fraction_within_0.01": report.fraction_within_0_01,
        "max_abs_gap": report.max_abs_gap,
        "violations": report.violations,
        "csv": args.out or "(not written)",
    }
    _emit(payload, args.json)
    return 0


def cmd_dqc1(args) -> int:
    if args.n_qubits > 10:
        raise DiscordBoundsError("the pipeline supports at most 10 qudit qubits (d = 1024)")
    d = 2 ** args.n_qubits
    if args.unitary:
        u = read_unitary(args.unitary)
        if u.shape[0] != d:
            raise DiscordBoundsError(
                f"unitary dimension {u.shape[0]} does not match --n-qubits (d = {d})")
    elif args.traceless:
        u = random_traceless_unitary(d, args.random)
    else:
        u = random_unitary(d, args.random)
    params = DqcParams.from_unitary(u, args.alpha)
    payload = {"d": d, "alpha": args.alpha, "u1": params.u1, "beta": params.beta}
    try:
        lower, upper = dqc1_bounds(params)
        payload["formula_lower"] = lower
        payload["formula_upper"] = upper
    except RegimeError as exc:
        payload["formula_upper"] = dqc1_bounds(
            DqcParams(d=params.d, alpha=params.alpha, u1=0.0, beta=params.beta)
        )[1]
        payload["formula_lower"] = f"unavailable ({exc})"
    if args.n_qubits <= 6:
        rho = make_dqc1(u, args.alpha)
        bd = compute_bounds(rho)
        payload["generic_lower"] = bd.lower
        payload["generic_upper"] = bd.upper
        payload["oracle_projective"] = minimize_projective(rho).value
    _emit(payload, args.json)
    return 0


def cmd_channel(args) -> int:
    a, b = _parse_vec(args.a), _parse_vec(args.b)
    cb = accessible_info_bounds(args.p1, a, b)
    orc = accessible_info_oracle(args.p1, a, b)
    payload = {
        "holevo_chi": cb.holevo_chi,
        "lambda_plus": cb.lambda_plus,
        "lambda_minus": cb.lambda_minus,
        "upper": cb.upper,
        "lower": cb.lower,
        "coincide": cb.coincide,
        "optimal_direction": cb.optimal_direction,
        "oracle_acc_info": orc.value,
    }
    _emit(payload, args.json)
    return 0


def cmd_xstate(args) -> int:
    params = XStateParams(x=args.x, y=args.y, s1=args.s1, s2=args.s2, s3=args.s3)
    rho = make_x_state(params)
    bd = compute_bounds(rho)
    payload = {
        "lower": bd.lower,
        "upper": bd.upper,
        "coincide": bd.coincide,
        "closed_form": x_state_discord(params),
        "direction": bd.direction.m,
    }
    _emit(payload, args.json)
    return 0


def cmd_selftest(args) -> int:
    results = run_selftest(quick=args.quick)
    failed = []
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name:<28} {detail}")
        if not ok:
            failed.append(name)
    if failed:
        print(f"failed properties: {', '.join(failed)}")
        return 1
    print(f"all {len(results)} properties passed (backend: {kernels.backend_name})")
    return 0


def cmd_bench(args) -> int:
    print(format_benchmark(run_benchmark(n_states=args.n)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="discord-bounds",
        description="Computable bounds on the quantum discord of qubit-qudit "
                    "states, with brute-force certification oracles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="bound report for a state file")
    p.add_argument("statefile")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_bounds)

    p = sub.add_parser("oracle", help="brute-force discord oracles for a state file")
    p.add_argument("statefile")
    p.add_argument("--povm", type=int, choices=(2, 3, 4), default=0,
                   help="also run the POVM oracle with this many outcomes")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("figure1", help="bounds-vs-oracle scan over random states")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rank", type=int, default=4)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", default=None, help="CSV output path")
    p.add_argument("--povm", action="store_true", help="include the POVM oracle column")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_figure1)

    p = sub.add_parser("dqc1", help="one-clean-qubit family bounds")
    p.add_argument("--n-qubits", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--unitary", default=None, help="unitary JSON file")
    p.add_argument("--random", type=int, default=0, help="seed for a random unitary")
    p.add_argument("--traceless", action="store_true",
                   help="draw the random unitary with Tr U = 0")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_dqc1)

    p = sub.add_parser("channel", help="binary-channel accessible information")
    p.add_argument("--p1", type=float, required=True)
    p.add_argument("--a", required=True, help="Bloch vector x,y,z of signal 1")
    p.add_argument("--b", required=True, help="Bloch vector x,y,z of signal 2")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_channel)

    p = sub.add_parser("xstate", help="closed-form X-state discord")
    p.add_argument("--x", type=float, default=0.0)
    p.add_argument("--y", type=float, default=0.0)
    p.add_argument("--s1", type=float, required=True)
    p.add_argument("--s2", type=float, required=True)
    p.add_argument("--s3", type=float, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_xstate)

    p = sub.add_parser("selftest", help="run the invariant suite at reduced counts")
    p.add_argument("--quick", action="store_true")
    p.set_defaults(fn=cmd_selftest)

    p = sub.add_parser("bench", help="compare compiled and pure-Python kernels")
    p.add_argument("--n", type=int, default=25)
    p.set_defaults(fn=cmd_bench)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (DiscordBoundsError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
