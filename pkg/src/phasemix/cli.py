"""Command-line entry point wiring generators, protocol, and verification.

Every run that writes a CSV also writes a JSON manifest next to it (config,
version, master seed, start time) so results can be replayed exactly; CSVs
themselves are byte-deterministic for a fixed seed.  Exit codes: 0 success,
2 configuration error, 3 width cap exceeded, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import __version__
from .circuit import Circuit, CircuitError, WidthCapError, parse, serialize, two_qubit_count
from .distances import (
    ReplacementChannelParams,
    avg_case_single,
    diamond_distance_single,
    frobenius_avg_single,
    min_diamond_distance,
    optimal_theta,
    trace_avg_single,
)
from .generators import qft, random_circuit
from .protocol import (
    estimate_avg_two_qubit,
    plan_replacements,
    plan_squash,
    records_to_csv,
    sweep,
)
from .rng import derive_seed
from .simplify import STRATEGIES, best_simplify, simplify
from .verify import (
    DistanceReport,
    avg_case_distance,
    diamond_lower_bound,
    diamond_upper_bound,
    frobenius_mc_full,
    mixed_channel_superoperator,
    superoperator_of,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CAP = 3
EXIT_IO = 4


class ConfigError(ValueError):
    pass


def _write_atomic(path: str | Path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _write_manifest(out_path: Path, args: argparse.Namespace, seed: int) -> None:
    config = {k: v for k, v in vars(args).items() if k != "func" and v is not None}
    manifest = {
        "version": __version__,
        "command": args.command,
        "config": config,
        "master_seed": seed,
        "started_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    _write_atomic(out_path.with_suffix(out_path.suffix + ".manifest.json"),
                  json.dumps(manifest, indent=2, default=str) + "\n")


def _read_circuit(path: str) -> Circuit:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise exc
    return parse(text)


def _parse_grid(text: str) -> list[float]:
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad grid {text!r}: {exc}") from exc
    if not values:
        raise ConfigError(f"empty grid {text!r}")
    return values


def _check_probability(p: float) -> float:
    if not (0.0 <= p <= 1.0):
        raise ConfigError(f"p must lie in [0, 1], got {p}")
    return p


def _check_epsilon(eps: float) -> float:
    if eps < 0:
        raise ConfigError(f"epsilon must be >= 0, got {eps}")
    return eps


def _cmd_generate(args: argparse.Namespace) -> int:
    if args.family == "qft":
        circuit = qft(args.qubits)
    else:
        circuit = random_circuit(args.qubits, args.depth, seed=args.seed)
    _write_atomic(args.out, serialize(circuit))
    print(f"wrote {args.family} circuit: {args.qubits} qubits, "
          f"{len(circuit.gates)} gates, {two_qubit_count(circuit)} cnots -> {args.out}")
    return EXIT_OK


def _cmd_simplify(args: argparse.Namespace) -> int:
    circuit = _read_circuit(args.infile)
    if args.strategy == "best":
        result = best_simplify(circuit)
    elif args.strategy in STRATEGIES:
        result = simplify(circuit, STRATEGIES[args.strategy])
    else:
        raise ConfigError(f"unknown strategy {args.strategy!r}")
    _write_atomic(args.out, serialize(result))
    print(f"simplified: {len(circuit.gates)} -> {len(result.gates)} gates, "
          f"{two_qubit_count(circuit)} -> {two_qubit_count(result)} cnots")
    return EXIT_OK


def _cmd_distance(args: argparse.Namespace) -> int:
    p = _check_probability(args.p)
    theta = args.theta if args.theta is not None else optimal_theta(args.alpha, p)
    params = ReplacementChannelParams(alpha=args.alpha, theta=theta, p=p)
    rows = [
        ("diamond_distance", diamond_distance_single(params)),
        ("theta_tilde", optimal_theta(args.alpha, p)),
        ("min_diamond_distance", min_diamond_distance(args.alpha, p)),
        ("frobenius_avg", frobenius_avg_single(params)),
        ("trace_avg", trace_avg_single(params)),
        ("avg_case", avg_case_single(params)),
    ]
    width = max(len(name) for name, _ in rows)
    print(f"replacement of Z({args.alpha:g}) by mixture(theta={theta:g}, p={p:g})")
    for name, value in rows:
        print(f"  {name:<{width}}  {value:.12g}")
    for name, value in rows:
        print(f"{name}={value:.12g}")
    return EXIT_OK


def _cmd_optimize(args: argparse.Namespace) -> int:
    circuit = _read_circuit(args.infile)
    epsilon = _check_epsilon(args.epsilon)
    if args.squash:
        plan = plan_squash(circuit, epsilon)
    else:
        p = _check_probability(args.p)
        if p == 1.0:
            raise ConfigError("p = 1 is the squash mode; pass --squash instead")
        plan = plan_replacements(circuit, epsilon, p)
    est = estimate_avg_two_qubit(plan, n_shots=args.shots, seed=args.seed)
    print(f"baseline_2q={plan.baseline_2q}")
    print(f"n_accepted={len(plan.accepted)}")
    print(f"spent_budget={plan.spent:.10g}")
    print(f"mean_2q={est.mean:.10g}")
    print(f"stderr_2q={est.stderr:.10g}")
    for count, freq in est.histogram.items():
        print(f"hist_{count}={freq}")
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    circuit = _read_circuit(args.infile)
    epsilon = _check_epsilon(args.epsilon)
    p = _check_probability(args.p)
    plan = plan_squash(circuit, epsilon) if p == 1.0 else plan_replacements(circuit, epsilon, p)
    report = DistanceReport(d_upper=diamond_upper_bound(plan))
    if args.mode == "bounds":
        report = DistanceReport(
            d_upper=report.d_upper,
            d_lower_est=diamond_lower_bound(circuit, plan, seed=args.seed),
        )
    elif args.mode == "frobenius":
        mean, err = frobenius_mc_full(circuit, plan, n_states=args.states, seed=args.seed)
        report = DistanceReport(d_upper=report.d_upper, frobenius_mc=mean, frobenius_mc_err=err)
    else:  # avgcase
        value = avg_case_distance(superoperator_of(circuit), mixed_channel_superoperator(plan))
        report = DistanceReport(d_upper=report.d_upper, avg_case=value)
    print(f"n_accepted={len(plan.accepted)}")
    for name, value in (
        ("d_upper", report.d_upper),
        ("d_lower_est", report.d_lower_est),
        ("frobenius_mc", report.frobenius_mc),
        ("frobenius_mc_err", report.frobenius_mc_err),
        ("avg_case", report.avg_case),
    ):
        if value is not None:
            print(f"{name}={value:.10g}")
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    epsilons = [_check_epsilon(e) for e in _parse_grid(args.epsilons)]
    ps = [_check_probability(p) for p in _parse_grid(args.ps)]
    label = args.circuit or "file"
    if args.infile is not None:
        source: object = _read_circuit(args.infile)
    elif args.circuit == "qft":
        source = qft(args.qubits)
        label = f"qft{args.qubits}"
    elif args.circuit == "rqc":
        depth = args.depth
        qubits = args.qubits

        def source(seed: int, _q=qubits, _d=depth) -> Circuit:
            return random_circuit(_q, _d, seed=seed)

        label = f"rqc{args.qubits}x{args.depth}"
    else:
        raise ConfigError("pass --in FILE or --circuit {qft,rqc}")
    records = sweep(
        source,
        epsilons=epsilons,
        ps=ps,
        n_shots=args.shots,
        n_realizations=args.realizations,
        seed=args.seed,
        circuit_label=label,
        verify_mode=args.verify,
    )
    out = Path(args.out)
    _write_atomic(out, records_to_csv(records))
    _write_manifest(out, args, args.seed)
    print(f"wrote {len(records)} rows -> {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phasemix",
        description="approximate circuits by stochastic mixtures under an error budget",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="emit a benchmark circuit")
    gen.add_argument("family", choices=("rqc", "qft"))
    gen.add_argument("--qubits", type=int, required=True)
    gen.add_argument("--depth", type=int, default=100)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=_cmd_generate)

    simp = sub.add_parser("simplify", help="rewrite a circuit file")
    simp.add_argument("--in", dest="infile", required=True)
    simp.add_argument("--out", required=True)
    simp.add_argument("--strategy", default="best", choices=("basic", "aggressive", "best"))
    simp.set_defaults(func=_cmd_simplify)

    dist = sub.add_parser("distance", help="single-replacement distance table")
    dist.add_argument("--alpha", type=float, required=True)
    dist.add_argument("--p", type=float, required=True)
    dist.add_argument("--theta", type=float, default=None)
    dist.set_defaults(func=_cmd_distance)

    opt = sub.add_parser("optimize", help="plan replacements and estimate shot statistics")
    opt.add_argument("--in", dest="infile", required=True)
    opt.add_argument("--epsilon", type=float, required=True)
    opt.add_argument("--p", type=float, default=0.75)
    opt.add_argument("--shots", type=int, default=8192)
    opt.add_argument("--seed", type=int, default=0)
    opt.add_argument("--squash", action="store_true", help="deterministic p = 1 squashing")
    opt.set_defaults(func=_cmd_optimize)

    ver = sub.add_parser("verify", help="channel-level error report")
    ver.add_argument("--in", dest="infile", required=True)
    ver.add_argument("--epsilon", type=float, required=True)
    ver.add_argument("--p", type=float, required=True)
    ver.add_argument("--mode", default="bounds", choices=("bounds", "frobenius", "avgcase"))
    ver.add_argument("--states", type=int, default=32)
    ver.add_argument("--seed", type=int, default=0)
    ver.set_defaults(func=_cmd_verify)

    sw = sub.add_parser("sweep", help="benchmark grid to CSV (plus JSON manifest)")
    sw.add_argument("--in", dest="infile", default=None, help="circuit file (overrides --circuit)")
    sw.add_argument("--circuit", choices=("qft", "rqc"), default=None)
    sw.add_argument("--qubits", type=int, default=8)
    sw.add_argument("--depth", type=int, default=500)
    sw.add_argument("--epsilons", default="0.01,0.05,0.1")
    sw.add_argument("--ps", default="0,0.25,0.5,0.75,0.9,1.0")
    sw.add_argument("--shots", type=int, default=8192)
    sw.add_argument("--realizations", type=int, default=1)
    sw.add_argument("--seed", type=int, default=0)
    sw.add_argument("--verify", default="none", choices=("none", "bounds", "frobenius"))
    sw.add_argument("--out", required=True)
    sw.set_defaults(func=_cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except WidthCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ConfigError, CircuitError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
