"""Command-line entry point: ``lteflow <subcommand> ...``.

Exit status is 0 on success, 1 on bad input and 2 when a mesh cannot carry
its offered load at any capacity.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
from fractions import Fraction

from . import __version__
from .dimension import (
    DimensioningError,
    InfeasibleAtY,
    dimension,
    load_mesh,
    provisioned_network,
)
from .graph import ParseError, kbps_to_mbps_text, load_network, mbps_to_kbps
from .maxflow import SolverEngine, compare_engines, max_flow
from .simulate import SimConfig, pool, replicate
from .sweep import SweepError, emit, parse_sweep_spec
from .teletraffic import (
    Modulation,
    TrafficScenario,
    awgn_ser,
    channel_count,
    erlang_b,
    offered_traffic,
    simultaneous_rb,
    weighted_blocking,
)

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE = 0, 1, 2


class InputError(Exception):
    pass


def _dump(doc: dict) -> str:
    return json.dumps({"tool_version": __version__, **doc}, indent=2) + "\n"


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _as_float(x) -> float | int:
    x = Fraction(x)
    return int(x) if x.denominator == 1 else float(x)


# ------------------------------------------------------------------ config


def _apply_config(args: argparse.Namespace, parser: argparse.ArgumentParser, section: str) -> None:
    """Fill unset options from ``[section]`` of ``--config``; flags win."""
    if not getattr(args, "config", None):
        return
    cp = configparser.ConfigParser()
    cp.optionxform = lambda s: s.strip().replace("-", "_")
    try:
        with open(args.config, encoding="utf-8") as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise InputError(f"cannot read config: {exc}") from None
    if not cp.has_section(section):
        return
    actions = {a.dest: a for a in parser._actions}
    for key, raw in cp[section].items():
        action = actions.get(key)
        if action is None or not action.option_strings:
            raise InputError(f"unknown key {key!r} in [{section}]")
        if getattr(args, key) is not None and getattr(args, key) != action.default:
            continue
        if isinstance(action, argparse._StoreTrueAction):
            value = raw.strip().lower() in ("1", "true", "yes", "on")
        elif action.type is not None:
            try:
                value = action.type(raw)
            except (argparse.ArgumentTypeError, ValueError) as exc:
                raise InputError(f"[{section}] {key}: {exc}") from None
        else:
            value = raw.strip()
        if action.choices is not None and value not in action.choices:
            raise InputError(f"[{section}] {key}: {value!r} not one of {sorted(action.choices)}")
        setattr(args, key, value)


# --------------------------------------------------------------- subcommands


def cmd_maxflow(args) -> int:
    net = load_network(args.graph)
    try:
        net = net.with_terminals(args.source, args.sink)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    engine = SolverEngine.parse(args.engine)
    if args.compare_engines:
        sys.stdout.write(_dump({"source": net.source, "sink": net.sink, "engines": compare_engines(net)}))
        return EXIT_OK
    if args.each_source:
        rows = []
        for s in range(net.node_count):
            if s == net.sink:
                continue
            res = max_flow(net.with_terminals(s, net.sink), engine)
            rows.append({"source": s, "sink": net.sink, "total_kbps": res.total,
                         "total_mbps": kbps_to_mbps_text(res.total)})
        sys.stdout.write(_dump({"engine": engine.value, "flows": rows}))
        return EXIT_OK
    res = max_flow(net, engine)
    flows = [
        {"from": a.tail, "to": a.head, "capacity_kbps": a.capacity, "flow_kbps": f}
        for a, f in zip(net.arcs, res.flows)
    ]
    doc = {
        "engine": engine.value,
        "source": net.source,
        "sink": net.sink,
        "total_kbps": res.total,
        "total_mbps": kbps_to_mbps_text(res.total),
        "min_cut": sorted(res.min_cut),
        "augmentations": res.augmentations,
        "arcs": flows,
    }
    sys.stdout.write(_dump(doc))
    return EXIT_OK


def cmd_dimension(args) -> int:
    spec = load_mesh(args.mesh)
    try:
        result = dimension(spec, args.granularity_kbps, args.engine)
    except InfeasibleAtY as exc:
        sys.stdout.write(_dump({"error": "infeasible", "disconnected_nodes": list(exc.nodes)}))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    check = max_flow(provisioned_network(spec, result.link_capacities), result.engine)
    ratio = result.load_balance_ratio()
    doc = {
        "engine": result.engine,
        "granularity_kbps": result.granularity,
        "offered_total_kbps": result.offered_total,
        "optimal_M_kbps": result.optimal_M,
        "optimal_M_mbps": kbps_to_mbps_text(result.optimal_M),
        "achieved_flow_kbps": result.achieved_flow,
        "iterations": result.iterations,
        "search_exit_stepped_up": result.stepped_up,
        "links": [
            {"u": u, "v": v, "capacity_kbps": c, "capacity_mbps": kbps_to_mbps_text(c)}
            for (u, v), c in result.link_capacities.items()
        ],
        "provisioned_flow_kbps": check.total,
        "load_balance_max_over_mean": ratio,
        "trace": [
            {"L_kbps": s.low, "R_kbps": s.high, "M_kbps": s.capacity, "flow_kbps": s.flow}
            for s in result.trace
        ],
    }
    sys.stdout.write(_dump(doc))
    return EXIT_OK


def _scenario(args) -> TrafficScenario:
    missing = [flag for flag, dest in _TRAFFIC_FLAGS if getattr(args, dest) is None]
    if missing:
        raise InputError("missing required option(s): " + ", ".join(missing))
    if args.rb_per_call.denominator != 1:
        raise InputError("--rb-per-call must be an integer")
    try:
        capacity = mbps_to_kbps(args.capacity_mbps)
        return TrafficScenario(
            users_M=args.users,
            rb_per_call_m=int(args.rb_per_call),
            call_rate_s=args.rate,
            holding_th=args.holding,
            modulation=Modulation.parse(args.modulation or "qpsk"),
            capacity_C=capacity,
        )
    except ValueError as exc:
        raise InputError(str(exc)) from None


def cmd_blocking(args) -> int:
    sc = _scenario(args)
    A = offered_traffic(sc)
    N = simultaneous_rb(sc.capacity_C, sc.modulation)
    k = channel_count(N, sc.rb_per_call_m)
    B = erlang_b(float(A), k)
    doc = {
        "modulation": sc.modulation.value,
        "capacity_kbps": sc.capacity_C,
        "offered_erlangs": _as_float(A),
        "simultaneous_rb_N": N,
        "channels_k": k,
        "blocking_B": B,
    }
    if args.snr_db is not None:
        ser = awgn_ser(sc.modulation, args.snr_db)
        doc["awgn_ser"] = ser
        doc["weighted_blocking"] = weighted_blocking(B, ser)
    if args.format == "table":
        line = f"A={float(A):.6g} Erl  N={N}  k={k}  B={B:.6g}"
        if "awgn_ser" in doc:
            line += f"  SER={doc['awgn_ser']:.6g}  B_weighted={doc['weighted_blocking']:.6g}"
        print(line)
    else:
        sys.stdout.write(_dump(doc))
    return EXIT_OK


def cmd_simulate(args) -> int:
    sc = _scenario(args)
    calls = args.calls if args.calls is not None else 1_000_000
    warmup = args.warmup if args.warmup is not None else 10_000
    seed = args.seed if args.seed is not None else 1
    reps = args.replications if args.replications is not None else 1
    try:
        cfg = SimConfig(sc, calls + warmup, seed, warmup, args.holding_law or "exponential", args.per_user)
        runs = replicate(cfg, reps)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    pooled = pool(runs)
    doc = {
        "seed": seed,
        "calls_per_replication": calls,
        "warmup_calls": warmup,
        "holding_law": cfg.holding,
        "erlang_b": erlang_b(pooled.offered, pooled.channels),
        "replications": [r.to_dict() for r in runs],
        "pooled": pooled.to_dict(),
    }
    sys.stdout.write(_dump(doc))
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        with open(args.spec, encoding="utf-8") as fh:
            spec, options = parse_sweep_spec(fh.read())
    except OSError as exc:
        raise InputError(str(exc)) from None
    from .sweep import run_sweep

    fmt = args.format or options.get("format", "csv")
    if fmt not in ("csv", "json", "svg"):
        raise InputError(f"unknown format {fmt!r}")
    log_y = args.log_y or options.get("log_y", False)
    data = emit(run_sweep(spec), fmt, log_y=log_y, title=f"blocking vs {spec.vary}")
    if args.output:
        with open(args.output, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.write(data.decode())
    return EXIT_OK


# ------------------------------------------------------------------- parser

_TRAFFIC_FLAGS = (
    ("--users", "users"),
    ("--rb-per-call", "rb_per_call"),
    ("--rate", "rate"),
    ("--holding", "holding"),
    ("--capacity-mbps", "capacity_mbps"),
)


def _traffic_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--users", type=_fraction, help="number of users M")
    p.add_argument("--rb-per-call", type=_fraction, help="RB booked per call, m")
    p.add_argument("--rate", type=_fraction, help="calls per minute per user, s (e.g. 1/60)")
    p.add_argument("--holding", type=_fraction, help="mean holding time t_h in minutes")
    p.add_argument("--modulation", choices=["qpsk", "qam16"], help="default qpsk")
    p.add_argument("--capacity-mbps", help="network capacity C in Mbps per subcarrier")
    p.add_argument("--config", help="INI file with defaults for this subcommand")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lteflow", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("maxflow", help="maximum flow and min cut of a network file")
    p.add_argument("graph")
    p.add_argument("--engine", default="ff", choices=["ff", "ek", "dinic"])
    p.add_argument("--source", type=int)
    p.add_argument("--sink", type=int)
    p.add_argument("--each-source", action="store_true",
                   help="max flow from every other node to the sink")
    p.add_argument("--compare-engines", action="store_true",
                   help="report flow value and augmentation count for every engine")
    p.add_argument("--config")
    p.set_defaults(func=cmd_maxflow, section="maxflow")

    p = sub.add_parser("dimension", help="minimal uniform link capacity for a mesh")
    p.add_argument("mesh")
    p.add_argument("--granularity-kbps", type=int, default=1000)
    p.add_argument("--engine", default="ff", choices=["ff", "ek", "dinic"])
    p.add_argument("--config")
    p.set_defaults(func=cmd_dimension, section="dimension")

    p = sub.add_parser("blocking", help="offered traffic, channels and Erlang-B blocking")
    _traffic_options(p)
    p.add_argument("--format", default="json", choices=["json", "table"])
    p.add_argument("--snr-db", type=float,
                   help="also weight B with the AWGN symbol error rate at this Es/N0")
    p.set_defaults(func=cmd_blocking, section="blocking")

    p = sub.add_parser("simulate", help="Monte-Carlo loss-system check of Erlang-B")
    _traffic_options(p)
    p.add_argument("--calls", type=int, help="counted calls per replication (default 1000000)")
    p.add_argument("--warmup", type=int, help="discarded leading calls (default 10000)")
    p.add_argument("--seed", type=int, help="default 1")
    p.add_argument("--replications", type=int, help="default 1")
    p.add_argument("--holding-law", choices=["exponential", "deterministic"])
    p.add_argument("--per-user", action="store_true", help="simulate each user's own Poisson stream")
    p.set_defaults(func=cmd_simulate, section="simulate")

    p = sub.add_parser("sweep", help="blocking-probability curves from a sweep file")
    p.add_argument("spec")
    p.add_argument("--format", choices=["csv", "json", "svg"])
    p.add_argument("--log-y", action="store_true")
    p.add_argument("-o", "--output")
    p.add_argument("--config")
    p.set_defaults(func=cmd_sweep, section="sweep_output")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    try:
        _apply_config(args, sub, args.section)
        return args.func(args)
    except (InputError, ParseError, SweepError, DimensioningError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
