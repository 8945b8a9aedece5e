"""Command-line entry point: ``powertalk {space,simulate,analyze,sweep,capacity}``.

Exit codes: 0 success, 1 usage error, 2 configuration error, 3 numerical
convergence failure.
"""

import argparse
import csv
import io
import logging
import sys

import numpy as np

from . import analysis, protocol, space
from .capacity import ConvergenceError, arimoto_blahut, average_capacity
from .config import ConfigError, load_config, with_overrides
from .constellation import Constellation, ConstellationError
from .grid import Symbol
from .space import DeviationSpec, power_deviation
from .sweep import FAMILY_ALIASES, delta_sweep

log = logging.getLogger("powertalk")

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.12g}"


def write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if not isinstance(v, str) else v for v in row])
    text = buf.getvalue()
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def parse_constellation(spec, cfg):
    """``VA_H,RD_H:VA_L,RD_L``, ``fixed-rd:VA_H,VA_L`` or ``fixed-va:RD_H,RD_L``."""
    pilot = cfg.pilot()
    g = cfg.grid()
    if spec is None:
        x_h, x_l = cfg.symbols()
        return Constellation.build(pilot, x_h, x_l, g)
    try:
        head, _, tail = spec.partition(":")
        if head in FAMILY_ALIASES:
            a, b = (float(s) for s in tail.split(","))
            family = FAMILY_ALIASES[head]
            if family == "fixed_rd":
                x_h, x_l = Symbol(a, pilot.r_da), Symbol(b, pilot.r_da)
            else:
                x_h, x_l = Symbol(pilot.v_a, a), Symbol(pilot.v_a, b)
            return Constellation.build(pilot, x_h, x_l, g, family)
        h = [float(s) for s in head.split(",")]
        lo = [float(s) for s in tail.split(",")]
        return Constellation.build(pilot, Symbol(*h), Symbol(*lo), g)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConstellationError):
            raise ConfigError(f"constellation: {exc}") from None
        raise UsageError(f"bad constellation spec {spec!r}") from None


def _out(args, cfg):
    return args.out if args.out is not None else cfg.out


def cmd_space(args, cfg):
    g = cfg.grid()
    curves = space.boundary_curves(g, args.points)
    rows = zip(
        curves["voltage_lower"][:, 0],
        curves["voltage_lower"][:, 1],
        curves["voltage_upper"][:, 1],
        curves["current_lower"][:, 1],
        curves["current_upper"][:, 1],
    )
    out = _out(args, cfg)
    write_csv(
        out,
        ["r_da_ohm", "v_a_lower_voltage_V", "v_a_upper_voltage_V", "v_a_lower_current_V", "v_a_upper_current_V"],
        rows,
    )
    delta_out = args.delta_out
    if delta_out is None and out not in (None, "-"):
        stem = out[:-4] if out.endswith(".csv") else out
        delta_out = f"{stem}_delta.csv"
    if delta_out is not None:
        dmap = space.delta_map(g, cfg.pilot(), args.grid, args.grid, cfg.load_dist())
        write_csv(delta_out, ["v_a_V", "r_da_ohm", "delta_percent"], [(va, rd, 100 * d) for va, rd, d in dmap])
    return EXIT_OK


def cmd_simulate(args, cfg):
    g = cfg.grid()
    const = parse_constellation(args.constellation, cfg)
    rng = np.random.default_rng(cfg.seed)
    bits = rng.integers(0, 2, args.bits)
    trace, stats = protocol.run_link(
        bits,
        const,
        args.scheme,
        g,
        slot=cfg.slot(args.scheme),
        load_process=cfg.change_process(),
        policy=args.policy,
        rng=rng,
        load_dist=cfg.load_dist(),
        run_limit=cfg.run_limit,
    )
    rows = []
    for s in trace.slots:
        rows.append(
            (
                s.kind,
                s.bit_index if s.kind == "data" else None,
                s.sent,
                None if s.kind == "pilot" or s.rx_out is protocol.ERASED else s.rx_out,
                s.erased,
                s.theta,
                s.r0,
                s.r1,
                s.threshold,
                s.kind == "pilot",
            )
        )
    write_csv(
        _out(args, cfg),
        ["slot_kind", "bit_index", "sent", "decided", "erased", "theta_s", "r0_ohm", "r1_ohm", "threshold_V", "pilot_flag"],
        rows,
    )
    agree = protocol.tx_feedback_check(trace)
    summary = {
        "bits_sent": stats.bits_sent,
        "bit_errors": stats.bit_errors,
        "erasures": stats.erasures,
        "error_events": stats.error_events,
        "p_e_hat": stats.p_e_hat,
        "p_burst_hat": stats.p_burst_hat,
        "pilots_inserted": stats.pilots_inserted,
        "tx_rx_agreement": float(np.mean(agree)) if agree else float("nan"),
    }
    stream = sys.stderr if _out(args, cfg) in (None, "-") else sys.stdout
    print("# link statistics", file=stream)
    for k, v in summary.items():
        print(f"{k},{fmt(v)}", file=stream)
    return EXIT_OK


def cmd_analyze(args, cfg):
    g = cfg.grid()
    const = parse_constellation(args.constellation, cfg)
    quad = analysis.QuadratureSpec(cfg.quad_nodes, cfg.quad_nodes)
    dist = cfg.load_dist()
    p10, p01 = analysis.flip_probs(const, g, dist, T=cfg.slot("simple").T, quad=quad)
    q1e, q0e = analysis.erasure_probs(const, g, dist, T=cfg.slot("manchester").T, quad=quad)
    n = args.trials if args.trials is not None else cfg.mc_trials
    rows = []
    if n > 0:
        mc_s = protocol.conditioned_link_mc(
            const, g, "simple", n, seed=cfg.seed, slot=cfg.slot("simple"), load_dist=dist, workers=cfg.workers
        )
        mc_m = protocol.conditioned_link_mc(
            const, g, "manchester", n, seed=cfg.seed + 1, slot=cfg.slot("manchester"), load_dist=dist,
            workers=cfg.workers,
        )
    else:
        mc_s = mc_m = (None, None)
    for name, q, est in (("p10", p10, mc_s[0]), ("p01", p01, mc_s[1]), ("q1e", q1e, mc_m[0]), ("q0e", q0e, mc_m[1])):
        rows.append((name, q, est.value if est else None, est.se if est else None, n if est else None))
    spec = DeviationSpec(const.pilot, dist)
    rows.append(("delta_h_percent", 100 * power_deviation(const.x_h, spec, g), None, None, None))
    rows.append(("delta_l_percent", 100 * power_deviation(const.x_l, spec, g), None, None, None))
    write_csv(_out(args, cfg), ["quantity", "quadrature", "monte_carlo", "mc_std_error", "mc_trials"], rows)
    return EXIT_OK


def cmd_sweep(args, cfg):
    g = cfg.grid()
    family = args.family or cfg.family
    quad = analysis.QuadratureSpec(cfg.quad_nodes, cfg.quad_nodes)
    rows = delta_sweep(family, cfg.pilot(), g, points=args.points, load_dist=cfg.load_dist(), quad=quad,
                       workers=cfg.workers)
    write_csv(
        _out(args, cfg),
        [
            "delta_percent", "delta_h_percent", "delta_l_percent",
            "x_h_v_a_V", "x_h_r_da_ohm", "x_l_v_a_V", "x_l_r_da_ohm",
            "p10", "p01", "q1e", "q0e", "c_bac_bit", "c_baec_bit",
        ],
        [
            (
                100 * r.delta, 100 * r.delta_h, 100 * r.delta_l,
                r.x_h.v_a, r.x_h.r_da, r.x_l.v_a, r.x_l.r_da,
                r.p10, r.p01, r.q1e, r.q0e, r.c_bac, r.c_baec,
            )
            for r in rows
        ],
    )
    return EXIT_OK


def cmd_capacity(args, cfg):
    g = cfg.grid()
    const = parse_constellation(args.constellation, cfg)
    quad = analysis.QuadratureSpec(cfg.quad_nodes, cfg.quad_nodes)
    if args.scheme == "bac":
        params = analysis.ChannelParams.bac(*analysis.flip_probs(const, g, cfg.load_dist(), quad=quad))
    else:
        params = analysis.ChannelParams.baec(*analysis.erasure_probs(const, g, cfg.load_dist(), quad=quad))
    c, p = arimoto_blahut(analysis.to_matrix(params), args.tol, args.max_iter)
    p_c = args.p_change if args.p_change is not None else cfg.p_change
    if not 0 <= p_c <= 1:
        raise ConfigError("p_change: must be in [0, 1]")
    rows = [
        ("conditional_capacity_bit", c),
        ("input_p0", p[0]),
        ("input_p1", p[1]),
        ("p_change", p_c),
        ("average_capacity_bit", average_capacity(c, p_c)),
    ]
    write_csv(_out(args, cfg), ["quantity", "value"], rows)
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="powertalk", description="Bit signaling over a droop-controlled DC bus.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--out", help="output CSV path (default: stdout)")
        p.add_argument("--seed", type=int)
        p.add_argument("--workers", type=int)
        return p

    p = common(sub.add_parser("space", help="signaling-space boundaries and power-deviation map"))
    p.add_argument("--points", type=int, default=50)
    p.add_argument("--grid", type=int, default=41, help="deviation map resolution per axis")
    p.add_argument("--delta-out", help="deviation map CSV (default: <out>_delta.csv)")
    p.set_defaults(func=cmd_space)

    p = common(sub.add_parser("simulate", help="run a link and dump the slot trace"))
    p.add_argument("--bits", type=int, default=1000)
    p.add_argument("--scheme", choices=protocol.SCHEMES, default="simple")
    p.add_argument("--policy", choices=protocol.POLICIES, default="none")
    p.add_argument("--constellation")
    p.add_argument("--p-change", type=float)
    p.set_defaults(func=cmd_simulate)

    p = common(sub.add_parser("analyze", help="flip/erasure probabilities, quadrature and Monte Carlo"))
    p.add_argument("--constellation")
    p.add_argument("--trials", type=int, help="Monte Carlo bit intervals per input (0 skips)")
    p.set_defaults(func=cmd_analyze)

    p = common(sub.add_parser("sweep", help="probabilities and capacities against power deviation"))
    p.add_argument("--family", choices=["fixed-va", "fixed-rd"])
    p.add_argument("--points", type=int, default=10)
    p.set_defaults(func=cmd_sweep)

    p = common(sub.add_parser("capacity", help="conditional and average capacity"))
    p.add_argument("--constellation")
    p.add_argument("--scheme", choices=["bac", "baec"], default="baec")
    p.add_argument("--p-change", type=float)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-iter", type=int, default=100_000)
    p.set_defaults(func=cmd_capacity)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        if getattr(args, "points", 2) < (2 if args.command == "space" else 1):
            raise UsageError("--points is too small")
        if getattr(args, "bits", 0) < 0 or (getattr(args, "trials", None) or 0) < 0:
            raise UsageError("counts must be non-negative")
        cfg = load_config(args.config)
        cfg = with_overrides(cfg, seed=args.seed, workers=args.workers,
                             p_change=getattr(args, "p_change", None) if args.command == "simulate" else None)
        return args.func(args, cfg)
    except UsageError as exc:
        print(f"powertalk: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, ConstellationError) as exc:
        print(f"powertalk: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"powertalk: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
