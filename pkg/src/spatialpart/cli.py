"""Command-line driver: ``partition``, ``eval`` and ``render`` subcommands.

Exit codes: 0 ok, 2 usage or configuration, 3 input parse error,
4 infeasible balance, 5 internal error, 6 assignment does not cover
every cell.  The log level comes from ``SPATIALPART_LOG`` (default WARNING).
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .annealer import SAConfig
from .boundary import CostParams
from .errors import (ConfigError, CoverageError, InfeasibleBalanceError, NetlistError,
                     SpatialPartError)
from .gridgraph import DEFAULT_NX, DEFAULT_NY, build_grid_graph, dump_grid_csv
from .kway import KWayConfig, kway_partition
from .metrics import evaluate_assignment
from .netlist import dump_json, parse_netlist, read_assignment, write_result
from .render import LAYERS, Overlay, RenderSpec, render_svg, root_boundary
from .steiner import net_trees

log = logging.getLogger("spatialpart")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_INFEASIBLE = 4
EXIT_INTERNAL = 5
EXIT_COVERAGE = 6

TRACE_FIELDS = ["path", "attempt", "corner", "iteration", "temperature", "cost", "cost_prev",
                "best_cost", "accepted", "max_abs_delta", "amplitude"]


@dataclass
class RunConfig:
    input: Path
    output: Path
    metrics: Path | None = None
    svg: Path | None = None
    trace: Path | None = None
    grid_csv: Path | None = None
    kway: KWayConfig = field(default_factory=KWayConfig)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    d = SAConfig()
    p = _Parser(prog="spatialpart", description="Spatially contiguous k-way netlist partitioning.",
                formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def grid_flags(sp):
        sp.add_argument("--nx", type=_positive_int, default=DEFAULT_NX, help="grid columns")
        sp.add_argument("--ny", type=_positive_int, default=DEFAULT_NY, help="grid rows")

    fmt = argparse.ArgumentDefaultsHelpFormatter
    pp = sub.add_parser("partition", help="partition a placed netlist", formatter_class=fmt)
    pp.add_argument("netlist", type=Path, help="netlist JSON")
    pp.add_argument("-o", "--output", type=Path, required=True, help="assignment CSV")
    pp.add_argument("--metrics", type=Path, help="metrics JSON (default: <output>.metrics.json)")
    pp.add_argument("-k", type=int, default=2, help="number of partitions (power of two)")
    pp.add_argument("--epsilon", type=float, default=0.1, help="balance tolerance")
    grid_flags(pp)
    pp.add_argument("--m", type=int, default=d.m, help="boundary angles per quarter turn")
    pp.add_argument("--alpha-c", type=float, default=d.params.alpha_c, help="cut weight")
    pp.add_argument("--alpha-b", type=float, default=d.params.alpha_b, help="balance weight")
    pp.add_argument("--t-init", type=float, default=d.t_init, help="initial temperature")
    pp.add_argument("--t-limit", type=float, default=d.t_limit, help="final temperature")
    pp.add_argument("--gamma", type=float, default=d.gamma, help="cooling factor")
    pp.add_argument("--sigma", type=float, default=d.sigma, help="perturbation noise std")
    pp.add_argument("--beta", type=float, default=None,
                    help="perturbation scale (default: 0.1 x layout diagonal)")
    pp.add_argument("--seed", type=int, default=d.seed, help="random seed")
    pp.add_argument("--threads", type=_positive_int, default=1, help="worker processes")
    pp.add_argument("--critical-threshold", type=float, default=None,
                    help="nets with weight >= this count as critical")
    pp.add_argument("--svg", type=Path, help="write an SVG of the partition")
    pp.add_argument("--trace", type=Path, help="write a per-iteration annealing trace CSV")
    pp.add_argument("--grid-csv", type=Path, help="dump the root grid graph as CSV")

    ep = sub.add_parser("eval", help="score an external assignment", formatter_class=fmt)
    ep.add_argument("assignment", type=Path, help="cell_id,partition CSV")
    ep.add_argument("netlist", type=Path, help="netlist JSON")
    grid_flags(ep)
    ep.add_argument("--epsilon", type=float, default=0.1, help="balance tolerance")
    ep.add_argument("-k", type=int, default=None, help="partition count (default: max label + 1)")
    ep.add_argument("--critical-threshold", type=float, default=None,
                    help="nets with weight >= this count as critical")
    ep.add_argument("-o", "--output", type=Path, help="metrics JSON (default: stdout)")

    rp = sub.add_parser("render", help="draw an assignment as SVG", formatter_class=fmt)
    rp.add_argument("assignment", type=Path, help="cell_id,partition CSV")
    rp.add_argument("netlist", type=Path, help="netlist JSON")
    grid_flags(rp)
    rp.add_argument("-o", "--output", type=Path, required=True, help="SVG path")
    rp.add_argument("--layers", default="grid,labels",
                    help=f"comma-separated subset of {','.join(sorted(LAYERS))}")
    rp.add_argument("--scale", type=float, default=6.0, help="pixels per layout unit")
    return p


def config_from_args(a) -> RunConfig:
    sa = SAConfig(t_init=a.t_init, t_limit=a.t_limit, gamma=a.gamma, sigma=a.sigma,
                  beta=a.beta, m=a.m, params=CostParams(a.alpha_c, a.alpha_b), seed=a.seed)
    kw = KWayConfig(k=a.k, epsilon=a.epsilon, nx=a.nx, ny=a.ny, sa=sa, threads=a.threads,
                    critical_threshold=a.critical_threshold)
    return RunConfig(a.netlist, a.output, a.metrics, a.svg, a.trace, a.grid_csv, kw)


def _write_trace(path, records) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=TRACE_FIELDS, lineterminator="\n")
        w.writeheader()
        for rec in records:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in rec.items()})


def run_partition(cfg: RunConfig) -> int:
    netlist = parse_netlist(cfg.input)
    traces = [] if cfg.trace is not None else None
    run = kway_partition(netlist, cfg.kway, traces=traces)
    res = run.result
    write_result(res, cfg.output, cfg.metrics)
    if cfg.trace is not None:
        _write_trace(cfg.trace, traces)
    if cfg.grid_csv is not None:
        dump_grid_csv(run.root_grid, cfg.grid_csv)
    if cfg.svg is not None:
        b = root_boundary(run.splits, run.root_grid, cfg.kway.sa.m)
        overlay = Overlay(boundaries=[b] if b is not None else [])
        render_svg(netlist, run.root_grid, res, RenderSpec(), cfg.svg, overlay)
    if not res.feasible:
        log.error("final partition weights %s violate the balance tolerance %g",
                  res.per_partition_weight, res.epsilon)
        return EXIT_INFEASIBLE
    return EXIT_OK


def _scored(assignment, netlist_path, nx, ny, epsilon, threshold, k=None):
    netlist = parse_netlist(netlist_path)
    labels = read_assignment(assignment)
    trees = net_trees(netlist)
    g = build_grid_graph(netlist, nx, ny, trees)
    if k is not None and max(labels.values(), default=0) >= k:
        raise ConfigError(f"assignment uses labels outside [0, {k})")
    return netlist, g, evaluate_assignment(netlist, labels, g, trees, epsilon, threshold, k=k)


def run_eval(a) -> int:
    _, _, res = _scored(a.assignment, a.netlist, a.nx, a.ny, a.epsilon, a.critical_threshold,
                        a.k)
    text = dump_json(res.metrics_dict())
    if a.output is None:
        sys.stdout.write(text)
    else:
        Path(a.output).write_text(text)
    return EXIT_OK


def run_render(a) -> int:
    spec = RenderSpec(layers=frozenset(x.strip() for x in a.layers.split(",") if x.strip()),
                      scale=a.scale)
    netlist, g, res = _scored(a.assignment, a.netlist, a.nx, a.ny, 1.0, None)
    render_svg(netlist, g, res, spec, a.output)
    return EXIT_OK


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("SPATIALPART_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        if args.command == "partition":
            return run_partition(config_from_args(args))
        if args.command == "eval":
            return run_eval(args)
        return run_render(args)
    except NetlistError as exc:
        log.error("%s", exc)
        return EXIT_PARSE
    except CoverageError as exc:
        log.error("%s", exc)
        return EXIT_COVERAGE
    except InfeasibleBalanceError as exc:
        log.error("%s", exc)
        return EXIT_INFEASIBLE
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except (SpatialPartError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_INTERNAL
    except Exception:
        log.exception("internal error")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
