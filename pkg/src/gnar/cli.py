"""Command-line entry point.

Subcommands cover the full workflow: ``simulate`` a model file into a
panel, ``fit`` a model order to a panel, ``nacf``/``corbit`` for
autocorrelation grids and their radial plots, ``forecast`` and ``compare``
for hold-out evaluation, and ``elections`` for the end-to-end US
presidential case study.  All randomness flows through ``--seed`` and all
files are written atomically (write then rename), so reruns with identical
inputs produce identical bytes.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import autocorr, corbit_svg, elections, estimate
from .errors import GnarError
from .forecast import ModelSpec, compare, forecast, load_external_forecast
from .model import format_model, parse_order, read_model
from .network import (bfs_distances, default_weights, format_edge_list,
                      load_weight_overrides, read_edge_list)
from .panel import TimeSeriesPanel, format_panel, read_panel
from .partition import format_partition, read_partition
from .simulate import simulate


def write_text_atomic(path: str | Path, text: str) -> None:
    """Write via a temp file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_panel_atomic(panel: TimeSeriesPanel, path: str | Path) -> None:
    write_text_atomic(path, format_panel(panel))


def _load_network(args):
    net = read_edge_list(args.network, d=args.d)
    W = default_weights(bfs_distances(net))
    if getattr(args, "weights", None):
        W = load_weight_overrides(args.weights, W)
    return net, W


def _load_partition(args):
    if getattr(args, "partition", None):
        return read_partition(args.partition)
    return None


def _cmd_simulate(args) -> int:
    net, W = _load_network(args)
    part = _load_partition(args)
    coeffs, order = read_model(args.model)
    panel = simulate(coeffs, order, net, W, args.length, part=part,
                     burn_in=args.burn_in, seed=args.seed,
                     allow_nonstationary=args.allow_nonstationary)
    _write_panel_atomic(panel, args.out)
    print(f"wrote {args.out}")
    return 0


def _cmd_fit(args) -> int:
    net, W = _load_network(args)
    part = _load_partition(args)
    panel = read_panel(args.panel)
    order = parse_order(args.order)
    out_dir = Path(args.out_dir)
    if args.per_community:
        if part is None:
            raise GnarError("--per-community needs --partition")
        fits = estimate.fit_per_community(panel, order, net, W, part)
        for fit in fits:
            tag = f"community{fit.group}"
            write_text_atomic(out_dir / f"coefficients_{tag}.csv",
                              estimate.coefficient_table(fit))
            _write_panel_atomic(fit.residuals, out_dir / f"residuals_{tag}.csv")
        print(f"wrote per-community fits for {len(fits)} communities to {out_dir}")
        return 0
    ds = estimate.build_design(panel, order, net, W, part)
    fit = estimate.fit_ols(ds)
    write_text_atomic(out_dir / "coefficients.csv", estimate.coefficient_table(fit))
    _write_panel_atomic(fit.residuals, out_dir / "residuals.csv")
    coeffs = fit.to_coefficients()
    write_text_atomic(out_dir / "model.txt", format_model(coeffs, order, d=panel.d))
    if not fit.stationary:
        print("warning: estimates violate the stationarity condition "
              f"(largest sum {np.max(fit.stationarity_sums):.3f})", file=sys.stderr)
    print(f"wrote {out_dir}/coefficients.csv ({len(fit.theta)} parameters), "
          f"residuals.csv, model.txt")
    return 0


def _grid_from_args(args):
    net, W = _load_network(args)
    part = _load_partition(args)
    panel = read_panel(args.panel)
    grid = autocorr.corbit_grid(panel, net, W, args.max_lag, args.max_stage,
                                args.kind, part)
    return grid, part


def _cmd_nacf(args) -> int:
    grid, _ = _grid_from_args(args)
    write_text_atomic(args.out, grid.to_csv_text())
    print(f"wrote {args.out}")
    return 0


def _cmd_corbit(args) -> int:
    grid, part = _grid_from_args(args)
    out_dir = Path(args.out_dir)
    opts = corbit_svg.RenderOptions(size=args.size)
    write_text_atomic(out_dir / "grid.csv", grid.to_csv_text())
    if grid.has_communities:
        svg = corbit_svg.render_rcorbit(grid, opts)
        name = "rcorbit.svg"
    else:
        svg = corbit_svg.render_corbit(grid, opts)
        name = "corbit.svg"
    write_text_atomic(out_dir / name, svg)
    print(f"wrote {out_dir}/{name} and grid.csv")
    return 0


def _cmd_forecast(args) -> int:
    net, W = _load_network(args)
    part = _load_partition(args)
    panel = read_panel(args.panel)
    coeffs, order = read_model(args.model)
    preds = forecast(coeffs, order, net, W, panel, args.horizon, part)
    out = TimeSeriesPanel(values=preds.T, node_labels=panel.node_labels,
                          time_labels=tuple(f"+{s}" for s in range(1, args.horizon + 1)),
                          meta={"kind": "forecast", "horizon": str(args.horizon)})
    _write_panel_atomic(out, args.out)
    print(f"wrote {args.out}")
    return 0


def _cmd_compare(args) -> int:
    net, W = _load_network(args)
    part = _load_partition(args)
    panel = read_panel(args.panel)
    specs = []
    for item in args.spec or []:
        if "=" not in item:
            raise GnarError(f"--spec needs name=ORDER, got {item!r}")
        name, text = item.split("=", 1)
        specs.append(ModelSpec(name=name, order=parse_order(text)))
    externals = []
    for item in args.external or []:
        if "=" not in item:
            raise GnarError(f"--external needs name=FILE, got {item!r}")
        name, file = item.split("=", 1)
        externals.append(load_external_forecast(name, file, panel.d))
    report = compare(panel, net, W, specs, part, holdout=args.holdout,
                        external=externals)
    write_text_atomic(args.out, report.to_csv_text())
    print(f"wrote {args.out} (hold-out step {report.holdout_label})")
    return 0


def _cmd_elections(args) -> int:
    out_dir = Path(args.out_dir)
    data = elections.load_returns(args.returns)
    classification = elections.classify(data)
    part = classification.partition
    net = elections.us_border_network()
    W = default_weights(bfs_distances(net))

    _write_panel_atomic(data.panel, out_dir / "panel_raw.csv")
    write_text_atomic(out_dir / "classification.csv", classification.to_csv_text())
    write_text_atomic(out_dir / "network_edges.csv", format_edge_list(net))
    write_text_atomic(out_dir / "partition.csv", format_partition(part))

    std = elections.standardize(data.panel)
    _write_panel_atomic(std, out_dir / "panel_standardised.csv")
    order_std = parse_order("community:[2,2,2];{[1,0],[1,0],[1,0]}")
    fit_std = estimate.fit_ols(estimate.build_design(std, order_std, net, W, part))
    write_text_atomic(out_dir / "fit_standardised.csv",
                      estimate.coefficient_table(fit_std))
    _write_panel_atomic(fit_std.residuals, out_dir / "residuals_standardised.csv")
    if not fit_std.stationary:
        print("note: standardised fit violates the stationarity condition "
              f"(largest sum {np.max(fit_std.stationarity_sums):.3f}); "
              "see the differenced fit", file=sys.stderr)

    grid_std = autocorr.corbit_grid(std, net, W, args.max_lag, args.max_stage,
                                    "pnacf", part)
    write_text_atomic(out_dir / "pnacf_grid_standardised.csv", grid_std.to_csv_text())
    write_text_atomic(out_dir / "rcorbit_pnacf_standardised.svg",
                      corbit_svg.render_rcorbit(grid_std, corbit_svg.RenderOptions()))

    diff = elections.standardize(elections.difference(data.panel))
    _write_panel_atomic(diff, out_dir / "panel_differenced_standardised.csv")
    order_diff = parse_order("community:[3,3,3];{[0,0,0],[0,0,0],[0,0,0]}")
    fit_diff = estimate.fit_ols(estimate.build_design(diff, order_diff, net, W, part))
    write_text_atomic(out_dir / "fit_differenced.csv",
                      estimate.coefficient_table(fit_diff))
    _write_panel_atomic(fit_diff.residuals, out_dir / "residuals_differenced.csv")

    grid_diff = autocorr.corbit_grid(diff, net, W, min(args.max_lag, diff.T - 1),
                                     args.max_stage, "pnacf", part)
    write_text_atomic(out_dir / "pnacf_grid_differenced.csv", grid_diff.to_csv_text())
    write_text_atomic(out_dir / "rcorbit_pnacf_differenced.svg",
                      corbit_svg.render_rcorbit(grid_diff, corbit_svg.RenderOptions()))

    specs = [
        ModelSpec("GNAR", order_std),
        ModelSpec("GNAR*", parse_order("global:2;[1,0]")),
        ModelSpec("GNAR+", parse_order("local:2;[1,0]")),
    ]
    externals = []
    for item in args.external or []:
        name, file = item.split("=", 1)
        externals.append(load_external_forecast(name, file, data.panel.d))
    report = compare(data.panel, net, W, specs, part, holdout=args.holdout,
                        external=externals)
    write_text_atomic(out_dir / "comparison.csv", report.to_csv_text())
    print(f"wrote election study outputs to {out_dir} "
          f"(hold-out {report.holdout_label})")
    return 0


def _add_network_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--network", required=True, help="edge-list file (from,to)")
    p.add_argument("--d", type=int, default=None,
                   help="node count when the edge list lacks a '# d: N' line")
    p.add_argument("--weights", default=None,
                   help="optional from,to,w overrides of the default weights")


def _add_partition_arg(p: argparse.ArgumentParser, required=False) -> None:
    p.add_argument("--partition", "--communities", dest="partition",
                   required=required, default=None,
                   help="node,community file defining the communities")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gnar",
        description="Network autoregressive modelling: simulation, estimation, "
                    "autocorrelation diagnostics, radial plots and forecasting.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate a model file into a panel")
    _add_network_args(p)
    _add_partition_arg(p)
    p.add_argument("--model", required=True, help="model file to simulate from")
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--burn-in", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--allow-nonstationary", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("fit", help="least-squares fit of an order to a panel")
    _add_network_args(p)
    _add_partition_arg(p)
    p.add_argument("--panel", required=True)
    p.add_argument("--order", required=True,
                   help="e.g. community:[1,2];{[1],[1,1]} or global:2;[1,0]")
    p.add_argument("--per-community", action="store_true",
                   help="independent block fits on each community's own range")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("nacf", help="autocorrelation grid as CSV")
    _add_network_args(p)
    _add_partition_arg(p)
    p.add_argument("--panel", required=True)
    p.add_argument("--kind", choices=list(autocorr.KINDS), default="nacf")
    p.add_argument("--max-lag", type=int, required=True)
    p.add_argument("--max-stage", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_nacf)

    p = sub.add_parser("corbit", help="radial autocorrelation plot (SVG) + grid CSV")
    _add_network_args(p)
    _add_partition_arg(p)
    p.add_argument("--panel", required=True)
    p.add_argument("--kind", choices=list(autocorr.KINDS), default="pnacf")
    p.add_argument("--max-lag", type=int, required=True)
    p.add_argument("--max-stage", type=int, required=True)
    p.add_argument("--size", type=int, default=640)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_corbit)

    p = sub.add_parser("forecast", help="iterated forecasts from a model file")
    _add_network_args(p)
    _add_partition_arg(p)
    p.add_argument("--panel", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--horizon", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_forecast)

    p = sub.add_parser("compare", help="hold-out comparison of model specs")
    _add_network_args(p)
    _add_partition_arg(p)
    p.add_argument("--panel", required=True)
    p.add_argument("--spec", action="append",
                   help="name=ORDER, repeatable (e.g. GNAR=community:[1,1];{[1],[1]})")
    p.add_argument("--external", action="append",
                   help="name=FILE with an external forecast to score")
    p.add_argument("--holdout", type=int, default=-1,
                   help="panel column to hold out (default: last)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("elections",
                       help="full US presidential case study from the returns CSV")
    p.add_argument("--returns", required=True,
                   help="MIT Election Lab per-candidate CSV")
    p.add_argument("--holdout", type=int, default=-1)
    p.add_argument("--max-lag", type=int, default=8)
    p.add_argument("--max-stage", type=int, default=3)
    p.add_argument("--external", action="append")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_elections)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GnarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
