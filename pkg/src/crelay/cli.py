"""Command-line interface.

Exit codes: 0 success, 2 input/parse error, 3 estimation degeneracy,
4 incomplete configuration.
"""

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import csvio
from .config import campaign_config, channel_config, constraint_config, resolve_flat
from .constraints import ConstraintConfig, build_decision_matrix, calibrate_noise_power, node_probabilities
from .errors import CrelayError, DegenerateFitError, InputFormatError, require
from .estimation import EmpiricalCdf, FadingFit, SnrSampleSet, fit_fading, fit_path_loss_report
from .fading import FadingKind, SnrDist, snr_cdf
from .scenario import run_campaign
from .seeding import generate_campaign_id, get_campaign_path

__all__ = ("main", "build_parser")

logger = logging.getLogger(__name__)

MODELS = ("nakagami", "rayleigh", "best")


def _select(node: str, fits: dict[str, FadingFit], model: str) -> SnrDist:
    if model == "best":
        # Nakagami first so it keeps an MSE tie whatever the row order of fits.csv
        kinds = sorted(fits, key=lambda kind: kind != FadingKind.NAKAGAMI.value)
        return min((fits[kind] for kind in kinds), key=lambda f: f.mse).dist
    if model not in fits:
        raise InputFormatError(f"node {node} has no {model} fit")
    return fits[model].dist


def _split_roles(fits: dict[str, dict[str, FadingFit]], model: str) -> tuple[dict, dict]:
    """PR and ID distributions keyed by node id, in file order"""
    prs, ids = {}, {}
    for node, node_fits in fits.items():
        prefix = node[:2].upper()
        if prefix == "PR":
            prs[node] = _select(node, node_fits, model)
        elif prefix == "ID":
            ids[node] = _select(node, node_fits, model)
        else:
            raise InputFormatError(f"node id {node!r} must start with PR or ID")
    return prs, ids


def _constraints(args) -> ConstraintConfig:
    return constraint_config(resolve_flat(args.preset, args.config))


def _print_matrix(matrix) -> None:
    width = max(len(n) for n in (*matrix.pr_ids, *matrix.id_ids)) + 2
    print("".ljust(width) + "".join(p.ljust(width) for p in matrix.pr_ids))
    grid = matrix.grid
    for i, id_id in enumerate(matrix.id_ids):
        cells = [
            f"{int(matrix.ic_bits[p])}.{int(matrix.cc_bits[i])}={int(grid[p][i])}".ljust(width)
            for p in range(len(matrix.pr_ids))
        ]
        print(id_id.ljust(width) + "".join(cells))


def cmd_fit_pathloss(args) -> int:
    measurements = csvio.read_measurements(args.measurements)
    cfg = channel_config(resolve_flat(args.preset, args.config))
    report = fit_path_loss_report(measurements, cfg)
    paths = csvio.write_pathloss(args.out_dir, report)
    fit = report.fit
    print(f"PL(d0)={fit.params.pl_d0:.4g} dB  n={fit.params.n:.4g}  sigma_PL={fit.sigma_pl:.4g} dB")
    if report.shadowing is not None:
        s = report.shadowing
        print(f"shadowing N({s.mu:.4g}, {s.sigma:.4g})  MSE={report.shadowing_mse:.3g}")
    print(f"WINNER II n_w={report.winner.n_w:.3g}")
    for path in paths:
        print(path)
    return 0


def cmd_fit_fading(args) -> int:
    grouped = csvio.read_snr_samples(args.samples)
    reports, failed = [], {}
    for node, samples in grouped.items():
        try:
            reports.append(fit_fading(SnrSampleSet(node, samples)))
        except CrelayError as e:
            logger.error("node %s: %s", node, e)
            failed[node] = e
    path = csvio.write_fits(args.out_dir / "fits.csv", reports)
    print(path)
    if failed:
        return DegenerateFitError.exit_code
    return 0


def cmd_eval(args) -> int:
    cfg = _constraints(args)
    prs, ids = _split_roles(csvio.read_fits(args.fits), args.model)
    rows = []
    for role, nodes in (("pr", prs), ("id", ids)):
        for node, dist in nodes.items():
            p = node_probabilities(dist, cfg, role)
            if role == "pr":
                rows.append([node, "interference", csvio.fmt(p), str(int(1.0 - p <= cfg.eps_i_out))])
            else:
                rows.append([node, "capacity", csvio.fmt(p), str(int(p <= cfg.eps_c_out))])
    path = csvio.write_rows(args.out_dir / "probabilities.csv", ["node_id", "constraint", "cdf", "bit"], rows)
    print(path)
    return 0


def cmd_decide(args) -> int:
    cfg = _constraints(args)
    prs, ids = _split_roles(csvio.read_fits(args.fits), args.model)
    require(len(prs) > 0 and len(ids) > 0, "fits must cover at least one PR and one ID", InputFormatError)
    matrix = build_decision_matrix(prs, ids, cfg)
    csvio.write_decisions(args.out_dir / "decisions.csv", matrix)
    csvio.write_probabilities(args.out_dir / "probabilities.csv", matrix)
    _print_matrix(matrix)
    return 0


def cmd_calibrate_noise(args) -> int:
    cfg = _constraints(args)
    prs, _ = _split_roles(csvio.read_fits(args.fits), args.model)
    pattern = args.pattern.strip()
    require(
        len(pattern) == len(prs) and set(pattern) <= {"0", "1"},
        f"pattern {pattern!r} must have one 0/1 digit per PR ({len(prs)})",
        InputFormatError,
    )
    bits = [c == "1" for c in pattern]
    result = calibrate_noise_power(list(prs.values()), cfg, bits, args.lo, args.hi, args.step)
    csvio.write_calibration(args.out_dir / "calibration.csv", result, list(prs))
    if result.window is None:
        print("no matching noise power")
        return 0
    lo, hi = result.window
    print(f"window [{lo:.1f}, {hi:.1f}] dBm  midpoint {result.midpoint:.2f} dBm")
    return 0


def cmd_export_cdf(args) -> int:
    lo, hi = args.range
    require(lo < hi, f"range [{lo}, {hi}] is inverted or empty")
    require(args.steps >= 1, f"steps must be at least 1, got {args.steps}")
    if args.fits is not None:
        require(args.node is not None, "--fits needs --node", InputFormatError)
        fits = csvio.read_fits(args.fits)
        require(args.node in fits, f"node {args.node} not found in {args.fits}", InputFormatError)
        dist = _select(args.node, fits[args.node], args.model)
    else:
        require(
            args.gamma_bar is not None,
            "give --gamma-bar (and --m for nakagami) or --fits",
            InputFormatError,
        )
        kind = FadingKind.parse("nakagami" if args.model == "best" else args.model)
        dist = SnrDist(kind, args.gamma_bar, args.m if args.m is not None else 1.0)
    x = np.linspace(lo, hi, max(args.steps, 2))
    empirical = None
    if args.samples is not None:
        require(args.node is not None, "--samples needs --node", InputFormatError)
        grouped = csvio.read_snr_samples(args.samples)
        require(args.node in grouped, f"node {args.node} not found in {args.samples}", InputFormatError)
        empirical = EmpiricalCdf(grouped[args.node])(x)
    path = csvio.write_cdf(args.output, x, snr_cdf(np.clip(x, 0.0, None), dist), empirical)
    print(path)
    return 0


def cmd_simulate(args) -> int:
    overrides = {"seed": args.seed, "workers": args.workers, "model": args.model_override}
    flat = resolve_flat(args.preset, args.config, overrides)
    cfg = campaign_config(flat)
    # ids are independent of the worker count
    identity = {key: value for key, value in flat.items() if key != "workers"}
    out_dir = args.out_dir or get_campaign_path() / generate_campaign_id(identity)
    result = run_campaign(cfg)
    csvio.write_campaign(out_dir, result)
    print(f"{result.snapshot_count} snapshots -> {out_dir}")
    _print_matrix(result.matrix)
    return 0


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="flat dotted-key TOML config")
    p.add_argument("--preset", help="start from a named preset (paper-shape)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crelay", description="Cognitive relay underlay decisions")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="repeat for more detail")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit-pathloss", help="log-distance, shadowing and WINNER II fits from measurements")
    p.add_argument("measurements", type=Path)
    p.add_argument("--out-dir", type=Path, default=Path("."))
    _add_config_args(p)
    p.set_defaults(handler=cmd_fit_pathloss)

    p = sub.add_parser("fit-fading", help="Rayleigh and Nakagami-m fits per node")
    p.add_argument("samples", type=Path)
    p.add_argument("--out-dir", type=Path, default=Path("."))
    p.set_defaults(handler=cmd_fit_fading)

    for name, handler, text in (
        ("eval", cmd_eval, "constraint probabilities and bits per node"),
        ("decide", cmd_decide, "AND-rule decision matrix"),
        ("calibrate-noise", cmd_calibrate_noise, "sweep the PR noise power against an IC pattern"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("fits", type=Path)
        p.add_argument("--out-dir", type=Path, default=Path("."))
        p.add_argument("--model", choices=MODELS, default="nakagami")
        _add_config_args(p)
        p.set_defaults(handler=handler)
        if name == "calibrate-noise":
            p.add_argument("--pattern", required=True, help="IC bits per PR, e.g. 1011")
            p.add_argument("--lo", type=float, default=-130.0)
            p.add_argument("--hi", type=float, default=-100.0)
            p.add_argument("--step", type=float, default=0.1)

    p = sub.add_parser("export-cdf", help="analytical (and empirical) CDF on a grid")
    p.add_argument("--model", choices=MODELS, default="nakagami")
    p.add_argument("--gamma-bar", type=float)
    p.add_argument("--m", type=float)
    p.add_argument("--fits", type=Path)
    p.add_argument("--samples", type=Path)
    p.add_argument("--node")
    p.add_argument("--range", type=float, nargs=2, metavar=("LO", "HI"), required=True)
    p.add_argument("--steps", type=int, default=100, help="grid points, endpoints included")
    p.add_argument("--output", type=Path, default=Path("cdf.csv"))
    p.set_defaults(handler=cmd_export_cdf)

    p = sub.add_parser("simulate", help="synthetic campaign with Monte Carlo oracle")
    _add_config_args(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--model", dest="model_override", choices=MODELS)
    p.add_argument("--out-dir", type=Path)
    p.set_defaults(handler=cmd_simulate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = (logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)]
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.handler(args)
    except CrelayError as e:
        logger.error("%s", e)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
