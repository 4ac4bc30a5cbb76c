"""CSV readers and writers.

Readers require a header row and report malformed rows with their line
number. Writers format every float with six significant digits so output
files are stable across platforms.
"""

import csv
import logging
import math
from collections.abc import Iterable, Iterator, Sequence
from pathlib import Path
from typing import BinaryIO

import numpy as np

from .constraints import CalibrationResult, DecisionMatrix
from .errors import CrelayError, InputFormatError
from .estimation import FadingFit, FadingReport, Measurement, PathLossReport
from .fading import FadingKind, SnrDist
from .scenario import CampaignResult

__all__ = (
    "MEASUREMENT_COLUMNS",
    "SNR_COLUMNS",
    "FIT_COLUMNS",
    "fmt",
    "read_measurements",
    "read_snr_samples",
    "read_fits",
    "write_rows",
    "write_fits",
    "write_decisions",
    "write_probabilities",
    "write_pathloss",
    "write_calibration",
    "write_cdf",
    "write_oracle",
    "write_campaign",
)

logger = logging.getLogger(__name__)

MEASUREMENT_COLUMNS = ("link_id", "distance_m", "rx_power_dbm")
SNR_COLUMNS = ("snapshot_id", "node_id", "snr_linear")
FIT_COLUMNS = ("node_id", "model", "mse", "gamma_bar", "m", "clamped")


def fmt(value: float | None) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return f"{value:.6g}"


def _decoded(f: BinaryIO, path: Path) -> Iterator[str]:
    """UTF-8 lines of a binary file; a leading BOM is dropped"""
    for number, raw in enumerate(f, 1):
        try:
            yield raw.decode("utf-8-sig" if number == 1 else "utf-8")
        except UnicodeDecodeError as e:
            raise InputFormatError(f"not valid UTF-8 ({e.reason} at byte {e.start})", path, number)


def _rows(path: Path, columns: Sequence[str]) -> Iterable[tuple[int, dict[str, str]]]:
    """Yield (line number, row) pairs after checking the header"""
    try:
        f = path.open("rb")
    except FileNotFoundError:
        raise InputFormatError("file not found", path)
    with f:
        reader = csv.DictReader(_decoded(f, path))
        try:
            if reader.fieldnames is None:
                raise InputFormatError("empty file, expected header " + ",".join(columns), path, 1)
            missing = [c for c in columns if c not in reader.fieldnames]
            if missing:
                raise InputFormatError(f"header lacks column(s) {', '.join(missing)}", path, 1)
            seen = False
            for row in reader:
                seen = True
                if None in row or any(row[c] is None for c in columns):
                    raise InputFormatError("wrong number of fields", path, reader.line_num)
                yield reader.line_num, row
        except csv.Error as e:
            raise InputFormatError(f"unparsable CSV: {e}", path, reader.line_num)
        if not seen:
            raise InputFormatError("no data rows", path, 2)


def _float(value: str, column: str, path: Path, line: int) -> float:
    try:
        number = float(value)
    except ValueError:
        raise InputFormatError(f"{column} is not a number: {value!r}", path, line)
    if not math.isfinite(number):
        raise InputFormatError(f"{column} is not finite: {value!r}", path, line)
    return number


def read_measurements(path: Path | str) -> list[Measurement]:
    path = Path(path)
    measurements = []
    for line, row in _rows(path, MEASUREMENT_COLUMNS):
        try:
            measurements.append(
                Measurement(
                    link_id=row["link_id"],
                    distance=_float(row["distance_m"], "distance_m", path, line),
                    rx_power=_float(row["rx_power_dbm"], "rx_power_dbm", path, line),
                )
            )
        except InputFormatError:
            raise
        except CrelayError as e:
            raise InputFormatError(str(e), path, line)
    logger.info("read %d measurements from %s", len(measurements), path)
    return measurements


def read_snr_samples(path: Path | str) -> dict[str, np.ndarray]:
    """Samples grouped by node id, in order of first appearance"""
    path = Path(path)
    grouped: dict[str, list[float]] = {}
    for line, row in _rows(path, SNR_COLUMNS):
        node = row["node_id"].strip()
        if not node:
            raise InputFormatError("empty node_id", path, line)
        grouped.setdefault(node, []).append(_float(row["snr_linear"], "snr_linear", path, line))
    return {node: np.array(values) for node, values in grouped.items()}


def read_fits(path: Path | str) -> dict[str, dict[str, FadingFit]]:
    """fits.csv back into {node_id: {model: FadingFit}}"""
    path = Path(path)
    fits: dict[str, dict[str, FadingFit]] = {}
    for line, row in _rows(path, FIT_COLUMNS):
        try:
            kind = FadingKind.parse(row["model"])
            gamma_bar = _float(row["gamma_bar"], "gamma_bar", path, line)
            if kind is FadingKind.RAYLEIGH:
                dist = SnrDist.rayleigh(gamma_bar)
            else:
                dist = SnrDist.nakagami(_float(row["m"], "m", path, line), gamma_bar)
            fit = FadingFit(
                dist,
                _float(row["mse"], "mse", path, line) if row["mse"] else 0.0,
                row["clamped"].strip() == "1",
            )
        except InputFormatError:
            raise
        except CrelayError as e:
            raise InputFormatError(str(e), path, line)
        fits.setdefault(row["node_id"].strip(), {})[kind.value] = fit
    return fits


def write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence[str]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    logger.info("wrote %s", path)
    return path


def _fit_row(node_id: str, fit: FadingFit) -> list[str]:
    nakagami = fit.dist.kind is FadingKind.NAKAGAMI
    return [
        node_id,
        fit.dist.kind.value,
        fmt(fit.mse),
        fmt(fit.dist.gamma_bar),
        fmt(fit.dist.m) if nakagami else "",
        "1" if fit.clamped else "0",
    ]


def write_fits(path: Path, reports: Iterable[FadingReport]) -> Path:
    rows = []
    for report in reports:
        rows.append(_fit_row(report.node_id, report.rayleigh))
        rows.append(_fit_row(report.node_id, report.nakagami))
    return write_rows(path, FIT_COLUMNS, rows)


def write_decisions(path: Path, matrix: DecisionMatrix) -> Path:
    """Rows per ID, columns per PR, cells 0/1"""
    grid = matrix.grid
    rows = [
        [id_id] + [str(int(grid[p][i])) for p in range(len(matrix.pr_ids))]
        for i, id_id in enumerate(matrix.id_ids)
    ]
    return write_rows(path, ["id\\pr", *matrix.pr_ids], rows)


def write_probabilities(path: Path, matrix: DecisionMatrix) -> Path:
    """F_I per PR and F_C per ID with their individual bits"""
    pr_probs = matrix.pr_probabilities or (math.nan,) * len(matrix.pr_ids)
    id_probs = matrix.id_probabilities or (math.nan,) * len(matrix.id_ids)
    rows = [
        [n, "interference", fmt(p), str(int(b))]
        for n, p, b in zip(matrix.pr_ids, pr_probs, matrix.ic_bits)
    ]
    rows += [
        [n, "capacity", fmt(p), str(int(b))] for n, p, b in zip(matrix.id_ids, id_probs, matrix.cc_bits)
    ]
    return write_rows(path, ["node_id", "constraint", "cdf", "bit"], rows)


def write_pathloss(out_dir: Path, report: PathLossReport) -> list[Path]:
    fit = report.fit
    summary = [
        ["log_distance", "pl_d0_db", fmt(fit.params.pl_d0)],
        ["log_distance", "d0_m", fmt(fit.params.d0)],
        ["log_distance", "n", fmt(fit.params.n)],
        ["log_distance", "sigma_pl_db", fmt(fit.sigma_pl)],
        ["shadowing", "mu_n", fmt(report.shadowing.mu if report.shadowing else None)],
        ["shadowing", "sigma_n", fmt(report.shadowing.sigma if report.shadowing else None)],
        ["shadowing", "mse", fmt(report.shadowing_mse)],
        ["itu_r", "f_mhz", fmt(report.itu.f_mhz)],
        ["itu_r", "n", fmt(report.itu.n)],
        ["itu_r", "l_floors_db", fmt(report.itu.l_floors)],
        ["winner2", "f_ghz", fmt(report.winner.f_ghz)],
        ["winner2", "l_w_db", fmt(report.winner.l_w)],
        ["winner2", "n_w", fmt(report.winner.n_w)],
    ]
    columns = ("link_id", "distance_m", "measured_pl_db", "log_distance_db", "itu_r_db", "winner2_db")
    predictions = [[p["link_id"], *(fmt(p[c]) for c in columns[1:])] for p in report.predictions]
    return [
        write_rows(out_dir / "pathloss.csv", ["model", "parameter", "value"], summary),
        write_rows(out_dir / "predictions.csv", columns, predictions),
    ]


def write_calibration(path: Path, result: CalibrationResult, pr_ids: Sequence[str]) -> Path:
    rows = [
        [fmt(s), *(str(int(b)) for b in bits), str(int(match))]
        for s, bits, match in zip(result.noise_powers, result.ic_bits, result.matches)
    ]
    return write_rows(path, ["noise_power_dbm", *pr_ids, "match"], rows)


def write_cdf(path: Path, x: np.ndarray, analytical: np.ndarray, empirical: np.ndarray | None = None) -> Path:
    header = ["x", "analytical"] + (["empirical"] if empirical is not None else [])
    rows = []
    for k, xk in enumerate(x):
        row = [fmt(float(xk)), fmt(float(analytical[k]))]
        if empirical is not None:
            row.append(fmt(float(empirical[k])))
        rows.append(row)
    return write_rows(path, header, rows)


def write_oracle(path: Path, result: CampaignResult) -> Path:
    rows = []
    for o in result.outcomes:
        constraint = "interference" if o.role == "pr" else "capacity"
        mc = o.oracle
        rows.append(
            [
                o.node_id,
                constraint,
                fmt(o.probability),
                fmt(mc.probability if mc else None),
                fmt(mc.stderr if mc else None),
                fmt(o.empirical),
                fmt(o.oracle_gap),
            ]
        )
    header = ["node_id", "constraint", "analytical", "monte_carlo", "stderr", "empirical", "abs_gap"]
    return write_rows(path, header, rows)


def write_campaign(out_dir: Path, result: CampaignResult) -> list[Path]:
    """fits.csv, probabilities.csv, decisions.csv and oracle.csv for one campaign"""
    reports = [o.report for o in result.outcomes if o.report is not None]
    return [
        write_fits(out_dir / "fits.csv", reports),
        write_probabilities(out_dir / "probabilities.csv", result.matrix),
        write_decisions(out_dir / "decisions.csv", result.matrix),
        write_oracle(out_dir / "oracle.csv", result),
    ]
