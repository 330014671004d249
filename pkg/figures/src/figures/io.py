"""Schema-checked readers for the laboratory's CSV products.

The upstream CLI freezes its CSV schemas, so the readers here demand an
exact header match: a renamed or missing column means the file was produced
by an incompatible version and must be refused, not guessed at. Leading
comment lines (the manifest stamp) are skipped.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

__all__ = [
    "CONSTANTS_COLUMNS",
    "ENSEMBLE_COLUMNS",
    "STATS_COLUMNS",
    "SchemaError",
    "EmptyDataError",
    "ConstantsTable",
    "EnsembleTable",
    "StatsRow",
    "read_constants",
    "read_ensemble",
    "read_stats",
]

CONSTANTS_COLUMNS = ("alpha", "A1", "A1_closed", "A2", "mu", "sigma2", "trunc_T", "h", "dt", "status")
ENSEMBLE_COLUMNS = ("replicate", "t_w", "t_paper", "eta", "R", "rN", "flag")
STATS_COLUMNS = (
    "n",
    "drift_hat",
    "drift_stderr",
    "var_slope_hat",
    "var_stderr",
    "mu",
    "sigma2",
    "z_drift",
    "z_var",
)


class SchemaError(ValueError):
    """The file's header does not match the frozen schema."""


class EmptyDataError(ValueError):
    """No usable data rows."""


def _read_rows(path: str | Path, expected: tuple[str, ...]) -> list[dict[str, str]]:
    text = Path(path).read_text(encoding="utf-8")
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    reader = csv.reader(lines)
    try:
        header = tuple(next(reader))
    except StopIteration:
        raise SchemaError(f"{path}: no header line") from None
    if header != expected:
        raise SchemaError(
            f"{path}: header {header} does not match the frozen schema {expected}"
        )
    rows = []
    for values in reader:
        if not values:
            continue
        if len(values) != len(expected):
            raise SchemaError(f"{path}: row with {len(values)} fields, expected {len(expected)}")
        rows.append(dict(zip(expected, values)))
    if not rows:
        raise EmptyDataError(f"{path}: no data rows")
    return rows


@dataclass
class ConstantsTable:
    """Parsed sweep rows with status 'ok', sorted by alpha."""

    alpha: list[float]
    mu: list[float]
    sigma2: list[float]
    a1_closed: list[float]
    n_skipped: int


def read_constants(path: str | Path) -> ConstantsTable:
    rows = _read_rows(path, CONSTANTS_COLUMNS)
    ok = [r for r in rows if r["status"] == "ok"]
    if not ok:
        raise EmptyDataError(f"{path}: every row carries a failure status")
    ok.sort(key=lambda r: float(r["alpha"]))
    return ConstantsTable(
        alpha=[float(r["alpha"]) for r in ok],
        mu=[float(r["mu"]) for r in ok],
        sigma2=[float(r["sigma2"]) for r in ok],
        a1_closed=[float(r["A1_closed"]) for r in ok],
        n_skipped=len(rows) - len(ok),
    )


@dataclass
class EnsembleTable:
    """Per-replicate shift trajectories on a shared recording grid.

    eta[k] belongs to clean_replicates[k]; flagged replicates are dropped
    before plotting (their series are truncated and would distort the
    cross-replicate statistics).
    """

    t_w: list[float]
    t_paper: list[float]
    eta: list[list[float]]
    clean_replicates: list[int]
    n_flagged: int


def read_ensemble(path: str | Path) -> EnsembleTable:
    rows = _read_rows(path, ENSEMBLE_COLUMNS)
    by_rep: dict[int, list[dict[str, str]]] = {}
    for r in rows:
        by_rep.setdefault(int(r["replicate"]), []).append(r)

    clean: list[int] = []
    n_flagged = 0
    for rep in sorted(by_rep):
        if any(r["flag"] for r in by_rep[rep]):
            n_flagged += 1
        else:
            clean.append(rep)
    if not clean:
        raise EmptyDataError(f"{path}: every replicate is flagged")

    first = by_rep[clean[0]]
    t_w = [float(r["t_w"]) for r in first]
    t_paper = [float(r["t_paper"]) for r in first]
    eta = []
    for rep in clean:
        series = by_rep[rep]
        if [float(r["t_w"]) for r in series] != t_w:
            raise SchemaError(f"{path}: replicate {rep} is on a different recording grid")
        eta.append([float(r["eta"]) for r in series])
    return EnsembleTable(
        t_w=t_w, t_paper=t_paper, eta=eta, clean_replicates=clean, n_flagged=n_flagged
    )


@dataclass
class StatsRow:
    n: int
    drift_hat: float
    drift_stderr: float
    var_slope_hat: float
    var_stderr: float
    mu: float
    sigma2: float
    z_drift: float
    z_var: float


def read_stats(path: str | Path) -> StatsRow:
    rows = _read_rows(path, STATS_COLUMNS)
    if len(rows) != 1:
        raise SchemaError(f"{path}: expected exactly one stats row, found {len(rows)}")
    r = rows[0]
    return StatsRow(
        n=int(r["n"]),
        drift_hat=float(r["drift_hat"]),
        drift_stderr=float(r["drift_stderr"]),
        var_slope_hat=float(r["var_slope_hat"]),
        var_stderr=float(r["var_stderr"]),
        mu=float(r["mu"]),
        sigma2=float(r["sigma2"]),
        z_drift=float(r["z_drift"]),
        z_var=float(r["z_var"]),
    )
