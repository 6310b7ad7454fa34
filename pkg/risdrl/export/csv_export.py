"""Metrics and training-curve CSV files.

Floats are written with repr() so reading a file back gives the exact values.
"""
from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Iterable, TextIO

from risdrl.db.store import Store
from risdrl.experiments.metrics import MetricsRow

METRICS_HEADER = ["method", "sweep_variable", "sweep_value", "seed", "sum_rate", "rates", "outage"]
CURVE_HEADER = ["episode", "steps", "mean_reward", "critic1_loss", "critic2_loss",
                "policy_loss", "alpha", "eval_reward"]
_SEP = ";"


def _join(values: Iterable[float]) -> str:
    return _SEP.join(repr(float(v)) for v in values)


def _split(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(_SEP)) if text else ()


def metrics_to_csv_row(row: MetricsRow) -> list[str]:
    return [row.method, row.sweep_variable, repr(float(row.sweep_value)), str(row.seed),
            repr(float(row.sum_rate)), _join(row.rates), _join(row.outage)]


class MetricsCsvWriter:
    """Appends rows to a metrics CSV, flushing after each one."""

    def __init__(self, path: Path):
        self.path = path
        path.parent.mkdir(parents=True, exist_ok=True)
        self._file: TextIO = open(path, "w", newline="", encoding="utf-8")
        self._writer = csv.writer(self._file)
        self._writer.writerow(METRICS_HEADER)
        self._file.flush()
        self.count = 0

    def write(self, row: MetricsRow):
        self._writer.writerow(metrics_to_csv_row(row))
        self._file.flush()
        self.count += 1

    def close(self):
        self._file.close()

    def __enter__(self):
        return self

    def __exit__(self, *args):
        self.close()


def format_metrics_csv(rows: Iterable[MetricsRow]) -> str:
    output = io.StringIO()
    writer = csv.writer(output)
    writer.writerow(METRICS_HEADER)
    for row in rows:
        writer.writerow(metrics_to_csv_row(row))
    return output.getvalue()


def parse_metrics_csv(text: str) -> list[MetricsRow]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != METRICS_HEADER:
        raise ValueError(f"Not a metrics CSV: header {reader.fieldnames}")
    return [
        MetricsRow(
            method=rec["method"],
            sweep_variable=rec["sweep_variable"],
            sweep_value=float(rec["sweep_value"]),
            seed=int(rec["seed"]),
            sum_rate=float(rec["sum_rate"]),
            rates=_split(rec["rates"]),
            outage=_split(rec["outage"]),
        )
        for rec in reader
    ]


def read_metrics_csv(path: Path) -> list[MetricsRow]:
    return parse_metrics_csv(path.read_text(encoding="utf-8"))


def format_curve_csv(episodes: Iterable) -> str:
    """Training curve rows from EpisodeLog or stored EpisodeRow objects."""
    output = io.StringIO()
    writer = csv.writer(output)
    writer.writerow(CURVE_HEADER)
    for e in episodes:
        writer.writerow([e.episode, e.steps, repr(float(e.mean_reward)), repr(float(e.critic1_loss)),
                         repr(float(e.critic2_loss)), repr(float(e.policy_loss)),
                         repr(float(e.alpha)), repr(float(e.eval_reward))])
    return output.getvalue()


def write_curve_csv(path: Path, episodes: Iterable) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_curve_csv(episodes), encoding="utf-8", newline="")
    return path


def export_csv(store: Store, run_id: int, curve: str | None = None) -> str:
    """Export a stored run: its metrics, or one training curve when ``curve`` is given."""
    if curve is not None:
        return format_curve_csv(store.get_episodes(run_id, curve))
    return format_metrics_csv(store.get_metrics(run_id))
