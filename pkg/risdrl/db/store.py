"""Run registry CRUD and batch inserts with WAL mode."""
from __future__ import annotations

import json
import math
import sqlite3
from pathlib import Path
from typing import Iterable, Optional

from risdrl.db.models import EpisodeRow, Run
from risdrl.db.schema import init_db
from risdrl.experiments.metrics import MetricsRow

_RUN_COLUMNS = "id, label, kind, created_at, config_hash, seed, output_dir, row_count"


def _nullable(value: float) -> Optional[float]:
    return None if value is None or math.isnan(value) else value


class Store:
    """Database access layer for experiment runs."""

    def __init__(self, db_path: Path):
        self.db_path = db_path
        db_path.parent.mkdir(parents=True, exist_ok=True)
        self.conn = sqlite3.connect(str(db_path))
        self.conn.execute("PRAGMA journal_mode=WAL")
        self.conn.execute("PRAGMA synchronous=NORMAL")
        self.conn.execute("PRAGMA foreign_keys=ON")
        init_db(self.conn)

    def close(self):
        self.conn.close()

    def __enter__(self):
        return self

    def __exit__(self, *args):
        self.close()

    # -- Runs --

    def create_run(self, label: str, kind: str, config_hash: str,
                   seed: Optional[int] = None, output_dir: str = "") -> int:
        """Create a new run and return its ID."""
        cur = self.conn.execute(
            "INSERT INTO runs (label, kind, config_hash, seed, output_dir) VALUES (?, ?, ?, ?, ?)",
            (label, kind, config_hash, seed, output_dir),
        )
        self.conn.commit()
        return cur.lastrowid

    def update_run_count(self, run_id: int, row_count: int):
        self.conn.execute("UPDATE runs SET row_count=? WHERE id=?", (row_count, run_id))
        self.conn.commit()

    def get_run(self, run_id: int) -> Optional[Run]:
        row = self.conn.execute(f"SELECT {_RUN_COLUMNS} FROM runs WHERE id=?", (run_id,)).fetchone()
        return Run(*row) if row is not None else None

    def get_latest_run(self) -> Optional[Run]:
        row = self.conn.execute(f"SELECT {_RUN_COLUMNS} FROM runs ORDER BY id DESC LIMIT 1").fetchone()
        return Run(*row) if row is not None else None

    def list_runs(self, kind: Optional[str] = None) -> list[Run]:
        if kind:
            cur = self.conn.execute(f"SELECT {_RUN_COLUMNS} FROM runs WHERE kind=? ORDER BY id", (kind,))
        else:
            cur = self.conn.execute(f"SELECT {_RUN_COLUMNS} FROM runs ORDER BY id")
        return [Run(*row) for row in cur.fetchall()]

    # -- Batch inserts --

    def insert_metrics(self, run_id: int, rows: Iterable[MetricsRow], start_index: int = 0) -> int:
        """Append metrics rows; returns how many were written."""
        payload = [
            (run_id, start_index + i, r.method, r.sweep_variable, r.sweep_value, r.seed, r.sum_rate,
             json.dumps(list(r.rates)), json.dumps(list(r.outage)))
            for i, r in enumerate(rows)
        ]
        self.conn.executemany(
            "INSERT OR REPLACE INTO metrics "
            "(run_id, row_index, method, sweep_variable, sweep_value, seed, sum_rate, rates, outage) "
            "VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?)",
            payload,
        )
        self.conn.commit()
        return len(payload)

    def insert_episodes(self, run_id: int, curve: str, episodes: Iterable) -> int:
        """Batch insert training-curve rows (anything with EpisodeLog's fields)."""
        payload = [
            (run_id, curve, e.episode, e.steps, e.mean_reward, _nullable(e.critic1_loss),
             _nullable(e.critic2_loss), _nullable(e.policy_loss), e.alpha, e.eval_reward)
            for e in episodes
        ]
        self.conn.executemany(
            "INSERT OR REPLACE INTO episodes "
            "(run_id, curve, episode, steps, mean_reward, critic1_loss, critic2_loss, "
            "policy_loss, alpha, eval_reward) VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?)",
            payload,
        )
        self.conn.commit()
        return len(payload)

    # -- Queries --

    def get_metrics(self, run_id: int, method: Optional[str] = None) -> list[MetricsRow]:
        sql = ("SELECT method, sweep_variable, sweep_value, seed, sum_rate, rates, outage "
               "FROM metrics WHERE run_id=?")
        params: tuple = (run_id,)
        if method:
            sql += " AND method=?"
            params += (method,)
        cur = self.conn.execute(sql + " ORDER BY row_index", params)
        return [
            MetricsRow(method=m, sweep_variable=var, sweep_value=val, seed=seed, sum_rate=rate,
                       rates=tuple(json.loads(rates)), outage=tuple(json.loads(outage)))
            for m, var, val, seed, rate, rates, outage in cur.fetchall()
        ]

    def get_episodes(self, run_id: int, curve: Optional[str] = None) -> list[EpisodeRow]:
        sql = ("SELECT run_id, curve, episode, steps, mean_reward, critic1_loss, critic2_loss, "
               "policy_loss, alpha, eval_reward FROM episodes WHERE run_id=?")
        params: tuple = (run_id,)
        if curve is not None:
            sql += " AND curve=?"
            params += (curve,)
        cur = self.conn.execute(sql + " ORDER BY curve, episode", params)
        return [EpisodeRow(*row) for row in cur.fetchall()]

    def get_curve_names(self, run_id: int) -> list[str]:
        cur = self.conn.execute(
            "SELECT DISTINCT curve FROM episodes WHERE run_id=? ORDER BY curve", (run_id,))
        return [row[0] for row in cur.fetchall()]

    # -- Maintenance --

    def purge_old_runs(self, keep: int) -> int:
        """Delete all but the N most recent runs."""
        cur = self.conn.execute(
            "SELECT id FROM runs ORDER BY id DESC LIMIT -1 OFFSET ?",
            (keep,),
        )
        old_ids = [row[0] for row in cur.fetchall()]
        if old_ids:
            placeholders = ",".join("?" * len(old_ids))
            self.conn.execute(f"DELETE FROM metrics WHERE run_id IN ({placeholders})", old_ids)
            self.conn.execute(f"DELETE FROM episodes WHERE run_id IN ({placeholders})", old_ids)
            self.conn.execute(f"DELETE FROM runs WHERE id IN ({placeholders})", old_ids)
            self.conn.commit()
            self.conn.execute("VACUUM")
        return len(old_ids)

    def clear_all_runs(self) -> int:
        """Delete every run and all related rows."""
        count = self.conn.execute("SELECT COUNT(*) FROM runs").fetchone()[0]
        if count:
            self.conn.execute("DELETE FROM metrics")
            self.conn.execute("DELETE FROM episodes")
            self.conn.execute("DELETE FROM runs")
            self.conn.commit()
            self.conn.execute("VACUUM")
        return count
