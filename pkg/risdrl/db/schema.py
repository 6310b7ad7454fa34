"""SQLite schema for the run registry."""
from __future__ import annotations

import sqlite3

SCHEMA_VERSION = 1

SCHEMA_SQL = """
CREATE TABLE IF NOT EXISTS schema_version (
    version INTEGER PRIMARY KEY
);

CREATE TABLE IF NOT EXISTS runs (
    id          INTEGER PRIMARY KEY AUTOINCREMENT,
    label       TEXT NOT NULL,
    kind        TEXT NOT NULL,          -- 'train', 'sweep', 'oracle', 'baselines'
    created_at  TEXT NOT NULL DEFAULT (datetime('now')),
    config_hash TEXT NOT NULL,
    seed        INTEGER,
    output_dir  TEXT NOT NULL DEFAULT '',
    row_count   INTEGER NOT NULL DEFAULT 0
);

CREATE TABLE IF NOT EXISTS metrics (
    run_id         INTEGER NOT NULL,
    row_index      INTEGER NOT NULL,
    method         TEXT NOT NULL,
    sweep_variable TEXT NOT NULL,
    sweep_value    REAL NOT NULL,
    seed           INTEGER NOT NULL,
    sum_rate       REAL NOT NULL,
    rates          TEXT NOT NULL,       -- JSON list
    outage         TEXT NOT NULL,       -- JSON list
    PRIMARY KEY (run_id, row_index),
    FOREIGN KEY (run_id) REFERENCES runs(id) ON DELETE CASCADE
);

CREATE INDEX IF NOT EXISTS idx_metrics_method ON metrics(run_id, method);

CREATE TABLE IF NOT EXISTS episodes (
    run_id        INTEGER NOT NULL,
    curve         TEXT NOT NULL DEFAULT '',
    episode       INTEGER NOT NULL,
    steps         INTEGER NOT NULL,
    mean_reward   REAL NOT NULL,
    critic1_loss  REAL,
    critic2_loss  REAL,
    policy_loss   REAL,
    alpha         REAL NOT NULL,
    eval_reward   REAL NOT NULL,
    PRIMARY KEY (run_id, curve, episode),
    FOREIGN KEY (run_id) REFERENCES runs(id) ON DELETE CASCADE
);
"""


def init_db(conn: sqlite3.Connection) -> None:
    """Initialize the database schema."""
    conn.executescript(SCHEMA_SQL)

    cur = conn.execute("SELECT COUNT(*) FROM schema_version")
    if cur.fetchone()[0] == 0:
        conn.execute("INSERT INTO schema_version VALUES (?)", (SCHEMA_VERSION,))
    conn.commit()
