"""Persistence for Q-tables and training metrics.

Q-tables are line-oriented UTF-8 text: ``#key: value`` header lines, then
one ``STATEKEY<TAB>ACTION<TAB>VALUE[<TAB>COUNT]`` entry per line, sorted,
with values as shortest round-trip decimals. Metrics are plain CSV. All
writes are atomic (temp file + rename).
"""

from __future__ import annotations

import csv
import os
import tempfile
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable

from .agents import QTable
from .rules import RulesConfig
from .training import MetricsPoint

FORMAT_NAME = "royal-ur-qtable"
FORMAT_VERSION = 1

METRICS_COLUMNS = ("episode", "time_to_finish", "tracked_value", "wins_p1", "wins_p2")


class StorageError(Exception):
    """Malformed or unsupported table/metrics file content."""


@dataclass(frozen=True)
class TableMeta:
    """Provenance header of a persisted table."""

    algorithm: str = ""
    alpha: float = 0.1
    gamma: float = 0.9
    epsilon: float = 0.1
    pieces_per_player: int = 4
    dice_count: int = 2
    reroll_on_max: bool = False
    seed: int = 0
    episodes: int = 0
    seat: str = "P1"

    def rules(self) -> RulesConfig:
        return RulesConfig(self.pieces_per_player, self.dice_count, self.reroll_on_max)


def _atomic_write(path: Path, write) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    tmp = Path(tmp_name)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            write(handle)
        os.replace(tmp, path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise


def save_qtable(q: QTable, meta: TableMeta, path: str | Path) -> None:
    """Write the table with its header; entries sorted by (state, action)."""
    path = Path(path)
    entries = sorted(q.items(), key=lambda item: (item[0], item[1]))

    def write(handle) -> None:
        handle.write(f"#format: {FORMAT_NAME}\n")
        handle.write(f"#version: {FORMAT_VERSION}\n")
        for key, value in asdict(meta).items():
            handle.write(f"#{key}: {value}\n")
        for state, action, value, count in entries:
            line = f"{state}\t{action}\t{value!r}"
            if count is not None:
                line += f"\t{count}"
            handle.write(line + "\n")

    _atomic_write(path, write)


def _parse_headers(lines: list[tuple[int, str]], path: Path) -> dict[str, str]:
    headers: dict[str, str] = {}
    for lineno, line in lines:
        body = line[1:]
        key, sep, value = body.partition(":")
        if not sep:
            raise StorageError(f"{path}:{lineno}: malformed header line {line!r}")
        headers[key.strip()] = value.strip()
    return headers


def load_qtable(path: str | Path) -> tuple[QTable, TableMeta]:
    """Reconstruct a saved table exactly; raises StorageError on bad content."""
    path = Path(path)
    header_lines: list[tuple[int, str]] = []
    entry_lines: list[tuple[int, str]] = []
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                if entry_lines:
                    raise StorageError(f"{path}:{lineno}: header line after entries")
                header_lines.append((lineno, line))
            else:
                entry_lines.append((lineno, line))

    headers = _parse_headers(header_lines, path)
    if headers.get("format") != FORMAT_NAME:
        raise StorageError(f"{path}: not a {FORMAT_NAME} file")
    version = headers.get("version")
    if version != str(FORMAT_VERSION):
        raise StorageError(
            f"{path}: unsupported format version {version!r} (expected {FORMAT_VERSION})"
        )
    try:
        meta = TableMeta(
            algorithm=headers.get("algorithm", ""),
            alpha=float(headers.get("alpha", 0.1)),
            gamma=float(headers.get("gamma", 0.9)),
            epsilon=float(headers.get("epsilon", 0.1)),
            pieces_per_player=int(headers.get("pieces_per_player", 4)),
            dice_count=int(headers.get("dice_count", 2)),
            reroll_on_max=headers.get("reroll_on_max", "False") == "True",
            seed=int(headers.get("seed", 0)),
            episodes=int(headers.get("episodes", 0)),
            seat=headers.get("seat", "P1"),
        )
    except ValueError as exc:
        raise StorageError(f"{path}: bad header value: {exc}") from exc

    q = QTable(track_visits=meta.algorithm == "monte_carlo")
    for lineno, line in entry_lines:
        fields = line.split("\t")
        if len(fields) not in (3, 4):
            raise StorageError(f"{path}:{lineno}: expected 3 or 4 tab-separated fields")
        state = fields[0]
        try:
            action = int(fields[1])
            value = float(fields[2])
        except ValueError as exc:
            raise StorageError(f"{path}:{lineno}: {exc}") from exc
        q.set(state, action, value)
        if len(fields) == 4:
            if q.visits is None:
                q.visits = {}
            try:
                q.visits.setdefault(state, {})[action] = int(fields[3])
            except ValueError as exc:
                raise StorageError(f"{path}:{lineno}: {exc}") from exc
    return q, meta


def write_metrics(series: Iterable[MetricsPoint], path: str | Path) -> None:
    """CSV with one row per recorded point, columns in declared order."""
    path = Path(path)
    rows = list(series)

    def write(handle) -> None:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(METRICS_COLUMNS)
        for p in rows:
            writer.writerow(
                [p.episode, p.time_to_finish, repr(p.tracked_value), p.wins_p1, p.wins_p2]
            )

    _atomic_write(path, write)


def read_metrics(path: str | Path) -> list[MetricsPoint]:
    path = Path(path)
    points: list[MetricsPoint] = []
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != list(METRICS_COLUMNS):
            raise StorageError(f"{path}: unexpected metrics header {header}")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(METRICS_COLUMNS):
                raise StorageError(f"{path}:{lineno}: expected {len(METRICS_COLUMNS)} columns")
            try:
                points.append(
                    MetricsPoint(
                        episode=int(row[0]),
                        time_to_finish=int(row[1]),
                        tracked_value=float(row[2]),
                        wins_p1=int(row[3]),
                        wins_p2=int(row[4]),
                    )
                )
            except ValueError as exc:
                raise StorageError(f"{path}:{lineno}: {exc}") from exc
    return points
