"""On-disk cache of per-prime shape tables.

One file per prime, ``shape-v1-p<p>.csv``::

    # eccensus shape-table schema v1
    p,N,N1,count
    331,300,1,330
    ...

Writes go through a temporary file and ``os.replace`` so readers never see a
partial record set.
"""

from __future__ import annotations

import csv
import logging
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, Iterable, Optional

from .curves import ShapeTable, shape_table

log = logging.getLogger(__name__)

SCHEMA = "# eccensus shape-table schema v1"
ENV_VAR = "ECCENSUS_CACHE"
DEFAULT_DIR = "./census-cache"


def resolve_cache_dir(flag: Optional[str]) -> Path:
    env = os.environ.get(ENV_VAR)
    return Path(env if env else (flag or DEFAULT_DIR))


class ShapeStore:
    """Shape tables keyed by prime, memoised in memory and optionally on disk."""

    def __init__(self, cache_dir: Optional[os.PathLike] = None, threads: int = 1):
        self.cache_dir = Path(cache_dir) if cache_dir is not None else None
        self.threads = max(1, threads)
        self._mem: Dict[int, ShapeTable] = {}

    def _path(self, p: int) -> Path:
        assert self.cache_dir is not None
        return self.cache_dir / f"shape-v1-p{p}.csv"

    def _read(self, p: int) -> Optional[ShapeTable]:
        if self.cache_dir is None:
            return None
        path = self._path(p)
        if not path.exists():
            return None
        with path.open(newline="", encoding="utf-8") as fh:
            if fh.readline().rstrip("\n") != SCHEMA:
                log.warning("ignoring %s: unknown schema", path)
                return None
            table: ShapeTable = {}
            for row in csv.DictReader(fh):
                if int(row["p"]) != p:
                    raise ValueError(f"{path}: record for p={row['p']}")
                table[(int(row["N"]), int(row["N1"]))] = int(row["count"])
        return table

    def _write(self, p: int, table: ShapeTable) -> None:
        if self.cache_dir is None:
            return
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.cache_dir, prefix=f".p{p}-", suffix=".tmp")
        with os.fdopen(fd, "w", newline="", encoding="utf-8") as fh:
            fh.write(SCHEMA + "\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["p", "N", "N1", "count"])
            for (N, n1), k in sorted(table.items()):
                w.writerow([p, N, n1, k])
        os.replace(tmp, self._path(p))

    def get(self, p: int) -> ShapeTable:
        if p not in self._mem:
            table = self._read(p)
            if table is None:
                table = shape_table(p)
                self._write(p, table)
            self._mem[p] = table
        return self._mem[p]

    def prefetch(self, primes: Iterable[int]) -> None:
        """Fill tables for many primes, in worker processes when threads > 1."""
        todo = []
        for p in sorted(set(primes)):
            if p in self._mem:
                continue
            table = self._read(p)
            if table is None:
                todo.append(p)
            else:
                self._mem[p] = table
        if self.threads > 1 and len(todo) > 1:
            with ProcessPoolExecutor(max_workers=self.threads) as pool:
                for p, table in zip(todo, pool.map(shape_table, todo)):
                    self._write(p, table)
                    self._mem[p] = table
        else:
            for p in todo:
                self.get(p)


_default = ShapeStore()


def default_store() -> ShapeStore:
    return _default
