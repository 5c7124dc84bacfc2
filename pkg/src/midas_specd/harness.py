"""Rejection-rate experiments over grids of simulation settings.

A *data cell* is one ``(T, m, c, d)`` combination.  For each data cell and
replication index the regressor and error chains are drawn once, with a seed
derived from ``(base_seed, cell_id, r)``, and every requested ``k`` and method
is evaluated on that draw.  Counts are merged by addition, so the table does
not depend on how replications are split across worker processes.
"""
import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

from .covariance import HacOptions
from .dgp import DgpSpec, cell_id, derive_replication_seed, simulate_blocks
from .exceptions import InvalidParameter, MidasSpecError
from .spectests import METHODS, Diagnostic, PreparedTests
from .weights import parse_null

K_GRID = tuple(round(0.1 * i, 1) for i in range(21))
METHOD_LABELS = {"new": "New", "agk": "AGK", "miller": "Miller", "lambda": "LambdaT"}
_LABEL_TO_METHOD = {v.lower(): k for k, v in METHOD_LABELS.items()}
BLOCK_SIZE = 50


def normalise_method(name):
    key = name.strip().lower()
    key = _LABEL_TO_METHOD.get(key, key)
    if key not in METHODS:
        raise InvalidParameter(f"unknown method {name!r}")
    return key


@dataclass(frozen=True)
class GridConfig:
    methods: tuple = ("miller", "agk", "new")
    T_values: tuple = (125, 512)
    m_values: tuple = (4, 150, 365)
    c_values: tuple = (0.0, 0.8)
    d_values: tuple = (0.0,)
    k_values: tuple = K_GRID
    replications: int = 500
    nominal_level: float = 0.05
    base_seed: int = 0
    hac_bandwidth: Optional[int] = None
    beta: float = 10.0
    burn_in: int = 1000
    null: str = "flat"

    def __post_init__(self):
        if self.replications < 1:
            raise InvalidParameter("replications must be at least 1")
        if not 0.0 < self.nominal_level < 1.0:
            raise InvalidParameter("nominal_level must lie in (0, 1)")
        object.__setattr__(self, "methods", tuple(normalise_method(m) for m in self.methods))
        for c in self.c_values:
            for d in self.d_values:
                if not (abs(c) < 1 and abs(d) < 1):
                    raise InvalidParameter(f"nonstationary AR coefficient c={c}, d={d}")

    def data_cells(self):
        return [(T, m, c, d) for T in self.T_values for m in self.m_values
                for d in self.d_values for c in self.c_values]


PRESETS = {
    "desk": GridConfig(replications=500),
    "full": GridConfig(replications=2000, c_values=(-0.5, 0.0, 0.3, 0.5, 0.8),
                       d_values=(-0.5, 0.0, 0.5)),
}


def preset(name, **overrides):
    try:
        base = PRESETS[name]
    except KeyError:
        raise InvalidParameter(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return replace(base, **overrides)


@dataclass
class CellCount:
    rejections: int = 0
    failures: int = 0
    replications: int = 0

    @property
    def non_rejections(self):
        return self.replications - self.rejections - self.failures

    @property
    def rate(self):
        return self.rejections / self.replications if self.replications else math.nan

    def add(self, other):
        self.rejections += other.rejections
        self.failures += other.failures
        self.replications += other.replications


@dataclass
class RejectionTable:
    """Counts keyed by ``(method, T, m, c, d, k)``."""

    cells: dict = field(default_factory=dict)

    def add(self, key, count):
        self.cells.setdefault(key, CellCount()).add(count)

    def merge(self, other):
        for key, count in other.cells.items():
            self.add(key, count)

    def rate(self, method, T, m, c, d, k):
        return self.cells[(method, T, m, float(c), float(d), float(k))].rate

    def __len__(self):
        return len(self.cells)


def _run_block(config, T, m, c, d, start, stop):
    null = parse_null(config.null, m)
    hac = HacOptions(bandwidth=config.hac_bandwidth)
    cid = cell_id(T, m, c, d)
    table = RejectionTable()
    keys = [(meth, T, m, float(c), float(d), float(k))
            for k in config.k_values for meth in config.methods]
    for r in range(start, stop):
        spec = DgpSpec(T=T, m=m, c=c, d=d, beta=config.beta, burn_in=config.burn_in,
                       seed=derive_replication_seed(config.base_seed, cid, r))
        blocks = simulate_blocks(spec)
        try:
            prepared = PreparedTests(blocks.x_high, null, hac)
        except MidasSpecError:
            for key in keys:
                table.add(key, CellCount(0, 1, 1))
            continue
        for k in config.k_values:
            y = blocks.respond(config.beta, k)
            for meth in config.methods:
                key = (meth, T, m, float(c), float(d), float(k))
                try:
                    out = prepared.run(meth, y)
                except MidasSpecError:
                    table.add(key, CellCount(0, 1, 1))
                    continue
                failed = (math.isnan(out.statistic)
                          or Diagnostic.NON_POSITIVE_HAUSMAN_VARIANCE in out.diagnostics)
                if failed:
                    table.add(key, CellCount(0, 1, 1))
                else:
                    table.add(key, CellCount(int(out.rejects(config.nominal_level)), 0, 1))
    return table


def _run_block_args(args):
    return _run_block(*args)


def _work_units(config):
    units = []
    for T, m, c, d in config.data_cells():
        for start in range(0, config.replications, BLOCK_SIZE):
            units.append((config, T, m, c, d, start,
                          min(start + BLOCK_SIZE, config.replications)))
    return units


def run_grid(config, workers=1, progress=None):
    """Run every cell of ``config`` and return the merged :class:`RejectionTable`.

    ``workers > 1`` spreads replication blocks over a process pool; the result
    is identical to the single-process run.  ``progress`` is an optional
    callable invoked with ``(done, total)`` after each block.
    """
    units = _work_units(config)
    table = RejectionTable()
    if workers <= 1:
        results = map(_run_block_args, units)
        pool = None
    else:
        pool = ProcessPoolExecutor(max_workers=workers)
        results = pool.map(_run_block_args, units)
    try:
        for i, part in enumerate(results, 1):
            table.merge(part)
            if progress is not None:
                progress(i, len(units))
    finally:
        if pool is not None:
            pool.shutdown()
    return table


_METHOD_ORDER = {m: i for i, m in enumerate(("miller", "agk", "new", "lambda"))}


def _rows(table):
    ks = sorted({key[5] for key in table.cells})
    groups = {}
    for (meth, T, m, c, d, k), count in table.cells.items():
        groups.setdefault((T, m, d, c, meth), {})[k] = count
    order = sorted(groups, key=lambda g: (g[0], g[1], g[2], g[3], _METHOD_ORDER[g[4]]))
    return ks, [(g, groups[g]) for g in order]


def format_rate(count):
    return f"{100.0 * count.rejections / count.replications:.1f}"


def render_table(table, fmt="csv"):
    """Render rejection rates (percent, one decimal) with one column per k.

    Rows run over ``T x m x d x c x method``; the trailing ``failures``
    column totals the replications that produced no valid statistic.
    """
    ks, rows = _rows(table)
    header = ["T", "m", "d", "c", "method"] + [f"{k:.1f}" for k in ks] + ["failures"]
    body = []
    for (T, m, d, c, meth), by_k in rows:
        rates = [format_rate(by_k[k]) if k in by_k else "" for k in ks]
        fails = sum(cnt.failures for cnt in by_k.values())
        body.append([str(T), str(m), f"{d:g}", f"{c:g}", METHOD_LABELS[meth]] + rates + [str(fails)])
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(body)
        return buf.getvalue()
    if fmt in ("md", "markdown"):
        lines = ["| " + " | ".join(header) + " |",
                 "|" + "|".join("---" for _ in header) + "|"]
        lines += ["| " + " | ".join(row) + " |" for row in body]
        return "\n".join(lines) + "\n"
    raise InvalidParameter(f"unknown format {fmt!r}")

