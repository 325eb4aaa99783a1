"""Render mean +/- std panels from simulator trajectory CSVs.

Input files follow the fixed schema ``run,t,regret,comm_cost,control_msgs``
(one row per run per step).  Each panel overlays one labeled series per
CSV: the across-run mean at every t with a shaded one-standard-deviation
band.  Rendering is deterministic for identical inputs.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

SCHEMA = ("run", "t", "regret", "comm_cost", "control_msgs")
METRICS = ("regret", "comm_cost")


class SchemaError(ValueError):
    pass


@dataclass(frozen=True)
class PanelSpec:
    series: tuple[tuple[str, str], ...]  # (label, csv path) pairs
    out_path: str
    metric: str  # "regret" | "comm_cost"
    log_scale: bool = False

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}, got {self.metric!r}")
        if not self.series:
            raise ValueError("panel needs at least one labeled series")


def load_series(path: str, metric: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Read one CSV and reduce to (t, mean, std) across runs."""
    with open(path, newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty CSV") from None
        if tuple(header) != SCHEMA:
            missing = set(SCHEMA) - set(header)
            if missing:
                raise SchemaError(f"{path}: missing column(s) {sorted(missing)}")
            raise SchemaError(f"{path}: header {header} != {list(SCHEMA)}")
        col = SCHEMA.index(metric)
        t_col = SCHEMA.index("t")
        ts, vals = [], []
        for row in reader:
            ts.append(int(row[t_col]))
            vals.append(float(row[col]))
    if not ts:
        raise SchemaError(f"{path}: no data rows")
    ts = np.asarray(ts)
    vals = np.asarray(vals)
    t_axis = np.unique(ts)
    mean = np.empty(t_axis.shape)
    std = np.empty(t_axis.shape)
    for i, t in enumerate(t_axis):
        v = vals[ts == t]
        mean[i] = v.mean()
        std[i] = v.std()
    return t_axis, mean, std


def reference_column_means(path: str, metric: str) -> dict[int, float]:
    """Independent mean computation (pure-Python accumulation) used by the
    self-test to cross-check the plotted values."""
    sums: dict[int, float] = {}
    counts: dict[int, int] = {}
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        for row in reader:
            t = int(row["t"])
            sums[t] = sums.get(t, 0.0) + float(row[metric])
            counts[t] = counts.get(t, 0) + 1
    return {t: sums[t] / counts[t] for t in sums}


def render_panels(specs: list[PanelSpec]) -> list[tuple[str, dict]]:
    """Render every panel; returns (output path, plotted data) pairs.

    The plotted data maps each label to its (t, mean, std) arrays so
    callers (and the self-test) can verify exactly what was drawn.
    """
    out = []
    for spec in specs:
        fig, ax = plt.subplots(figsize=(6.0, 4.0), dpi=120)
        drawn = {}
        for label, path in spec.series:
            t, mean, std = load_series(path, spec.metric)
            ax.plot(t, mean, label=label, linewidth=1.6)
            ax.fill_between(t, mean - std, mean + std, alpha=0.25, linewidth=0)
            drawn[label] = (t, mean, std)
        ax.set_xlabel("t")
        ax.set_ylabel("cumulative group regret" if spec.metric == "regret" else "communication cost")
        if spec.log_scale:
            ax.set_yscale("log")
        ax.legend()
        fig.tight_layout()
        metadata = {"Date": None} if str(spec.out_path).endswith(".svg") else {}
        fig.savefig(spec.out_path, metadata=metadata)
        plt.close(fig)
        out.append((str(spec.out_path), drawn))
    return out


def self_test(rendered: list[tuple[str, dict]], specs: list[PanelSpec], tol: float = 1e-9) -> None:
    """Assert the plotted means equal independently recomputed CSV means."""
    by_out = {str(s.out_path): s for s in specs}
    for out_path, drawn in rendered:
        spec = by_out[out_path]
        paths = dict(spec.series)
        for label, (t, mean, _std) in drawn.items():
            ref = reference_column_means(paths[label], spec.metric)
            for ti, mi in zip(t, mean):
                if abs(mi - ref[int(ti)]) > tol * max(1.0, abs(ref[int(ti)])):
                    raise AssertionError(
                        f"self-test failed: {out_path} series {label!r} at t={ti}: "
                        f"plotted {mi!r} != csv mean {ref[int(ti)]!r}"
                    )
