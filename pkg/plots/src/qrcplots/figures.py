"""Figure rendering from sweep CSV files.

Every plotted number originates in the input CSV; this package never
recomputes simulation quantities.  Output is deterministic: fixed style,
sorted group ordering, pinned PNG metadata, no timestamps.

Most figures consume the sweep results schema (one row per parameter point,
realization, and task).  fig2 consumes a single-run trace file and fig8 a
pre-rescaled summary table, both produced by the simulator's own tooling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
import numpy as np
import pandas as pd

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)


class SchemaError(ValueError):
    """Input CSV does not carry the columns a figure needs."""


class NoDataError(ValueError):
    """Input CSV carries no rows usable for the requested figure."""


RESULTS_COLUMNS = [
    "j_s", "gamma", "f", "realization", "task", "status", "total_capacity",
    "mean_negativity_all", "mean_negativity_single", "covariance_dimension",
]
TRACE_COLUMNS = ["k", "t_k", "s_k"]
RESCALED_COLUMNS = ["j_s", "gamma", "f", "task", "negativity", "rescaled_capacity"]

#: Crossover region of the coupling scale (annotation only, from the sweep
#: metadata convention); the red marker is computed from the data.
TRANSITION_REGION_J = (12.0, 40.0)

_STYLE = {
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.markersize": 4,
}
_PNG_METADATA = {"Software": "qrcplots"}

_COLORS = plt.cm.viridis(np.linspace(0.0, 0.85, 6))


@dataclass(frozen=True)
class FigureSpec:
    figure_id: str
    description: str
    source: str                      # results | trace | rescaled
    metric: str                      # capacity | negativity | dimension | ...
    task: str | None = None
    fixed: dict = field(default_factory=dict)   # column -> value filter
    group_by: str | None = None                 # one curve per value
    x_axis: str = "j_s"


FIGURES: dict[str, FigureSpec] = {
    "fig2": FigureSpec("fig2", "input and multiplexed readout traces", "trace", "trace"),
    "fig3": FigureSpec("fig3", "mean negativity vs coupling scale",
                       "results", "negativity", group_by="gamma"),
    "fig4": FigureSpec("fig4", "delay capacity vs coupling scale at f=0.2",
                       "results", "capacity", task="delay", fixed={"f": 0.2},
                       group_by="gamma"),
    "fig5": FigureSpec("fig5", "delay capacity vs coupling scale at gamma=0.01",
                       "results", "capacity", task="delay", fixed={"gamma": 0.01},
                       group_by="f"),
    "fig6": FigureSpec("fig6", "delay capacity vs negativity at gamma=0.01",
                       "results", "capacity", task="delay", fixed={"gamma": 0.01},
                       group_by="f", x_axis="negativity"),
    "fig7": FigureSpec("fig7", "delay capacity vs negativity at gamma=0.05",
                       "results", "capacity", task="delay", fixed={"gamma": 0.05},
                       group_by="f", x_axis="negativity"),
    "fig8": FigureSpec("fig8", "frequency-rescaled capacity vs negativity",
                       "rescaled", "rescaled_capacity", x_axis="negativity",
                       group_by="f"),
    "fig9": FigureSpec("fig9", "covariance dimension vs coupling scale",
                       "results", "dimension", group_by="gamma"),
    "fig10": FigureSpec("fig10", "NARMA capacity vs coupling scale at f=0.2",
                        "results", "capacity", task="narma", fixed={"f": 0.2},
                        group_by="gamma"),
    "fig11": FigureSpec("fig11", "NARMA capacity vs coupling scale at gamma=0.01",
                        "results", "capacity", task="narma", fixed={"gamma": 0.01},
                        group_by="f"),
    "fig12": FigureSpec("fig12", "NARMA capacity vs negativity at gamma=0.01",
                        "results", "capacity", task="narma", fixed={"gamma": 0.01},
                        group_by="f", x_axis="negativity"),
    "fig13": FigureSpec("fig13", "NARMA capacity vs negativity at gamma=0.05",
                        "results", "capacity", task="narma", fixed={"gamma": 0.05},
                        group_by="f", x_axis="negativity"),
}


def _require_columns(df: pd.DataFrame, columns, figure_id: str) -> None:
    missing = [c for c in columns if c not in df.columns]
    if missing:
        raise SchemaError(f"{figure_id}: input CSV missing columns {missing}")


def _parse_f(value) -> float:
    return math.inf if str(value) == "inf" else float(value)


def load_results(csv_path) -> pd.DataFrame:
    df = pd.read_csv(csv_path)
    if df.empty:
        raise NoDataError(f"no rows in {csv_path}")
    _require_columns(df, RESULTS_COLUMNS, "results")
    df["f"] = df["f"].map(_parse_f)
    return df[df["status"] == "ok"].copy()


def _sem(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(x.std(ddof=1) / math.sqrt(len(x))) if len(x) > 1 else 0.0


def _aggregate(df: pd.DataFrame, value_col: str) -> pd.DataFrame:
    """Mean and standard error over realizations per (gamma, f, j_s)."""
    rows = []
    for (gamma, f, j_s), sub in df.groupby(["gamma", "f", "j_s"]):
        vals = pd.to_numeric(sub[value_col], errors="coerce").dropna()
        if vals.empty:
            continue
        rows.append({"gamma": gamma, "f": f, "j_s": j_s,
                     "value": vals.mean(), "sem": _sem(vals),
                     "negativity": pd.to_numeric(sub["mean_negativity_all"]).mean()})
    if not rows:
        raise NoDataError(f"no usable values in column {value_col}")
    return pd.DataFrame(rows).sort_values(["gamma", "f", "j_s"]).reset_index(drop=True)


_METRIC_COLUMN = {
    "capacity": "total_capacity",
    "negativity": "mean_negativity_all",
    "dimension": "covariance_dimension",
}


def _group_label(key: str, value) -> str:
    if key == "f" and math.isinf(value):
        return "f=inf"
    return f"{key}={value:g}"


def _annotate_j_axis(ax, agg: pd.DataFrame) -> None:
    lo, hi = TRANSITION_REGION_J
    ax.axvline(lo, color="black", lw=1)
    ax.axvline(hi, color="black", lw=1)
    best = agg.loc[agg["negativity"].idxmax(), "j_s"]
    ax.axvline(best, color="red", lw=1)
    ax.set_xscale("log")


def render(figure_id: str, csv_path, out_dir) -> list[Path]:
    """Render one figure preset to deterministic PNG files."""
    if figure_id not in FIGURES:
        raise SchemaError(f"unknown figure id {figure_id!r}; "
                          f"choose from {sorted(FIGURES)}")
    spec = FIGURES[figure_id]
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with plt.rc_context(_STYLE):
        if spec.source == "trace":
            return [_render_trace(spec, csv_path, out_dir)]
        if spec.source == "rescaled":
            return [_render_rescaled(spec, csv_path, out_dir)]
        return [_render_results(spec, csv_path, out_dir)]


def _save(fig, path: Path) -> Path:
    fig.savefig(path, metadata=_PNG_METADATA)
    plt.close(fig)
    return path


def _render_results(spec: FigureSpec, csv_path, out_dir: Path) -> Path:
    df = load_results(csv_path)
    if spec.task is not None:
        df = df[df["task"] == spec.task]
    else:
        # Metric shared across tasks: deduplicate to one task's rows.
        tasks = sorted(df["task"].unique())
        pick = "none" if "none" in tasks else tasks[0]
        df = df[df["task"] == pick]
    for col, val in spec.fixed.items():
        df = df[np.isclose(df[col], val)]
    if df.empty:
        raise NoDataError(f"{spec.figure_id}: no rows after filtering {spec.fixed}")
    agg = _aggregate(df, _METRIC_COLUMN[spec.metric])

    fig, ax = plt.subplots(figsize=(4.2, 3.2))
    group_key = spec.group_by or "gamma"
    for color, (gval, sub) in zip(_COLORS, agg.groupby(group_key, sort=True)):
        sub = sub.sort_values(spec.x_axis if spec.x_axis in sub else "j_s")
        x = sub[spec.x_axis] if spec.x_axis in sub else sub["j_s"]
        ax.errorbar(x, sub["value"], yerr=sub["sem"], marker="o", lw=1,
                    color=color, label=_group_label(group_key, gval))
    if spec.x_axis == "j_s":
        _annotate_j_axis(ax, agg)
        ax.set_xlabel("coupling scale")
    else:
        ax.set_xlabel("mean log-negativity")
    ax.set_ylabel(spec.metric.replace("_", " "))
    ax.set_title(spec.description, fontsize=9)
    ax.legend(fontsize=7)
    fig.tight_layout()
    return _save(fig, out_dir / f"{spec.figure_id}.png")


def _render_rescaled(spec: FigureSpec, csv_path, out_dir: Path) -> Path:
    df = pd.read_csv(csv_path)
    if df.empty:
        raise NoDataError(f"no rows in {csv_path}")
    _require_columns(df, RESCALED_COLUMNS, spec.figure_id)
    df["f"] = df["f"].map(_parse_f)
    fig, ax = plt.subplots(figsize=(4.2, 3.2))
    for color, (fval, sub) in zip(_COLORS, df.groupby("f", sort=True)):
        sub = sub.sort_values("negativity")
        ax.plot(sub["negativity"], sub["rescaled_capacity"], marker="o", lw=1,
                color=color, label=_group_label("f", fval))
    ax.set_xlabel("mean log-negativity")
    ax.set_ylabel("capacity x frequency")
    ax.set_title(spec.description, fontsize=9)
    ax.legend(fontsize=7)
    fig.tight_layout()
    return _save(fig, out_dir / f"{spec.figure_id}.png")


def _render_trace(spec: FigureSpec, csv_path, out_dir: Path) -> Path:
    df = pd.read_csv(csv_path)
    if df.empty:
        raise NoDataError(f"no rows in {csv_path}")
    _require_columns(df, TRACE_COLUMNS, spec.figure_id)
    readout_cols = sorted(c for c in df.columns if c.startswith("sz_"))
    if not readout_cols:
        raise SchemaError("fig2: trace CSV has no sz_* readout columns")
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(5.0, 4.2), sharex=True)
    top.plot(df["t_k"], df["s_k"], lw=1, color="tab:blue")
    top.set_ylabel("input")
    for col in readout_cols:
        bottom.plot(df["t_k"], df[col], lw=0.5, alpha=0.6)
    bottom.set_ylabel("sigma_z readout")
    bottom.set_xlabel("time")
    fig.suptitle(spec.description, fontsize=9)
    fig.tight_layout()
    return _save(fig, out_dir / f"{spec.figure_id}.png")
