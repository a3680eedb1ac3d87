"""Summary tables from sweep output.

Reads results.csv, aggregates over disorder realizations (mean and standard
error), and writes one tidy CSV per figure preset.  Rendering itself lives in
the separate plotting tool; this module only reshapes numbers.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import SchemaError
from .harness import SCHEMA_VERSION, SweepSpec, rescale_capacity_by_frequency

REQUIRED_COLUMNS = {
    "schema_version", "j_s", "gamma", "f", "realization", "task", "status",
    "total_capacity", "mean_negativity_all", "mean_negativity_single",
    "covariance_dimension",
}

#: Figure presets: which metric is plotted against what, and the row filter.
FIGURE_PRESETS = {
    "fig3": dict(metric="negativity", description="entanglement vs coupling scale"),
    "fig4": dict(metric="capacity", task="delay", f=0.2,
                 description="delay capacity vs coupling scale at f=0.2"),
    "fig5": dict(metric="capacity", task="delay", gamma=0.01,
                 description="delay capacity vs coupling scale at gamma=0.01"),
    "fig6": dict(metric="capacity_vs_negativity", task="delay", gamma=0.01,
                 description="delay capacity vs entanglement at gamma=0.01"),
    "fig7": dict(metric="capacity_vs_negativity", task="delay", gamma=0.05,
                 description="delay capacity vs entanglement at gamma=0.05"),
    "fig8": dict(metric="rescaled_capacity", task="delay", gamma=0.01,
                 description="frequency-rescaled delay capacity vs entanglement"),
    "fig9": dict(metric="dimension", description="covariance dimension vs coupling scale"),
    "fig10": dict(metric="capacity", task="narma", f=0.2,
                  description="NARMA capacity vs coupling scale at f=0.2"),
    "fig11": dict(metric="capacity", task="narma", gamma=0.01,
                  description="NARMA capacity vs coupling scale at gamma=0.01"),
    "fig12": dict(metric="capacity_vs_negativity", task="narma", gamma=0.01,
                  description="NARMA capacity vs entanglement at gamma=0.01"),
    "fig13": dict(metric="capacity_vs_negativity", task="narma", gamma=0.05,
                  description="NARMA capacity vs entanglement at gamma=0.05"),
}


def load_results(csv_path) -> pd.DataFrame:
    df = pd.read_csv(csv_path, dtype={"task": str, "status": str})
    missing = REQUIRED_COLUMNS - set(df.columns)
    if missing:
        raise SchemaError(f"results file missing columns: {sorted(missing)}")
    if not df.empty and (df["schema_version"] != SCHEMA_VERSION).any():
        raise SchemaError("results file uses a different schema version")
    df["f"] = df["f"].apply(lambda x: math.inf if str(x) == "inf" else float(x))
    return df


def _sem(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    if len(x) < 2:
        return 0.0
    return float(x.std(ddof=1) / np.sqrt(len(x)))


def aggregate(df: pd.DataFrame, bipartitions: str = "all") -> pd.DataFrame:
    """Mean and standard error over realizations per (task, gamma, f, j_s)."""
    neg_col = ("mean_negativity_all" if bipartitions == "all"
               else "mean_negativity_single")
    ok = df[df["status"] == "ok"].copy()
    groups = []
    for (task, gamma, f, j_s), sub in ok.groupby(["task", "gamma", "f", "j_s"]):
        row = {"task": task, "gamma": gamma, "f": f, "j_s": j_s,
               "n_realizations": len(sub),
               "negativity": sub[neg_col].astype(float).mean(),
               "negativity_sem": _sem(sub[neg_col].astype(float).to_numpy()),
               "dimension": sub["covariance_dimension"].astype(float).mean(),
               "dimension_sem": _sem(sub["covariance_dimension"].astype(float).to_numpy())}
        caps = pd.to_numeric(sub["total_capacity"], errors="coerce").dropna()
        row["capacity"] = caps.mean() if len(caps) else np.nan
        row["capacity_sem"] = _sem(caps.to_numpy()) if len(caps) else np.nan
        groups.append(row)
    out = pd.DataFrame(groups)
    if not out.empty:
        out = out.sort_values(["task", "gamma", "f", "j_s"]).reset_index(drop=True)
    return out


def max_entanglement_marker(agg: pd.DataFrame) -> pd.DataFrame:
    """Coupling scale of maximum mean negativity per (task, gamma, f) group."""
    rows = []
    for (task, gamma, f), sub in agg.groupby(["task", "gamma", "f"]):
        best = sub.loc[sub["negativity"].idxmax()]
        rows.append({"task": task, "gamma": gamma, "f": f,
                     "j_s_max_negativity": best["j_s"]})
    return pd.DataFrame(rows)


def write_reports(csv_path, out_dir, spec: SweepSpec | None = None,
                  bipartitions: str = "all") -> list[Path]:
    """One summary CSV per figure preset with matching rows; plus markers."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    df = load_results(csv_path)
    agg = aggregate(df, bipartitions=bipartitions)
    written = []
    if agg.empty:
        raise SchemaError("no successful rows to report on")

    markers = max_entanglement_marker(agg)
    marker_path = out_dir / "max_entanglement.csv"
    markers.to_csv(marker_path, index=False)
    written.append(marker_path)

    for fig_id, preset in FIGURE_PRESETS.items():
        sub = agg
        if preset["metric"] == "negativity" or preset["metric"] == "dimension":
            # Metrics shared by every task row; deduplicate on the "none"
            # task when present, else on the first task.
            tasks = sub["task"].unique()
            pick = "none" if "none" in tasks else sorted(tasks)[0]
            sub = sub[sub["task"] == pick]
        if "task" in preset and preset["metric"] not in ("negativity", "dimension"):
            sub = sub[sub["task"] == preset["task"]]
        if "f" in preset:
            sub = sub[np.isclose(sub["f"], preset["f"])]
        if "gamma" in preset:
            sub = sub[np.isclose(sub["gamma"], preset["gamma"])]
        if preset["metric"] == "rescaled_capacity":
            if spec is None or sub.empty:
                continue
            rows = sub.to_dict("records")
            for r in rows:
                r["status"] = "ok"
                r["total_capacity"] = r["capacity"]
            try:
                rows = rescale_capacity_by_frequency(rows, spec)
            except Exception:
                continue
            sub = pd.DataFrame(rows)
        if sub.empty:
            continue
        path = out_dir / f"{fig_id}.csv"
        sub.to_csv(path, index=False)
        written.append(path)
    return written
