"""Per-step tables and across-instance means with normal-approximation confidence bands."""
import numpy as np
import pandas as pd
from scipy.stats import norm

from ..colored_print import log_warn
from ..losses import LOSS_KINDS

CI_Z = float(norm.ppf(0.975))
STEP_COLUMNS = (
    ["instance", "t"]
    + [f"loss_{kind.value}" for kind in LOSS_KINDS]
    + [f"avg_regret_{kind.value}" for kind in LOSS_KINDS]
    + ["step_ms"]
)
ATTRUE_SUFFIX = "_attrue"
SUMMARY_COLUMNS = ["t", "metric", "mean", "lo", "hi"]


def _trace_columns(trace, suffix=""):
    columns = {}
    for kind in LOSS_KINDS:
        columns[f"loss_{kind.value}{suffix}"] = trace.losses[kind]
    for kind in LOSS_KINDS:
        columns[f"avg_regret_{kind.value}{suffix}"] = trace.avg_regret[kind]
    return columns


def steps_frame(traces):
    """
    One row per (instance, t) in the steps.csv schema.

    Failed traces contribute no rows. Noisy-mode traces add the re-measured
    columns with the ``_attrue`` suffix after step_ms.

    Args:
        traces (list[RegretTrace]): The traces of a run.

    Returns:
        pandas.DataFrame: The table.
    """
    frames = []
    for trace in traces:
        if not trace.ok or not trace.T:
            continue
        columns = {"instance": np.full(trace.T, trace.instance), "t": np.arange(1, trace.T + 1)}
        columns.update(_trace_columns(trace))
        columns["step_ms"] = trace.step_ms
        if trace.attrue is not None:
            columns.update(_trace_columns(trace.attrue, ATTRUE_SUFFIX))
        frames.append(pd.DataFrame(columns))
    if not frames:
        return pd.DataFrame(columns=STEP_COLUMNS)
    return pd.concat(frames, ignore_index=True)


def metric_columns(frame):
    return [column for column in frame.columns if column not in ("instance", "t")]


def summarize(frame):
    """
    Mean and 95% band of every metric at every t.

    Bands are mean ± 1.96·s/√k over the k instances with a value at t. All-NaN
    metrics are dropped; with a single instance the bands are NaN.

    Args:
        frame (pandas.DataFrame): A steps_frame table.

    Returns:
        pandas.DataFrame: Long table with columns t, metric, mean, lo, hi.
    """
    if frame.empty:
        return pd.DataFrame(columns=SUMMARY_COLUMNS)

    metrics = []
    for column in metric_columns(frame):
        if frame[column].isna().all():
            log_warn(f"metric '{column}' has no values and is omitted")
            continue
        metrics.append(column)

    if frame["instance"].nunique() < 2:
        log_warn("a single trace has no spread; confidence bands are omitted")

    grouped = frame.groupby("t", sort=True)
    rows = []
    for metric in metrics:
        mean = grouped[metric].mean()
        std = grouped[metric].std(ddof=1)
        count = grouped[metric].count()
        half = CI_Z * std / np.sqrt(count)
        rows.append(pd.DataFrame({
            "t": mean.index.to_numpy(),
            "metric": metric,
            "mean": mean.to_numpy(),
            "lo": (mean - half).to_numpy(),
            "hi": (mean + half).to_numpy(),
        }))
    if not rows:
        return pd.DataFrame(columns=SUMMARY_COLUMNS)
    return pd.concat(rows, ignore_index=True)


def aggregate(traces):
    """Across-instance summary of a run's traces; see summarize."""
    return summarize(steps_frame(traces))
