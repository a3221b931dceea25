"""Writes run outputs: per-step CSV, summary CSV, resolved config, SVG plots and replayable streams."""
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

from ..colored_print import log_info, log_warn  # noqa: E402
from ..domain import write_stream  # noqa: E402
from ..utils.config_utils import write_config  # noqa: E402
from .aggregate import ATTRUE_SUFFIX  # noqa: E402
from .runner import build_stream, stream_filename  # noqa: E402

plt.rcParams["svg.fonttype"] = "none"
plt.rcParams["svg.hashsalt"] = "revealib"

PLOT_FAMILIES = {
    "losses": lambda metric: metric.startswith("loss_") and not metric.endswith(ATTRUE_SUFFIX),
    "avg_regret": lambda metric: metric.startswith("avg_regret_") and not metric.endswith(ATTRUE_SUFFIX),
    "attrue": lambda metric: metric.endswith(ATTRUE_SUFFIX),
    "step_ms": lambda metric: metric == "step_ms",
}


def write_csv(frame, path):
    """Writes a table as UTF-8 CSV with LF line endings and round-trip float text."""
    frame.to_csv(path, index=False, encoding="utf-8", lineterminator="\n")
    return path


def read_csv(path):
    """Reads a table written by write_csv back without losing float precision."""
    return pd.read_csv(path, float_precision="round_trip")


def write_run_config(cfg, path):
    write_config(path, cfg.model_dump(mode="json"))
    return path


def write_streams(cfg, out_dir):
    """
    Writes every instance stream of the batch as streams/<instance>.txt.

    The directory can be passed back as cfg.stream to replay the same steps.

    Returns:
        list[str]: The written paths.
    """
    stream_dir = os.path.join(out_dir, "streams")
    os.makedirs(stream_dir, exist_ok=True)
    written = []
    for index in range(cfg.gen.instance_count):
        path = os.path.join(stream_dir, stream_filename(index))
        write_stream(path, build_stream(cfg, index))
        written.append(path)
    return written


def _log_floor(summary):
    values = summary[["mean", "lo", "hi"]].to_numpy(dtype=float).ravel()
    positive = values[np.isfinite(values) & (values > 0)]
    return float(positive.min()) / 10.0 if positive.size else 1e-12


def plot_family(summary, family, path, log_scale=False):
    """
    Draws the mean curves of one metric family with their bands.

    On a log scale non-positive values are clamped to a floor one decade
    below the smallest positive value; the legend marks clamped curves and
    the SVG description records the floor.

    Args:
        summary (pandas.DataFrame): Output of summarize.
        family (str): Key of PLOT_FAMILIES.
        path (str): Target .svg path.
        log_scale (bool): Log y axis.

    Returns:
        str or None: The path, or None when the family has no metrics.
    """
    rows = summary[summary["metric"].map(PLOT_FAMILIES[family])]
    if rows.empty:
        return None

    floor = _log_floor(rows) if log_scale else None
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for metric, group in rows.groupby("metric", sort=True):
        t = group["t"].to_numpy()
        mean, lo, hi = (group[key].to_numpy(dtype=float) for key in ("mean", "lo", "hi"))
        label = metric
        if log_scale:
            clamped = np.any(mean <= floor) or np.any(lo[np.isfinite(lo)] <= floor)
            mean, lo, hi = (np.maximum(values, floor) for values in (mean, lo, hi))
            if clamped:
                label = f"{metric} (clamped at {floor:.3g})"
        (line,) = ax.plot(t, mean, label=label)
        if np.isfinite(lo).any():
            ax.fill_between(t, lo, hi, color=line.get_color(), alpha=0.2, linewidth=0)

    if log_scale:
        ax.set_yscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel(family.replace("_", " "))
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()

    metadata = {"Date": None, "Title": family}
    if log_scale:
        metadata["Description"] = f"log-floor={floor!r}"
    fig.savefig(path, format="svg", metadata=metadata)
    plt.close(fig)
    return path


def emit(frame, summary, cfg, out_dir):
    """
    Writes steps.csv, summary.csv and config.yaml.

    cfg.plots adds one SVG per metric family; cfg.save_streams adds streams/.

    Args:
        frame (pandas.DataFrame): Per-step table.
        summary (pandas.DataFrame): Across-instance summary.
        cfg (ExperimentConfig): The resolved config.
        out_dir (str): Output directory, created if missing.

    Returns:
        list[str]: The written paths.
    """
    if summary.empty:
        log_warn("summary is empty; only the per-step table and config are written")
    os.makedirs(out_dir, exist_ok=True)
    written = [
        write_csv(frame, os.path.join(out_dir, "steps.csv")),
        write_csv(summary, os.path.join(out_dir, "summary.csv")),
        write_run_config(cfg, os.path.join(out_dir, "config.yaml")),
    ]
    if cfg.plots and not summary.empty:
        for family in PLOT_FAMILIES:
            path = plot_family(summary, family, os.path.join(out_dir, f"{family}.svg"), cfg.log_scale)
            if path:
                written.append(path)
    if cfg.save_streams:
        written.extend(write_streams(cfg, out_dir))

    log_info(f"Wrote {len(written)} file(s) to '{out_dir}'")
    return written
