"""Runs one learner over a batch of instance streams and collects regret traces."""
import os
import time
from concurrent.futures import ThreadPoolExecutor, as_completed

import numpy as np
from tqdm import tqdm

from ..colored_print import cprint, log_error, log_info
from ..domain import DomainKind, NoiseMode, ParameterPoint, UtilityKind, read_stream
from ..errors import RevealibError
from ..forward import solve_forward_checked
from ..instances import apply_noise, gen_instance_stream, interior_stream
from ..losses import (
    LOSS_KINDS,
    RegretTrace,
    build_regret_trace,
    check_perfect_information,
    check_suboptimal_feasible,
    eval_losses,
    prefix_offline_minima,
)
from ..oco import g_bound, learner_for
from ..utils.py_utils import Stopwatch, calculate_elapsed_time
from .config import ExperimentConfig
from .scenarios import scenario_stream


def stream_filename(instance_index):
    return f"{instance_index}.txt"


def build_stream(cfg: ExperimentConfig, instance_index):
    """The stream for one instance: replayed from cfg.stream, scripted, or generated."""
    if cfg.stream is not None:
        path = cfg.stream
        if os.path.isdir(path):
            path = os.path.join(path, stream_filename(instance_index))
        return read_stream(path)
    if cfg.scenario is not None:
        return scenario_stream(cfg, instance_index)
    if cfg.gen.interior:
        return interior_stream(cfg.gen, instance_index)
    return gen_instance_stream(cfg.gen, instance_index)


def _strong_convexity(stream):
    utility = stream.utility
    continuous = stream.instances[0].domain.kind in (DomainKind.CONT_KNAPSACK, DomainKind.POLYTOPE)
    if utility.kind is UtilityKind.QUAD and continuous:
        return utility.gamma
    return None


def failed_trace(instance, message):
    empty = {kind: np.zeros(0) for kind in LOSS_KINDS}
    return RegretTrace(instance, empty, dict(empty), dict(empty), dict(empty), dict(empty), np.zeros(0),
                       diagnostic=message)


def run_instance(cfg: ExperimentConfig, instance_index):
    """
    Runs the configured learner over one stream.

    x(θ_true; u_t) and every loss evaluation are outside the timed region;
    x(θ_t; u_t) is timed for the learners that need it to update.

    Args:
        cfg (ExperimentConfig): The experiment.
        instance_index (int): Which stream.

    Returns:
        RegretTrace: The trace, with an ``attrue`` trace in noisy modes.

    Raises:
        InvariantViolation: A regret relation failed and invariant checks are on.
    """
    stream = build_stream(cfg, instance_index)
    theta_true = stream.theta_true
    space = theta_true.space
    mode = cfg.gen.noise_mode if cfg.scenario is None else NoiseMode.PERFECT

    x_true = [solve_forward_checked(theta_true, inst).x for inst in stream]
    observations = apply_noise(x_true, mode, cfg.gen.seed, instance_index, [inst.domain for inst in stream])

    schedule_kind, etas = cfg.resolved_schedule()
    theta0 = None if cfg.theta0 is None else ParameterPoint(np.array(cfg.theta0, dtype=float), space)
    learner = learner_for(cfg.algorithm, space, theta_true.p, stream.T, g_bound(stream.instances),
                          schedule_kind, etas, theta0)

    watch = Stopwatch(enabled=cfg.timing)
    records, attrue_records, thetas, step_ms = [], [], [], []
    for inst, obs, xt in zip(stream, observations, x_true):
        theta_t = learner.play()
        thetas.append(theta_t.values)
        watch.reset()
        if learner.times_prediction:
            with watch:
                x_pred = learner.predict(inst).x
        else:
            x_pred = solve_forward_checked(theta_t, inst).x

        records.append(eval_losses(theta_t, inst, obs, theta_true, x_pred, xt))
        if not mode.is_perfect:
            attrue_records.append(eval_losses(theta_t, inst, xt, theta_true, x_pred, xt))

        with watch:
            learner.update(inst, obs.y, x_pred)
        step_ms.append(watch.elapsed_ms)

    offline = prefix_offline_minima(records, space, theta_true, mode, cfg.comparator)
    trace = build_regret_trace(records, offline, instance_index, step_ms, thetas, mode, cfg.comparator)
    if attrue_records:
        offline = prefix_offline_minima(attrue_records, space, theta_true, NoiseMode.PERFECT, cfg.comparator)
        trace.attrue = build_regret_trace(attrue_records, offline, instance_index, step_ms, thetas,
                                          NoiseMode.PERFECT, cfg.comparator)

    if cfg.check_invariants:
        gamma = _strong_convexity(stream)
        if mode.is_perfect:
            check_perfect_information(trace, gamma)
        else:
            check_perfect_information(trace.attrue, gamma)
            if mode is NoiseMode.SUBOPTIMAL:
                check_suboptimal_feasible(trace)
    return trace


def run_experiment(cfg: ExperimentConfig):
    """
    Runs every instance of the batch, cfg.jobs at a time.

    A failing instance is logged and kept as a trace carrying the diagnostic;
    the others are unaffected. Results are ordered by instance index.

    Args:
        cfg (ExperimentConfig): The experiment.

    Returns:
        list[RegretTrace]: One trace per instance.
    """
    count = cfg.gen.instance_count
    traces = [None] * count
    start = time.perf_counter()
    desc = cprint(f"{cfg.algorithm.value} on {count} instance(s)", color="green", tqdm_desc=True)

    with ThreadPoolExecutor(max_workers=cfg.jobs) as executor:
        futures = {executor.submit(run_instance, cfg, index): index for index in range(count)}
        with tqdm(total=len(futures), unit="instance", disable=cfg.quiet, desc=desc) as pbar:
            for future in as_completed(futures):
                index = futures[future]
                try:
                    traces[index] = future.result()
                except (RevealibError, ArithmeticError, ValueError, OSError) as e:
                    log_error(f"instance {index} failed: {e}")
                    traces[index] = failed_trace(index, f"{type(e).__name__}: {e}")
                pbar.update(1)

    failed = sum(not trace.ok for trace in traces)
    log_info(f"Finished {count - failed}/{count} instance(s). Took {calculate_elapsed_time(start)}.")
    return traces
