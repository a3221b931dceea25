import argparse
import os
import sys

from pydantic import ValidationError

from ..colored_print import log_debug, log_error, log_info, print_line, set_color, set_verbosity
from ..domain import NoiseMode
from ..oco import Algorithm
from ..utils.config_utils import read_config
from ..utils.py_utils import get_environment_info
from .aggregate import steps_frame, summarize
from .config import OUT_DIR_ENV, SCENARIOS, build_config
from .emit import emit
from .runner import run_experiment
from .scenarios import scenario_defaults

NOISE_FLAGS = {
    "none": NoiseMode.PERFECT,
    "small": NoiseMode.SMALL,
    "large": NoiseMode.LARGE,
    "subopt": NoiseMode.SUBOPTIMAL,
}

# flag name -> GenConfig field
GEN_FLAGS = {
    "utility": "utility",
    "domain": "domain",
    "n": "n",
    "m": "m",
    "T": "T",
    "instances": "instance_count",
    "seed": "seed",
    "noise": "noise_mode",
    "interior": "interior",
}


def parse_args(argv=None):
    parser = argparse.ArgumentParser(
        prog="revealib-run",
        description="Learn an agent's utility parameter online from revealed actions and report regret curves.",
    )
    parser.add_argument("--config", help="json, yaml or toml experiment config; flags override it")
    parser.add_argument("--scenario", choices=SCENARIOS, help="run a scripted stream instead of random ones")
    parser.add_argument("--utility", choices=["quad", "ces", "bilinear", "cobb"])
    parser.add_argument("--domain", choices=["ck", "cp", "bk", "eck", "interval"])
    parser.add_argument("--algo", choices=[algorithm.value for algorithm in Algorithm])
    parser.add_argument("--schedule", help="paper, optimal, sqrt or file:<path>")
    parser.add_argument("--n", type=int)
    parser.add_argument("--m", type=int)
    parser.add_argument("--T", type=int)
    parser.add_argument("--instances", type=int)
    parser.add_argument("--noise", choices=list(NOISE_FLAGS))
    parser.add_argument("--seed", type=int)
    parser.add_argument("--comparator", choices=["hindsight", "truth"])
    parser.add_argument("--stream", help="replay a saved stream file, or a streams/ directory from --save-streams")
    parser.add_argument("--save-streams", action="store_true", default=None,
                        help="write each instance stream to <out>/streams/<instance>.txt")
    parser.add_argument("--interior", action="store_true", default=None,
                        help="draw budgets so that the unconstrained optimum is strictly feasible")
    parser.add_argument("--out", help=f"output directory (default: ${OUT_DIR_ENV} or ./runs)")
    parser.add_argument("--plots", action="store_true", default=None, help="write one SVG per metric family")
    parser.add_argument("--log-scale", action="store_true", default=None, help="log y axis in plots")
    parser.add_argument("--no-timing", action="store_true",
                        help="write step_ms as 0; with timing on, reruns differ only in step_ms")
    parser.add_argument("--jobs", type=int,
                        help="instances run concurrently; results do not depend on it apart from step_ms")
    parser.add_argument("--quiet", action="store_true", help="errors only")
    parser.add_argument("--verbose", action="store_true", help="debug output")
    parser.add_argument("--no-color", action="store_true", help="plain log lines")
    return parser.parse_args(argv)


def config_from_args(args):
    """Merges the config file (if any) with the flags that were given."""
    data = read_config(args.config) if args.config else {}
    if not isinstance(data, dict):
        raise ValueError(f"'{args.config}' does not hold a config mapping")

    gen = {}
    for flag, field in GEN_FLAGS.items():
        value = getattr(args, flag)
        if value is not None:
            gen[field] = NOISE_FLAGS[value] if flag == "noise" else value
    if args.domain == "interval" and not args.scenario:
        raise ValueError("the interval domain is only used by the scripted scenarios; pass --scenario obscuring")
    if args.domain == "interval":
        gen.pop("domain")
    if args.stream and not os.path.exists(args.stream):
        raise ValueError(f"stream '{args.stream}' does not exist")

    overrides = {"gen": gen}
    simple = {
        "algorithm": args.algo,
        "schedule": args.schedule,
        "comparator": args.comparator,
        "scenario": args.scenario,
        "stream": args.stream,
        "save_streams": args.save_streams,
        "out_dir": args.out,
        "plots": args.plots,
        "log_scale": args.log_scale,
        "jobs": args.jobs,
    }
    overrides.update({key: value for key, value in simple.items() if value is not None})
    if args.no_timing:
        overrides["timing"] = False
    if args.quiet:
        overrides["quiet"] = True

    explicit = set(overrides) | set(data)
    if args.instances is not None:
        explicit.add("instances")
    elif args.stream and os.path.isfile(args.stream):
        gen["instance_count"] = 1
    elif args.stream and os.path.isdir(args.stream):
        gen["instance_count"] = sum(name.endswith(".txt") for name in os.listdir(args.stream))

    cfg = build_config(data, **overrides)
    return scenario_defaults(cfg, explicit)


def main(argv=None):
    args = parse_args(argv)
    if args.no_color:
        set_color(False)
    set_verbosity("quiet" if args.quiet else "debug" if args.verbose else "normal")

    try:
        cfg = config_from_args(args)
    except (ValidationError, ValueError, OSError) as e:
        log_error(f"invalid configuration: {e}")
        return 2

    print_line(60, color="green")
    log_debug(f"environment: {get_environment_info()}")
    log_info(f"algorithm={cfg.algorithm.value} instances={cfg.gen.instance_count} T={cfg.gen.T} out='{cfg.out_dir}'")
    traces = run_experiment(cfg)

    frame = steps_frame(traces)
    summary = summarize(frame)
    try:
        emit(frame, summary, cfg, cfg.out_dir)
    except OSError as e:
        log_error(f"cannot write outputs to '{cfg.out_dir}': {e}")
        return 1

    failed = [trace.instance for trace in traces if not trace.ok]
    if failed:
        log_error(f"{len(failed)} instance(s) failed: {failed}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
