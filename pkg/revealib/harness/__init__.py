from .config import OUT_DIR_ENV, SCENARIOS, ExperimentConfig, build_config, load_experiment_config
from .scenarios import obscuring_config, scenario_defaults, scenario_stream
from .runner import build_stream, run_experiment, run_instance, stream_filename
from .aggregate import CI_Z, STEP_COLUMNS, aggregate, steps_frame, summarize
from .emit import PLOT_FAMILIES, emit, plot_family, read_csv, write_csv, write_streams
