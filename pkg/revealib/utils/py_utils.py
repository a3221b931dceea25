import platform
import sys
import time


def calculate_elapsed_time(start_time):
    """
    Calculate the elapsed time between a given start time and now.

    Args:
        start_time (float): A ``time.perf_counter()`` reading.

    Returns:
        str: A formatted string representing the elapsed time.

    Example:
        >>> calculate_elapsed_time(time.perf_counter() - 0.25)
        '250 ms'
        >>> calculate_elapsed_time(time.perf_counter() - 120)
        '2 mins 0 sec'
    """
    elapsed = time.perf_counter() - start_time

    if elapsed < 1:
        return f"{int(elapsed * 1000)} ms"
    if elapsed < 60:
        return f"{int(elapsed)} sec"
    mins, secs = divmod(int(elapsed), 60)
    return f"{mins} mins {secs} sec"


class Stopwatch:
    """
    Accumulating wall-clock timer for learner updates.

    Usage:
        watch = Stopwatch()
        with watch:
            ...timed work...
        watch.elapsed_ms
    """

    def __init__(self, enabled=True):
        self.enabled = enabled
        self.elapsed_ms = 0.0
        self._start = None

    def __enter__(self):
        if self.enabled:
            self._start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        if self.enabled:
            self.elapsed_ms += (time.perf_counter() - self._start) * 1000.0
        return False

    def reset(self):
        self.elapsed_ms = 0.0


def get_environment_info():
    """
    Collects interpreter and numeric-library versions for run metadata.

    Returns:
        dict: Python, platform, numpy and scipy versions.
    """
    import numpy
    import scipy

    return {
        "python": sys.version.split()[0],
        "platform": platform.platform(),
        "numpy": numpy.__version__,
        "scipy": scipy.__version__,
    }
