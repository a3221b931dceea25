import sys
import datetime
import pytz

color_codes = {
    "default"      : "\033[0m",
    "red"          : "\033[0;31m",
    "green"        : "\033[0;32m",
    "yellow"       : "\033[0;33m",
    "blue"         : "\033[0;34m",
    "cyan"         : "\033[0;36m",
    "flat_red"     : "\033[38;2;204;102;102m",
    "flat_yellow"  : "\033[38;2;255;204;0m",
    "flat_blue"    : "\033[38;2;0;102;204m",
    "flat_green"   : "\033[38;2;0;204;102m",
    "flat_gray"    : "\033[38;2;128;128;128m",
}

style_codes = {
    "normal"      : "\033[0m",
    "bold"        : "\033[1m",
    "italic"      : "\033[3m",
    "underline"   : "\033[4m",
}

VERBOSITY_LEVELS = {"quiet": 0, "normal": 1, "debug": 2}

_verbosity = VERBOSITY_LEVELS["normal"]
_use_color = sys.stderr.isatty()


def set_verbosity(level):
    """
    Sets the module-wide verbosity used by the log helpers.

    Args:
        level (str): One of "quiet", "normal" or "debug".
    """
    global _verbosity
    if level not in VERBOSITY_LEVELS:
        raise ValueError(f"Invalid verbosity '{level}'. Available options are: {', '.join(VERBOSITY_LEVELS)}")
    _verbosity = VERBOSITY_LEVELS[level]


def set_color(enabled):
    global _use_color
    _use_color = bool(enabled)


def cprint(*args, color="default", style="normal", reset=True, timestamp=False, tqdm_desc=False,
           timestamp_format='%Y-%m-%d %H:%M:%S', prefix=None, timezone=None, file=None):
    """
    Prints colored text to the console.

    Args:
        *args            : Text to be printed.
        color            : Text color. Default is "default".
        style            : Text style. Default is "normal".
        reset            : Whether to reset color after printing. Default is True.
        timestamp        : If True, prefixes the text with a timestamp. Default is False.
        tqdm_desc        : If True, returns the colored string for use as a tqdm description.
        timestamp_format : The format of the timestamp if timestamp is True.
        prefix           : Optional prefix for the text. Default is None.
        timezone         : The timezone of the timestamp. UTC when None.
        file             : Stream to print to. Default is stderr.

    Returns:
        str or None: The colored string when tqdm_desc is True, otherwise None.
    """
    if color not in color_codes:
        raise ValueError(f"Invalid color value '{color}'. Available options are: {', '.join(color_codes.keys())}")

    if style not in style_codes:
        raise ValueError(f"Invalid style value '{style}'. Available options are: {', '.join(style_codes.keys())}")

    color_start = style_codes[style] + color_codes[color] if _use_color else ""
    color_end = color_codes["default"] if reset and _use_color else ""
    formatted_text = " ".join(str(arg) for arg in args)

    if prefix:
        formatted_text = str(prefix) + formatted_text

    if timestamp:
        now = datetime.datetime.now(pytz.timezone(timezone) if timezone else pytz.utc)
        formatted_text = f"[{now.strftime(timestamp_format)}] {formatted_text}"

    if tqdm_desc:
        return color_start + formatted_text + color_end

    print(color_start + formatted_text + color_end, file=file or sys.stderr)


def log_debug(*args, **kwargs):
    if _verbosity >= VERBOSITY_LEVELS["debug"]:
        cprint(*args, color="flat_gray", timestamp=True, **kwargs)


def log_info(*args, **kwargs):
    if _verbosity >= VERBOSITY_LEVELS["normal"]:
        cprint(*args, color="green", timestamp=True, **kwargs)


def log_warn(*args, **kwargs):
    if _verbosity >= VERBOSITY_LEVELS["normal"]:
        cprint(*args, color="yellow", timestamp=True, prefix="warning: ", **kwargs)


def log_error(*args, **kwargs):
    # errors are shown even in quiet mode
    cprint(*args, color="flat_red", timestamp=True, prefix="error: ", **kwargs)


def print_line(length, color="default", style="normal"):
    """
    Prints a separator line of equal signs.

    Args:
        length: The length of the line.
        color: Text color. Default is "default".
        style: Text style. Default is "normal".
    """
    if _verbosity >= VERBOSITY_LEVELS["normal"]:
        cprint("=" * length, color=color, style=style)
