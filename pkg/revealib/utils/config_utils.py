import json
import os
import yaml
import toml

SUPPORTED_FORMATS = ("json", "yaml", "yml", "toml", "txt")


def determine_file_format(filename):
    """
    Determine the file format based on the filename extension.

    Args:
        filename (str): The filename.

    Returns:
        str: The file format (json, yaml, yml, toml or txt).
    """
    file_extension = os.fspath(filename).lower().split(".")[-1]
    if file_extension in SUPPORTED_FORMATS:
        return file_extension
    return "txt"


def read_config(filename):
    """
    Read configuration from a file.

    Args:
        filename (str): Path to a JSON, YAML, TOML or plain-text file.

    Returns:
        dict or list or str: The parsed configuration. TXT files come back as a string.
    """
    file_format = determine_file_format(filename)

    with open(filename, "r", encoding="utf-8") as f:
        if file_format == "json":
            config = json.load(f)
        elif file_format in ("yaml", "yml"):
            config = yaml.safe_load(f)
        elif file_format == "toml":
            config = toml.load(f)
        else:
            config = f.read()

    return config


def write_config(filename, config):
    """
    Write configuration to a file.

    Args:
        filename (str): Path to a JSON, YAML, TOML or plain-text file.
        config (dict or str): The configuration to write.
    """
    file_format = determine_file_format(filename)

    with open(filename, "w", encoding="utf-8", newline="\n") as f:
        if file_format == "json":
            json.dump(config, f, indent=4)
        elif file_format in ("yaml", "yml"):
            yaml.safe_dump(config, f, sort_keys=False)
        elif file_format == "toml":
            toml.dump(config, f)
        else:
            f.write(config)


def read_step_sizes(filename):
    """
    Read a custom step-size table.

    Structured files may hold a bare list or a mapping with an ``etas`` key;
    anything else is read as whitespace-separated numbers, ``#`` starting a comment.

    Args:
        filename (str): The path to the table.

    Returns:
        list[float]: The step sizes in order, η_1 first.
    """
    config = read_config(filename)

    if isinstance(config, dict):
        config = config.get("etas")
    if isinstance(config, str):
        tokens = []
        for line in config.splitlines():
            tokens.extend(line.split("#", 1)[0].split())
        config = tokens
    if not isinstance(config, list) or not config:
        raise ValueError(f"'{filename}' does not contain a step-size list")

    return [float(value) for value in config]
