"""
Line-oriented text format for instance streams.

    stream <n> <T> <utility-tag> [P_1 .. P_n]
    theta_true <θ_1 .. θ_p>
    step <t> ck|bk|eck <p_1 .. p_n> <b>
    step <t> cp <m> <A_11 .. A_mn (row-major)> <c_1 .. c_m>
    step <t> interval <lo> <hi>

Numbers are written with repr() so a stream reads back bit for bit.
"""
from dataclasses import dataclass
from typing import List

import numpy as np

from ..errors import ConfigurationError
from .types import Domain, DomainKind, Instance, ParameterPoint, ParameterSpace, UtilityForm, UtilityKind


@dataclass(frozen=True)
class InstanceStream:
    """θ_true together with the T steps generated for it."""

    theta_true: ParameterPoint
    instances: List[Instance]

    @property
    def utility(self):
        return self.instances[0].utility

    @property
    def T(self):
        return len(self.instances)

    @property
    def n(self):
        return self.instances[0].n

    def __iter__(self):
        return iter(self.instances)

    def __len__(self):
        return len(self.instances)


def _fmt(values):
    return " ".join(repr(float(v)) for v in np.ravel(values))


def _utility_line(utility, n, T):
    line = f"stream {n} {T} {utility.tag}"
    if utility.kind is UtilityKind.QUAD:
        line += " " + _fmt(utility.P)
    return line


def _domain_tokens(domain):
    if domain.kind is DomainKind.POLYTOPE:
        return f"cp {domain.A.shape[0]} {_fmt(domain.A)} {_fmt(domain.c)}"
    if domain.kind is DomainKind.INTERVAL:
        return f"interval {_fmt([domain.lo, domain.hi])}"
    return f"{domain.kind.value} {_fmt(domain.prices)} {_fmt([domain.budget])}"


def dumps_stream(stream: InstanceStream):
    """
    Serializes an instance stream.

    Args:
        stream (InstanceStream): The stream to write.

    Returns:
        str: The text, LF line endings, trailing newline.
    """
    theta = stream.theta_true
    lines = [_utility_line(stream.utility, stream.n, stream.T)]
    space = theta.space
    space_tag = "simplex" if space.is_simplex else f"box {_fmt([space.lo, space.hi])}"
    lines.append(f"theta_true {space_tag} {_fmt(theta.values)}")
    for inst in stream.instances:
        lines.append(f"step {inst.t} {_domain_tokens(inst.domain)}")
    return "\n".join(lines) + "\n"


def _parse_utility(tokens, n):
    tag = tokens[0]
    if tag.startswith("custom-1d:"):
        return UtilityForm.custom_1d(tag.split(":", 1)[1])
    kind = UtilityKind(tag)
    if kind is UtilityKind.QUAD:
        P = np.array([float(v) for v in tokens[1:]])
        if P.shape[0] != n:
            raise ConfigurationError(f"stream header declares n={n} but P has {P.shape[0]} entries")
        return UtilityForm.quad_diag(P)
    return UtilityForm(kind)


def _parse_domain(tokens, n):
    kind = DomainKind(tokens[0])
    numbers = [float(v) for v in tokens[1:]]
    if kind is DomainKind.INTERVAL:
        return Domain.interval(numbers[0], numbers[1])
    if kind is DomainKind.POLYTOPE:
        m = int(numbers[0])
        A = np.array(numbers[1:1 + m * n]).reshape(m, n)
        c = np.array(numbers[1 + m * n:])
        return Domain.polytope(A, c)
    return Domain(kind, prices=np.array(numbers[:n]), budget=numbers[n])


def loads_stream(text):
    """
    Parses text written by dumps_stream.

    Args:
        text (str): The serialized stream.

    Returns:
        InstanceStream: The stream.
    """
    lines = [line.split() for line in text.splitlines() if line.strip()]
    if not lines or lines[0][0] != "stream":
        raise ConfigurationError("instance stream must start with a 'stream' header")

    header = lines[0]
    n, T = int(header[1]), int(header[2])
    utility = _parse_utility(header[3:], n)

    theta_tokens = lines[1]
    if theta_tokens[0] != "theta_true":
        raise ConfigurationError("second line of an instance stream must be 'theta_true'")
    if theta_tokens[1] == "simplex":
        space, values = ParameterSpace.simplex(), theta_tokens[2:]
    else:
        space, values = ParameterSpace.box(float(theta_tokens[2]), float(theta_tokens[3])), theta_tokens[4:]
    theta_true = ParameterPoint(np.array([float(v) for v in values]), space)

    instances = []
    for tokens in lines[2:]:
        if tokens[0] != "step":
            raise ConfigurationError(f"unexpected record '{tokens[0]}'")
        instances.append(Instance(int(tokens[1]), utility, _parse_domain(tokens[2:], n)))
    if len(instances) != T:
        raise ConfigurationError(f"stream header declares T={T} but {len(instances)} steps follow")

    return InstanceStream(theta_true, instances)


def write_stream(path, stream):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(dumps_stream(stream))


def read_stream(path):
    with open(path, "r", encoding="utf-8") as f:
        return loads_stream(f.read())
