"""INI-style model files describing one network or optimization run.

A model file has a ``[network]`` section plus exactly one of
``[parallel]``, ``[tandem]``, ``[feedback]``, or ``[optimize]``, and
optionally ``[simulate]``::

    [network]
    arrival_rate = 2.0
    workload = Requests

    [parallel]
    m = 4
    service_time = 0.25
    method = b

    [simulate]
    seed = 42
    completions = 200000

Unknown sections or keys are rejected, as are non-positive rates and
times.  :func:`dump_model` emits a canonical text that parses back to
an equal :class:`ModelFile`.
"""

import configparser
from dataclasses import dataclass

from .errors import ModelError
from .network import (
    build_feedback,
    build_parallel_method_a,
    build_parallel_method_b,
    build_tandem,
)

DEFAULT_WORKLOAD = "Requests"
DEFAULT_SEED = 42
DEFAULT_COMPLETIONS = 200_000

_TOPOLOGY_KINDS = ("parallel", "tandem", "feedback", "optimize")
_SECTION_KEYS = {
    "network": {"arrival_rate", "workload"},
    "parallel": {"m", "service_time", "method"},
    "tandem": {"m", "service_time", "service_times"},
    "feedback": {"service_time", "visits"},
    "optimize": {"service_times"},
    "simulate": {"seed", "completions"},
}


@dataclass(frozen=True)
class ModelFile:
    """Validated contents of a model file."""

    workload: str
    arrival_rate: float
    kind: str
    m: int = None
    service_time: float = None
    service_times: tuple = None
    method: str = None
    visits: int = None
    seed: int = None
    completions: int = None


def _positive_float(raw, field):
    try:
        value = float(raw)
    except ValueError:
        raise ModelError(f"{field}: not a decimal number: {raw!r}") from None
    if not value > 0:
        raise ModelError(f"{field}: must be > 0, got {raw}")
    return value


def _positive_int(raw, field, minimum=1):
    try:
        value = int(raw)
    except ValueError:
        raise ModelError(f"{field}: not an integer: {raw!r}") from None
    if value < minimum:
        raise ModelError(f"{field}: must be >= {minimum}, got {raw}")
    return value


def _require(section, key):
    if key not in section:
        raise ModelError(f"[{section.name}] is missing required key {key}")
    return section[key]


def _service_list(raw, field):
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    if not parts:
        raise ModelError(f"{field}: needs at least one entry")
    return tuple(_positive_float(p, f"{field}[{k}]")
                 for k, p in enumerate(parts))


def parse_model(path):
    """Parse and validate a model file, returning a :class:`ModelFile`."""
    parser = configparser.ConfigParser(
        delimiters=("=",), inline_comment_prefixes=("#", ";"), strict=True
    )
    try:
        with open(path, encoding="utf-8") as handle:
            parser.read_file(handle, source=str(path))
    except OSError as exc:
        raise ModelError(f"cannot read model file: {exc}") from None
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise ModelError(f"syntax error: {exc}", line=line) from None
    except configparser.Error as exc:
        raise ModelError(f"syntax error: {exc}") from None

    sections = parser.sections()
    if not sections:
        raise ModelError("model file has no sections")
    for name in sections:
        if name not in _SECTION_KEYS:
            raise ModelError(f"unknown section [{name}]")
        for key in parser[name]:
            if key not in _SECTION_KEYS[name]:
                raise ModelError(f"unknown key {key!r} in [{name}]")

    if "network" not in parser:
        raise ModelError("model file needs a [network] section")
    kinds = [name for name in sections if name in _TOPOLOGY_KINDS]
    if len(kinds) != 1:
        raise ModelError(
            "model file needs exactly one of "
            + ", ".join(f"[{k}]" for k in _TOPOLOGY_KINDS)
            + f"; found {len(kinds)}"
        )
    kind = kinds[0]

    net = parser["network"]
    arrival_rate = _positive_float(
        _require(net, "arrival_rate"), "[network] arrival_rate"
    )
    workload = net.get("workload", DEFAULT_WORKLOAD).strip()
    if not workload:
        raise ModelError("[network] workload: must not be empty")

    fields = {
        "workload": workload, "arrival_rate": arrival_rate, "kind": kind,
    }
    body = parser[kind]
    if kind == "parallel":
        fields["m"] = _positive_int(_require(body, "m"), "[parallel] m")
        fields["service_time"] = _positive_float(
            _require(body, "service_time"), "[parallel] service_time"
        )
        method = body.get("method", "b").strip().lower()
        if method not in ("a", "b"):
            raise ModelError(f"[parallel] method: must be a or b, got {method}")
        fields["method"] = method
    elif kind == "tandem":
        if "service_times" in body:
            if "m" in body or "service_time" in body:
                raise ModelError(
                    "[tandem] takes either service_times or m + service_time"
                )
            fields["service_times"] = _service_list(
                body["service_times"], "[tandem] service_times"
            )
        else:
            fields["m"] = _positive_int(_require(body, "m"), "[tandem] m")
            fields["service_time"] = _positive_float(
                _require(body, "service_time"), "[tandem] service_time"
            )
    elif kind == "feedback":
        fields["service_time"] = _positive_float(
            _require(body, "service_time"), "[feedback] service_time"
        )
        fields["visits"] = _positive_int(
            _require(body, "visits"), "[feedback] visits"
        )
    else:
        fields["service_times"] = _service_list(
            _require(body, "service_times"), "[optimize] service_times"
        )

    if "simulate" in parser:
        sim = parser["simulate"]
        fields["seed"] = _positive_int(
            sim.get("seed", str(DEFAULT_SEED)), "[simulate] seed", minimum=0
        )
        fields["completions"] = _positive_int(
            sim.get("completions", str(DEFAULT_COMPLETIONS)),
            "[simulate] completions",
        )

    return ModelFile(**fields)


def build_network(model):
    """Construct the OpenNetwork a topology model describes."""
    lam, work = model.arrival_rate, model.workload
    if model.kind == "parallel":
        builder = (build_parallel_method_a if model.method == "a"
                   else build_parallel_method_b)
        return builder(lam, model.service_time, model.m, workload=work)
    if model.kind == "tandem":
        times = (model.service_times if model.service_times is not None
                 else [model.service_time] * model.m)
        return build_tandem(lam, times, workload=work)
    if model.kind == "feedback":
        return build_feedback(lam, model.service_time, model.visits,
                              workload=work)
    raise ModelError(f"model kind {model.kind!r} is not a network topology")


def dump_model(model):
    """Canonical text form; parses back to an equal :class:`ModelFile`."""
    lines = [
        "[network]",
        f"arrival_rate = {model.arrival_rate!r}",
        f"workload = {model.workload}",
        "",
        f"[{model.kind}]",
    ]
    if model.m is not None:
        lines.append(f"m = {model.m}")
    if model.service_time is not None:
        lines.append(f"service_time = {model.service_time!r}")
    if model.service_times is not None:
        joined = ", ".join(repr(s) for s in model.service_times)
        lines.append(f"service_times = {joined}")
    if model.method is not None:
        lines.append(f"method = {model.method}")
    if model.visits is not None:
        lines.append(f"visits = {model.visits}")
    if model.seed is not None:
        lines.extend([
            "",
            "[simulate]",
            f"seed = {model.seed}",
            f"completions = {model.completions}",
        ])
    return "\n".join(lines) + "\n"
