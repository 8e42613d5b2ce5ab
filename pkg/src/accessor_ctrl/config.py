"""Flat key/value configuration documents.

Grammar (one statement per line, ``#`` starts a comment)::

    N=<int>
    M=<int>
    E=[<real>, ...]            # N entries
    omega=[<real>, ...]        # M entries
    c=[<real>, ...]            # M-1 entries
    d=[<real>, ...]            # N-1 entries
    coupling { j=<int> k=<1|2> alpha="XY..." g=<real> }     # repeatable
    extra_control="XX..."                                   # repeatable
    task { initial_system=[<complex>, ...] target_system=[<complex>, ...]
           T=<real> segments=<int> }

Complex entries are written ``a+bi``.  Numbers parse to exact rationals,
so exact-mode analysis sees precisely the values written in the file.
Unknown keys are rejected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction

from .errors import ConfigError
from .models import ControlModel

__all__ = ["ConfigDocument", "TaskSpec", "parse_config", "parse_config_document"]

_SCALAR_KEYS = {"N", "M"}
_LIST_KEYS = {"E", "omega", "c", "d"}
_NUMBER = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX_RE = re.compile(rf"^({_NUMBER})(?:(?P<im>[+-](?:{_NUMBER})?)i)?$")
_COUPLING_RE = re.compile(
    r"^coupling\s*\{\s*j=(?P<j>\S+)\s+k=(?P<k>\S+)\s+"
    r"alpha=\"(?P<alpha>[A-Za-z]*)\"\s+g=(?P<g>\S+)\s*\}$"
)
_TASK_RE = re.compile(
    r"^task\s*\{\s*initial_system=\[(?P<init>[^\]]*)\]\s+"
    r"target_system=\[(?P<target>[^\]]*)\]\s+"
    r"T=(?P<T>\S+)\s+segments=(?P<segments>\S+)\s*\}$"
)


@dataclass(frozen=True)
class TaskSpec:
    initial_system: tuple[complex, ...]
    target_system: tuple[complex, ...]
    horizon: Fraction
    segments: int


@dataclass(frozen=True)
class ConfigDocument:
    model: ControlModel
    task: TaskSpec | None


def _fraction(text: str, line: int, key: str) -> Fraction:
    try:
        return Fraction(Decimal(text))
    except InvalidOperation:
        raise ConfigError(f"expected a number, got {text!r}", line, key) from None


def _int(text: str, line: int, key: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"expected an integer, got {text!r}", line, key) from None


def _complex(text: str, line: int, key: str) -> complex:
    match = _COMPLEX_RE.match(text.replace(" ", ""))
    if not match:
        raise ConfigError(f"expected a+bi or a real number, got {text!r}", line, key)
    real = float(Fraction(Decimal(match.group(1))))
    im_text = match.group("im")
    if im_text is None:
        return complex(real, 0.0)
    if im_text in ("+", "-"):
        im_text += "1"
    return complex(real, float(Fraction(Decimal(im_text))))


def _number_list(body: str, line: int, key: str) -> list[Fraction]:
    body = body.strip()
    if not body:
        return []
    return [_fraction(part.strip(), line, key) for part in body.split(",")]


def _complex_list(body: str, line: int, key: str) -> list[complex]:
    body = body.strip()
    if not body:
        return []
    return [_complex(part.strip(), line, key) for part in body.split(",")]


def parse_config_document(text: str) -> ConfigDocument:
    """Parse a full document: validated model plus optional transfer task."""
    scalars: dict[str, int] = {}
    lists: dict[str, list[Fraction]] = {}
    couplings: list[tuple] = []
    extra_controls: list[str] = []
    task: TaskSpec | None = None
    seen_lines: dict[str, int] = {}

    for line_no, raw in enumerate(text.splitlines(), start=1):
        stmt = raw.split("#", 1)[0].strip()
        if not stmt:
            continue
        if stmt.startswith("coupling"):
            match = _COUPLING_RE.match(stmt)
            if not match:
                raise ConfigError(
                    "malformed coupling block; expected "
                    'coupling { j=<int> k=<1|2> alpha="XY.." g=<real> }',
                    line_no, "coupling",
                )
            couplings.append((
                _int(match.group("j"), line_no, "coupling.j"),
                _int(match.group("k"), line_no, "coupling.k"),
                match.group("alpha"),
                _fraction(match.group("g"), line_no, "coupling.g"),
                line_no,
            ))
            continue
        if stmt.startswith("task"):
            match = _TASK_RE.match(stmt)
            if not match:
                raise ConfigError(
                    "malformed task block; expected task { initial_system=[..] "
                    "target_system=[..] T=<real> segments=<int> }",
                    line_no, "task",
                )
            if task is not None:
                raise ConfigError("duplicate task block", line_no, "task")
            task = TaskSpec(
                initial_system=tuple(_complex_list(match.group("init"),
                                                   line_no, "task.initial_system")),
                target_system=tuple(_complex_list(match.group("target"),
                                                  line_no, "task.target_system")),
                horizon=_fraction(match.group("T"), line_no, "task.T"),
                segments=_int(match.group("segments"), line_no, "task.segments"),
            )
            continue
        if "=" not in stmt:
            raise ConfigError(f"not a key=value statement: {stmt!r}", line_no)
        key, _, value = stmt.partition("=")
        key, value = key.strip(), value.strip()
        if key == "extra_control":
            if not (value.startswith('"') and value.endswith('"') and len(value) >= 2):
                raise ConfigError("extra_control must be a quoted word",
                                  line_no, key)
            extra_controls.append(value[1:-1])
            continue
        if key in seen_lines:
            raise ConfigError(f"duplicate key (first on line {seen_lines[key]})",
                              line_no, key)
        seen_lines[key] = line_no
        if key in _SCALAR_KEYS:
            scalars[key] = _int(value, line_no, key)
        elif key in _LIST_KEYS:
            if not (value.startswith("[") and value.endswith("]")):
                raise ConfigError("expected a [..] list", line_no, key)
            lists[key] = _number_list(value[1:-1], line_no, key)
        else:
            raise ConfigError("unknown key", line_no, key)

    for key in ("N", "M"):
        if key not in scalars:
            raise ConfigError("missing required key", None, key)
    for key in ("E", "omega"):
        if key not in lists:
            raise ConfigError("missing required key", None, key)
    n, m = scalars["N"], scalars["M"]
    chain = lists.get("c", [])
    if m > 1 and "c" not in lists:
        raise ConfigError("missing required key (M > 1 needs chain couplings)",
                          None, "c")
    excitations = lists.get("d", [])
    if n > 1 and "d" not in lists:
        raise ConfigError("missing required key", None, "d")
    for key, expected in (("E", n), ("omega", m), ("c", m - 1), ("d", n - 1)):
        if key in lists and len(lists[key]) != expected:
            raise ConfigError(
                f"{key} length {len(lists[key])} does not match {expected}",
                seen_lines.get(key), key,
            )

    try:
        model = ControlModel.create(
            n, m, lists["E"], lists["omega"], chain, excitations,
            [(j, k, alpha, g) for j, k, alpha, g, _ in couplings],
            extra_controls,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    if task is not None:
        if len(task.initial_system) != n:
            raise ConfigError(f"initial_system needs N={n} entries",
                              None, "task.initial_system")
        if len(task.target_system) != n:
            raise ConfigError(f"target_system needs N={n} entries",
                              None, "task.target_system")
        if task.segments < 1:
            raise ConfigError("segments must be >= 1", None, "task.segments")
        if task.horizon <= 0:
            raise ConfigError("T must be positive", None, "task.T")
    return ConfigDocument(model=model, task=task)


def parse_config(text: str) -> ControlModel:
    """Parse a document and return the validated, normalised model."""
    return parse_config_document(text).model
