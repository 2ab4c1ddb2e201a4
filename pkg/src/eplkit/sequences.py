from __future__ import annotations

import math
import re
from enum import Enum

import numpy as np

from .bounds import lower_bound_sequence
from .linalg import Vector

_SEPARATOR_RE = re.compile(r"[\s,;]+")


class SequenceKind(Enum):
    RANDOM_UNIT = "random-unit"
    RANDOM_SUBUNIT = "random-subunit"
    AXIS = "axis"
    REPEAT = "repeat"
    CONSTANT_LOWER_BOUND = "constant-lower-bound"
    FROM_FILE = "from-file"


def find_kind(name: str) -> SequenceKind | None:
    key = name.strip().casefold()
    for kind in SequenceKind:
        if kind.value == key:
            return kind
    return None


def random_unit(horizon: int, dim: int, rng: np.random.Generator) -> list[Vector]:
    gaussian = rng.standard_normal((horizon, dim))
    norms = np.linalg.norm(gaussian, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return list(gaussian / norms)


def random_subunit(horizon: int, dim: int, rng: np.random.Generator) -> list[Vector]:
    radii = rng.uniform(0.0, 1.0, size=(horizon, 1))
    return [radius * u for radius, u in zip(radii, random_unit(horizon, dim, rng))]


def axis(horizon: int, dim: int) -> list[Vector]:
    basis = np.eye(dim)
    return [basis[t % dim].copy() for t in range(horizon)]


def repeat(horizon: int, dim: int, rng: np.random.Generator) -> list[Vector]:
    u = random_unit(1, dim, rng)[0]
    return [u.copy() for _ in range(horizon)]


def constant_lower_bound(horizon: int, dim: int) -> list[Vector]:
    value = lower_bound_sequence(horizon)[0]
    u = np.zeros(dim)
    u[0] = value
    return [u.copy() for _ in range(horizon)]


def generate(
    kind: SequenceKind,
    horizon: int,
    dim: int,
    seed: int | np.random.Generator,
) -> list[Vector]:
    if horizon < 1:
        raise ValueError(f"Horizon must be at least 1, got {horizon}")
    if dim < 1:
        raise ValueError(f"Dimension must be at least 1, got {dim}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if kind is SequenceKind.RANDOM_UNIT:
        return random_unit(horizon, dim, rng)
    if kind is SequenceKind.RANDOM_SUBUNIT:
        return random_subunit(horizon, dim, rng)
    if kind is SequenceKind.AXIS:
        return axis(horizon, dim)
    if kind is SequenceKind.REPEAT:
        return repeat(horizon, dim, rng)
    if kind is SequenceKind.CONSTANT_LOWER_BOUND:
        return constant_lower_bound(horizon, dim)
    raise ValueError("from-file sequences are read with parse_sequence_file")


def parse_sequence_file(text: str) -> list[Vector]:
    text = text.lstrip("\ufeff")
    vectors: list[Vector] = []
    dim: int | None = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        tokens = [token for token in _SEPARATOR_RE.split(stripped) if token]
        try:
            values = [float(token) for token in tokens]
        except ValueError as exc:
            raise ValueError(f"Invalid number on line {line_no}: {stripped}") from exc
        if not all(math.isfinite(value) for value in values):
            raise ValueError(f"Non-finite value on line {line_no}: {stripped}")
        if dim is None:
            dim = len(values)
        elif len(values) != dim:
            raise ValueError(
                f"Line {line_no} has {len(values)} entries, expected {dim}: {stripped}"
            )
        vectors.append(np.array(values, dtype=np.float64))
    return vectors


def format_sequence_file(vectors: list[Vector]) -> str:
    lines = [" ".join(repr(float(value)) for value in vector) for vector in vectors]
    if not lines:
        return ""
    return "\n".join(lines) + "\n"
