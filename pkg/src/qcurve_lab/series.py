"""Sampled entropy time series and their block classification."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

__all__ = ["Block", "BlockLabel", "EntropySeries", "classify", "decrease_onset"]

DEFAULT_EPS = 1e-6


class Block(str, enum.Enum):
    CONSTANT = "C"
    INCREASING = "I"
    DECREASING = "D"
    OSCILLATING = "O"


@dataclass(frozen=True)
class BlockLabel:
    kind: Block
    max_rise: float
    max_fall: float
    range: float

    def as_dict(self) -> dict:
        return {"kind": self.kind.value, "max_rise": self.max_rise,
                "max_fall": self.max_fall, "range": self.range}


@dataclass(frozen=True, eq=False)
class EntropySeries:
    """Total entropy sampled at ascending times.

    ``s_r`` and ``s_k`` hold the position and momentum parts when known.
    """

    times: np.ndarray
    values: np.ndarray
    s_r: np.ndarray | None = None
    s_k: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        times = np.array(self.times, dtype=float)
        values = np.array(self.values, dtype=float)
        if times.ndim != 1 or times.shape != values.shape:
            raise ValueError("times and values must be 1D arrays of equal length")
        if np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly ascending")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        for name in ("s_r", "s_k"):
            part = getattr(self, name)
            if part is not None:
                part = np.array(part, dtype=float)
                if part.shape != times.shape:
                    raise ValueError(f"{name} length does not match times")
                object.__setattr__(self, name, part)

    def __len__(self) -> int:
        return len(self.times)

    def reversed_values(self) -> np.ndarray:
        return self.values[::-1]


def classify(s: EntropySeries, eps: float = DEFAULT_EPS) -> BlockLabel:
    """Assign one of the four entropy blocks from first differences.

    C when the total range is below ``eps``; otherwise I when no step falls
    by ``eps`` or more, D when no step rises by ``eps`` or more, and O for
    everything else.
    """
    if len(s) < 8:
        raise ValueError(f"need at least 8 samples to classify, got {len(s)}")
    if eps <= 0:
        raise ValueError("eps must be positive")
    v = s.values
    d = np.diff(v)
    rng = float(v.max() - v.min())
    max_rise, max_fall = float(max(d.max(), 0.0)), float(max(-d.min(), 0.0))
    if rng < eps:
        kind = Block.CONSTANT
    elif np.all(d > -eps):
        kind = Block.INCREASING
    elif np.all(d < eps):
        kind = Block.DECREASING
    else:
        kind = Block.OSCILLATING
    return BlockLabel(kind, max_rise, max_fall, rng)


def decrease_onset(s: EntropySeries, eps: float = DEFAULT_EPS) -> float | None:
    """First sample time where the entropy sits ``eps`` below its running maximum."""
    running = np.maximum.accumulate(s.values)
    hit = np.nonzero(s.values < running - eps)[0]
    return float(s.times[hit[0]]) if hit.size else None
