"""Precision ladder shared by every adaptive computation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator


class PrecisionExhausted(RuntimeError):
    """The precision cap was reached without deciding a comparison."""


@dataclass(frozen=True)
class PrecisionPolicy:
    """Start at ``start`` bits and double on Unknown up to ``cap`` bits."""

    start: int = 128
    cap: int = 8192

    def __post_init__(self):
        if self.start < 2 or self.cap < 2:
            raise ValueError("precision must be at least 2 bits")

    def ladder(self) -> Iterator[int]:
        p = min(self.start, self.cap)
        while True:
            yield p
            if p >= self.cap:
                return
            p = min(2 * p, self.cap)
