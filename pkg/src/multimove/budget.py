"""Wall-clock / node budgets shared by the solver and verifier."""

from __future__ import annotations

import time
from typing import Optional


class BudgetExceeded(Exception):
    def __init__(self, what: str):
        self.what = what
        super().__init__(f"budget exceeded: {what}")


class Budget:
    """Explicit resource bounds; check() raises once either trips."""

    __slots__ = ("max_seconds", "max_nodes", "started", "nodes", "_next_clock")

    def __init__(self, max_seconds: Optional[float] = None,
                 max_nodes: Optional[int] = None):
        self.max_seconds = max_seconds
        self.max_nodes = max_nodes
        self.started = time.monotonic()
        self.nodes = 0
        self._next_clock = 0

    def charge(self, n: int = 1) -> None:
        self.nodes += n
        if self.max_nodes is not None and self.nodes > self.max_nodes:
            raise BudgetExceeded(f"nodes > {self.max_nodes}")
        if self.max_seconds is not None:
            # The clock syscall is cheap but not free; sample it.
            self._next_clock -= n
            if self._next_clock <= 0:
                self._next_clock = 256
                if time.monotonic() - self.started > self.max_seconds:
                    raise BudgetExceeded(f"wall time > {self.max_seconds}s")

    def elapsed(self) -> float:
        return time.monotonic() - self.started


def parse_duration(text: str) -> float:
    """'250ms', '10s', '5m', '2h' or a bare number of seconds."""
    t = text.strip().lower()
    for suffix, mul in (("ms", 0.001), ("s", 1.0), ("m", 60.0), ("h", 3600.0)):
        if t.endswith(suffix):
            return float(t[: -len(suffix)]) * mul
    return float(t)
