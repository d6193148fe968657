"""Instrumented integer-op layer for the approximate datapath.

Every add/sub/shift in the transform and quantizer is routed through an
IntOps instance so a counting subclass can audit what a hardware datapath
would execute. Counts are per scalar lane: an op on an n-element array
counts n. Shifts and negations are tracked separately from adds because
the energy proxy treats shifts as wiring.

The default UNCOUNTED singleton has zero bookkeeping overhead.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def _lanes(x) -> int:
    return int(np.size(x))


class IntOps:
    """Pass-through integer ops (no counting)."""

    __slots__ = ()

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def sub(a, b):
        return a - b

    @staticmethod
    def neg(a):
        return -a

    @staticmethod
    def shl(a, k):
        return a << k

    @staticmethod
    def shr(a, k):
        return a >> k

    @staticmethod
    def mul(a, b):
        return a * b

    def kernel(self, name: str, lanes: int):
        pass


UNCOUNTED = IntOps()


@dataclass
class OpCounter(IntOps):
    """Counts datapath operations per scalar lane."""

    adds: int = 0
    subs: int = 0
    shifts: int = 0
    muls: int = 0
    kernel_calls: dict = field(default_factory=dict)

    def add(self, a, b):
        r = a + b
        self.adds += _lanes(r)
        return r

    def sub(self, a, b):
        r = a - b
        self.subs += _lanes(r)
        return r

    def neg(self, a):
        self.subs += _lanes(a)
        return -a

    def shl(self, a, k):
        self.shifts += _lanes(a)
        return a << k

    def shr(self, a, k):
        self.shifts += _lanes(a)
        return a >> k

    def mul(self, a, b):
        r = a * b
        self.muls += _lanes(r)
        return r

    def kernel(self, name: str, lanes: int):
        self.kernel_calls[name] = self.kernel_calls.get(name, 0) + lanes

    @property
    def addsub(self) -> int:
        return self.adds + self.subs
