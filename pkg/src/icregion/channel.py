"""Symmetric two-user Gaussian interference channel with BPSK inputs.

    y1 = sqrt(P1) x1 + sqrt(a P2) x2 + n1
    y2 = sqrt(P2) x2 + sqrt(a P1) x1 + n2

with x_k in {+1, -1} and unit-variance white Gaussian noise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rng import box_muller, check_seed, stream
from .trellis import JointTrellis

LOG_2PI = math.log(2.0 * math.pi)


def db_to_linear(p_db: float) -> float:
    return 10.0 ** (float(p_db) / 10.0)


@dataclass(frozen=True)
class ChannelParams:
    p1: float
    p2: float
    a: float
    noise_var: float = 1.0

    def __post_init__(self):
        if not (self.p1 > 0 and self.p2 > 0):
            raise ValueError("powers must be positive")
        if not self.a >= 0:
            raise ValueError("cross gain must be nonnegative")
        if self.noise_var != 1.0:
            raise ValueError("noise variance is fixed at 1")
        if not all(map(math.isfinite, (self.p1, self.p2, self.a))):
            raise ValueError("channel parameters must be finite")

    @classmethod
    def from_db(cls, p1_db: float, p2_db: float, a: float) -> "ChannelParams":
        return cls(db_to_linear(p1_db), db_to_linear(p2_db), float(a))

    def power(self, sender: int) -> float:
        return self.p1 if sender == 1 else self.p2

    def gain(self, receiver: int, sender: int) -> float:
        """Amplitude with which ``sender``'s symbols reach ``receiver``."""
        _check_index(receiver)
        _check_index(sender)
        p = self.power(sender)
        return math.sqrt(p) if receiver == sender else math.sqrt(self.a * p)

    def swapped(self) -> "ChannelParams":
        return ChannelParams(self.p2, self.p1, self.a)


def _check_index(k: int) -> None:
    if k not in (1, 2):
        raise ValueError(f"user index must be 1 or 2, got {k}")


@dataclass(frozen=True)
class SampleRecord:
    x1: np.ndarray
    x2: np.ndarray
    y1: np.ndarray
    y2: np.ndarray
    seed: int
    n: int
    block: int = 0

    def y(self, receiver: int) -> np.ndarray:
        return self.y1 if receiver == 1 else self.y2

    def x(self, sender: int) -> np.ndarray:
        return self.x1 if sender == 1 else self.x2


def simulate(jt: JointTrellis, params: ChannelParams, n_sections: int, seed: int,
             block: int = 0) -> SampleRecord:
    """Draw one block of ``n_sections`` trellis sections through the channel.

    Both encoders start in state 0. Draw order on the block's stream: drive
    indices of sender 1, drive indices of sender 2, then Box-Muller normals
    for n1 followed by n2.
    """
    n_sections = int(n_sections)
    if n_sections < 1:
        raise ValueError("n_sections must be >= 1")
    seed = check_seed(seed)
    rng = stream(seed, block)
    t1, t2 = jt.first, jt.second
    d1 = rng.integers(0, 1 << t1.driving_bits_per_section, size=n_sections)
    d2 = rng.integers(0, 1 << t2.driving_bits_per_section, size=n_sections)
    n = n_sections * jt.uses_per_section
    noise = box_muller(rng, 2 * n)
    s1 = t1.encode(d1).reshape(-1).astype(np.float64)
    s2 = t2.encode(d2).reshape(-1).astype(np.float64)
    x1 = math.sqrt(params.p1) * s1
    x2 = math.sqrt(params.p2) * s2
    y1 = x1 + math.sqrt(params.a) * x2 + noise[:n]
    y2 = x2 + math.sqrt(params.a) * x1 + noise[n:]
    return SampleRecord(x1, x2, y1, y2, seed, n, block)


def branch_loglik(y_window, s1_symbols, s2_symbols, params: ChannelParams,
                  receiver: int) -> float:
    """Gaussian log density of ``y_window`` given both senders' symbols.

    Pass ``None`` for a sender whose contribution the caller has already
    subtracted from ``y_window``.
    """
    _check_index(receiver)
    y = np.asarray(y_window, dtype=np.float64)
    mean = np.zeros_like(y)
    for sender, sym in ((1, s1_symbols), (2, s2_symbols)):
        if sym is None:
            continue
        sym = np.asarray(sym, dtype=np.float64)
        if sym.shape != y.shape:
            raise ValueError("symbol and observation windows differ in length")
        mean = mean + params.gain(receiver, sender) * sym
    r = y - mean
    return float(-0.5 * (y.size * LOG_2PI + np.dot(r, r)))
