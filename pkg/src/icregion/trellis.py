"""Encoder finite-state machines and the joint trellis of two senders.

Conventions
-----------
* Code bit ``b`` is sent as the antipodal symbol ``(-1)**b`` (bit 0 -> +1).
* Shift-register state of a feed-forward encoder holds the past inputs with
  the newest bit in the least significant position: bit ``k`` of the state is
  the input ``u[t-1-k]``.
* Outgoing branches of a state are listed in increasing drive index; the
  drive index ``d`` spells the drive bits MSB first (first bit in time first).
* Joint state numbering is ``state1 * num_states2 + state2``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np


class PolynomialError(ValueError):
    """Raised for malformed generator polynomials."""


def _bits_msb_first(value: int, width: int) -> tuple[int, ...]:
    return tuple((value >> (width - 1 - k)) & 1 for k in range(width))


def bits_to_symbols(bits) -> tuple[int, ...]:
    return tuple(1 - 2 * int(b) for b in bits)


@dataclass(frozen=True)
class GeneratorMatrix:
    """Generator polynomials of a rate-1/L feed-forward convolutional code.

    Each polynomial is a tuple of binary coefficients, lowest degree first,
    so ``1 + D^2`` is ``(1, 0, 1)``.
    """

    polynomials: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        polys = tuple(tuple(int(c) for c in p) for p in self.polynomials)
        if not polys:
            raise PolynomialError("at least one generator polynomial is required")
        for p in polys:
            if any(c not in (0, 1) for c in p):
                raise PolynomialError(f"coefficients must be 0 or 1, got {p}")
            if not any(p):
                raise PolynomialError("generator polynomials must be nonzero")
        # strip high-order zeros so degree is well defined
        polys = tuple(p[: max(i for i, c in enumerate(p) if c) + 1] for p in polys)
        object.__setattr__(self, "polynomials", polys)

    @property
    def memory(self) -> int:
        return max(len(p) - 1 for p in self.polynomials)

    @property
    def num_outputs(self) -> int:
        return len(self.polynomials)

    @classmethod
    def from_octal(cls, text: str) -> "GeneratorMatrix":
        """Parse comma-separated octal generators such as ``"7,5"``.

        The binary expansions are right-aligned to the longest one and read
        with the leftmost bit as the ``D^0`` coefficient (the usual
        constraint-length convention), so ``"7,5"`` is ``[1+D+D^2, 1+D^2]``.
        """
        fields = [f.strip() for f in str(text).split(",")]
        if not fields or any(not f for f in fields):
            raise PolynomialError(f"empty generator in {text!r}")
        try:
            values = [int(f, 8) for f in fields]
        except ValueError:
            raise PolynomialError(f"not an octal generator list: {text!r}") from None
        if any(v == 0 for v in values):
            raise PolynomialError(f"zero generator in {text!r}")
        width = max(v.bit_length() for v in values)
        return cls(tuple(_bits_msb_first(v, width) for v in values))

    def to_octal(self) -> str:
        width = self.memory + 1
        out = []
        for p in self.polynomials:
            padded = p + (0,) * (width - len(p))
            out.append(format(int("".join(map(str, padded)), 2), "o"))
        return ",".join(out)

    def encode(self, bits) -> np.ndarray:
        """Code bits by direct GF(2) convolution, shape ``(len(bits), L)``."""
        u = np.asarray(bits, dtype=np.int64)
        cols = [np.convolve(u, np.asarray(p, dtype=np.int64))[: len(u)] % 2
                for p in self.polynomials]
        return np.stack(cols, axis=1)


@dataclass(frozen=True)
class Branch:
    s_minus: int
    s_plus: int
    drive: tuple[int, ...]
    symbols: tuple[int, ...]

    def __post_init__(self):
        if any(s not in (1, -1) for s in self.symbols):
            raise ValueError(f"branch symbols must be +/-1, got {self.symbols}")


@dataclass(frozen=True)
class Trellis:
    """Time-invariant trellis section of one sender."""

    num_states: int
    branches: tuple[Branch, ...]
    driving_bits_per_section: int
    uses_per_section: int
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "branches", tuple(self.branches))
        fanout = 1 << self.driving_bits_per_section
        counts = np.zeros(self.num_states, dtype=int)
        for b in self.branches:
            if len(b.symbols) != self.uses_per_section:
                raise ValueError("branch symbol length differs from uses_per_section")
            if len(b.drive) != self.driving_bits_per_section:
                raise ValueError("branch drive length differs from driving_bits_per_section")
            counts[b.s_minus] += 1
        if np.any(counts != fanout):
            raise ValueError(f"every state needs exactly {fanout} outgoing branches")

    def outgoing(self, state: int) -> list[Branch]:
        return [b for b in self.branches if b.s_minus == state]

    @cached_property
    def next_state(self) -> np.ndarray:
        """``next_state[s, d]`` for drive index ``d``."""
        table = np.empty((self.num_states, 1 << self.driving_bits_per_section), dtype=np.int64)
        for s in range(self.num_states):
            for d, b in enumerate(self.outgoing(s)):
                table[s, d] = b.s_plus
        return table

    @cached_property
    def output_symbols(self) -> np.ndarray:
        """``output_symbols[s, d]`` is the length-L symbol vector."""
        table = np.empty((self.num_states, 1 << self.driving_bits_per_section,
                          self.uses_per_section), dtype=np.int64)
        for s in range(self.num_states):
            for d, b in enumerate(self.outgoing(s)):
                table[s, d] = b.symbols
        return table

    def encode(self, drive_indices, state: int = 0) -> np.ndarray:
        """Follow the trellis from ``state``; returns symbols, shape ``(n, L)``."""
        out = np.empty((len(drive_indices), self.uses_per_section), dtype=np.int64)
        nxt, sym = self.next_state, self.output_symbols
        for t, d in enumerate(drive_indices):
            out[t] = sym[state, d]
            state = nxt[state, d]
        return out

    def paths(self, sections: int, state: int = 0):
        """Yield the symbol sequences of every path of ``sections`` sections."""
        def walk(s, depth, acc):
            if depth == sections:
                yield acc
                return
            for b in self.outgoing(s):
                yield from walk(b.s_plus, depth + 1, acc + b.symbols)
        yield from walk(state, 0, ())


def build_conv_trellis(g: GeneratorMatrix) -> Trellis:
    """Feed-forward shift-register trellis with one drive bit per section."""
    if not isinstance(g, GeneratorMatrix):
        g = GeneratorMatrix(tuple(g))
    m = g.memory
    num_states = 1 << m
    polys = [p + (0,) * (m + 1 - len(p)) for p in g.polynomials]
    branches = []
    for s in range(num_states):
        past = [(s >> k) & 1 for k in range(m)]
        for u in (0, 1):
            window = [u] + past
            code = [sum(c * w for c, w in zip(p, window)) % 2 for p in polys]
            s_plus = ((s << 1) | u) & (num_states - 1)
            branches.append(Branch(s, s_plus, (u,), bits_to_symbols(code)))
    return Trellis(num_states, tuple(branches), 1, len(polys), name=f"conv:{g.to_octal()}")


def build_iud_trellis(bits_per_section: int) -> Trellis:
    """Single-state trellis emitting i.u.d. BPSK, one symbol per drive bit."""
    if int(bits_per_section) < 1:
        raise ValueError("bits_per_section must be >= 1")
    k = int(bits_per_section)
    branches = []
    for d in range(1 << k):
        drive = _bits_msb_first(d, k)
        branches.append(Branch(0, 0, drive, bits_to_symbols(drive)))
    return Trellis(1, tuple(branches), k, k, name=f"iud:{k}")


def build_constant_trellis(uses_per_section: int = 1) -> Trellis:
    """Deterministic sender that always transmits +1 (zero rate)."""
    sym = (1,) * int(uses_per_section)
    return Trellis(1, (Branch(0, 0, (), sym),), 0, int(uses_per_section), name="const")


def compose(t: Trellis, k: int) -> Trellis:
    """Concatenate ``k`` sections of ``t`` into one section; states are kept."""
    if k == 1:
        return t
    branches = []
    for s in range(t.num_states):
        for combo in itertools.product(range(1 << t.driving_bits_per_section), repeat=k):
            state, drive, syms = s, (), ()
            for d in combo:
                b = t.outgoing(state)[d]
                drive += b.drive
                syms += b.symbols
                state = b.s_plus
            branches.append(Branch(s, state, drive, syms))
    name = f"{t.name}x{k}" if t.name else ""
    return Trellis(t.num_states, tuple(branches), k * t.driving_bits_per_section,
                   k * t.uses_per_section, name=name)


@dataclass(frozen=True)
class JointBranch:
    s_minus: int
    s_plus: int
    drive1: tuple[int, ...]
    drive2: tuple[int, ...]
    symbols1: tuple[int, ...]
    symbols2: tuple[int, ...]


@dataclass(frozen=True)
class JointTrellis:
    """Synchronized product of two senders' trellises.

    ``first`` and ``second`` are the component trellises after alignment to
    the common section length, so their states and sections line up with the
    joint branches.
    """

    num_states: int
    branches: tuple[JointBranch, ...]
    uses_per_section: int
    first: Trellis
    second: Trellis

    @property
    def driving_bits_per_section(self) -> int:
        return self.first.driving_bits_per_section + self.second.driving_bits_per_section

    def component(self, sender: int) -> Trellis:
        if sender not in (1, 2):
            raise ValueError("sender must be 1 or 2")
        return self.first if sender == 1 else self.second

    @cached_property
    def arrays(self) -> dict[str, np.ndarray]:
        """Branch table as arrays: s_minus, s_plus, drive_bits, symbols1, symbols2."""
        return {
            "s_minus": np.array([b.s_minus for b in self.branches], dtype=np.int64),
            "s_plus": np.array([b.s_plus for b in self.branches], dtype=np.int64),
            "drive_bits": np.array([len(b.drive1) + len(b.drive2) for b in self.branches],
                                   dtype=np.int64),
            "symbols1": np.array([b.symbols1 for b in self.branches], dtype=np.float64),
            "symbols2": np.array([b.symbols2 for b in self.branches], dtype=np.float64),
        }

    def outgoing(self, state: int) -> list[JointBranch]:
        return [b for b in self.branches if b.s_minus == state]


def product_trellis(t1: Trellis, t2: Trellis) -> JointTrellis:
    L = math.lcm(t1.uses_per_section, t2.uses_per_section)
    a1 = compose(t1, L // t1.uses_per_section)
    a2 = compose(t2, L // t2.uses_per_section)
    n2 = a2.num_states
    branches = []
    for s1 in range(a1.num_states):
        out1 = a1.outgoing(s1)
        for s2 in range(n2):
            for b1 in out1:
                for b2 in a2.outgoing(s2):
                    branches.append(JointBranch(
                        s1 * n2 + s2, b1.s_plus * n2 + b2.s_plus,
                        b1.drive, b2.drive, b1.symbols, b2.symbols))
    return JointTrellis(a1.num_states * n2, tuple(branches), L, a1, a2)


class SchemeError(ValueError):
    """Raised for an unrecognised scheme string."""


def parse_scheme(text: str) -> Trellis:
    """Build a sender trellis from ``iud:<bits>`` or ``conv:<octal polys>``."""
    kind, sep, arg = str(text).strip().partition(":")
    kind = kind.strip().lower()
    if kind == "iud":
        try:
            bits = int(arg) if sep else 1
        except ValueError:
            raise SchemeError(f"bad bit count in scheme {text!r}") from None
        if bits < 1:
            raise SchemeError(f"bad bit count in scheme {text!r}")
        return build_iud_trellis(bits)
    if kind == "conv" and sep:
        return build_conv_trellis(GeneratorMatrix.from_octal(arg))
    if kind == "const":
        return build_constant_trellis()
    raise SchemeError(f"unknown scheme {text!r}; expected iud:<bits> or conv:<octal polys>")
