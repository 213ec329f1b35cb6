"""Finite-alphabet coding lab for the threshold-decoding and converse bounds.

A memoryless discrete interference channel is given by a table
``W[x1, x2, y1, y2]``. Sequences of length n are indexed lexicographically
with the first letter most significant, matching ``itertools.product``.

Everything in this module works in nats: the information density is
``(1/n) ln(P_{Y|X}(y|x) / P_Y(y))`` and the slack term is ``exp(-n gamma)``.
:func:`information_density_distribution` takes a ``base`` argument for
callers that want bits.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .rng import stream

MAX_ALPHABET = 4
MAX_N = 10
MAX_OUTCOMES = 10**7


class SizeGuardError(ValueError):
    """Requested enumeration exceeds the oracle size limits."""


class OverlapError(ValueError):
    """Decoding sets of one decoder intersect."""


@dataclass(frozen=True)
class DiscreteIC:
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.float64)
        if t.ndim != 4:
            raise ValueError("table must have shape (|X1|, |X2|, |Y1|, |Y2|)")
        if any(s < 1 or s > MAX_ALPHABET for s in t.shape):
            raise SizeGuardError(f"alphabet sizes must be in 1..{MAX_ALPHABET}, got {t.shape}")
        if np.any(t < 0):
            raise ValueError("transition probabilities must be nonnegative")
        if np.any(np.abs(t.sum(axis=(2, 3)) - 1.0) > 1e-12):
            raise ValueError("W(., . | x1, x2) must sum to 1 for every input pair")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @property
    def sizes(self) -> tuple[int, int, int, int]:
        return self.table.shape

    def input_size(self, user: int) -> int:
        return self.sizes[user - 1]

    def output_size(self, user: int) -> int:
        return self.sizes[user + 1]

    def marginal(self, user: int) -> np.ndarray:
        """``W_k[x1, x2, y_k]``, the channel seen by receiver ``k``."""
        if user == 1:
            return self.table.sum(axis=3)
        if user == 2:
            return self.table.sum(axis=2)
        raise ValueError("user must be 1 or 2")

    def effective_channel(self, user: int, p_other) -> np.ndarray:
        """``V_k[x_k, y_k]`` with the other input averaged under ``p_other``."""
        w = self.marginal(user)
        p_other = np.asarray(p_other, dtype=np.float64)
        if user == 1:
            return np.einsum("abc,b->ac", w, p_other)
        return np.einsum("abc,a->bc", w, p_other)

    def to_text(self) -> str:
        x1, x2, y1, y2 = self.sizes
        rows = self.table.reshape(x1 * x2, y1 * y2)
        lines = [f"# sizes {x1} {x2} {y1} {y2}"]
        lines += [" ".join(repr(float(v)) for v in row) for row in rows]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, sizes: Sequence[int] | None = None) -> "DiscreteIC":
        """Parse a whitespace matrix: rows ``(x1, x2)``, columns ``(y1, y2)``,
        both lexicographic. Sizes come from a ``# sizes X1 X2 Y1 Y2`` line or
        the ``sizes`` argument."""
        rows = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                words = line[1:].split()
                if words and words[0] == "sizes" and sizes is None:
                    sizes = [int(w) for w in words[1:]]
                continue
            rows.append([float(v) for v in line.split()])
        if sizes is None or len(sizes) != 4:
            raise ValueError("alphabet sizes missing; add '# sizes X1 X2 Y1 Y2'")
        mat = np.array(rows, dtype=np.float64)
        x1, x2, y1, y2 = sizes
        if mat.shape != (x1 * x2, y1 * y2):
            raise ValueError(f"matrix shape {mat.shape} does not match sizes {tuple(sizes)}")
        return cls(mat.reshape(x1, x2, y1, y2))

    @classmethod
    def load(cls, path) -> "DiscreteIC":
        return cls.from_text(Path(path).read_text())

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())


def binary_flip_ic(flip: float = 0.1, cross: float = 0.1) -> DiscreteIC:
    """Binary IC with ``y_k = x_k xor z_k xor (x_other and v_k)``.

    ``z_k ~ Bern(flip)`` is receiver noise and ``v_k ~ Bern(cross)`` decides
    whether a 1 from the other sender flips the output; all four noise bits
    are independent.
    """
    table = np.zeros((2, 2, 2, 2))
    for x1, x2 in itertools.product((0, 1), repeat=2):
        w1 = _flip_row(x1, x2, flip, cross)
        w2 = _flip_row(x2, x1, flip, cross)
        table[x1, x2] = np.outer(w1, w2)
    return DiscreteIC(table)


def _flip_row(own: int, other: int, flip: float, cross: float) -> np.ndarray:
    # total flip probability of own bit
    q = flip if not other else flip * (1 - cross) + cross * (1 - flip)
    row = np.empty(2)
    row[own] = 1 - q
    row[1 - own] = q
    return row


def _kron_power(mat: np.ndarray, n: int) -> np.ndarray:
    out = np.ones((1,) * mat.ndim)
    for _ in range(n):
        out = np.kron(out, mat)
    return out


def _uniform(k: int) -> np.ndarray:
    return np.full(k, 1.0 / k)


def _check_n(n: int) -> None:
    if not 1 <= n <= MAX_N:
        raise SizeGuardError(f"block length must be in 1..{MAX_N}, got {n}")


class Atoms(NamedTuple):
    values: np.ndarray
    probs: np.ndarray

    def prob_le(self, threshold: float) -> float:
        return float(self.probs[self.values <= threshold].sum())

    def prob_gt(self, threshold: float) -> float:
        return float(self.probs[self.values > threshold].sum())


def _density_matrix(v: np.ndarray, px: np.ndarray, n: int):
    """n-letter ``P_{Y|X}``, ``P_X``, ``P_Y`` and density ``(1/n) ln(P_{Y|X}/P_Y)``."""
    vn = _kron_power(v, n)
    pxn = _kron_power(px, n)
    pyn = pxn @ vn
    with np.errstate(divide="ignore", invalid="ignore"):
        dens = np.where(vn > 0, np.log(vn) - np.log(pyn)[None, :], -np.inf) / n
    return vn, pxn, pyn, dens


def information_density_distribution(ic: DiscreteIC, px1, px2, n: int, user: int,
                                     base: float = 2.0, merge_tol: float = 1e-12) -> Atoms:
    """Exact law of ``(1/n) log(P_{Y|X}(Y|X) / P_Y(Y))`` for i.i.d. inputs.

    Returns atoms sorted by value; coincident values (within ``merge_tol``)
    are merged.
    """
    _check_n(n)
    px1 = _uniform(ic.sizes[0]) if px1 is None else np.asarray(px1, dtype=np.float64)
    px2 = _uniform(ic.sizes[1]) if px2 is None else np.asarray(px2, dtype=np.float64)
    own, other = (px1, px2) if user == 1 else (px2, px1)
    outcomes = (ic.input_size(user) * ic.output_size(user)) ** n
    if outcomes > MAX_OUTCOMES:
        raise SizeGuardError(f"{outcomes} outcomes exceed the limit of {MAX_OUTCOMES}")
    v = ic.effective_channel(user, other)
    vn, pxn, _, dens = _density_matrix(v, own, n)
    joint = pxn[:, None] * vn
    mask = joint > 0
    vals = dens[mask] / math.log(base)
    probs = joint[mask]
    order = np.argsort(vals, kind="stable")
    vals, probs = vals[order], probs[order]
    starts = np.concatenate(([True], np.diff(vals) > merge_tol))
    groups = np.cumsum(starts) - 1
    merged_p = np.bincount(groups, weights=probs)
    merged_v = vals[starts]
    return Atoms(merged_v, merged_p)


def _seq_index(codebook: np.ndarray, q: int) -> np.ndarray:
    n = codebook.shape[1]
    return codebook @ (q ** np.arange(n - 1, -1, -1))


def _pair_channel(w: np.ndarray, c1: np.ndarray, c2: np.ndarray) -> np.ndarray:
    """``P[i, j, y^n] = prod_t w[c1[i,t], c2[j,t], y_t]``."""
    m1, n = c1.shape
    m2 = c2.shape[0]
    out = np.ones((m1, m2, 1))
    for t in range(n):
        wt = w[c1[:, t][:, None], c2[:, t][None, :], :]
        out = (out[..., :, None] * wt[..., None, :]).reshape(m1, m2, -1)
    return out


@dataclass(frozen=True)
class CodingExperiment:
    n: int
    m1: int
    m2: int
    gamma: float
    trials: int
    seed: int
    px1: tuple[float, ...] | None = None
    px2: tuple[float, ...] | None = None

    def __post_init__(self):
        _check_n(self.n)
        # m = 1 is outside the usual m >= 2 range but kept as a degenerate sanity case
        if self.m1 < 1 or self.m2 < 1:
            raise ValueError("codebook sizes must be >= 1")
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


@dataclass(frozen=True)
class Lemma1Report:
    empirical_error_sum: float
    trial_std_error: float
    analytic_bound: float
    epsilon1: float
    epsilon2: float
    prob_t1_complement: float
    prob_t2_complement: float
    slack: float

    @property
    def holds(self) -> bool:
        return self.empirical_error_sum <= self.analytic_bound + 2.0 * self.trial_std_error


def lemma1_bound_check(ic: DiscreteIC, exp: CodingExperiment) -> Lemma1Report:
    """Random codebooks with threshold decoding versus the achievability bound.

    Receiver k declares message i iff codeword i is the unique one whose
    information density with y exceeds ``ln(M_k)/n + gamma``; zero or several
    hits are errors. Error probabilities are exact for every drawn codebook
    pair; the bound ``Pr{T1^c} + Pr{T2^c} + 2 exp(-n gamma)`` is exact too.
    """
    n = exp.n
    px = [_uniform(ic.sizes[0]) if exp.px1 is None else np.asarray(exp.px1, dtype=np.float64),
          _uniform(ic.sizes[1]) if exp.px2 is None else np.asarray(exp.px2, dtype=np.float64)]
    ms = (exp.m1, exp.m2)
    for user in (1, 2):
        size = ic.input_size(user) ** n * ic.output_size(user) ** n
        if size > MAX_OUTCOMES:
            raise SizeGuardError(f"{size} outcomes exceed the limit of {MAX_OUTCOMES}")

    hits, t_comp = [], []
    for user in (1, 2):
        own, other = (px[0], px[1]) if user == 1 else (px[1], px[0])
        vn, pxn, _, dens = _density_matrix(ic.effective_channel(user, other), own, n)
        hit = dens > math.log(ms[user - 1]) / n + exp.gamma
        hits.append(hit)
        t_comp.append(float(1.0 - (pxn[:, None] * vn * hit).sum()))

    w = (ic.marginal(1), ic.marginal(2))
    sums = np.empty(exp.trials)
    eps = np.empty((exp.trials, 2))
    for trial in range(exp.trials):
        rng = stream(exp.seed, trial)
        c1 = rng.choice(ic.sizes[0], size=(exp.m1, n), p=px[0])
        c2 = rng.choice(ic.sizes[1], size=(exp.m2, n), p=px[1])
        books = (c1, c2)
        for user in (1, 2):
            mine = books[user - 1]
            h = hits[user - 1][_seq_index(mine, ic.input_size(user))]
            correct = h & (h.sum(axis=0) == 1)[None, :]
            p = _pair_channel(w[user - 1], c1, c2)
            if user == 1:
                ok = np.einsum("ijy,iy->ij", p, correct)
            else:
                ok = np.einsum("ijy,jy->ij", p, correct)
            eps[trial, user - 1] = 1.0 - ok.mean()
        sums[trial] = eps[trial].sum()

    stderr = float(np.std(sums, ddof=1) / math.sqrt(exp.trials)) if exp.trials > 1 else 0.0
    slack = 2.0 * math.exp(-n * exp.gamma)
    return Lemma1Report(
        empirical_error_sum=float(sums.mean()),
        trial_std_error=stderr,
        analytic_bound=t_comp[0] + t_comp[1] + slack,
        epsilon1=float(eps[:, 0].mean()),
        epsilon2=float(eps[:, 1].mean()),
        prob_t1_complement=t_comp[0],
        prob_t2_complement=t_comp[1],
        slack=slack,
    )


@dataclass(frozen=True)
class Code:
    """Explicit code: codebooks as integer arrays ``(M, n)`` and, per decoder,
    a list of decoding sets of output sequences (tuples of length n)."""

    codebook1: np.ndarray
    codebook2: np.ndarray
    decoding1: tuple[frozenset, ...]
    decoding2: tuple[frozenset, ...]

    def __post_init__(self):
        c1 = np.atleast_2d(np.asarray(self.codebook1, dtype=np.int64))
        c2 = np.atleast_2d(np.asarray(self.codebook2, dtype=np.int64))
        if c1.shape[1] != c2.shape[1]:
            raise ValueError("codebooks must share the block length")
        for c in (c1, c2):
            if len({tuple(r) for r in c}) != len(c):
                raise ValueError("codewords must be distinct")
        d1 = tuple(frozenset(tuple(int(v) for v in y) for y in s) for s in self.decoding1)
        d2 = tuple(frozenset(tuple(int(v) for v in y) for y in s) for s in self.decoding2)
        if len(d1) != len(c1) or len(d2) != len(c2):
            raise ValueError("need one decoding set per codeword")
        for sets in (d1, d2):
            seen = set()
            for s in sets:
                if seen & s:
                    raise OverlapError("decoding sets must be pairwise disjoint")
                seen |= s
        object.__setattr__(self, "codebook1", c1)
        object.__setattr__(self, "codebook2", c2)
        object.__setattr__(self, "decoding1", d1)
        object.__setattr__(self, "decoding2", d2)

    @property
    def n(self) -> int:
        return self.codebook1.shape[1]

    def codebook(self, user: int) -> np.ndarray:
        return self.codebook1 if user == 1 else self.codebook2

    def decoding(self, user: int) -> tuple[frozenset, ...]:
        return self.decoding1 if user == 1 else self.decoding2


@dataclass(frozen=True)
class Lemma2Report:
    epsilon1: float
    rhs1: float
    epsilon2: float
    rhs2: float

    @property
    def holds1(self) -> bool:
        return self.epsilon1 >= self.rhs1

    @property
    def holds2(self) -> bool:
        return self.epsilon2 >= self.rhs2

    @property
    def holds(self) -> bool:
        return self.holds1 and self.holds2


def _membership(sets, q: int, n: int) -> np.ndarray:
    member = np.zeros((len(sets), q ** n), dtype=bool)
    for i, s in enumerate(sets):
        if s:
            idx = np.ravel_multi_index(np.array(sorted(s)).T, (q,) * n)
            member[i, idx] = True
    return member


def lemma2_converse_check(ic: DiscreteIC, code: Code, gamma: float) -> Lemma2Report:
    """Both sides of the converse inequality, exactly, for each user.

    ``epsilon_k`` is the average error probability of the code and
    ``rhs_k = Pr{(1/n) ln(P_{Y|X}/P_Y) <= ln(M_k)/n - gamma} - exp(-n gamma)``
    with inputs uniform on the codebooks.
    """
    n = code.n
    _check_n(n)
    out = {}
    for user in (1, 2):
        q = ic.output_size(user)
        if q ** n * len(code.codebook(user)) > MAX_OUTCOMES:
            raise SizeGuardError("code too large to enumerate")
        p = _pair_channel(ic.marginal(user), code.codebook1, code.codebook2)
        member = _membership(code.decoding(user), q, n)
        if user == 1:
            correct = np.einsum("ijy,iy->ij", p, member)
        else:
            correct = np.einsum("ijy,jy->ij", p, member)
        eps = 1.0 - correct.mean()
        cond = p.mean(axis=1) if user == 1 else p.mean(axis=0)
        m = cond.shape[0]
        py = cond.mean(axis=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            dens = np.where(cond > 0, np.log(cond) - np.log(py)[None, :], np.inf) / n
        below = dens <= math.log(m) / n - gamma
        prob = float((cond * below).sum() / m)
        out[user] = (float(eps), prob - math.exp(-n * gamma))
    return Lemma2Report(out[1][0], out[1][1], out[2][0], out[2][1])


def random_code(ic: DiscreteIC, n: int, m1: int, m2: int, rng: np.random.Generator) -> Code:
    """Distinct random codewords and a random partition of each output space
    into decoding sets plus an undecided remainder."""
    _check_n(n)
    books, sets = [], []
    for user, m in ((1, m1), (2, m2)):
        qx = ic.input_size(user)
        if m > qx ** n:
            raise ValueError("more codewords than input sequences")
        idx = rng.choice(qx ** n, size=m, replace=False)
        books.append(np.array(np.unravel_index(idx, (qx,) * n)).T)
        qy = ic.output_size(user)
        labels = rng.integers(-1, m, size=qy ** n)
        ys = list(itertools.product(range(qy), repeat=n))
        sets.append([frozenset(ys[k] for k in np.flatnonzero(labels == i)) for i in range(m)])
    return Code(books[0], books[1], tuple(sets[0]), tuple(sets[1]))


def ml_decoding_sets(ic: DiscreteIC, codebook1, codebook2, user: int) -> tuple[frozenset, ...]:
    """Decoding sets of the rule ``argmax_i P(y | x_user(i))``, ties to the lowest i.

    Output sequences with zero probability under every codeword are left undecided.
    """
    c1 = np.atleast_2d(np.asarray(codebook1, dtype=np.int64))
    c2 = np.atleast_2d(np.asarray(codebook2, dtype=np.int64))
    p = _pair_channel(ic.marginal(user), c1, c2)
    cond = p.mean(axis=1) if user == 1 else p.mean(axis=0)
    n = c1.shape[1]
    q = ic.output_size(user)
    best = cond.argmax(axis=0)
    live = cond.max(axis=0) > 0
    ys = list(itertools.product(range(q), repeat=n))
    return tuple(frozenset(ys[k] for k in np.flatnonzero(live & (best == i)))
                 for i in range(cond.shape[0]))
