"""Entropy and mutual-information rates of trellis-driven Gaussian outputs.

The receiver output is a hidden Markov process: the hidden chain walks a
trellis under i.u.d. drive bits and each section emits Gaussian samples
centred on the branch's noiseless signal. ``log p(y^n)`` is accumulated by
the normalized forward (alpha) recursion; Monte Carlo blocks then give

    h(Y)     ~ -(1/n) log2 p(y^n)           over the joint trellis
    h(Y|X)   ~ -(1/n) log2 p(y^n | x_own^n) over the interferer's trellis
    I(X;Y)   = h(Y) - h(Y|X)                on the same blocks.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

import numpy as np
from scipy.special import logsumexp

from .channel import LOG_2PI, ChannelParams, simulate
from .rng import check_seed
from .trellis import JointTrellis, Trellis, product_trellis

_LN2 = math.log(2.0)
DEFAULT_SECTIONS = 10_000
DEFAULT_BLOCKS = 10


@dataclass(frozen=True)
class TrellisHMM:
    """Trellis with Gaussian emissions.

    ``means[b]`` is the noiseless received signal on branch ``b`` (length L);
    ``log_prior[b]`` is the log probability of taking ``b`` from its start
    state. The chain starts in ``initial_state``.
    """

    num_states: int
    s_minus: np.ndarray
    s_plus: np.ndarray
    log_prior: np.ndarray
    means: np.ndarray
    initial_state: int = 0

    @property
    def uses_per_section(self) -> int:
        return self.means.shape[1]

    def branch_logliks(self, observations) -> np.ndarray:
        """Per-section, per-branch log of prior times emission density."""
        L = self.uses_per_section
        y = np.asarray(observations, dtype=np.float64)
        if y.ndim != 1 or y.size % L:
            raise ValueError(f"observation length {y.size} is not a multiple of L={L}")
        d = y.reshape(-1, 1, L) - self.means[None, :, :]
        return -0.5 * (d * d).sum(axis=-1) - 0.5 * L * LOG_2PI + self.log_prior


def output_view(jt: JointTrellis, params: ChannelParams, receiver: int) -> TrellisHMM:
    """Receiver output over the full joint trellis."""
    arr = jt.arrays
    means = (params.gain(receiver, 1) * arr["symbols1"]
             + params.gain(receiver, 2) * arr["symbols2"])
    return TrellisHMM(jt.num_states, arr["s_minus"], arr["s_plus"],
                      -_LN2 * arr["drive_bits"].astype(np.float64), means)


def trellis_view(t: Trellis, amplitude: float) -> TrellisHMM:
    """A single sender's trellis seen through a fixed amplitude."""
    return TrellisHMM(
        t.num_states,
        np.array([b.s_minus for b in t.branches], dtype=np.int64),
        np.array([b.s_plus for b in t.branches], dtype=np.int64),
        np.full(len(t.branches), -_LN2 * t.driving_bits_per_section),
        amplitude * np.array([b.symbols for b in t.branches], dtype=np.float64),
    )


def interference_view(jt: JointTrellis, params: ChannelParams, receiver: int) -> TrellisHMM:
    """Interferer's trellis as seen at ``receiver``; observations must have
    the receiver's own signal already subtracted."""
    other = 2 if receiver == 1 else 1
    return trellis_view(jt.component(other), params.gain(receiver, other))


def forward_recursion(hmm: TrellisHMM, observations, alpha0=None) -> tuple[float, np.ndarray]:
    """Run the normalized alpha recursion.

    Returns ``(log p(y | start distribution), final filtered state
    distribution)``. ``alpha0`` is normalized before use; by default it is a
    point mass on ``hmm.initial_state``.
    """
    ll = hmm.branch_logliks(observations)
    S = hmm.num_states
    if alpha0 is None:
        alpha = np.zeros(S)
        alpha[hmm.initial_state] = 1.0
    else:
        alpha = np.asarray(alpha0, dtype=np.float64)
        alpha = alpha / alpha.sum()
    into = np.zeros((len(hmm.s_plus), S))
    into[np.arange(len(hmm.s_plus)), hmm.s_plus] = 1.0
    shift = ll.max(axis=1)
    weights = np.exp(ll - shift[:, None])
    s_minus = hmm.s_minus
    log_norm = 0.0
    for t in range(ll.shape[0]):
        new = (alpha[s_minus] * weights[t]) @ into
        c = new.sum()
        if c > 0.0 and math.isfinite(c):
            alpha = new / c
            log_norm += math.log(c)
        else:
            # underflow: redo this section in the log domain
            with np.errstate(divide="ignore"):
                la = np.log(alpha)[s_minus] + ll[t] - shift[t]
            per_state = np.full(S, -np.inf)
            for s in range(S):
                mask = hmm.s_plus == s
                if mask.any():
                    per_state[s] = logsumexp(la[mask])
            lc = logsumexp(per_state)
            alpha = np.exp(per_state - lc)
            log_norm += lc
    return log_norm + float(shift.sum()), alpha


def forward_log_likelihood(hmm: TrellisHMM, observations) -> float:
    """Natural-log likelihood ``log p(y^n)`` from the all-zero start state."""
    return forward_recursion(hmm, observations)[0]


@dataclass(frozen=True)
class RateEstimate:
    value: float
    std_error: float
    n: int
    blocks: int
    seed: int

    @property
    def block_length(self) -> int:
        return self.n // self.blocks


def _check_run(n_sections: int, blocks: int, seed: int) -> None:
    if int(n_sections) < 10:
        raise ValueError("n_sections must be >= 10")
    if int(blocks) < 2:
        raise ValueError("blocks must be >= 2")
    check_seed(seed)


def block_entropies(jt: JointTrellis, params: ChannelParams, receiver: int,
                    n_sections: int, seed: int, block: int) -> tuple[float, float]:
    """``(h(Y), h(Y|X_own))`` estimates in bits/use from one simulated block."""
    rec = simulate(jt, params, n_sections, seed, block)
    y = rec.y(receiver)
    scale = rec.n * _LN2
    h_y = -forward_log_likelihood(output_view(jt, params, receiver), y) / scale
    # x_own is stored at amplitude sqrt(P_own), i.e. exactly the own-signal term
    residual = y - rec.x(receiver)
    h_yx = -forward_log_likelihood(interference_view(jt, params, receiver), residual) / scale
    return h_y, h_yx


def run_blocks(jt: JointTrellis, params: ChannelParams, receiver: int,
               n_sections: int = DEFAULT_SECTIONS, blocks: int = DEFAULT_BLOCKS,
               *, seed: int, workers: int = 1) -> np.ndarray:
    """Per-block entropies, shape ``(blocks, 2)``, in ascending block order."""
    if receiver not in (1, 2):
        raise ValueError("receiver must be 1 or 2")
    _check_run(n_sections, blocks, seed)
    job = partial(block_entropies, jt, params, receiver, int(n_sections), int(seed))
    if workers <= 1:
        rows = [job(b) for b in range(blocks)]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(job, range(blocks)))
    return np.array(rows, dtype=np.float64)


def _summarize(samples: np.ndarray, jt: JointTrellis, n_sections: int, seed: int) -> RateEstimate:
    blocks = samples.size
    return RateEstimate(
        value=float(np.mean(samples)),
        std_error=float(np.std(samples, ddof=1) / math.sqrt(blocks)),
        n=blocks * int(n_sections) * jt.uses_per_section,
        blocks=blocks,
        seed=int(seed),
    )


def estimate_output_entropy_rate(jt, params, receiver, n_sections=DEFAULT_SECTIONS,
                                 blocks=DEFAULT_BLOCKS, *, seed, workers=1) -> RateEstimate:
    rows = run_blocks(jt, params, receiver, n_sections, blocks, seed=seed, workers=workers)
    return _summarize(rows[:, 0], jt, n_sections, seed)


def estimate_conditional_entropy_rate(jt, params, receiver, n_sections=DEFAULT_SECTIONS,
                                      blocks=DEFAULT_BLOCKS, *, seed, workers=1) -> RateEstimate:
    rows = run_blocks(jt, params, receiver, n_sections, blocks, seed=seed, workers=workers)
    return _summarize(rows[:, 1], jt, n_sections, seed)


def estimate_mi_rate(scheme1: Trellis, scheme2: Trellis, params: ChannelParams,
                     receiver: int, n_sections: int = DEFAULT_SECTIONS,
                     blocks: int = DEFAULT_BLOCKS, *, seed: int, workers: int = 1) -> RateEstimate:
    """Mutual information rate ``I(X_k; Y_k)`` in bits per channel use.

    ``h(Y)`` and ``h(Y|X)`` come from the same simulated blocks, and the
    standard error is taken over the per-block differences.
    """
    jt = product_trellis(scheme1, scheme2)
    rows = run_blocks(jt, params, receiver, n_sections, blocks, seed=seed, workers=workers)
    return _summarize(rows[:, 0] - rows[:, 1], jt, n_sections, seed)
