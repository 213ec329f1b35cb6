"""Brute-force oracles.

The path-sum likelihood here checks the forward recursion; the finite-alphabet
coding lab lives in :mod:`icregion.codinglab` and is re-exported for
convenience.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import logsumexp

from .channel import ChannelParams, branch_loglik
from .codinglab import (Code, CodingExperiment, DiscreteIC, Lemma1Report,  # noqa: F401
                        Lemma2Report, OverlapError, SizeGuardError, binary_flip_ic,
                        information_density_distribution, lemma1_bound_check,
                        lemma2_converse_check, ml_decoding_sets, random_code)
from .trellis import JointTrellis

MAX_SECTIONS = 4


def exact_sequence_log_likelihood(jt: JointTrellis, params: ChannelParams, observations,
                                  receiver: int) -> float:
    """``log p(y)`` summed over every branch sequence from the all-zero state.

    Each path contributes ``2^-(drive bits)`` times the product of its branch
    densities. Paths are never merged by state, so the cost is
    ``(2^(b1+b2))^sections``.
    """
    y = np.asarray(observations, dtype=np.float64)
    L = jt.uses_per_section
    if y.size % L:
        raise ValueError(f"observation length {y.size} is not a multiple of L={L}")
    sections = y.size // L
    if sections > MAX_SECTIONS:
        raise ValueError(f"at most {MAX_SECTIONS} sections can be enumerated, got {sections}")
    ln2 = math.log(2.0)
    # per-section branch terms are shared by every path through that branch;
    # paths themselves are still expanded one by one
    index = {id(b): i for i, b in enumerate(jt.branches)}
    terms = [[-ln2 * (len(b.drive1) + len(b.drive2))
              + branch_loglik(y[t * L:(t + 1) * L], b.symbols1, b.symbols2, params, receiver)
              for b in jt.branches] for t in range(sections)]
    fronts = [(0, 0.0)]
    for t in range(sections):
        nxt = []
        for state, logw in fronts:
            for b in jt.outgoing(state):
                nxt.append((b.s_plus, logw + terms[t][index[id(b)]]))
        fronts = nxt
    return float(logsumexp([w for _, w in fronts]))
