import math

import numpy as np
import pytest

from icregion.channel import branch_loglik
from icregion.exact_oracle import exact_sequence_log_likelihood
from icregion.trellis import build_constant_trellis, product_trellis


def test_single_branch_is_iid(params_fig4):
    t = build_constant_trellis()
    jt = product_trellis(t, t)
    y = np.array([0.3, 4.1, -2.0])
    mean = params_fig4.gain(1, 1) + params_fig4.gain(1, 2)
    direct = sum(-0.5 * math.log(2 * math.pi) - 0.5 * (v - mean) ** 2 for v in y)
    assert exact_sequence_log_likelihood(jt, params_fig4, y, 1) == pytest.approx(direct, rel=1e-13)


def test_one_section_is_weighted_average(cc, un, params_fig4):
    jt = product_trellis(cc, un)
    y = np.array([1.2, -0.4])
    terms = [2.0 ** -(len(b.drive1) + len(b.drive2))
             * math.exp(branch_loglik(y, b.symbols1, b.symbols2, params_fig4, 2))
             for b in jt.outgoing(0)]
    assert exact_sequence_log_likelihood(jt, params_fig4, y, 2) == pytest.approx(
        math.log(sum(terms)), rel=1e-13)


def test_guard_on_sections(cc, un, params_fig4):
    jt = product_trellis(cc, un)
    with pytest.raises(ValueError):
        exact_sequence_log_likelihood(jt, params_fig4, np.zeros(10), 1)
    with pytest.raises(ValueError):
        exact_sequence_log_likelihood(jt, params_fig4, np.zeros(3), 1)


def test_coding_lab_reachable_from_oracle_module():
    from icregion import codinglab, exact_oracle
    assert exact_oracle.lemma1_bound_check is codinglab.lemma1_bound_check
    assert exact_oracle.lemma2_converse_check is codinglab.lemma2_converse_check
