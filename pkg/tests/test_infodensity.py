import math

import numpy as np
import pytest

from icregion.channel import ChannelParams, branch_loglik, db_to_linear, simulate
from icregion.exact_oracle import exact_sequence_log_likelihood
from icregion.infodensity import (TrellisHMM, estimate_conditional_entropy_rate,
                                  estimate_mi_rate, estimate_output_entropy_rate,
                                  forward_log_likelihood, forward_recursion, output_view,
                                  run_blocks, trellis_view)
from icregion.quadrature import (GAUSS_ENTROPY_BITS, bpsk_awgn_mi, mixture_entropy,
                                 noise_model_mi)
from icregion.trellis import build_constant_trellis, build_iud_trellis, product_trellis

SECTIONS = 2000
BLOCKS = 10


def combined(*errs):
    return math.sqrt(sum(e * e for e in errs))


@pytest.fixture(scope="module")
def const():
    return build_constant_trellis()


def test_degenerate_chain_is_iid_gaussian():
    amp = 2.0
    hmm = trellis_view(build_constant_trellis(), amp)
    y = np.random.default_rng(1).normal(amp, 1.0, size=25)
    direct = sum(-0.5 * math.log(2 * math.pi) - 0.5 * (v - amp) ** 2 for v in y)
    assert forward_log_likelihood(hmm, y) == pytest.approx(direct, rel=1e-12)


@pytest.mark.parametrize("pair", ["cc_un", "un_cc", "cc_cc", "un_un"])
@pytest.mark.parametrize("receiver", [1, 2])
def test_forward_matches_exhaustive_sum(pair, receiver, cc, un, params_fig4):
    t = {"cc": cc, "un": un}
    a, b = pair.split("_")
    jt = product_trellis(t[a], t[b])
    rng = np.random.default_rng(hash((pair, receiver)) % 2**32)
    for draw in range(5):
        sections = 1 + draw % 4
        y = rng.normal(0, 3, size=sections * jt.uses_per_section)
        fwd = forward_log_likelihood(output_view(jt, params_fig4, receiver), y)
        ref = exact_sequence_log_likelihood(jt, params_fig4, y, receiver)
        assert abs(fwd - ref) <= 1e-9 * abs(ref)


def test_rescaling_alpha_mid_recursion(cc, un, params_fig4):
    jt = product_trellis(cc, un)
    hmm = output_view(jt, params_fig4, 1)
    y = simulate(jt, params_fig4, 40, seed=3).y1
    full = forward_log_likelihood(hmm, y)
    head, alpha = forward_recursion(hmm, y[:40])
    tail, _ = forward_recursion(hmm, y[40:], alpha0=2.0 * alpha)
    assert head + tail == pytest.approx(full, rel=1e-13)


def test_forward_rejects_partial_section(cc, un, params_fig4):
    hmm = output_view(product_trellis(cc, un), params_fig4, 1)
    with pytest.raises(ValueError):
        forward_log_likelihood(hmm, np.zeros(5))


def test_forward_survives_extreme_observations(cc, params_fig4):
    # far-out samples push every branch weight towards underflow
    jt = product_trellis(cc, cc)
    hmm = output_view(jt, params_fig4, 1)
    y = np.array([60.0, -60.0, 60.0, -60.0])
    ref = exact_sequence_log_likelihood(jt, params_fig4, y, 1)
    assert forward_log_likelihood(hmm, y) == pytest.approx(ref, rel=1e-9)


def test_output_entropy_pure_noise(const, params_fig4):
    jt = product_trellis(const, const)
    est = estimate_output_entropy_rate(jt, params_fig4, 1, SECTIONS, BLOCKS, seed=11)
    assert abs(est.value - GAUSS_ENTROPY_BITS) < 3 * est.std_error
    assert est.n == SECTIONS * BLOCKS and est.blocks == BLOCKS and est.seed == 11


def test_output_entropy_two_component_mixture(un):
    p = ChannelParams.from_db(7, 7, 0.0)
    jt = product_trellis(un, un)
    est = estimate_output_entropy_rate(jt, p, 1, SECTIONS, BLOCKS, seed=12)
    amp = math.sqrt(p.p1)
    assert abs(est.value - mixture_entropy([-amp, amp])) < 3 * est.std_error


def test_output_entropy_seed_consistency(cc, un, params_fig4):
    jt = product_trellis(cc, un)
    e1 = estimate_output_entropy_rate(jt, params_fig4, 2, SECTIONS, BLOCKS, seed=13)
    e2 = estimate_output_entropy_rate(jt, params_fig4, 2, SECTIONS, BLOCKS, seed=14)
    assert abs(e1.value - e2.value) < 6 * combined(e1.std_error, e2.std_error)


def test_conditional_entropy_with_constant_interferer(un, const, params_fig4):
    jt = product_trellis(un, const)
    est = estimate_conditional_entropy_rate(jt, params_fig4, 1, SECTIONS, BLOCKS, seed=15)
    assert abs(est.value - GAUSS_ENTROPY_BITS) < 3 * est.std_error + 1e-12


def test_conditional_entropy_without_cross_gain(cc, un):
    p = ChannelParams.from_db(7, 7, 0.0)
    jt = product_trellis(un, cc)
    est = estimate_conditional_entropy_rate(jt, p, 1, SECTIONS, BLOCKS, seed=16)
    assert abs(est.value - GAUSS_ENTROPY_BITS) < 3 * est.std_error


def test_conditional_entropy_memoryless_interferer(un, params_fig4):
    jt = product_trellis(un, un)
    est = estimate_conditional_entropy_rate(jt, params_fig4, 1, SECTIONS, BLOCKS, seed=17)
    c = params_fig4.gain(1, 2)
    assert abs(est.value - mixture_entropy([-c, c])) < 3 * est.std_error


def test_mi_single_user_reduction(un):
    p = ChannelParams.from_db(7, 7, 0.0)
    est = estimate_mi_rate(un, un, p, 1, SECTIONS, BLOCKS, seed=18)
    assert abs(est.value - bpsk_awgn_mi(p.p1)) < 3 * est.std_error


def test_mi_zero_rate_user(const, un, params_fig4):
    est = estimate_mi_rate(const, un, params_fig4, 1, SECTIONS, BLOCKS, seed=19)
    assert abs(est.value) <= 3 * est.std_error + 1e-12


def test_mi_coded_user_cap(cc, un, params_fig4):
    est = estimate_mi_rate(cc, un, params_fig4, 1, SECTIONS, BLOCKS, seed=20)
    assert est.value <= 0.5 + 3 * est.std_error
    assert est.value >= -3 * est.std_error


def test_mi_memoryless_matches_noise_model(un, params_fig4):
    est = estimate_mi_rate(un, un, params_fig4, 2, SECTIONS, BLOCKS, seed=21)
    assert abs(est.value - noise_model_mi(params_fig4, 2)) < 3 * est.std_error


def test_structure_gain(cc, un, params_fig4):
    est = estimate_mi_rate(cc, un, params_fig4, 2, SECTIONS, BLOCKS, seed=22)
    assert est.value - noise_model_mi(params_fig4, 2) > 3 * est.std_error


def test_monotone_in_power(un):
    ests = [estimate_mi_rate(un, un, ChannelParams.from_db(db, db, 0.5), 1, SECTIONS, BLOCKS,
                             seed=23) for db in (3, 7, 11)]
    for lo, hi in zip(ests, ests[1:]):
        assert hi.value - lo.value > 3 * combined(lo.std_error, hi.std_error)


def test_sender_swap_symmetry(cc, un, params_fig4):
    a = estimate_mi_rate(cc, un, params_fig4, 1, SECTIONS, BLOCKS, seed=24)
    b = estimate_mi_rate(un, cc, params_fig4, 2, SECTIONS, BLOCKS, seed=25)
    assert abs(a.value - b.value) < 3 * combined(a.std_error, b.std_error)


def test_worker_count_does_not_change_result(cc, un, params_fig4):
    jt = product_trellis(cc, un)
    serial = run_blocks(jt, params_fig4, 1, 200, 4, seed=26, workers=1)
    parallel = run_blocks(jt, params_fig4, 1, 200, 4, seed=26, workers=2)
    assert serial.tobytes() == parallel.tobytes()


@pytest.mark.parametrize("kw", [dict(n_sections=9, blocks=2), dict(n_sections=10, blocks=1)])
def test_run_size_preconditions(kw, un, params_fig4):
    with pytest.raises(ValueError):
        estimate_mi_rate(un, un, params_fig4, 1, seed=1, **kw)


def test_seed_required(un, params_fig4):
    with pytest.raises(TypeError):
        estimate_mi_rate(un, un, params_fig4, 1, 10, 2)
