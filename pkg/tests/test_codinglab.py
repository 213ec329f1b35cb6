import itertools
import math

import numpy as np
import pytest

from icregion.codinglab import (Code, CodingExperiment, DiscreteIC, OverlapError,
                                SizeGuardError, binary_flip_ic, information_density_distribution,
                                lemma1_bound_check, lemma2_converse_check, ml_decoding_sets,
                                random_code)


def noiseless_ic() -> DiscreteIC:
    """y_k = x_k exactly, no interference."""
    t = np.zeros((2, 2, 2, 2))
    for x1, x2 in itertools.product((0, 1), repeat=2):
        t[x1, x2, x1, x2] = 1.0
    return DiscreteIC(t)


def pure_noise_ic() -> DiscreteIC:
    return DiscreteIC(np.full((2, 2, 2, 2), 0.25))


def direct_density_atoms(ic, n, user, base=2.0):
    """Information density law by summing the full joint table over every sequence.

    No per-letter factorisation: P(y^n | x^n) sums over the other user's
    whole input sequence and the other output sequence explicitly.
    """
    w = ic.table
    q = w.shape
    xs = list(itertools.product(range(q[0]), repeat=n))
    zs = list(itertools.product(range(q[1]), repeat=n))
    ys = list(itertools.product(range(q[2 if user == 1 else 3]), repeat=n))
    others_out = list(itertools.product(range(q[3 if user == 1 else 2]), repeat=n))
    own_seqs = xs if user == 1 else zs
    other_seqs = zs if user == 1 else xs
    p_own = 1.0 / len(own_seqs)
    p_other = 1.0 / len(other_seqs)

    def w_n(x1, x2, y1, y2):
        return math.prod(w[a, b, c, d] for a, b, c, d in zip(x1, x2, y1, y2))

    cond = {}
    for xo in own_seqs:
        for y in ys:
            total = 0.0
            for xt in other_seqs:
                for yt in others_out:
                    if user == 1:
                        total += p_other * w_n(xo, xt, y, yt)
                    else:
                        total += p_other * w_n(xt, xo, yt, y)
            cond[xo, y] = total
    py = {y: sum(p_own * cond[xo, y] for xo in own_seqs) for y in ys}
    atoms = {}
    for (xo, y), c in cond.items():
        if c > 0:
            v = round(math.log(c / py[y], base) / n, 9)
            atoms[v] = atoms.get(v, 0.0) + p_own * c
    return sorted(atoms.items())


def test_table_validation():
    with pytest.raises(ValueError):
        DiscreteIC(np.full((2, 2, 2, 2), 0.3))
    with pytest.raises(ValueError):
        DiscreteIC(-np.ones((2, 2, 2, 2)))
    with pytest.raises(SizeGuardError):
        DiscreteIC(np.full((5, 1, 1, 1), 1.0))


def test_marginals_sum_to_one():
    ic = binary_flip_ic(0.1, 0.1)
    for user in (1, 2):
        assert np.all(np.abs(ic.marginal(user).sum(axis=-1) - 1.0) <= 1e-12)


def test_text_round_trip(tmp_path):
    ic = binary_flip_ic(0.07, 0.2)
    path = tmp_path / "ic.txt"
    ic.save(path)
    back = DiscreteIC.load(path)
    assert np.array_equal(back.table, ic.table)
    text = path.read_text().splitlines()
    assert text[0] == "# sizes 2 2 2 2"
    # row order lexicographic in (x1, x2); column order in (y1, y2)
    row = [float(v) for v in text[1 + 2].split()]  # x1=1, x2=0
    assert row == pytest.approx(ic.table[1, 0].reshape(-1).tolist())


def test_text_needs_sizes():
    with pytest.raises(ValueError):
        DiscreteIC.from_text("1 0\n0 1\n")


def test_noiseless_density_single_atom():
    for n in (1, 3, 5):
        atoms = information_density_distribution(noiseless_ic(), None, None, n, 1)
        assert atoms.values == pytest.approx([1.0])
        assert atoms.probs == pytest.approx([1.0])


def test_pure_noise_density_zero():
    atoms = information_density_distribution(pure_noise_ic(), None, None, 4, 2)
    assert atoms.values == pytest.approx([0.0], abs=1e-12)
    assert atoms.probs.sum() == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("user", [1, 2])
def test_density_against_direct_summation(user):
    ic = binary_flip_ic(0.1, 0.1)
    atoms = information_density_distribution(ic, None, None, 2, user)
    ref = direct_density_atoms(ic, 2, user)
    assert len(atoms.values) == len(ref)
    for v, p, (rv, rp) in zip(atoms.values, atoms.probs, ref):
        assert abs(v - rv) < 1e-8
        assert abs(p - rp) < 1e-10


def test_density_probabilities_sum_to_one():
    ic = binary_flip_ic(0.2, 0.3)
    for n in (1, 4, 8):
        atoms = information_density_distribution(ic, [0.3, 0.7], [0.6, 0.4], n, 1, base=math.e)
        assert abs(atoms.probs.sum() - 1.0) <= 1e-10


def test_density_size_guard():
    with pytest.raises(SizeGuardError):
        information_density_distribution(binary_flip_ic(), None, None, 11, 1)
    big = DiscreteIC(np.full((4, 4, 4, 4), 1 / 16))
    with pytest.raises(SizeGuardError):
        information_density_distribution(big, None, None, 6, 1)


@pytest.mark.parametrize("gamma", [0.05, 0.1, 0.2])
@pytest.mark.parametrize("m", [2, 4])
def test_lemma1_bound_flip_channel(gamma, m):
    rep = lemma1_bound_check(binary_flip_ic(0.1, 0.1), CodingExperiment(6, m, m, gamma, 100, 1))
    assert rep.empirical_error_sum <= rep.analytic_bound + 2 * rep.trial_std_error
    assert rep.slack == pytest.approx(2 * math.exp(-6 * gamma))


def test_lemma1_bound_is_informative_on_a_good_channel():
    # bound below 1, so the comparison says something
    rep = lemma1_bound_check(binary_flip_ic(0.01, 0.01), CodingExperiment(10, 2, 2, 0.1, 100, 2))
    assert rep.analytic_bound < 1.0
    assert rep.holds


def test_lemma1_single_codeword_runs():
    rep = lemma1_bound_check(binary_flip_ic(0.1, 0.1), CodingExperiment(4, 1, 1, 0.1, 5, 3))
    assert 0.0 <= rep.empirical_error_sum <= 2.0
    assert rep.holds


def test_lemma1_noiseless_vanishes():
    rep = lemma1_bound_check(noiseless_ic(), CodingExperiment(8, 2, 2, 0.01, 200, 4))
    # only codeword collisions (prob 2^-8 per pair) cause errors
    assert rep.empirical_error_sum < 0.02
    assert rep.prob_t1_complement == pytest.approx(0.0, abs=1e-12)


def test_lemma1_exact_error_hand_case():
    # n=2, M=2 on the noiseless link: the true codeword has density ln 2 per
    # letter, above the threshold ln(2)/2 + gamma, so decoding fails iff the
    # two codewords collide (probability 1/4)
    rep = lemma1_bound_check(noiseless_ic(), CodingExperiment(2, 2, 2, 0.01, 400, 5))
    assert rep.epsilon1 == pytest.approx(0.25, abs=4 * math.sqrt(0.25 * 0.75 / 400))


def test_lemma1_threshold_is_strict():
    # at n=1 the density ln 2 equals ln(2)/1 and never exceeds ln 2 + gamma
    rep = lemma1_bound_check(noiseless_ic(), CodingExperiment(1, 2, 2, 0.01, 50, 5))
    assert rep.epsilon1 == 1.0 and rep.epsilon2 == 1.0


def test_lemma1_experiment_validation():
    with pytest.raises(ValueError):
        CodingExperiment(6, 2, 2, 0.0, 10, 1)
    with pytest.raises(SizeGuardError):
        CodingExperiment(11, 2, 2, 0.1, 10, 1)


def test_lemma1_deterministic():
    exp = CodingExperiment(5, 2, 2, 0.1, 20, 99)
    assert lemma1_bound_check(binary_flip_ic(), exp) == lemma1_bound_check(binary_flip_ic(), exp)


def test_lemma2_repetition_code_noiseless():
    ic = noiseless_ic()
    c1 = [[0, 0, 0], [1, 1, 1]]
    c2 = [[0, 1, 0], [1, 0, 1]]
    code = Code(c1, c2, ml_decoding_sets(ic, c1, c2, 1), ml_decoding_sets(ic, c1, c2, 2))
    rep = lemma2_converse_check(ic, code, 0.1)
    assert rep.epsilon1 == 0.0 and rep.epsilon2 == 0.0
    assert rep.rhs1 <= 0 and rep.rhs2 <= 0
    assert rep.rhs1 == pytest.approx(-math.exp(-0.3))
    assert rep.holds


def test_lemma2_random_codes():
    ic = binary_flip_ic(0.1, 0.1)
    rng = np.random.default_rng(2026)
    for k in range(50):
        code = random_code(ic, 4, 2 + k % 3, 2 + (k + 1) % 3, rng)
        rep = lemma2_converse_check(ic, code, [0.02, 0.1, 0.3][k % 3])
        assert rep.epsilon1 >= rep.rhs1
        assert rep.epsilon2 >= rep.rhs2


def test_lemma2_large_gamma_limit():
    ic = binary_flip_ic(0.1, 0.1)
    code = random_code(ic, 3, 2, 2, np.random.default_rng(1))
    rep = lemma2_converse_check(ic, code, 50.0)
    assert -1e-30 < rep.rhs1 <= 0.0
    assert rep.holds


def test_lemma2_ml_beats_random_decoder():
    ic = binary_flip_ic(0.05, 0.05)
    rng = np.random.default_rng(3)
    code = random_code(ic, 5, 2, 2, rng)
    ml = Code(code.codebook1, code.codebook2,
              ml_decoding_sets(ic, code.codebook1, code.codebook2, 1),
              ml_decoding_sets(ic, code.codebook1, code.codebook2, 2))
    assert lemma2_converse_check(ic, ml, 0.1).epsilon1 <= lemma2_converse_check(ic, code, 0.1).epsilon1


def test_overlapping_sets_rejected():
    with pytest.raises(OverlapError):
        Code([[0, 0], [1, 1]], [[0, 0], [1, 1]],
             [{(0, 0), (0, 1)}, {(0, 1)}], [{(0, 0)}, {(1, 1)}])


def test_duplicate_codewords_rejected():
    with pytest.raises(ValueError):
        Code([[0, 0], [0, 0]], [[0, 0], [1, 1]], [set(), set()], [set(), set()])
