import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import HD, PD, SH, games, matrices, prob
from groupess import GroupGame, GroupProfile, GroupWeights, MixedStrategy, PayoffMatrix, PayoffMatrix2
from groupess.game import blend, group_utility, mutation_expansion, omega, pairwise_payoff, post_mutation_utility


def test_strategy_validation():
    assert MixedStrategy.from_first(0.3).first == pytest.approx(0.3)
    with pytest.raises(ValueError):
        MixedStrategy((0.5, 0.6))
    with pytest.raises(ValueError):
        MixedStrategy((-0.1, 1.1))
    MixedStrategy((0.2, 0.3, 0.5))


def test_weights_validation():
    with pytest.raises(ValueError):
        GroupWeights((0.5, 0.6))
    with pytest.raises(ValueError):
        GroupWeights((1.0, 0.0))
    assert len(GroupWeights.two(0.3)) == 2


def test_matrix_checks():
    assert HD.delta == -1.5
    assert SH.delta == 2
    assert PD.delta == 0
    with pytest.raises(ValueError):
        PayoffMatrix2(float("nan"), 0, 0, 0)
    with pytest.raises(ValueError):
        PayoffMatrix(((1.0, 2.0),))


def test_pairwise_examples():
    assert pairwise_payoff(1.0, 0.0, HD) == 2.0
    assert pairwise_payoff(0.3, 0.3, PayoffMatrix2(0, 0, 0, 0)) == 0.0
    assert pairwise_payoff(0.5, 0.5, HD) == pytest.approx(0.625)


def test_group_utility_examples():
    g = GroupGame.two_groups(0.4, HD)
    assert group_utility(0, (1.0, 0.0), g) == pytest.approx(1.0)
    assert group_utility(0, (0.0, 0.0), g) == pytest.approx(1.0)
    solo = GroupGame(GroupWeights((1.0,)), HD)
    assert group_utility(0, (0.37,), solo) == pytest.approx(pairwise_payoff(0.37, 0.37, HD))
    with pytest.raises(IndexError):
        group_utility(2, (1.0, 0.0), g)


def test_omega_examples():
    assert omega(0.3, 0.3, HD) == pytest.approx(0.0)
    assert omega(1.0, 0.0, HD) == pytest.approx(-1.5)
    assert omega(0.5, 0.0, SH) == pytest.approx(0.5)


def test_post_mutation_examples():
    g = GroupGame.two_groups(0.4, HD)
    q = (0.5, 0.5)
    # eps -> 0 and eps = 1
    assert post_mutation_utility(0, 1.0, q, 1e-12, g) == pytest.approx(group_utility(0, q, g), abs=1e-10)
    assert post_mutation_utility(0, 1.0, q, 1.0, g) == pytest.approx(group_utility(0, (1.0, 0.5), g))
    # hand expansion at (0.55, 0.5): 0.4 J(.55,.55) + 0.6 J(.55,.5)
    j1 = -0.5 * 0.55 * 0.55 + 2 * 0.55 * 0.45 + 0 + 1 * 0.45 * 0.45
    j2 = -0.5 * 0.55 * 0.5 + 2 * 0.55 * 0.5 + 0 + 1 * 0.45 * 0.5
    assert post_mutation_utility(0, 1.0, q, 0.1, g) == pytest.approx(0.4 * j1 + 0.6 * j2, abs=1e-12)
    for bad in (0.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            post_mutation_utility(0, 1.0, q, bad, g)


def test_general_matrix_pairwise():
    rps = PayoffMatrix(((0, -1, 1), (1, 0, -1), (-1, 1, 0)))
    u = (1 / 3, 1 / 3, 1 / 3)
    assert pairwise_payoff(u, (1, 0, 0), rps) == pytest.approx(0.0)
    assert pairwise_payoff((0, 1, 0), (1, 0, 0), rps) == 1


@given(matrices(), prob, prob, prob, st.floats(0, 1))
def test_bilinearity(m, p, p2, q, lam):
    mix = lam * p + (1 - lam) * p2
    left = pairwise_payoff(mix, q, m)
    assert left == pytest.approx(lam * pairwise_payoff(p, q, m) + (1 - lam) * pairwise_payoff(p2, q, m), abs=1e-12)
    right = pairwise_payoff(q, mix, m)
    assert right == pytest.approx(lam * pairwise_payoff(q, p, m) + (1 - lam) * pairwise_payoff(q, p2, m), abs=1e-12)


@given(matrices(), prob, prob)
def test_omega_two_action_identity(m, p, q):
    assert omega(p, q, m) == pytest.approx((p - q) ** 2 * m.delta, abs=1e-12)


@given(games(), st.data())
def test_mutation_identity(g, data):
    n = g.n_groups
    q = data.draw(st.lists(prob, min_size=n, max_size=n))
    i = data.draw(st.integers(0, n - 1))
    p = data.draw(prob)
    eps = data.draw(st.floats(1e-6, 1.0))
    direct = group_utility(i, GroupProfile.from_first(q).replace(i, blend(p, q[i], eps)), g)
    assert post_mutation_utility(i, p, q, eps, g) == pytest.approx(direct, abs=1e-12)
    assert mutation_expansion(i, p, q, eps, g) == pytest.approx(direct, abs=1e-10)


@given(matrices(), st.floats(0.1, 10), st.floats(-5, 5))
def test_affine_scales_delta(m, s, t):
    assert m.affine(s, t).delta == pytest.approx(s * m.delta, abs=1e-9)


def test_profile_length_mismatch():
    g = GroupGame.two_groups(0.4, HD)
    with pytest.raises(ValueError):
        group_utility(0, (0.1, 0.2, 0.3), g)


def test_determinism():
    g = GroupGame.two_groups(0.4, HD)
    a = [group_utility(0, (0.3, 0.7), g) for _ in range(3)]
    assert len({float(x) for x in a}) == 1
    assert np.array_equal(blend(1.0, 0.2, 0.5), blend(1.0, 0.2, 0.5))
