import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import HD, PD, SH, random_weights
from groupess import GroupGame, GroupWeights, InvasionGrid, PayoffMatrix, PayoffMatrix2, Verdict
from groupess import find_all_gess, grid_search_equilibria, strict_group_nash_check
from groupess import verify_conditions, verify_gess_definition
from groupess.oracle import verify_random_mutants

FM = (4 / 9, 2 / 27)


def test_grid_validation():
    with pytest.raises(ValueError):
        InvasionGrid(eps_values=(0.0, 0.1))
    with pytest.raises(ValueError):
        InvasionGrid(deviation_resolution=0.6)
    assert len(InvasionGrid().eps_values) == 20
    assert InvasionGrid(deviation_resolution=0.5).deviations(3).shape == (6, 3)


def test_verdict_consistency():
    with pytest.raises(ValueError):
        Verdict(True, -1.0, tolerance=1e-7)


def test_definition_examples():
    g = GroupGame.two_groups(0.4, HD)
    assert verify_gess_definition(FM, g).passed
    assert verify_gess_definition((0.0, 1.0), GroupGame.two_groups(0.3, PD)).passed
    bad = verify_gess_definition((1.0, 0.0), g)
    assert not bad.passed and bad.witness.group == 0


def test_conditions_examples():
    assert verify_conditions((1.0, 1.0), GroupGame.two_groups(0.4, SH)).passed
    v = verify_conditions((1.0, 1.0), GroupGame.two_groups(0.3, PD))
    assert not v.passed and v.witness.group == 0
    # F_1(p) = 0.4 (p - 1) at alpha = 0.3, per unit deviation
    assert v.worst_violation == pytest.approx(-0.4, abs=1e-9)


def test_strict_nash_examples():
    assert strict_group_nash_check(FM, GroupGame.two_groups(0.4, HD))
    assert strict_group_nash_check((1.0, 0.0), GroupGame.two_groups(0.7, PD))
    # (H,H): U_i(p, 0) = 2 alpha_i p^2 - p + 1, so the 0.6 group gains by a full switch
    assert not strict_group_nash_check((0.0, 0.0), GroupGame.two_groups(0.4, SH))
    assert verify_gess_definition((0.0, 0.0), GroupGame.two_groups(0.4, SH)).passed
    three = GroupGame(GroupWeights((0.3, 0.3, 0.4)), SH)
    assert strict_group_nash_check((0.0, 0.0, 0.0), three)


def test_grid_search_examples():
    cl = grid_search_equilibria(GroupGame.two_groups(0.2, HD))
    assert len(cl) == 1 and cl[0].distance((1.0, 0.0)) < 1e-9
    cl = grid_search_equilibria(GroupGame.two_groups(0.3, SH))
    assert sorted(tuple(c.profile.first) for c in cl) == [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)]
    deg = grid_search_equilibria(GroupGame.two_groups(0.3, PayoffMatrix2(1, 1, 1, 1)))
    assert len(deg) == 1 and deg[0].degenerate


def test_grid_search_too_many_groups():
    g = GroupGame(GroupWeights((0.25, 0.25, 0.25, 0.25)), HD)
    with pytest.raises(ValueError):
        grid_search_equilibria(g)


def test_definition_accepts_general_actions():
    rps = PayoffMatrix(((0, -1, 1), (1, 0, -1), (-1, 1, 0)))
    g = GroupGame(GroupWeights((0.5, 0.5)), rps)
    u = (1 / 3, 1 / 3, 1 / 3)
    v = verify_gess_definition((u, u), g, InvasionGrid(deviation_resolution=0.1))
    # zero-sum cycle: every mutant ties at first order and Omega vanishes
    assert v.ties > 0
    assert not verify_gess_definition(((1, 0, 0), u), g, InvasionGrid(deviation_resolution=0.1)).passed


def test_random_mutants(rng):
    g = GroupGame.two_groups(0.4, HD)
    assert verify_random_mutants(FM, g, rng).passed
    assert not verify_random_mutants((1.0, 0.0), g, rng).passed


def test_definition_and_conditions_agree(rng):
    grid = InvasionGrid(deviation_resolution=0.05)
    for _ in range(150):
        n = int(rng.integers(1, 4))
        g = GroupGame(random_weights(rng, n), PayoffMatrix2(*rng.uniform(-1, 1, 4)))
        q = rng.choice([0.0, 1.0, rng.uniform()], size=n) if rng.uniform() < 0.5 else rng.uniform(size=n)
        assert verify_gess_definition(q, g, grid).passed == verify_conditions(q, g, grid).passed
    for alpha in (0.2, 0.3, 0.4, 0.7, 0.8):
        for r in find_all_gess(GroupGame.two_groups(alpha, HD)):
            g = GroupGame.two_groups(alpha, HD)
            assert verify_gess_definition(r.profile, g).passed
            assert verify_conditions(r.profile, g).passed


@given(st.floats(0.02, 0.98))
def test_solver_results_pass_oracle_hawk_dove(alpha):
    g = GroupGame.two_groups(alpha, HD)
    for r in find_all_gess(g):
        assert verify_gess_definition(r.profile, g).passed
