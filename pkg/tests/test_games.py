"""Game corpus: oracle consistency, structure flags, and worked values."""

import numpy as np
import pytest

from adagames import games
from adagames.geometry import Box, Budget, Simplex


ALL_BUILDERS = [
    ("bilinear", lambda: games.build_bilinear()),
    ("zero_sum", lambda: games.build_random_zero_sum(6, 5, seed=2)),
    ("kelly", lambda: games.build_kelly(resources=3, bidders=4, seed=1)),
    ("jordan", lambda: games.build_jordan()),
]


def interior_joint(game, rng):
    """A strictly feasible profile, nudged off boundaries for differencing."""
    joint = []
    for s in game.action_sets:
        x = s.sample(rng)
        joint.append(0.9 * x + 0.1 * np.asarray(s.canonical(), dtype=float))
    return joint


@pytest.mark.parametrize("name,build", ALL_BUILDERS)
def test_gradients_match_finite_differences(name, build):
    game = build()
    rng = np.random.default_rng(42)
    h = 1e-5
    checked = 0
    for _ in range(25):
        joint = interior_joint(game, rng)
        for i in range(game.players):
            g = game.grad(i, joint)
            num = np.empty_like(g)
            for k in range(g.shape[0]):
                up = [x.copy() for x in joint]
                dn = [x.copy() for x in joint]
                up[i][k] += h
                dn[i][k] -= h
                num[k] = (game.loss(i, up) - game.loss(i, dn)) / (2 * h)
            scale = max(1.0, float(np.abs(g).max()))
            assert np.abs(g - num).max() / scale < 1e-4, (name, i)
            checked += 1
    assert checked == 25 * game.players


@pytest.mark.parametrize("name,build", ALL_BUILDERS)
def test_profile_oracles_agree_with_scalar_oracles(name, build):
    game = build()
    rng = np.random.default_rng(9)
    for _ in range(10):
        joint = interior_joint(game, rng)
        grads = game.grad_profile(joint)
        losses = game.loss_profile(joint, grads)
        for i in range(game.players):
            np.testing.assert_allclose(grads[i], game.grad(i, joint), rtol=1e-12)
            assert losses[i] == pytest.approx(game.loss(i, joint), rel=1e-12)


def test_zero_sum_games_sum_to_zero():
    rng = np.random.default_rng(4)
    for game in (games.build_bilinear(), games.build_random_zero_sum(8, 8, seed=5)):
        assert game.zero_sum
        for _ in range(50):
            joint = [s.sample(rng) for s in game.action_sets]
            assert abs(game.loss_profile(joint).sum()) < 1e-10


def test_bilinear_structure():
    game = games.build_bilinear()
    assert isinstance(game.action_sets[0], Box)
    assert game.nash is not None
    np.testing.assert_allclose(game.nash[0], [0.0])
    joint = [np.array([2.0]), np.array([-3.0])]
    # V(theta, phi) = (phi, -theta)
    np.testing.assert_allclose(game.grad(0, joint), [-3.0])
    np.testing.assert_allclose(game.grad(1, joint), [-2.0])
    assert game.loss(0, joint) == pytest.approx(-6.0)
    assert game.loss(1, joint) == pytest.approx(6.0)
    # a box missing the origin gets no Nash label
    shifted = games.build_bilinear((1.0, 3.0))
    assert shifted.nash is None


def test_matrix_game_worked_values():
    M = np.array([[0.0, 1.0], [-1.0, 0.0]])
    game = games.matrix_zero_sum(M, name="skew")
    u = np.array([0.5, 0.5])
    # V_1(uniform column play) = M q = (0.5, -0.5)
    np.testing.assert_allclose(game.grad(0, [u, u]), [0.5, -0.5])
    np.testing.assert_allclose(game.grad(1, [u, u]), [0.5, -0.5])
    assert game.lipschitz == pytest.approx(1.0)
    assert game.multilinear
    v, c = game.payoff_decomposition(0, [u, u])
    assert c == pytest.approx(game.loss(0, [u, u]) - u @ v)


def test_random_matrix_entries_in_declared_range():
    game = games.build_random_zero_sum(10, 10, seed=7, value_range=(-1.0, 1.0))
    M = game.aux["matrix"]
    assert M.shape == (10, 10)
    assert M.min() >= -1.0 and M.max() <= 1.0
    # redrawing with the same seed is reproducible
    again = games.build_random_zero_sum(10, 10, seed=7)
    np.testing.assert_array_equal(M, again.aux["matrix"])


def test_jordan_pure_profile_losses():
    """Pure strategy checks for the three-player cycle: player 1 wants to
    match player 2, player 2 matches player 3, player 3 mismatches player 1.
    Coordinate 0 is the first pure strategy."""
    game = games.build_jordan()
    e = np.eye(2)

    def pure(a, b, c):
        return [e[a].copy(), e[b].copy(), e[c].copy()]

    np.testing.assert_allclose(game.loss_profile(pure(0, 0, 0)), [-1.0, -1.0, 1.0])
    np.testing.assert_allclose(game.loss_profile(pure(0, 1, 0)), [1.0, 1.0, 1.0])
    np.testing.assert_allclose(game.loss_profile(pure(1, 1, 0)), [-1.0, 1.0, -1.0])
    # uniform play leaves everyone indifferent
    np.testing.assert_allclose(
        game.loss_profile([np.full(2, 0.5)] * 3), [0.0, 0.0, 0.0])
    assert game.nash is not None
    assert not game.zero_sum


def test_kelly_loss_by_hand():
    game = games.build_kelly(resources=2, bidders=2, seed=3)
    q = game.aux["q"]
    gains = game.aux["gains"]
    joint = [np.array([1.0, 0.0]), np.array([0.0, 2.0])]
    tot = 1.0 + np.array([1.0, 2.0])  # c = 1 plus column sums
    want0 = 1.0 - gains[0] * (q[0] * 1.0 / tot[0])
    want1 = 2.0 - gains[1] * (q[1] * 2.0 / tot[1])
    assert game.loss(0, joint) == pytest.approx(want0, rel=1e-12)
    assert game.loss(1, joint) == pytest.approx(want1, rel=1e-12)
    for s, b in zip(game.action_sets, game.aux["budgets"]):
        assert isinstance(s, Budget)
        assert s.budget == pytest.approx(b)


def test_variational_stability_probes():
    assert games.vs_probe(games.build_bilinear(), samples=300, seed=0) >= -1e-8
    assert games.vs_probe(games.build_random_zero_sum(5, 5, seed=1),
                          samples=300, seed=0) >= -1e-8
    # the auction has no recorded equilibrium, so the probe falls back to
    # the monotonicity form
    kelly = games.build_kelly(resources=3, bidders=5, seed=2)
    assert kelly.nash is None
    assert games.vs_probe(kelly, samples=200, seed=0) >= -1e-8
    with pytest.raises(ValueError):
        games.vs_probe(kelly, samples=10, form="vs")


def test_jordan_is_not_variationally_stable():
    game = games.build_jordan()
    assert games.vs_probe(game, samples=500, seed=0, form="monotone") < -1e-4


def test_freeze_opponents_matches_parent():
    base = games.build_random_zero_sum(4, 6, seed=11)
    rng = np.random.default_rng(0)
    opp = base.action_sets[1].sample(rng)
    solo = games.freeze_opponents(base, 0, [None, opp])
    assert solo.players == 1
    assert isinstance(solo.action_sets[0], Simplex)
    for _ in range(20):
        p = solo.action_sets[0].sample(rng)
        assert solo.loss(0, [p]) == pytest.approx(base.loss(0, [p, opp]), rel=1e-12)
        np.testing.assert_allclose(solo.grad(0, [p]), base.grad(0, [p, opp]))


def test_gap_function_vanishes_at_equilibrium():
    game = games.build_bilinear()
    gap, cert = games.gap_function(game, [np.array([0.0]), np.array([0.0])], 0)
    assert cert == 0.0
    assert gap == pytest.approx(0.0, abs=1e-12)
    off = [np.array([2.0]), np.array([1.0])]
    gap_off, _ = games.gap_function(game, off, 0)
    assert gap_off > 0.1
