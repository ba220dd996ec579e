"""Experiment game corpus.

Each game exposes per-player loss and gradient oracles; the gradient oracle
returns the feedback vector V_i(x) (the gradient of player i's loss in their
own action at the joint profile). Mixed extensions of finite games are
multilinear, so V_i doubles as the expected payoff vector used for exact
regret and best-response computations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from adagames.geometry import Box, Budget, Simplex
from adagames.metrics import offline_minimize


@dataclass
class GameDefinition:
    name: str
    action_sets: list
    loss_oracle: object  # (player, joint) -> float
    grad_oracle: object  # (player, joint) -> vector
    nash: list | None = None
    zero_sum: bool = False
    multilinear: bool = False
    vs_declared: bool = False
    lipschitz: float | None = None
    grad_profile_oracle: object = None  # joint -> list of vectors (fast path)
    loss_profile_oracle: object = None  # joint -> (players,) losses (fast path)
    own_linear_losses: bool = False  # loss_i = <x_i, V_i(x)> exactly (no constant)
    aux: dict = field(default_factory=dict)

    @property
    def players(self):
        return len(self.action_sets)

    def loss(self, player, joint):
        return float(self.loss_oracle(player, joint))

    def grad(self, player, joint):
        return np.asarray(self.grad_oracle(player, joint), dtype=float)

    def grad_profile(self, joint):
        if self.grad_profile_oracle is not None:
            return self.grad_profile_oracle(joint)
        return [self.grad(i, joint) for i in range(self.players)]

    def loss_profile(self, joint, grads=None):
        """All players' losses at once; exploits structure when available."""
        if self.loss_profile_oracle is not None:
            return np.asarray(self.loss_profile_oracle(joint), dtype=float)
        if self.own_linear_losses and grads is not None:
            return np.array([float(x @ g) for x, g in zip(joint, grads)])
        return np.array([self.loss(i, joint) for i in range(self.players)])

    def payoff_decomposition(self, player, joint):
        """(v, c) with loss_i(p, x_{-i}) = <p, v> + c for multilinear games."""
        if not self.multilinear:
            raise ValueError(f"{self.name} is not multilinear")
        v = self.grad(player, joint)
        c = self.loss(player, joint) - float(np.asarray(joint[player]) @ v)
        return v, c


def build_bilinear(bounds=(-4.0, 8.0)):
    """Two-player min-max game loss_1 = theta * phi = -loss_2 on a box.

    `bounds` is the shared (lower, upper) interval, or a 1-d Box applied to
    both players.
    """
    if isinstance(bounds, Box):
        if bounds.dim != 1:
            raise ValueError("bilinear game needs 1-d boxes")
        lo, hi = float(bounds.lower[0]), float(bounds.upper[0])
    else:
        lo, hi = float(bounds[0]), float(bounds[1])
    sets = [Box(np.array([lo]), np.array([hi])) for _ in range(2)]

    def loss(player, joint):
        v = float(joint[0][0]) * float(joint[1][0])
        return v if player == 0 else -v

    def grad(player, joint):
        if player == 0:
            return np.array([float(joint[1][0])])
        return np.array([-float(joint[0][0])])

    nash = [np.zeros(1), np.zeros(1)] if lo <= 0.0 <= hi else None
    return GameDefinition(
        name="bilinear",
        action_sets=sets,
        loss_oracle=loss,
        grad_oracle=grad,
        nash=nash,
        zero_sum=True,
        multilinear=True,
        vs_declared=True,
        lipschitz=1.0,
        own_linear_losses=True,
    )


def build_random_zero_sum(rows=10, cols=10, seed=0, value_range=(-1.0, 1.0)):
    """Mixed extension of a random matrix game: loss_1 = theta' M phi."""
    if rows < 1 or cols < 1:
        raise ValueError("matrix dimensions must be >= 1")
    rng = np.random.default_rng(seed)
    M = rng.uniform(value_range[0], value_range[1], size=(rows, cols))
    return matrix_zero_sum(M, name="zero_sum")


def matrix_zero_sum(M, name="matrix"):
    """Mixed extension of a fixed cost matrix (player 1 minimizes theta' M phi)."""
    M = np.asarray(M, dtype=float)
    rows, cols = M.shape
    sets = [Simplex(rows), Simplex(cols)]

    def loss(player, joint):
        v = float(joint[0] @ M @ joint[1])
        return v if player == 0 else -v

    def grad(player, joint):
        if player == 0:
            return M @ joint[1]
        return -(M.T @ joint[0])

    def grad_profile(joint):
        return [M @ joint[1], -(M.T @ joint[0])]

    return GameDefinition(
        name=name,
        action_sets=sets,
        loss_oracle=loss,
        grad_oracle=grad,
        grad_profile_oracle=grad_profile,
        zero_sum=True,
        multilinear=True,
        vs_declared=True,
        lipschitz=float(np.linalg.norm(M, 2)),
        own_linear_losses=True,
        aux={"matrix": M},
    )


def build_kelly(resources=6, bidders=20, seed=0):
    """Proportional-allocation (Kelly) auction.

    Bidder i spends x_ik on resource k subject to x >= 0, sum_k x_ik <= b_i,
    receives the fraction x_ik / (c_k + sum_j x_jk) of capacity q_k, values it
    at gain_i per unit, and pays the bid: u_i = sum_k (gain_i rho_ik - x_ik).
    Losses are -u_i. Entry fees c_k = 1; q_k and gain_i drawn uniform [4, 6],
    budgets uniform [5, 10].
    """
    if resources < 1 or bidders < 1:
        raise ValueError("resources and bidders must be >= 1")
    rng = np.random.default_rng(seed)
    q = rng.uniform(4.0, 6.0, size=resources)
    gains = rng.uniform(4.0, 6.0, size=bidders)
    budgets = rng.uniform(5.0, 10.0, size=bidders)
    c = np.ones(resources)
    sets = [Budget(resources, float(b)) for b in budgets]

    def totals(joint):
        return c + np.sum(np.asarray(joint), axis=0)

    def loss(player, joint):
        x = np.asarray(joint[player], dtype=float)
        rho = q * x / totals(joint)
        return -float(gains[player] * rho.sum() - x.sum())

    def grad(player, joint):
        x = np.asarray(joint[player], dtype=float)
        tot = totals(joint)
        return 1.0 - gains[player] * q * (tot - x) / tot**2

    def grad_profile(joint):
        X = np.asarray(joint, dtype=float)
        tot = c + X.sum(axis=0)
        # grad[i,k] = 1 - gain_i q_k (c_k + sum_{j != i} x_jk) / (c_k + sum_j x_jk)^2
        G = 1.0 - gains[:, None] * (q * (tot - X) / tot**2)
        return list(G)

    def loss_profile(joint):
        X = np.asarray(joint, dtype=float)
        rho = q * X / (c + X.sum(axis=0))
        return -(gains * rho.sum(axis=1) - X.sum(axis=1))

    return GameDefinition(
        name="kelly",
        action_sets=sets,
        loss_oracle=loss,
        grad_oracle=grad,
        grad_profile_oracle=grad_profile,
        loss_profile_oracle=loss_profile,
        zero_sum=False,
        multilinear=False,
        vs_declared=True,
        aux={"q": q, "gains": gains, "budgets": budgets, "entry_fees": c},
    )


# Matching-pennies payoff tensors: entry [a, b, c] is the loss at the pure
# profile (a, b, c). Player 1 matches player 2, player 2 matches player 3,
# player 3 matches the opposite of player 1; a desired match costs -1,
# anything else +1.
def _jordan_tensors():
    a, b, c = np.meshgrid(np.arange(2), np.arange(2), np.arange(2), indexing="ij")
    t1 = np.where(a == b, -1.0, 1.0)
    t2 = np.where(b == c, -1.0, 1.0)
    t3 = np.where(c != a, -1.0, 1.0)
    return [t1, t2, t3]


def build_jordan():
    """Three-player matching pennies on Simplex(2); unique Nash all-uniform."""
    tensors = _jordan_tensors()
    sets = [Simplex(2) for _ in range(3)]

    def loss(player, joint):
        t = tensors[player]
        return float(np.einsum("abc,a,b,c->", t, joint[0], joint[1], joint[2]))

    def grad(player, joint):
        t = tensors[player]
        if player == 0:
            return np.einsum("abc,b,c->a", t, joint[1], joint[2])
        if player == 1:
            return np.einsum("abc,a,c->b", t, joint[0], joint[2])
        return np.einsum("abc,a,b->c", t, joint[0], joint[1])

    uniform = np.array([0.5, 0.5])
    return GameDefinition(
        name="jordan",
        action_sets=sets,
        loss_oracle=loss,
        grad_oracle=grad,
        nash=[uniform.copy() for _ in range(3)],
        zero_sum=False,
        multilinear=True,
        vs_declared=False,
        lipschitz=2.0,
        own_linear_losses=True,
        aux={"tensors": tensors},
    )


def freeze_opponents(game, player, profile):
    """One-player game faced by `player` when everyone else is frozen."""
    profile = [np.asarray(p, dtype=float) for p in profile]
    if len(profile) != game.players:
        raise ValueError("frozen profile must cover every player")

    def joint_with(x):
        j = [p.copy() for p in profile]
        j[player] = np.asarray(x, dtype=float)
        return j

    def loss(_, joint):
        return game.loss(player, joint_with(joint[0]))

    def grad(_, joint):
        return game.grad(player, joint_with(joint[0]))

    return GameDefinition(
        name=f"{game.name}-frozen-p{player}",
        action_sets=[game.action_sets[player]],
        loss_oracle=loss,
        grad_oracle=grad,
        multilinear=game.multilinear,
        own_linear_losses=game.own_linear_losses,
        aux={"parent": game.name, "frozen_player": player},
    )


def vs_probe(game, samples=1000, seed=0, form=None):
    """Numerical stability/monotonicity probe.

    VS form (needs a Nash point): min over sampled x of <V(x), x - x*>.
    Monotonicity form: min over sampled pairs of <V(x) - V(x'), x - x'>.
    A variationally stable / monotone game must return >= -1e-8.
    """
    if form is None:
        form = "vs" if game.nash else "monotone"
    if form == "vs" and not game.nash:
        raise ValueError("VS probe needs a Nash point in game metadata")
    rng = np.random.default_rng(seed)

    def sample_joint():
        return [s.sample(rng) for s in game.action_sets]

    worst = np.inf
    for _ in range(samples):
        x = sample_joint()
        vx = game.grad_profile(x)
        if form == "vs":
            val = sum(float(v @ (xi - xs)) for v, xi, xs in zip(vx, x, game.nash))
        else:
            xp = sample_joint()
            vxp = game.grad_profile(xp)
            val = sum(float((v - vp) @ (xi - xpi)) for v, vp, xi, xpi in zip(vx, vxp, x, xp))
        worst = min(worst, val)
    return float(worst)


def gap_function(game, joint, player, oracle_kwargs=None):
    """loss_i(x) minus the best unilateral deviation value at x.

    Exact via the linear-minimization oracle for multilinear games; otherwise
    the offline convex oracle is used and its certificate is folded in.
    Returns (gap, certificate).
    """
    aset = game.action_sets[player]
    realized = game.loss(player, joint)
    if game.multilinear:
        v, cst = game.payoff_decomposition(player, joint)
        best = float(v @ aset.support_argmin(v)) + cst
        return realized - best, 0.0

    def own_loss(p):
        j = [np.asarray(a, dtype=float).copy() for a in joint]
        j[player] = p
        return game.loss(player, j)

    def own_grad(p):
        j = [np.asarray(a, dtype=float).copy() for a in joint]
        j[player] = p
        return game.grad(player, j)

    kw = {"seed": 0}
    if oracle_kwargs:
        kw.update(oracle_kwargs)
    _, best, cert = offline_minimize(own_loss, own_grad, aset, **kw)
    return realized - best, cert
