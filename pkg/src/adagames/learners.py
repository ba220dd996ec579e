"""Optimistic learners with adaptive learning rates.

All five algorithms share the same "conservatively optimistic" half-step: the
played action is a prox step (or dual aggregate) paid with the PREVIOUS
feedback g_{t-1}, using the rate eta_t available before the new feedback
arrives (g_0 = 0 by convention). They differ in how the base state x_t is
advanced once g_t is ingested:

- optmd    : x_{t+1} = argmin <g_t, x> + eta_t D(x, x_t)
- optda    : x_{t+1} = Q(-(sum_{s<=t} g_s) / eta_{t+1})
- ds_optmd : x_{t+1} = Q((eta_t/eta_{t+1}) grad h(x_t)
                         + (1 - eta_t/eta_{t+1}) grad h(x_1) - g_t/eta_{t+1})
- optftrl  : no primal base; the played point is Q(-(sum g + g_{t-1})/eta_t)
- omwu     : entropy-on-simplex instance of the dual aggregate, written
             coordinate-wise as x[j] proportional to exp(-(sum g + g_prev)[j]/eta)

The adaptive rate is eta_t = sqrt(tau + sum_{s<t} ||g_s - g_{s-1}||_*^2)
with the dual norm paired to the regularizer.

The module also provides runtime checkers for the per-step template descent
inequality and the summed RVU-style regret bound that the adaptive runs are
expected to satisfy along every trajectory.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from adagames.geometry import NegativeEntropy, Simplex

ALGORITHMS = ("optmd", "optda", "ds_optmd", "optftrl", "omwu")


class ProtocolError(RuntimeError):
    """Commit/ingest called out of order within a round."""


@dataclass(frozen=True)
class AdaptiveRate:
    """eta_t = sqrt(tau + sum of squared dual-norm feedback differences)."""

    tau: float = 1.0
    sum_increments: float = 0.0
    last_feedback: np.ndarray | None = None
    dual_norm: object = None  # callable; filled from the regularizer pairing

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("tau must be positive")

    def eta(self):
        return float(np.sqrt(self.tau + self.sum_increments))


@dataclass(frozen=True)
class FixedRate:
    """Constant eta; feedback differences still tracked for diagnostics."""

    eta_value: float
    sum_increments: float = 0.0
    last_feedback: np.ndarray | None = None
    dual_norm: object = None

    def __post_init__(self):
        if self.eta_value <= 0:
            raise ValueError("eta must be positive")

    def eta(self):
        return float(self.eta_value)


def rate_ingest(rate, g):
    """Fold feedback g into the rate state; returns the updated state.

    The increment is ||g - g_prev||_*^2 in the paired dual norm; the returned
    state's eta() is the rate for the NEXT round.
    """
    g = np.asarray(g, dtype=float)
    prev = rate.last_feedback
    diff = g if prev is None else g - prev
    dual = rate.dual_norm if rate.dual_norm is not None else np.linalg.norm
    delta = float(dual(diff)) ** 2
    return replace(rate, sum_increments=rate.sum_increments + delta, last_feedback=g)


@dataclass
class StepRecord:
    """Everything one full round produced, for audits and logging."""

    t: int
    g: np.ndarray
    g_prev: np.ndarray
    eta_t: float
    eta_next: float
    delta: float
    x_t: np.ndarray
    x_half: np.ndarray
    x_next: np.ndarray
    y_t: np.ndarray | None  # -sum_{s<t} g_s / eta_t (dual-aggregate learners)
    y_next: np.ndarray | None


class Learner:
    """Two-phase learner: commit() the played action, then ingest(feedback).

    The starting base x_1 is configurable only for optmd and ds_optmd (where
    the recursion leaves it free; for ds_optmd it doubles as the anchor).
    The dual-aggregate algorithms force x_1 = Q(0) = argmin h.
    """

    def __init__(self, algorithm, reg, rate=None, start=None):
        if algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {algorithm!r}")
        if algorithm == "omwu" and not isinstance(reg, NegativeEntropy):
            raise ValueError("omwu requires the entropy regularizer on a simplex")
        self.algorithm = algorithm
        self.reg = reg
        if rate is None:
            rate = AdaptiveRate(tau=1.0)
        if rate.dual_norm is None:
            rate = replace(rate, dual_norm=reg.dual_norm)
        self.rate = rate

        q0 = reg.argmin_point()
        if start is not None:
            if algorithm not in ("optmd", "ds_optmd"):
                raise ValueError(f"{algorithm} admits no start override (x_1 = Q(0))")
            start = np.asarray(start, dtype=float)
            if not reg.domain.contains(start):
                raise ValueError("start point outside the action set")
            if isinstance(reg, NegativeEntropy) and np.any(start <= 0):
                raise ValueError("entropy anchor must be strictly interior")
            self.base = start.copy()
        else:
            self.base = q0
        self.anchor = self.base.copy()
        self._grad_anchor = reg.grad(self.anchor)
        self.dual_sum = np.zeros(reg.dim)
        self.leading = self.base
        self.t = 0
        self.awaiting_feedback = False

    @property
    def dim(self):
        return self.reg.dim

    def last_feedback(self):
        g = self.rate.last_feedback
        return np.zeros(self.dim) if g is None else g

    def commit(self):
        """Compute and return the played action x_{t+1/2}."""
        if self.awaiting_feedback:
            raise ProtocolError("commit called twice without ingesting feedback")
        g_prev = self.last_feedback()
        eta_t = self.rate.eta()
        if self.algorithm in ("optftrl", "omwu"):
            self.leading = self.reg.mirror(-(self.dual_sum + g_prev) / eta_t)
        else:
            self.leading = self.reg.prox(self.base, g_prev, eta_t)
        self.awaiting_feedback = True
        return self.leading

    def ingest(self, g):
        """Fold feedback for the committed action; returns a StepRecord."""
        if not self.awaiting_feedback:
            raise ProtocolError("ingest before commit")
        g = np.asarray(g, dtype=float)
        if g.shape != (self.dim,):
            raise ValueError(f"feedback has shape {g.shape}, expected ({self.dim},)")

        reg = self.reg
        g_prev = self.last_feedback()
        eta_t = self.rate.eta()
        old_sum = self.rate.sum_increments
        new_rate = rate_ingest(self.rate, g)
        eta_next = new_rate.eta()

        x_t = self.base
        y_t = y_next = None
        if self.algorithm == "optmd":
            self.base = reg.prox(self.base, g, eta_t)
        elif self.algorithm in ("optda", "omwu"):
            y_t = -self.dual_sum / eta_t
            self.dual_sum = self.dual_sum + g
            y_next = -self.dual_sum / eta_next
            self.base = reg.mirror(y_next)
        elif self.algorithm == "ds_optmd":
            w = eta_t / eta_next
            self.base = reg.mirror(w * reg.grad(self.base) + (1.0 - w) * self._grad_anchor - g / eta_next)
        elif self.algorithm == "optftrl":
            y_t = -self.dual_sum / eta_t
            self.dual_sum = self.dual_sum + g
            y_next = -self.dual_sum / eta_next
            self.base = self.leading  # no primal base; logged as the played point

        self.rate = new_rate
        self.t += 1
        self.awaiting_feedback = False
        return StepRecord(
            t=self.t,
            g=g,
            g_prev=g_prev,
            eta_t=eta_t,
            eta_next=eta_next,
            delta=new_rate.sum_increments - old_sum,
            x_t=x_t,
            x_half=self.leading,
            x_next=self.base,
            y_t=y_t,
            y_next=y_next,
        )


@dataclass
class TemplateTerms:
    """Both sides of the per-step template descent inequality at probe p.

    est is the algorithm's distance measure psi_t(p): the Fenchel coupling
    F(p, y_t) for the dual-aggregate learners, the Bregman divergence
    D(p, x_t) for the mirror-descent ones. armeasure is phi(p): h(p) - min h,
    respectively D(p, x_1). Fields may be vectors over a batch of probes.
    """

    eta_t: float
    eta_next: float
    est_t: np.ndarray
    est_next: np.ndarray
    armeasure: np.ndarray
    inner: np.ndarray
    cross: float
    breg_pair: tuple


def template_residual(terms):
    """RHS - LHS of the template inequality; the contract is >= -1e-7.

    eta_{t+1} psi_{t+1}(p) <= eta_t psi_t(p) - <g_t, x_half - p>
        + (eta_{t+1} - eta_t) phi(p) + <g_t - g_prev, x_half - x_next>
        - eta_t D(x_next, x_half) - eta_t D(x_half, x_t)
    """
    rhs = (
        terms.eta_t * terms.est_t
        - terms.inner
        + (terms.eta_next - terms.eta_t) * terms.armeasure
        + terms.cross
        - terms.eta_t * (terms.breg_pair[0] + terms.breg_pair[1])
    )
    return rhs - terms.eta_next * terms.est_next


def _template_form(algorithm):
    if algorithm in ("optda", "omwu"):
        return "fenchel"
    if algorithm == "ds_optmd":
        return "bregman"
    return None


class TemplateMonitor:
    """Per-step template-inequality audit over a fixed batch of probe points.

    Valid for optda/omwu (Fenchel form), ds_optmd (Bregman form), and
    fixed-rate optmd (which coincides with ds_optmd when eta never moves).
    psi_t is carried over from the previous step's psi_{t+1}, so each step
    costs one coupling/divergence evaluation.
    """

    def __init__(self, learner, probes):
        algorithm = learner.algorithm
        form = _template_form(algorithm)
        if form is None:
            if algorithm == "optmd" and isinstance(learner.rate, FixedRate):
                form = "bregman"
            else:
                raise ValueError(f"template audit undefined for {algorithm}")
        self.form = form
        self.reg = learner.reg
        self.probes = np.atleast_2d(np.asarray(probes, dtype=float))
        if self.form == "fenchel":
            self.h_p = self.reg.value(self.probes)
            self.armeasure = self.h_p - self.reg.min_value()
            self.psi_prev = self.reg.coupling(self.probes, np.zeros(learner.dim))
        else:
            self.armeasure = self.reg.bregman(self.probes, learner.anchor)
            self.psi_prev = self.reg.bregman_extended(self.probes, learner.base)
        self.min_residual = np.inf

    def terms(self, rec):
        reg = self.reg
        p = self.probes
        if self.form == "fenchel":
            est_next = self.h_p + reg.conjugate(rec.y_next) - p @ rec.y_next
        else:
            est_next = reg.bregman_extended(p, rec.x_next)
        t = TemplateTerms(
            eta_t=rec.eta_t,
            eta_next=rec.eta_next,
            est_t=self.psi_prev,
            est_next=est_next,
            armeasure=self.armeasure,
            inner=float(rec.g @ rec.x_half) - p @ rec.g,
            cross=float((rec.g - rec.g_prev) @ (rec.x_half - rec.x_next)),
            breg_pair=(
                reg.bregman_extended(rec.x_next, rec.x_half),
                reg.bregman_extended(rec.x_half, rec.x_t),
            ),
        )
        self.psi_prev = est_next
        return t

    def observe(self, rec):
        r = float(np.min(template_residual(self.terms(rec))))
        if r < self.min_residual:
            self.min_residual = r
        return r


def rvu_bound_terms(run, player, comparator):
    """Both sides of the summed RVU-style regret bound for one player.

    lhs = sum_t <g_t, x_half_t - p>
    rhs = eta_{T+1} phi(p) + sum_t ||g_t - g_{t-1}||_*^2 / eta_t
          - sum_{t>=2} (eta_{t-1}/8) ||x_half_t - x_half_{t-1}||^2
    Contract for adaptive optda/omwu/ds_optmd trajectories: lhs <= rhs + 1e-6.

    `run` is any object exposing player_series(i) with fields
    gs (T,d), x_half (T,d), eta (T+1,), reg, algorithm, anchor.
    """
    s = run.player_series(player)
    reg = s.reg
    p = np.asarray(comparator, dtype=float)
    gs = np.asarray(s.gs, dtype=float)
    xh = np.asarray(s.x_half, dtype=float)
    eta = np.asarray(s.eta, dtype=float)
    T = gs.shape[0]

    lhs = float(np.einsum("td,td->", gs, xh - p[None, :]))

    if _template_form(s.algorithm) == "bregman":
        phi = float(reg.bregman(p, s.anchor))
    else:
        phi = float(reg.value(p)) - reg.min_value()

    prev = np.zeros(gs.shape[1])
    var = 0.0
    for t in range(T):
        var += reg.dual_norm(gs[t] - prev) ** 2 / eta[t]
        prev = gs[t]
    stab = 0.0
    for t in range(1, T):
        stab += eta[t - 1] / 8.0 * reg.norm(xh[t] - xh[t - 1]) ** 2
    rhs = eta[T] * phi + var - stab
    return lhs, rhs
