"""Walk one learner through a few rounds by hand.

Prints the commit/ingest cycle of the extra-gradient instance on an
unconstrained quadratic saddle, then the adaptive rate reacting to a
gradient sequence that stops moving. Run from the repo root:

    python3 demos/01_single_learner_steps.py
"""

import numpy as np

from adagames.geometry import Quadratic, Unconstrained
from adagames.learners import AdaptiveRate, FixedRate, Learner


def fixed_rate_cycle():
    print("-- extra-gradient with a fixed rate, f(x, y) = x * y --")
    print("   (eta scales the dual step, so the primal step length is 1/eta)")
    reg = Quadratic(Unconstrained(2))
    ln = Learner("optmd", reg, rate=FixedRate(2.0), start=np.array([1.0, -1.0]))
    for t in range(1, 5):
        lead = ln.commit()
        # the saddle field at (x, y) is (y, -x); both players in one vector
        g = np.array([lead[1], -lead[0]])
        rec = ln.ingest(g)
        print(f"  t={t}  lead={lead}  g={g}  next base={rec.x_next}")
    print()


def adaptive_rate_settles():
    print("-- adaptive rate: eta grows only while the feedback keeps moving --")
    reg = Quadratic(Unconstrained(1))
    ln = Learner("optda", reg, rate=AdaptiveRate(tau=1.0))
    gs = [3.0, -3.0, 3.0, 0.5, 0.5, 0.5, 0.5]
    for g in gs:
        ln.commit()
        rec = ln.ingest(np.array([g]))
        print(f"  g={g:+.1f}  delta=|g - g_prev|^2={rec.delta:7.2f}  "
              f"eta_next={rec.eta_next:.4f}")
    print("  once the feedback is constant delta is 0 and the rate freezes,")
    print("  which is what turns the worst-case sqrt(T) bound into O(1) here")


if __name__ == "__main__":
    fixed_rate_cycle()
    adaptive_rate_settles()
