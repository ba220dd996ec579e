"""Twenty bidders in a proportional-allocation auction.

Each bidder splits a budget across six resources and receives gain in
proportion to their share of the total bid. Utilities are concave, the
game is monotone, and optimistic dual averaging with the adaptive rate
drives the population to a stable allocation: consecutive leads stop
moving and each bidder's hindsight-improvement certificate collapses.

    python3 demos/04_kelly_auction.py  (about 40 s)
"""

import numpy as np

from adagames import harness

T = 20_000

cfg = harness.figure_config("kelly", horizon=T)[""]
res = harness.run_experiment(cfg)
n = res.game.players

print(f"{'t':>7} {'social regret':>14} {'max step move':>14} {'mean |bid|':>11}")
for r in range(1, len(res.ts)):
    t = int(res.ts[r])
    move = np.nanmax(res.stepdiff[:, t - 1])
    mean = float(np.mean([np.linalg.norm(x[r]) for x in res.leads_logged]))
    print(f"{t:>7} {res.socials_logged[r]:>14.3f} {move:>14.3e} {mean:>11.4f}")

print(f"\nfinal rates span "
      f"[{res.eta[:, -1].min():.3f}, {res.eta[:, -1].max():.3f}] across {n} bidders")
print("the allocation freezes (step moves fall five orders and keep falling)")
print("while the hindsight regret creeps: early transient rounds stay in the")
print("ledger forever, so the plateau drifts like B/t toward its limit")
