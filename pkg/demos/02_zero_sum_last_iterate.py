"""Self-play on a random zero-sum matrix game.

Two adaptive dual-stabilized learners (entropy vs quadratic regularizers)
play the mixed extension of a seeded 10x10 matrix. The script prints the
individual regret curve and the duality gap of the actual iterate, which
drops to numerical zero: the last iterate converges, not just the average.

    python3 demos/02_zero_sum_last_iterate.py  (about 15 s)
"""

from adagames import games, harness

T = 20_000

cfg = harness.figure_config("zerosum", horizon=T)[""]
res = harness.run_experiment(cfg)

print(f"game: {res.game.name} with matrix {res.game.aux['matrix'].shape}")
print(f"{'t':>7} {'regret p1':>10} {'regret p2':>10} {'social':>10}")
for r in range(0, len(res.ts), max(1, len(res.ts) // 8)):
    t = int(res.ts[r])
    print(f"{t:>7} {res.regrets_logged[r, 0]:>10.4f} "
          f"{res.regrets_logged[r, 1]:>10.4f} {res.socials_logged[r]:>10.4f}")

gap = sum(games.gap_function(res.game, res.final_leads, i)[0] for i in range(2))
print(f"\nduality gap at the final played profile: {gap:.3e}")
print(f"final adaptive rates: "
      + ", ".join(f"{res.eta[i, -1]:.4f}" for i in range(2)))
print("individual regrets freeze at small constants instead of growing like")
print("sqrt(T), and the gap at the last iterate (not the average) hits zero")
