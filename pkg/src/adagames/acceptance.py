"""Executable verification suite.

Every headline guarantee of the library is restated here as a criterion
function returning a CriterionReport. Expensive runs are cached at module
level and shared between criteria, so `verify()` prices each trajectory
once. Tolerances are part of the contract and are stated next to each
check; oracle certificates are folded into tolerances where a comparator
problem is solved numerically rather than exactly.
"""

from __future__ import annotations

import time
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np

from adagames import games as games_mod
from adagames import harness
from adagames.geometry import (Ball, Box, Budget, NegativeEntropy, Quadratic,
                               Simplex, Unconstrained)
from adagames.learners import AdaptiveRate, Learner
from adagames.metrics import adaptive_sum_check, best_response_set


@dataclass
class CriterionReport:
    cid: str
    passed: bool
    detail: str
    measured: dict = field(default_factory=dict)

    def line(self):
        mark = "pass" if self.passed else "FAIL"
        return f"[{mark}] {self.cid}: {self.detail}"


_RUNS = {}


def clear_cache():
    _RUNS.clear()


def _cached(key, builder):
    if key not in _RUNS:
        _RUNS[key] = builder()
    return _RUNS[key]


def figure_run(name):
    return _cached(("figure", name),
                   lambda: {sub: harness.run_experiment(cfg)
                            for sub, cfg in harness.figure_config(name).items()})


def adversarial_run():
    def build():
        learner = Learner("optda", Quadratic(Box([-1.0], [1.0])),
                          rate=AdaptiveRate(tau=1.0))
        feedback = lambda t, x: np.array([1.0 if t % 2 == 1 else -1.0])
        return harness.run_scripted(learner, feedback, horizon=100_000, stride=100)

    return _cached(("scripted", "alternating"), build)


def template_runs():
    """(label, RunResult) pairs for the per-step template audit."""

    def build():
        T = 10_000
        runs = []
        for alg in ("optda", "ds_optmd"):
            ds = alg == "ds_optmd"
            cfgs = {
                "bilinear": {
                    "game": {"kind": "bilinear", "lower": -4.0, "upper": 8.0},
                    "player": ([{"algorithm": alg, "regularizer": "quadratic",
                                 "start": [3.0]},
                                {"algorithm": alg, "regularizer": "quadratic",
                                 "start": [-2.0]}] if ds else
                               [{"algorithm": alg, "regularizer": "quadratic"}]),
                },
                "zero_sum": {
                    "game": {"kind": "zero_sum", "rows": 10, "cols": 10, "seed": 42},
                    "player": [
                        {"algorithm": alg, "regularizer": "negative_entropy"},
                        {"algorithm": alg, "regularizer": "quadratic"},
                    ],
                },
                "kelly": {
                    "game": {"kind": "kelly", "resources": 6, "bidders": 20, "seed": 42},
                    "player": [{"algorithm": alg, "regularizer": "quadratic"}],
                },
                "jordan": {
                    "game": {"kind": "jordan"},
                    "player": ([{"algorithm": alg, "regularizer": "quadratic",
                                 "start": s} for s in ([0.8, 0.2], [0.6, 0.4], [0.3, 0.7])]
                               if ds else
                               [{"algorithm": alg, "regularizer": "quadratic"}]),
                },
            }
            for gname, cfg in cfgs.items():
                raw = {"schema": 1, "game": cfg["game"],
                       "run": {"horizon": T, "stride": T, "audit": True},
                       "player": cfg["player"]}
                runs.append((f"{alg}/{gname}", harness.run_experiment(raw)))
        return runs

    return _cached(("template",), build)


def contrast_run():
    def build():
        cfg = harness.figure_config("peg-divergence")["peg"]
        cfg["player"][0]["eta"] = 2.0
        return harness.run_experiment(cfg)

    return _cached(("peg-contrast",), build)


def frozen_run():
    def build():
        parent = games_mod.build_random_zero_sum(10, 10, seed=7)
        rng = np.random.default_rng(7)
        opponent = parent.action_sets[1].sample(rng)
        frozen = games_mod.freeze_opponents(parent, 0, [parent.action_sets[0].canonical(),
                                                        opponent])
        cfg = harness.ExperimentConfig(
            game=frozen,
            players=[harness.PlayerConfig(algorithm="optda",
                                          regularizer="negative_entropy")],
            horizon=10_000, stride=1000)
        return frozen, harness.run_experiment(cfg)

    return _cached(("frozen",), build)


def equivalence_runs():
    def build():
        out = {}
        for alg in ("optda", "ds_optmd"):
            raw = {"schema": 1,
                   "game": {"kind": "zero_sum", "rows": 10, "cols": 10, "seed": 42},
                   "run": {"horizon": 1000, "stride": 1000, "keep_series": True},
                   "player": [{"algorithm": alg, "regularizer": "negative_entropy"}]}
            out[alg] = harness.run_experiment(raw)
        return out

    return _cached(("equivalence",), build)


# -- criterion 1: geometry identities ----------------------------------------


def _geometry_families():
    fams = [
        ("quad-box", Quadratic(Box([-1.0, -2.0], [2.0, 1.0]))),
        ("quad-simplex", Quadratic(Simplex(3))),
        ("quad-ball", Quadratic(Ball([0.5, -0.5], 2.0))),
        ("quad-budget", Quadratic(Budget(3, 2.5))),
        ("quad-free", Quadratic(Unconstrained(2))),
        ("entropy-simplex", NegativeEntropy(Simplex(4))),
    ]
    return fams


def _interior(reg, rng):
    x = reg.domain.sample(rng)
    if isinstance(reg, NegativeEntropy):
        x = 0.9 * x + 0.1 / x.size
    return x


def criterion_geometry():
    start = time.perf_counter()
    worst_three = worst_eq = 0.0
    worst_chain = worst_prox = np.inf
    for name, reg in _geometry_families():
        rng = np.random.default_rng(11)
        d = reg.dim
        for _ in range(40):
            a, b = _interior(reg, rng), _interior(reg, rng)
            p = np.stack([reg.domain.sample(rng) for _ in range(25)])
            res = (reg.bregman(p, b) - reg.bregman(p, a) - reg.bregman(a, b)
                   - (p - a) @ (reg.grad(a) - reg.grad(b)))
            worst_three = max(worst_three, float(np.max(np.abs(res))))

            y = rng.normal(scale=2.0, size=d)
            x = reg.mirror(y)
            fen = reg.coupling(p, y)
            div = reg.bregman(p, x)
            sq = 0.5 * np.array([reg.norm(row - x) for row in p]) ** 2
            worst_chain = min(worst_chain, float(np.min(fen - div)),
                              float(np.min(div - sq)))

            xi = _interior(reg, rng)
            eq = reg.coupling(p, reg.grad(xi)) - reg.bregman(p, xi)
            worst_eq = max(worst_eq, float(np.max(np.abs(eq))))

        for _ in range(20):
            base = _interior(reg, rng)
            gvec = rng.normal(scale=1.5, size=d)
            for eta in (0.5, 1.0, 2.0):
                xp = reg.prox(base, gvec, eta)
                p = np.stack([reg.domain.sample(rng) for _ in range(5)])
                opt = (p - xp) @ (gvec + eta * (reg.grad(xp) - reg.grad(base)))
                worst_prox = min(worst_prox, float(np.min(opt)))
    elapsed = time.perf_counter() - start
    ok = (worst_three <= 1e-8 and worst_eq <= 1e-8
          and worst_chain >= -1e-9 and worst_prox >= -1e-7 and elapsed < 5.0)
    return CriterionReport(
        "geometry-identities", ok,
        f"three-point |res| {worst_three:.2e}, coupling==divergence |res| "
        f"{worst_eq:.2e}, chain slack {worst_chain:.2e}, prox optimality "
        f"{worst_prox:.2e}, {elapsed:.2f}s",
        {"three_point": worst_three, "chain": worst_chain,
         "coupling_eq": worst_eq, "prox": worst_prox, "elapsed": elapsed})


# -- criterion 2: template inequality ----------------------------------------


def criterion_template():
    start = time.perf_counter()
    worst, worst_label = np.inf, ""
    for label, run in template_runs():
        r = run.min_residual()
        if not np.isnan(r) and r < worst:
            worst, worst_label = r, label
    elapsed = time.perf_counter() - start
    ok = worst >= -1e-7 and elapsed < 60.0
    return CriterionReport(
        "template-inequality", ok,
        f"min residual {worst:.3e} ({worst_label}) over 8 runs x 1e4 steps, "
        f"{elapsed:.1f}s",
        {"min_residual": worst, "at": worst_label, "elapsed": elapsed})


# -- criterion 3: adversarial anytime bound ----------------------------------


def criterion_adversarial():
    run = adversarial_run()
    T = int(run.ts[-1])
    final = float(run.regret[-1])
    # comparator box [-1,1]: the bound is largest at the endpoints, where
    # h(p) - min h = 1/2; feedback changes are bounded by G = 1
    bound = (1.0 + 0.5) * np.sqrt(1.0 + 4.0 * T) + 2.0
    window = run.ts >= T // 10
    ratios = run.regret[window] / np.sqrt(run.ts[window])
    ok = final <= bound and float(np.max(ratios)) <= 3.0
    return CriterionReport(
        "adversarial-regret-bound", ok,
        f"regret {final:.1f} <= bound {bound:.1f} at T={T}; max regret/sqrt(t) "
        f"{float(np.max(ratios)):.2f} <= 3 over the last decade",
        {"final": final, "bound": bound, "max_ratio": float(np.max(ratios))})


# -- criteria 4-7: figure-run consequences -----------------------------------


def _late_index(run, t):
    return run.logged_index(t)


def criterion_social_constant():
    parts, ok = [], True
    for name in ("zerosum", "kelly"):
        run = figure_run(name)[""]
        T = run.config.horizon
        i0, i1 = _late_index(run, T // 10), len(run.ts) - 1
        drift = abs(float(run.socials_logged[i1] - run.socials_logged[i0]))
        slack = float(run.certs_logged[i0].sum() + run.certs_logged[i1].sum())
        rel = drift / max(1.0, abs(float(run.socials_logged[i0])))
        good = drift <= 0.5 + slack
        ok &= good
        parts.append(f"{name}: |social(T)-social(T/10)| = {drift:.3f} "
                     f"({rel:.2%} relative, cert slack {slack:.1e})")
    return CriterionReport("social-regret-constant", ok, "; ".join(parts))


def criterion_individual_bounded():
    parts, ok = [], True
    for name in ("zerosum", "kelly"):
        run = figure_run(name)[""]
        T = run.config.horizon
        window = run.ts >= max(1, T // 10)
        worst, slack, over = 0.0, 0.0, 0
        for i in range(run.game.players):
            vals = run.regrets_logged[window, i]
            spread = float(vals.max() - vals.min())
            sl = 2.0 * float(run.certs_logged[window, i].max())
            if spread > 1.0 + sl:
                over += 1
            if spread > worst:
                worst, slack = spread, sl
        good = over == 0
        ok &= good
        parts.append(f"{name}: max regret spread {worst:.3f} over final 90%, "
                     f"{over}/{run.game.players} players over bar "
                     f"(cert slack {slack:.1e})")
    return CriterionReport("individual-regret-bounded", ok, "; ".join(parts))


def criterion_rate_stabilizes():
    # the two variationally stable runs; the Jordan rate grows forever
    parts, ok = [], True
    for name in ("zerosum", "kelly"):
        run = figure_run(name)[""]
        T = run.config.horizon
        late = int(0.9 * T)
        change = float(np.max(run.eta[:, T] - run.eta[:, late]))
        total = float(np.max(run.delta.sum(axis=1)))
        good = change < 1e-6
        ok &= good
        parts.append(f"{name}: max eta change {change:.2e} over final 10%, "
                     f"max sum(delta) {total:.3f}")
    return CriterionReport("rate-stabilizes", ok, "; ".join(parts))


def criterion_last_iterate():
    parts = []
    z = figure_run("zerosum")[""]
    M = z.game.aux["matrix"]
    theta, phi = z.final_leads
    gap_z = float(np.max(M.T @ theta) - np.min(M @ phi))
    ok = gap_z <= 1e-3
    parts.append(f"zerosum duality gap {gap_z:.2e}")

    k = figure_run("kelly")[""]
    T = k.config.horizon
    tail = slice(max(0, T - max(1, T // 100)), T)
    cauchy = float(np.nanmax(k.stepdiff[:, tail]))
    ok &= cauchy <= 1e-6
    parts.append(f"kelly max step diff {cauchy:.2e} over final 1%")

    worst_gap, worst_cert = 0.0, 0.0
    for i in range(k.game.players):
        gap, cert = games_mod.gap_function(k.game, k.final_leads, i)
        worst_gap = max(worst_gap, gap)
        worst_cert = max(worst_cert, cert)
    ok &= worst_gap <= 1e-3 + worst_cert and worst_cert <= 1e-6
    parts.append(f"kelly max player gap {worst_gap:.2e} (cert {worst_cert:.1e})")
    return CriterionReport("last-iterate-convergence", ok, "; ".join(parts))


def criterion_frozen_best_response():
    frozen, run = frozen_run()
    br = best_response_set(frozen, 0, [None])
    dist = br.distance_l1(run.final_leads[0])
    ok = dist <= 1e-4
    return CriterionReport(
        "frozen-opponent-best-response", ok,
        f"l1 distance to the best-response face {dist:.2e} at T={run.config.horizon} "
        f"(face size {br.indices.size})",
        {"distance": dist})


def criterion_fixed_rate_divergence():
    peg = figure_run("peg-divergence")["peg"]
    T = peg.config.horizon
    joint = np.sqrt(np.sum(peg.lead_norm**2, axis=0))
    tail_min = float(np.min(joint[999:])) if T >= 1000 else float(np.min(joint))
    # the time-average is over the state sequence x_t; the played points
    # x_{t+1/2} overshoot symmetrically and their average sits closer in
    avg = float(np.hypot(peg.base_avg[0][0], peg.base_avg[1][0]))
    conv = contrast_run()
    final = float(np.hypot(conv.final_leads[0][0], conv.final_leads[1][0]))
    ok = tail_min >= 1.0 and avg >= 0.5 and final <= 1e-3
    return CriterionReport(
        "fixed-rate-divergence", ok,
        f"fixed step 0.7: min |x_t| {tail_min:.2f} for t>=1e3, state "
        f"time-average norm {avg:.2f}; fixed step 0.5 contrast converges "
        f"to {final:.1e}",
        {"tail_min": tail_min, "avg": avg, "contrast_final": final})


def criterion_jordan_dichotomy():
    run = figure_run("jordan")[""]
    T = run.config.horizon
    s = run.socials_logged
    marks = [_late_index(run, t) for t in (T // 10, T // 4, T // 2, 3 * T // 4, T)]
    vals = [float(s[m]) for m in marks]
    decreasing = all(b < a for a, b in zip(vals, vals[1:]))
    # Cauchy test on the tail: how far apart do played points within the
    # final 1% of rounds still get? The max coordinate range is a cheap
    # lower bound on the tail diameter.
    lo = max(0, T - max(1, T // 100))
    min_sweep = np.inf
    for i in range(run.game.players):
        seg = run.series[i].x_half[lo:T]
        min_sweep = min(min_sweep, float(np.max(seg.max(axis=0) - seg.min(axis=0))))
    ok = vals[-1] <= -10.0 and decreasing and min_sweep >= 0.1
    return CriterionReport(
        "jordan-dichotomy", ok,
        f"social regret {vals[-1]:.1f} <= -10, decreasing over the last decade "
        f"({', '.join(f'{v:.1f}' for v in vals)}); every trajectory still "
        f"sweeps >= {min_sweep:.2f} within the final 1%",
        {"social": vals, "min_sweep": min_sweep})


def criterion_adaptive_sum():
    # make sure the headline runs exist even when this criterion runs alone
    for name in ("zerosum", "kelly", "jordan", "peg-divergence"):
        figure_run(name)
    adversarial_run()
    template_runs()

    worst, label, checked, vacuous = np.inf, "", 0, 0
    for key, item in list(_RUNS.items()):
        if key[0] == "figure":
            entries = [(f"{key[1]}{('/' + s) if s else ''}", r)
                       for s, r in item.items()]
        elif key[0] == "template":
            entries = item
        elif key[0] == "frozen":
            entries = [("frozen", item[1])]
        else:
            entries = [(key[0] if len(key) == 1 else f"{key[0]}/{key[1]}", item)]
        for name, run in entries:
            deltas = run.delta if run.delta.ndim == 2 else run.delta[None, :]
            for i, d in enumerate(deltas):
                nz = np.flatnonzero(d > 0)
                if nz.size == 0:
                    vacuous += 1
                    continue
                lhs, rhs = adaptive_sum_check(d[nz[0]:])
                checked += 1
                slack = rhs - lhs
                if slack < worst:
                    worst, label = slack, f"{name} player {i + 1}"
    ok = worst >= -1e-10
    return CriterionReport(
        "adaptive-sum-lemma", ok,
        f"min slack {worst:.3e} ({label}) across {checked} realized increment "
        f"sequences ({vacuous} all-zero, vacuous)",
        {"min_slack": worst, "checked": checked})


def criterion_equivalence():
    runs = equivalence_runs()
    a, b = runs["optda"], runs["ds_optmd"]
    worst = 0.0
    for i in range(a.game.players):
        diff = np.max(np.abs(a.series[i].x_half - b.series[i].x_half))
        worst = max(worst, float(diff))
    ok = worst <= 1e-7
    return CriterionReport(
        "update-equivalence", ok,
        f"max trajectory difference {worst:.2e} over 1e3 steps "
        f"(dual averaging vs anchored mirror descent, entropy)",
        {"max_diff": worst})


CRITERIA = OrderedDict([
    ("geometry-identities", criterion_geometry),
    ("template-inequality", criterion_template),
    ("adversarial-regret-bound", criterion_adversarial),
    ("social-regret-constant", criterion_social_constant),
    ("individual-regret-bounded", criterion_individual_bounded),
    ("rate-stabilizes", criterion_rate_stabilizes),
    ("last-iterate-convergence", criterion_last_iterate),
    ("frozen-opponent-best-response", criterion_frozen_best_response),
    ("fixed-rate-divergence", criterion_fixed_rate_divergence),
    ("jordan-dichotomy", criterion_jordan_dichotomy),
    ("adaptive-sum-lemma", criterion_adaptive_sum),
    ("update-equivalence", criterion_equivalence),
])

SUITES = {
    "all": list(CRITERIA),
    "fast": ["geometry-identities", "update-equivalence"],
}


def run_suite(suite=None):
    """Run a named suite (default "all") or a single criterion by id."""
    name = suite or "all"
    if name in SUITES:
        ids = SUITES[name]
    elif name in CRITERIA:
        ids = [name]
    else:
        choices = sorted(set(SUITES) | set(CRITERIA))
        raise harness.ConfigError(f"unknown suite {name!r} (choose from {choices})")
    return [CRITERIA[cid]() for cid in ids]
