"""Adaptive optimistic no-regret learning in continuous games.

Library layout:

- ``geometry``: action sets, regularizers, Bregman divergences, Fenchel
  conjugates/couplings, mirror maps, constrained prox steps.
- ``learners``: the five optimistic algorithms (OptMD/PEG, OptDA, DS-OptMD,
  OptFTRL, OMWU), the adaptive learning-rate policy, and runtime checkers
  for the per-step template inequality and the RVU-style regret bound.
- ``games``: the experiment game corpus (bilinear min-max, random-matrix
  zero-sum, Kelly auction, three-player matching pennies) with exact
  gradient oracles and variational-stability probes.
- ``metrics``: regret ledgers, offline comparator oracles, convergence
  diagnostics, and the adaptive-sum lemma checker.
- ``harness``: deterministic simulation loop, config ingestion, CSV
  persistence, figure reproduction, and the acceptance-criteria runner.
"""

from adagames.geometry import (
    Ball,
    Box,
    Budget,
    NegativeEntropy,
    Quadratic,
    Simplex,
    Unconstrained,
    bregman,
    fenchel_conjugate,
    fenchel_coupling,
    mirror_map,
    prox_step,
    simplex_projection,
)
from adagames.learners import (
    AdaptiveRate,
    FixedRate,
    Learner,
    ProtocolError,
    rate_ingest,
    rvu_bound_terms,
    template_residual,
)
from adagames.games import (
    GameDefinition,
    build_bilinear,
    build_jordan,
    build_kelly,
    build_random_zero_sum,
    freeze_opponents,
    gap_function,
    vs_probe,
)
from adagames.metrics import (
    RegretLedger,
    adaptive_sum_check,
    best_response_set,
    distance_to_point,
    individual_regret,
    social_regret,
)
from adagames.harness import (
    ConfigError,
    ExperimentConfig,
    NumericalAbort,
    run_experiment,
)

__version__ = "0.1.0"
