"""The covariance-only sum-rate bound against a real Monte Carlo sweep.

The bound never draws a channel, yet it tracks the simulated sum rate of
the hybrid feedback scheme across transmit power; perfect CSI shows what an
unconstrained system would get.
"""

import numpy as np

from hybridfb import CodebookKind, ScenarioConfig, Scheme, derived_rng, scenario_profiles
from hybridfb.experiments import beam_domain_profiles, db_to_linear, evaluate_bound, evaluate_monte_carlo

config = ScenarioConfig(
    num_antennas=32, num_users=6, b_total=24, trials=300, seed=0,
    p_d_grid_db=(0.0, 5.0, 10.0, 15.0, 20.0),
)
profiles = scenario_profiles(config)
bd_all = beam_domain_profiles(profiles, config.geometry)

print(f"M={config.num_antennas}, K={config.num_users}, budget {config.b_total} bits, "
      f"{config.trials} trials")
print(f"{'p_d (dB)':>9} {'MC proposed':>12} {'bound':>8} {'perfect CSI':>12}")
for g, p_db in enumerate(config.p_d_grid_db):
    p_d = db_to_linear(p_db)
    rng = derived_rng(config.seed, 2, g)
    mc = evaluate_monte_carlo(
        config, Scheme.HYBRID, CodebookKind.DFT, profiles, config.b_total, p_d, rng,
        bd_all=bd_all,
    )
    cls, bound = evaluate_bound(config, profiles, config.b_total, p_d, bd_all)
    rng = derived_rng(config.seed, 2, g)
    perfect = evaluate_monte_carlo(
        config, Scheme.PERFECT, CodebookKind.DFT, profiles, config.b_total, p_d, rng
    )
    print(
        f"{p_db:9.0f} {mc.sum_rate:9.2f} +-{mc.half_width:4.2f} {bound.sum_rate:8.2f} "
        f"{perfect.sum_rate:12.2f}   (K_I={len(cls.class_i)}, B={cls.bits_per_user})"
    )
