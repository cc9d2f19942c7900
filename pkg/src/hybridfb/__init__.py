"""Hybrid statistical/instantaneous feedback for FDD massive-MIMO downlink.

Library layout:

* :mod:`hybridfb.channel` — ULA steering vectors, multipath draws, exact
  covariance and its beam-domain (virtual beam) representation.
* :mod:`hybridfb.codebooks` — DFT, skewed and subspace-predicted codebooks,
  channel quantization and covariance-only feedback prediction.
* :mod:`hybridfb.precoding` — SLNR generalized-eigenvector precoders and
  their beam-selection approximation.
* :mod:`hybridfb.rates` — instantaneous SINR, Monte Carlo ergodic sum rate
  and the closed-form beam-domain lower bound.
* :mod:`hybridfb.classification` — greedy bound-maximizing split of users
  into instantaneous-feedback and statistical service, plus an exhaustive
  oracle.
* :mod:`hybridfb.experiments` / :mod:`hybridfb.cli` — reproducible sweep
  runners with CSV output.
"""

from .channel import (
    ArrayGeometry,
    BeamDomainCovariance,
    ChannelRealization,
    Covariance,
    UserChannelProfile,
    beam_domain_covariance,
    closest_beam_index,
    covariance,
    dft_matrix,
    draw_channel,
    draw_user_profile,
    steering_vector,
)
from .classification import (
    Classification,
    classification_bound,
    classification_rows,
    classify_users_greedy,
    exhaustive_classifier,
)
from .codebooks import (
    Codebook,
    CodebookKind,
    SubspaceBounds,
    approximate_subspace,
    dft_codebook,
    predicted_beam_index,
    predicted_codebook,
    predicted_feedback_index,
    quantize_channel,
    read_codebook,
    skewed_codebook,
    write_codebook,
)
from .experiments import (
    ScenarioConfig,
    Scheme,
    db_to_linear,
    derived_rng,
    load_config,
    run_bound,
    run_classify,
    run_fig1,
    run_fig2,
    run_fig3,
    run_fig4,
    scenario_profiles,
    validate_config,
)
from .precoding import (
    PrecoderSet,
    approximate_precoders,
    conventional_slnr_precoders,
    hybrid_slnr_precoders,
    max_gen_eigvec,
    rayleigh_quotient,
)
from .rates import (
    RateReport,
    bound_given_beams,
    effective_sinr_lb_class_i,
    effective_sinr_lb_class_s,
    monte_carlo_perfect_csi,
    monte_carlo_sum_rate,
    sinr,
    sum_rate_lower_bound,
)

__version__ = "0.1.0"

__all__ = [
    "ArrayGeometry",
    "BeamDomainCovariance",
    "ChannelRealization",
    "Classification",
    "Codebook",
    "CodebookKind",
    "Covariance",
    "PrecoderSet",
    "RateReport",
    "ScenarioConfig",
    "Scheme",
    "SubspaceBounds",
    "UserChannelProfile",
    "approximate_precoders",
    "approximate_subspace",
    "beam_domain_covariance",
    "bound_given_beams",
    "classification_bound",
    "classification_rows",
    "classify_users_greedy",
    "closest_beam_index",
    "conventional_slnr_precoders",
    "covariance",
    "db_to_linear",
    "derived_rng",
    "dft_codebook",
    "dft_matrix",
    "draw_channel",
    "draw_user_profile",
    "effective_sinr_lb_class_i",
    "effective_sinr_lb_class_s",
    "exhaustive_classifier",
    "hybrid_slnr_precoders",
    "load_config",
    "max_gen_eigvec",
    "monte_carlo_perfect_csi",
    "monte_carlo_sum_rate",
    "predicted_beam_index",
    "predicted_codebook",
    "predicted_feedback_index",
    "quantize_channel",
    "rayleigh_quotient",
    "read_codebook",
    "run_bound",
    "run_classify",
    "run_fig1",
    "run_fig2",
    "run_fig3",
    "run_fig4",
    "scenario_profiles",
    "sinr",
    "skewed_codebook",
    "steering_vector",
    "sum_rate_lower_bound",
    "validate_config",
    "write_codebook",
]
