"""Instantaneous SINRs, Monte Carlo ergodic sum rate and its covariance-only bound.

The Monte Carlo path draws true channels every trial, quantizes them for the
instantaneous-feedback users, builds SLNR precoders from the quantized
vectors plus the statistical users' covariances, and scores every user with
its TRUE channel against ALL precoders:

    sinr_k = |h_k^H w_k|^2 / (sum_{j != k} |h_k^H w_j|^2 + 1/p_d)

The analytical path never draws a channel: predicted feedback indices come
from the beam-domain covariance alone, precoders collapse to DFT columns, and
each user's effective SINR is a ratio of its own average beam gains read at
the selected beam indices.  Both paths report rates in bits/s/Hz with log2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, Mapping, Sequence

import numpy as np

from .channel import (
    ArrayGeometry,
    BeamDomainCovariance,
    ChannelRealization,
    UserChannelProfile,
    covariance,
    draw_channel,
)
from .codebooks import (
    Codebook,
    approximate_subspace,
    predicted_beam_index,
    predicted_feedback_index,
    quantize_channel,
)
from .precoding import approximate_precoders, conventional_slnr_precoders, hybrid_slnr_precoders

if TYPE_CHECKING:
    from .classification import Classification


@dataclass(frozen=True)
class RateReport:
    """Per-user and summed rates plus the Monte Carlo 95% confidence half-width.

    ``trials`` is 0 for deterministic (closed-form) reports.
    """

    per_user_rate: np.ndarray
    sum_rate: float
    trials: int
    half_width: float

    def __post_init__(self):
        rates = np.asarray(self.per_user_rate, dtype=float)
        object.__setattr__(self, "per_user_rate", rates)
        if np.any(rates < 0):
            raise ValueError("per-user rates must be nonnegative")
        if self.half_width < 0:
            raise ValueError("confidence half-width must be nonnegative")
        total = math.fsum(rates.tolist())
        if abs(total - self.sum_rate) > 1e-9 * max(1.0, abs(total)):
            raise ValueError("sum_rate does not match the per-user rates")


def _iter_vectors(precoders) -> list[np.ndarray]:
    if isinstance(precoders, np.ndarray) and precoders.ndim == 2:
        return [precoders[:, j] for j in range(precoders.shape[1])]
    return [np.asarray(w, dtype=complex) for w in precoders]


def sinr(
    h: np.ndarray | ChannelRealization,
    own_precoder: np.ndarray,
    other_precoders: Sequence[np.ndarray] | np.ndarray,
    p_d: float,
) -> float:
    """Instantaneous SINR of one user given its true channel and all precoders.

    ``other_precoders`` is a sequence of vectors (or a matrix with one
    precoder per column).
    """
    if p_d <= 0:
        raise ValueError("transmit power must be positive")
    vec = np.asarray(h.h if isinstance(h, ChannelRealization) else h, dtype=complex)
    sig = abs(np.vdot(vec, np.asarray(own_precoder))) ** 2
    interf = math.fsum(
        abs(np.vdot(vec, w)) ** 2 for w in _iter_vectors(other_precoders)
    )
    return sig / (interf + 1.0 / p_d)


def _per_trial_rates(channels: np.ndarray, precoders: np.ndarray, p_d: float) -> np.ndarray:
    """log2(1 + SINR) for every user; column k of both arrays belongs to user k."""
    power = np.abs(channels.conj().T @ precoders) ** 2
    sig = np.diag(power)
    interf = power.sum(axis=1) - sig
    return np.log2(1.0 + sig / (interf + 1.0 / p_d))


def _report_from_samples(rate_samples: np.ndarray, trials: int) -> RateReport:
    if rate_samples.size == 0:
        return RateReport(
            per_user_rate=np.zeros(rate_samples.shape[1] if rate_samples.ndim == 2 else 0),
            sum_rate=0.0,
            trials=trials,
            half_width=0.0,
        )
    per_user = np.array(
        [math.fsum(rate_samples[:, k].tolist()) / trials for k in range(rate_samples.shape[1])]
    )
    total = math.fsum(per_user.tolist())
    per_trial_sum = np.array([math.fsum(row.tolist()) for row in rate_samples])
    if trials >= 2:
        half_width = 1.96 * float(np.std(per_trial_sum, ddof=1)) / math.sqrt(trials)
    else:
        half_width = 0.0
    return RateReport(
        per_user_rate=per_user, sum_rate=total, trials=trials, half_width=half_width
    )


def monte_carlo_sum_rate(
    profiles: Sequence[UserChannelProfile],
    geometry: ArrayGeometry,
    classification: "Classification",
    codebooks: Mapping[int, Codebook],
    p_d: float,
    trials: int,
    rng: np.random.Generator,
    channel_sampler: Callable[..., ChannelRealization] = draw_channel,
) -> RateReport:
    """Ergodic sum rate of the hybrid feedback scheme by Monte Carlo.

    Per trial: draw every user's channel, quantize the instantaneous users'
    channels with their codebooks, build hybrid SLNR precoders (statistical
    users contribute covariance only), then rate every user with its true
    channel.  ``codebooks`` maps user index -> codebook for every class-I
    user.  ``channel_sampler`` replaces draw_channel in tests.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    if p_d <= 0:
        raise ValueError("transmit power must be positive")
    k_total = len(profiles)
    if k_total == 0:
        return RateReport(per_user_rate=np.zeros(0), sum_rate=0.0, trials=trials, half_width=0.0)
    class_i = list(classification.class_i)
    class_s = list(classification.class_s)
    missing = [u for u in class_i if u not in codebooks]
    if missing:
        raise ValueError(f"no codebook supplied for instantaneous users {missing}")
    cov_s = [covariance(profiles[n], geometry).phi for n in class_s]
    m = geometry.num_antennas
    samples = np.empty((trials, k_total))
    for t in range(trials):
        chans = np.empty((m, k_total), dtype=complex)
        for u in range(k_total):
            chans[:, u] = channel_sampler(profiles[u], geometry, rng, owner=u).h
        quantized = [quantize_channel(chans[:, u], codebooks[u])[1] for u in class_i]
        pset = hybrid_slnr_precoders(quantized, cov_s, p_d)
        precoders = np.empty((m, k_total), dtype=complex)
        for pos, u in enumerate(class_i):
            precoders[:, u] = pset.w_class_i[:, pos]
        for pos, u in enumerate(class_s):
            precoders[:, u] = pset.w_class_s[:, pos]
        samples[t] = _per_trial_rates(chans, precoders, p_d)
    return _report_from_samples(samples, trials)


def monte_carlo_perfect_csi(
    profiles: Sequence[UserChannelProfile],
    geometry: ArrayGeometry,
    p_d: float,
    trials: int,
    rng: np.random.Generator,
    channel_sampler: Callable[..., ChannelRealization] = draw_channel,
) -> RateReport:
    """Benchmark: SLNR precoding from the true (unquantized) channels."""
    if trials < 1:
        raise ValueError("need at least one trial")
    k_total = len(profiles)
    if k_total == 0:
        return RateReport(per_user_rate=np.zeros(0), sum_rate=0.0, trials=trials, half_width=0.0)
    m = geometry.num_antennas
    samples = np.empty((trials, k_total))
    for t in range(trials):
        chans = np.empty((m, k_total), dtype=complex)
        for u in range(k_total):
            chans[:, u] = channel_sampler(profiles[u], geometry, rng, owner=u).h
        precoders = conventional_slnr_precoders(list(chans.T), p_d)
        samples[t] = _per_trial_rates(chans, precoders, p_d)
    return _report_from_samples(samples, trials)


def effective_sinr_lb_class_i(
    own_gains: np.ndarray,
    i: int,
    t_hat: Sequence[int],
    l_star: Sequence[int],
    p_d: float,
) -> float:
    """Effective SINR of instantaneous user i from its average beam gains:
    own gain at its predicted beam over own gains at everyone else's beams
    plus 1/p_d."""
    g = np.asarray(own_gains, dtype=float)
    num = g[t_hat[i] - 1]
    den = 1.0 / p_d
    for j, t in enumerate(t_hat):
        if j != i:
            den += g[t - 1]
    for l in l_star:
        den += g[l - 1]
    return float(num / den)


def effective_sinr_lb_class_s(
    own_gains: np.ndarray,
    n: int,
    t_hat: Sequence[int],
    l_star: Sequence[int],
    p_d: float,
) -> float:
    """Mirror of the class-I form with the numerator at the selected beam l*_n."""
    g = np.asarray(own_gains, dtype=float)
    num = g[l_star[n] - 1]
    den = 1.0 / p_d
    for q, l in enumerate(l_star):
        if q != n:
            den += g[l - 1]
    for t in t_hat:
        den += g[t - 1]
    return float(num / den)


def bound_given_beams(
    bd_all: Sequence[BeamDomainCovariance],
    classification: "Classification",
    t_hat: Sequence[int],
    l_star: Sequence[int],
    p_d: float,
) -> RateReport:
    """Closed-form sum-rate bound once every user's beam index is fixed.

    Shared by the fully statistical pipeline and by regression tests that
    substitute externally obtained beam indices.
    """
    k_total = len(bd_all)
    per_user = np.zeros(k_total)
    for pos, u in enumerate(classification.class_i):
        s = effective_sinr_lb_class_i(bd_all[u].gains, pos, t_hat, l_star, p_d)
        per_user[u] = math.log2(1.0 + s)
    for pos, u in enumerate(classification.class_s):
        s = effective_sinr_lb_class_s(bd_all[u].gains, pos, t_hat, l_star, p_d)
        per_user[u] = math.log2(1.0 + s)
    return RateReport(
        per_user_rate=per_user,
        sum_rate=math.fsum(per_user.tolist()),
        trials=0,
        half_width=0.0,
    )


def sum_rate_lower_bound(
    bd_all: Sequence[BeamDomainCovariance],
    classification: "Classification",
    b_total: int,
    p_d: float,
    leakage_margin: int = 10,
    power_threshold: float = 1e-3,
) -> RateReport:
    """Deterministic sum-rate bound from beam-domain covariances alone.

    Every instantaneous user's feedback is predicted: subspace window ->
    strongest beam t* -> codeword index -> beam index t_hat, with codebook
    size X = 2^floor(b_total / K_I).  Statistical users then pick their beams
    against that interference map and the closed-form SINRs are summed.
    """
    if p_d <= 0:
        raise ValueError("transmit power must be positive")
    k_total = len(bd_all)
    if k_total == 0:
        return RateReport(per_user_rate=np.zeros(0), sum_rate=0.0, trials=0, half_width=0.0)
    class_i = list(classification.class_i)
    t_hat: list[int] = []
    if class_i:
        bits = b_total // len(class_i)
        if bits < 1:
            raise ValueError(
                f"zero bits per class-I user: {len(class_i)} users share {b_total} bits"
            )
        size = 2 ** bits
        m = bd_all[0].num_beams
        for u in class_i:
            bounds = approximate_subspace(bd_all[u], leakage_margin, power_threshold)
            t_star = int(np.argmax(bd_all[u].gains)) + 1
            u_tilde = predicted_feedback_index(t_star, bounds, size)
            t_hat.append(predicted_beam_index(bounds, size, u_tilde, m))
    l_star, _ = approximate_precoders(bd_all, classification, t_hat, p_d)
    return bound_given_beams(bd_all, classification, t_hat, l_star, p_d)
