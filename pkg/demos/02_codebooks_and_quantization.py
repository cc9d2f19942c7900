"""The three codebook families and what quantization costs.

Same user, same budget: a full-range DFT codebook wastes its entries on
directions the user never occupies, the covariance-aware families do not.
"""

import numpy as np

from hybridfb import (
    ArrayGeometry,
    approximate_subspace,
    beam_domain_covariance,
    covariance,
    dft_codebook,
    draw_channel,
    draw_user_profile,
    predicted_codebook,
    quantize_channel,
    skewed_codebook,
)

rng = np.random.default_rng(1)
geom = ArrayGeometry(num_antennas=64)
profile = draw_user_profile(np.radians(30), np.radians(10), 20, rng)
phi = covariance(profile, geom)
bd = beam_domain_covariance(phi)

bits = 4
size = 2 ** bits
# a tight leakage margin keeps the predicted grid dense inside the subspace
bounds = approximate_subspace(bd, leakage_margin=3)
print(f"user subspace: beams [{bounds.x_min}, {bounds.x_max}] of {geom.num_antennas}")

books = {
    "dft": dft_codebook(geom.num_antennas, size),
    "skewed": skewed_codebook(phi, size, rng),
    "predicted": predicted_codebook(bounds, size, geom.num_antennas),
}

# quantization quality: how much desired power survives |h^H c|^2 / ||h||^2
trials = 500
for name, cb in books.items():
    kept = []
    for _ in range(trials):
        h = draw_channel(profile, geom, rng).h
        _, c = quantize_channel(h, cb)
        kept.append(abs(np.vdot(h, c)) ** 2 / np.vdot(h, h).real)
    print(f"{name:10s} X={size}: mean kept power {np.mean(kept):.3f}")

# the index pipeline never needs the codebook itself: with the subspace and
# the strongest beam the base station can predict the feedback index
from hybridfb import predicted_beam_index, predicted_feedback_index

t_star = int(np.argmax(bd.gains)) + 1
u_star = predicted_feedback_index(t_star, bounds, size)
t_back = predicted_beam_index(bounds, size, u_star, geom.num_antennas)
print(f"strongest beam {t_star} -> predicted codeword {u_star} -> beam {t_back}")
