"""SLNR precoding with mixed channel knowledge.

Two users feed back quantized channels, two are served from covariance
alone; the precoders balance desired power against leakage into everyone
else plus noise, which is exactly a generalized eigenproblem.
"""

import numpy as np

from hybridfb import (
    ArrayGeometry,
    covariance,
    dft_codebook,
    draw_channel,
    draw_user_profile,
    hybrid_slnr_precoders,
    max_gen_eigvec,
    quantize_channel,
    rayleigh_quotient,
    sinr,
)

rng = np.random.default_rng(2)
geom = ArrayGeometry(num_antennas=32)
means = np.radians([-50, -15, 20, 55])
profiles = [draw_user_profile(m, np.radians(10), 20, rng) for m in means]
p_d = 10.0  # 10 dB

# the solver itself: maximize (w^H B w)/(w^H A w) over unit vectors
g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
a_mat = g @ g.conj().T + 0.5 * np.eye(4)
b_vec = rng.standard_normal(4) + 1j * rng.standard_normal(4)
b_mat = np.outer(b_vec, b_vec.conj())
w = max_gen_eigvec(a_mat, b_mat)
print(f"toy pencil: quotient {rayleigh_quotient(w, a_mat, b_mat):.3f}, ||w|| = {np.linalg.norm(w):.6f}")

# users 0 and 1 are instantaneous (4-bit DFT codebook), 2 and 3 statistical
cb = dft_codebook(geom.num_antennas, 16)
channels = [draw_channel(p, geom, rng, owner=k) for k, p in enumerate(profiles)]
quantized = [quantize_channel(channels[k].h, cb)[1] for k in (0, 1)]
cov_s = [covariance(profiles[k], geom) for k in (2, 3)]

pset = hybrid_slnr_precoders(quantized, cov_s, p_d)
precoders = np.concatenate([pset.w_class_i, pset.w_class_s], axis=1)

print("per-user SINR against the true channels:")
for k, chan in enumerate(channels):
    others = [precoders[:, j] for j in range(4) if j != k]
    value = sinr(chan, precoders[:, k], others, p_d)
    kind = "inst" if k < 2 else "stat"
    print(f"  user {k} ({kind}): sinr = {value:7.2f}  rate = {np.log2(1 + value):.2f} b/s/Hz")
