"""SLNR precoder construction for mixed instantaneous/statistical CSI.

Each precoder maximizes a signal-to-leakage-and-noise quotient
(w^H B w)/(w^H A w), the classic generalized Rayleigh problem solved by
whitening: factor A = L L^H, eigendecompose L^-1 B L^-H, transform the top
eigenvector back and renormalize.

For a user fed back as a quantized vector h_hat the signal matrix is the
rank-1 outer product h_hat h_hat^H; for a covariance-only user it is the
covariance itself.  The leakage matrix collects everybody else's signal
matrices plus I/p_d, so it is always positive definite.

The beam-selection variant replaces the eigenproblem with an argmax over
virtual beams using only beam-domain gains.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING, Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .channel import Covariance, dft_matrix

if TYPE_CHECKING:
    from .channel import BeamDomainCovariance
    from .classification import Classification

logger = logging.getLogger(__name__)

_EIGVAL_TIE_TOL = 1e-10


@dataclass(frozen=True)
class PrecoderSet:
    """Unit-norm precoding vectors, one column per user, split by CSI type."""

    w_class_i: np.ndarray
    w_class_s: np.ndarray

    def __post_init__(self):
        for name in ("w_class_i", "w_class_s"):
            w = np.asarray(getattr(self, name), dtype=complex)
            object.__setattr__(self, name, w)
            if w.ndim != 2:
                raise ValueError(f"{name} must be an M x K matrix (possibly K=0)")
            if w.shape[1] and np.any(np.abs(np.linalg.norm(w, axis=0) - 1.0) > 1e-10):
                raise ValueError(f"{name} columns must have unit norm")


def rayleigh_quotient(w: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    """(w^H B w) / (w^H A w), both quadratic forms taken as real parts."""
    num = np.vdot(w, b @ w).real
    den = np.vdot(w, a @ w).real
    return num / den


def max_gen_eigvec(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Unit-norm maximizer of (w^H B w)/(w^H A w) for Hermitian PD A, PSD B.

    Whitening route: A = L L^H, then the top eigenvector u of L^-1 B L^-H
    gives w = L^-H u.  The returned vector is normalized and phase-fixed so
    its largest-modulus entry (first on ties) is real positive.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix shapes {a.shape} and {b.shape} do not match")
    try:
        ell = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as err:
        raise ValueError("leakage matrix A must be positive definite") from err
    y = solve_triangular(ell, b, lower=True)
    c = solve_triangular(ell, y.conj().T, lower=True).conj().T
    c = (c + c.conj().T) / 2
    vals, vecs = np.linalg.eigh(c)
    top = vals[-1]
    tied = np.flatnonzero(vals >= top - _EIGVAL_TIE_TOL)
    idx = int(tied[0])
    if tied.size > 1:
        logger.debug(
            "generalized eigenvalue tie within %g (%d candidates), using index %d",
            _EIGVAL_TIE_TOL, tied.size, idx,
        )
    w = solve_triangular(ell, vecs[:, idx], lower=True, trans="C")
    w /= np.linalg.norm(w)
    k = int(np.argmax(np.abs(w)))
    w *= np.conj(w[k]) / np.abs(w[k])
    w[k] = w[k].real + 0.0j
    return w


def _signal_matrices(
    quantized: Sequence[np.ndarray], covariances: Sequence[Covariance | np.ndarray]
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    outer = [np.outer(h, np.conj(h)) for h in (np.asarray(q) for q in quantized)]
    covs = [
        np.asarray(c.phi if isinstance(c, Covariance) else c, dtype=complex)
        for c in covariances
    ]
    return outer, covs


def hybrid_slnr_precoders(
    quantized_i: Sequence[np.ndarray],
    cov_s: Sequence[Covariance | np.ndarray],
    p_d: float,
) -> PrecoderSet:
    """SLNR precoders for quantized-feedback users and covariance-only users.

    User i (instantaneous): w maximizes its quotient against the leakage sum
    of the other quantized outer products, all covariance users and I/p_d.
    User n (statistical): same with its covariance as the signal matrix.
    """
    if p_d <= 0:
        raise ValueError("transmit power must be positive")
    if len(quantized_i) + len(cov_s) < 1:
        raise ValueError("need at least one user")
    outer, covs = _signal_matrices(quantized_i, cov_s)
    m = (outer[0] if outer else covs[0]).shape[0]
    total = np.eye(m, dtype=complex) / p_d
    for mat in outer:
        total += mat
    for mat in covs:
        total += mat
    w_i = np.empty((m, len(outer)), dtype=complex)
    for i, mat in enumerate(outer):
        w_i[:, i] = max_gen_eigvec(total - mat, mat)
    w_s = np.empty((m, len(covs)), dtype=complex)
    for n, mat in enumerate(covs):
        w_s[:, n] = max_gen_eigvec(total - mat, mat)
    return PrecoderSet(w_class_i=w_i, w_class_s=w_s)


def conventional_slnr_precoders(
    quantized: Sequence[np.ndarray], p_d: float
) -> np.ndarray:
    """All-instantaneous baseline: every user feeds back a quantized channel."""
    return hybrid_slnr_precoders(quantized, [], p_d).w_class_i


@lru_cache(maxsize=8)
def _dft_matrix_cached(num_antennas: int) -> np.ndarray:
    v = dft_matrix(num_antennas)
    v.setflags(write=False)
    return v


def approximate_precoders(
    bd_all: Sequence["BeamDomainCovariance"],
    classification: "Classification",
    t_hat: Sequence[int],
    p_d: float,
) -> tuple[list[int], PrecoderSet]:
    """Beam-selection precoders used by the covariance-only rate bound.

    Instantaneous users transmit on their predicted beams t_hat.  Each
    statistical user n picks the beam l maximizing

        gains_n[l] / (sum_{q != n} gains_q[l] + #{i : t_hat_i == l} + 1/p_d)

    (ties toward the lowest beam).  All precoders are DFT columns.
    """
    if p_d <= 0:
        raise ValueError("transmit power must be positive")
    gains = [bd.gains for bd in bd_all]
    if not gains:
        empty = np.empty((0, 0), dtype=complex)
        return [], PrecoderSet(w_class_i=empty, w_class_s=empty)
    m = gains[0].size
    t_hat = [int(t) for t in t_hat]
    if len(t_hat) != len(classification.class_i):
        raise ValueError("one predicted beam per instantaneous user is required")
    if any(not 1 <= t <= m for t in t_hat):
        raise ValueError("predicted beam indices must lie in [1, M]")
    hits = np.zeros(m)
    for t in t_hat:
        hits[t - 1] += 1.0
    s_users = list(classification.class_s)
    total_s = np.zeros(m)
    for n in s_users:
        total_s += gains[n]
    l_star = []
    for n in s_users:
        denom = (total_s - gains[n]) + hits + 1.0 / p_d
        l_star.append(int(np.argmax(gains[n] / denom)) + 1)
    v = _dft_matrix_cached(m)
    w_i = v[:, [t - 1 for t in t_hat]].copy()
    w_s = v[:, [l - 1 for l in l_star]].copy()
    return l_star, PrecoderSet(w_class_i=w_i, w_class_s=w_s)
