"""Multipath ULA channel model, spatial covariance and beam-domain representation.

A user's narrowband downlink channel is a sum of P planar wavefronts hitting a
uniform linear array:

    h = (1/sqrt(P)) * sum_p gamma_p * a(theta_p),   gamma_p ~ CN(0, 1) i.i.d.

Path angles are drawn once per user and frozen; only the complex gains change
between coherence blocks, so the spatial covariance

    Phi = (1/P) * sum_p a(theta_p) a(theta_p)^H

is an exact long-term quantity (trace M), not a sample estimate.  The beam
domain view projects Phi onto the columns of an M-point DFT matrix ("virtual
beams"); its diagonal collects the average per-beam gains.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)

_HERMITIAN_TOL = 1e-10
_PSD_TOL = 1e-9
_TRACE_RTOL = 1e-9


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform linear array: element count and spacing in wavelengths."""

    num_antennas: int
    spacing: float = 0.5

    def __post_init__(self):
        if self.num_antennas < 2:
            raise ValueError(f"need at least 2 antennas, got {self.num_antennas}")
        if self.spacing <= 0:
            raise ValueError(f"antenna spacing must be positive, got {self.spacing}")


@dataclass(frozen=True)
class UserChannelProfile:
    """Frozen per-user geometry: mean angle of arrival, spread and path angles.

    All angles are radians.  ``path_angles`` must lie inside
    [mean_aoa - spread/2, mean_aoa + spread/2].
    """

    mean_aoa: float
    spread: float
    path_angles: np.ndarray

    def __post_init__(self):
        angles = np.asarray(self.path_angles, dtype=float)
        object.__setattr__(self, "path_angles", angles)
        if angles.ndim != 1 or angles.size < 1:
            raise ValueError("path_angles must be a non-empty 1-D array")
        if self.spread < 0:
            raise ValueError(f"angular spread must be nonnegative, got {self.spread}")
        lo = self.mean_aoa - self.spread / 2
        hi = self.mean_aoa + self.spread / 2
        if np.any(angles < lo - 1e-12) or np.any(angles > hi + 1e-12):
            raise ValueError("path angles fall outside the profile's angular interval")
        # endfire overshoot is accepted but worth noticing in sweep logs
        if lo < -np.pi / 2 - 1e-12 or hi > np.pi / 2 + 1e-12:
            logger.warning(
                "profile interval [%.4f, %.4f] extends beyond [-pi/2, pi/2]", lo, hi
            )

    @property
    def num_paths(self) -> int:
        return int(self.path_angles.size)


@dataclass(frozen=True)
class ChannelRealization:
    """One coherence-block channel vector and the index of the user owning it."""

    h: np.ndarray
    owner: int = 0

    def __post_init__(self):
        h = np.asarray(self.h, dtype=complex)
        object.__setattr__(self, "h", h)
        if h.ndim != 1:
            raise ValueError("channel must be a 1-D complex vector")
        if not np.all(np.isfinite(h.view(float))):
            raise ValueError("channel entries must be finite")


def _hermitian_defect(phi: np.ndarray) -> float:
    return float(np.max(np.abs(phi - phi.conj().T), initial=0.0))


@dataclass(frozen=True)
class Covariance:
    """Hermitian PSD spatial covariance with trace equal to the antenna count."""

    phi: np.ndarray

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=complex)
        object.__setattr__(self, "phi", phi)
        if phi.ndim != 2 or phi.shape[0] != phi.shape[1]:
            raise ValueError("covariance must be a square matrix")
        scale = max(float(np.abs(np.trace(phi))), 1.0)
        if _hermitian_defect(phi) > _HERMITIAN_TOL * scale:
            raise ValueError("covariance is not Hermitian")
        tr = float(np.trace(phi).real)
        m = phi.shape[0]
        if abs(tr - m) > _TRACE_RTOL * m:
            raise ValueError(f"covariance trace {tr} differs from antenna count {m}")
        w = np.linalg.eigvalsh(phi)
        if w[0] < -_PSD_TOL * tr:
            raise ValueError(f"covariance is not PSD (min eigenvalue {w[0]:.3e})")

    @property
    def num_antennas(self) -> int:
        return int(self.phi.shape[0])


@dataclass(frozen=True)
class BeamDomainCovariance:
    """Average gain of each virtual beam: the diagonal of V^H Phi V."""

    gains: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gains, dtype=float)
        object.__setattr__(self, "gains", g)
        if g.ndim != 1 or g.size < 1:
            raise ValueError("beam gains must be a non-empty 1-D real vector")
        if np.any(g < 0):
            raise ValueError("beam gains must be nonnegative")

    @property
    def num_beams(self) -> int:
        return int(self.gains.size)


def steering_vector(theta: float, geometry: ArrayGeometry) -> np.ndarray:
    """ULA array response a(theta), entry m = exp(j*2*pi*d/lambda*m*sin(theta)).

    Each entry has unit modulus, so ||a||^2 = M for every angle.
    """
    m = np.arange(geometry.num_antennas)
    return np.exp(2j * np.pi * geometry.spacing * np.sin(theta) * m)


def draw_user_profile(
    mean_aoa: float, spread: float, num_paths: int, rng: np.random.Generator
) -> UserChannelProfile:
    """Draw path angles i.i.d. uniform on [mean_aoa - spread/2, mean_aoa + spread/2]."""
    if num_paths < 1:
        raise ValueError(f"need at least one path, got {num_paths}")
    if spread < 0:
        raise ValueError(f"angular spread must be nonnegative, got {spread}")
    angles = mean_aoa + spread * (rng.random(num_paths) - 0.5)
    return UserChannelProfile(mean_aoa=mean_aoa, spread=spread, path_angles=angles)


def _steering_matrix(profile: UserChannelProfile, geometry: ArrayGeometry) -> np.ndarray:
    m = np.arange(geometry.num_antennas)
    phases = 2 * np.pi * geometry.spacing * np.outer(m, np.sin(profile.path_angles))
    return np.exp(1j * phases)


def draw_channel(
    profile: UserChannelProfile,
    geometry: ArrayGeometry,
    rng: np.random.Generator,
    owner: int = 0,
    gains: np.ndarray | None = None,
) -> ChannelRealization:
    """Draw one channel realization with fresh CN(0, 1) path gains.

    Path angles stay fixed (they live in the profile); only the gains are
    redrawn, so E{||h||^2} = M.  ``gains`` overrides the random draw, which is
    useful for pinning down single-path cases in tests.
    """
    p = profile.num_paths
    if gains is None:
        re_im = rng.standard_normal((2, p))
        gains = (re_im[0] + 1j * re_im[1]) / np.sqrt(2.0)
    else:
        gains = np.asarray(gains, dtype=complex)
        if gains.shape != (p,):
            raise ValueError(f"expected {p} path gains, got shape {gains.shape}")
    a = _steering_matrix(profile, geometry)
    h = a @ gains / np.sqrt(p)
    return ChannelRealization(h=h, owner=owner)


def covariance(profile: UserChannelProfile, geometry: ArrayGeometry) -> Covariance:
    """Exact spatial covariance (1/P) * sum_p a(theta_p) a(theta_p)^H."""
    a = _steering_matrix(profile, geometry)
    phi = a @ a.conj().T / profile.num_paths
    phi = (phi + phi.conj().T) / 2
    return Covariance(phi=phi)


def dft_matrix(num_antennas: int) -> np.ndarray:
    """Unitary matrix of virtual beams; column t (1-based) samples the sine
    grid at 2t/M - 1, entry m = exp(j*pi*m*(2t/M - 1)) / sqrt(M)."""
    m = num_antennas
    if m < 1:
        raise ValueError("antenna count must be positive")
    rows = np.arange(m)
    cols = 2.0 * np.arange(1, m + 1) / m - 1.0
    return np.exp(1j * np.pi * np.outer(rows, cols)) / np.sqrt(m)


def beam_domain_covariance(
    phi: Covariance | np.ndarray, v: np.ndarray | None = None
) -> BeamDomainCovariance:
    """Per-beam average gains: the real diagonal of V^H Phi V.

    Trace is preserved (V is unitary), so the gains sum to trace(Phi).
    """
    mat = np.asarray(phi.phi if isinstance(phi, Covariance) else phi, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("covariance must be a square matrix")
    scale = max(float(np.abs(np.trace(mat))), 1.0)
    if _hermitian_defect(mat) > _HERMITIAN_TOL * scale:
        raise ValueError("beam-domain projection requires a Hermitian matrix")
    if v is None:
        v = dft_matrix(mat.shape[0])
    diag = np.einsum("mt,mn,nt->t", v.conj(), mat, v).real
    tiny = _PSD_TOL * scale
    if np.any(diag < -tiny):
        raise ValueError("projected beam gains are significantly negative")
    return BeamDomainCovariance(gains=np.maximum(diag, 0.0))


def closest_beam_index(theta: float, num_antennas: int) -> int:
    """1-based virtual-beam index nearest to sin(theta) on the half-wavelength grid.

    Rounds half to even; the sine grid is periodic with period 2, so an index
    of 0 wraps to M (sin = -1 and sin = +1 address the same beam).
    """
    t = round(num_antennas * (np.sin(theta) + 1.0) / 2.0)
    if t == 0:
        t = num_antennas
    return int(min(max(t, 1), num_antennas))
