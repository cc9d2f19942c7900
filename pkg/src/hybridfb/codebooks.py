"""Quantization codebooks and covariance-only feedback prediction.

Three unit-norm codebook families over an M-antenna ULA:

* DFT-based: X phase ramps on the uniform sine grid 2u/X - 1, u = 1..X.
* Skewed: isotropic unit vectors colored by the covariance square root,
  c_u = Phi^(1/2) f_u / ||Phi^(1/2) f_u||, concentrating codewords in the
  user's subspace.
* Predicted: phase ramps confined to the user's approximate beam-domain
  subspace [x_min, x_max]; this is what the base station assumes a
  covariance-aware codebook looks like when it has no instantaneous CSI.

The prediction pipeline maps the strongest virtual beam t* to a codeword
index and back to a beam index, all in exact integer arithmetic with
round-half-to-even ties.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .channel import BeamDomainCovariance, ChannelRealization, Covariance

_UNIT_NORM_TOL = 1e-12


class CodebookKind(str, Enum):
    DFT = "dft"
    SKEWED = "skewed"
    PREDICTED = "predicted"


@dataclass(frozen=True)
class Codebook:
    """Columns of ``vectors`` are unit-norm codewords; index u is 1-based."""

    vectors: np.ndarray
    kind: CodebookKind
    owner: int | None = None

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=complex)
        object.__setattr__(self, "vectors", v)
        if v.ndim != 2 or v.shape[1] < 1:
            raise ValueError("codebook must be an M x X matrix with X >= 1")
        norms = np.linalg.norm(v, axis=0)
        if np.any(np.abs(norms - 1.0) > _UNIT_NORM_TOL):
            raise ValueError("codebook vectors must have unit norm")

    @property
    def size(self) -> int:
        return int(self.vectors.shape[1])

    @property
    def num_antennas(self) -> int:
        return int(self.vectors.shape[0])


@dataclass(frozen=True)
class SubspaceBounds:
    """Beam-index window [x_min, x_max] of a user's dominant virtual beams,
    padded by the leakage margin on both sides and clipped to [1, M]."""

    x_min: int
    x_max: int
    leakage_margin: int

    def __post_init__(self):
        if self.x_min > self.x_max:
            raise ValueError(f"empty beam window [{self.x_min}, {self.x_max}]")
        if self.x_min < 1:
            raise ValueError("beam indices are 1-based")
        if self.leakage_margin < 0:
            raise ValueError("leakage margin must be nonnegative")

    @property
    def width(self) -> int:
        return self.x_max - self.x_min


def _phase_ramp_codebook(num_antennas: int, slopes: np.ndarray) -> np.ndarray:
    m = np.arange(num_antennas)
    return np.exp(1j * np.pi * np.outer(m, slopes)) / np.sqrt(num_antennas)


def dft_codebook(num_antennas: int, size: int) -> Codebook:
    """DFT-based codebook: codeword u has phase slope 2u/X - 1."""
    if size < 1:
        raise ValueError("codebook size must be positive")
    slopes = 2.0 * np.arange(1, size + 1) / size - 1.0
    return Codebook(
        vectors=_phase_ramp_codebook(num_antennas, slopes), kind=CodebookKind.DFT
    )


def skewed_codebook(
    phi: Covariance | np.ndarray,
    size: int,
    rng: np.random.Generator,
    owner: int | None = None,
) -> Codebook:
    """Isotropic codewords colored by the Hermitian PSD square root of phi.

    Directions landing in the null space of phi (norm below 1e-12 after
    coloring) are redrawn.
    """
    if size < 1:
        raise ValueError("codebook size must be positive")
    mat = np.asarray(phi.phi if isinstance(phi, Covariance) else phi, dtype=complex)
    w, u = np.linalg.eigh((mat + mat.conj().T) / 2)
    root = (u * np.sqrt(np.maximum(w, 0.0))) @ u.conj().T
    m = mat.shape[0]
    cols = np.empty((m, size), dtype=complex)
    for i in range(size):
        for _ in range(100):
            f = rng.standard_normal(m) + 1j * rng.standard_normal(m)
            f /= np.linalg.norm(f)
            c = root @ f
            norm = np.linalg.norm(c)
            if norm >= 1e-12:
                cols[:, i] = c / norm
                break
        else:
            raise ValueError("covariance square root annihilates every drawn direction")
    return Codebook(vectors=cols, kind=CodebookKind.SKEWED, owner=owner)


def approximate_subspace(
    bd: BeamDomainCovariance, leakage_margin: int, power_threshold: float = 1e-3
) -> SubspaceBounds:
    """Beam window covering all entries within ``power_threshold`` of the peak
    gain, widened by ``leakage_margin`` beams on each side."""
    g = bd.gains
    peak = float(g.max())
    if peak <= 0.0:
        raise ValueError("empty covariance: all beam gains are zero")
    idx = np.flatnonzero(g >= power_threshold * peak)
    d_min = int(idx[0]) + 1
    d_max = int(idx[-1]) + 1
    m = bd.num_beams
    return SubspaceBounds(
        x_min=max(d_min - leakage_margin, 1),
        x_max=min(d_max + leakage_margin, m),
        leakage_margin=leakage_margin,
    )


def predicted_codebook(bounds: SubspaceBounds, size: int, num_antennas: int) -> Codebook:
    """Codebook the BS assumes for a user confined to ``bounds``: X phase
    slopes theta(u) = (2*x_min/M - 1) + u * 2*(x_max - x_min)/(M*X)."""
    if size < 1:
        raise ValueError("codebook size must be positive")
    u = np.arange(1, size + 1)
    slopes = (2.0 * bounds.x_min / num_antennas - 1.0) + u * (
        2.0 * bounds.width / (num_antennas * size)
    )
    return Codebook(
        vectors=_phase_ramp_codebook(num_antennas, slopes), kind=CodebookKind.PREDICTED
    )


def quantize_channel(
    h: ChannelRealization | np.ndarray, codebook: Codebook
) -> tuple[int, np.ndarray]:
    """Best codeword by correlation: (1-based index, codeword) maximizing
    |h^H c_u|^2.  Ties break toward the lowest index.

    The matrix product only shortlists candidates; near-ties are re-scored
    one codeword at a time because BLAS may accumulate different columns in
    different orders, which would make equal codewords compare unequal.
    """
    vec = np.asarray(h.h if isinstance(h, ChannelRealization) else h, dtype=complex)
    if vec.ndim != 1 or vec.shape[0] != codebook.num_antennas:
        raise ValueError("channel length does not match the codebook")
    if np.linalg.norm(vec) == 0.0:
        raise ValueError("cannot quantize an all-zero channel")
    corr = np.abs(vec.conj() @ codebook.vectors) ** 2
    band = np.flatnonzero(corr >= corr.max() * (1.0 - 1e-9))
    best_u, best_val = -1, -1.0
    for u in band:
        val = abs(np.vdot(vec, codebook.vectors[:, u])) ** 2
        if val > best_val:
            best_u, best_val = int(u), val
    return best_u + 1, codebook.vectors[:, best_u].copy()


def _round_half_even(num: int, den: int) -> int:
    """Nearest integer to num/den with ties to even, in exact arithmetic."""
    q, r = divmod(num, den)
    twice = 2 * r
    if twice > den or (twice == den and q % 2 == 1):
        q += 1
    return q


def predicted_feedback_index(t_star: int, bounds: SubspaceBounds, size: int) -> int:
    """Codeword index the BS predicts a user would feed back if its channel
    pointed at beam t_star: round((t* - x_min) * X / (x_max - x_min)),
    clamped to [1, X]; exactly 1 at the lower subspace edge."""
    if not bounds.x_min <= t_star <= bounds.x_max:
        raise ValueError(
            f"beam {t_star} outside subspace [{bounds.x_min}, {bounds.x_max}]"
        )
    if t_star == bounds.x_min:
        return 1
    u = _round_half_even((t_star - bounds.x_min) * size, bounds.width)
    return min(max(u, 1), size)


def predicted_beam_index(
    bounds: SubspaceBounds, size: int, u_tilde: int, num_antennas: int | None = None
) -> int:
    """Virtual beam addressed by codeword u_tilde of the predicted codebook:
    round(x_min + (x_max - x_min) * u / X), clamped to [1, M].

    For u_tilde in [1, X] the result already lies in [x_min, x_max]; the clamp
    only matters for out-of-range inputs.
    """
    t = _round_half_even(bounds.x_min * size + bounds.width * u_tilde, size)
    t = max(t, 1)
    if num_antennas is not None:
        t = min(t, num_antennas)
    return t


def write_codebook(codebook: Codebook, path) -> None:
    """Columnar debug dump: one line per codeword with index then interleaved
    real/imag entries."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(
            f"# kind={codebook.kind.value} owner={codebook.owner}"
            f" M={codebook.num_antennas} X={codebook.size}\n"
        )
        for u in range(codebook.size):
            col = codebook.vectors[:, u]
            parts = [str(u + 1)]
            for z in col:
                parts.append(f"{z.real:.17g}")
                parts.append(f"{z.imag:.17g}")
            fh.write(" ".join(parts) + "\n")


def read_codebook(path) -> Codebook:
    """Inverse of :func:`write_codebook`."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        fields = dict(tok.split("=", 1) for tok in header.lstrip("# ").split())
        m = int(fields["M"])
        x = int(fields["X"])
        owner = None if fields["owner"] == "None" else int(fields["owner"])
        vectors = np.empty((m, x), dtype=complex)
        for line in fh:
            vals = line.split()
            u = int(vals[0]) - 1
            nums = np.array([float(s) for s in vals[1:]])
            vectors[:, u] = nums[0::2] + 1j * nums[1::2]
    return Codebook(vectors=vectors, kind=CodebookKind(fields["kind"]), owner=owner)
