"""Scenario configuration and the figure-style experiment runners.

A scenario fixes the array, the user population and all sweep grids; every
run is reproducible from its integer seed.  Randomness is split into named
streams so results do not depend on evaluation order or thread count:

    default_rng(SeedSequence([seed, purpose, *indices]))

with purpose 0 for user geometry (one stream per user, so user u's angles do
not depend on how many users a sweep point serves), 1 for codebook draws
(per user and codebook size, fixed across a sweep) and 2 for Monte Carlo
trials (per grid point, shared by all schemes so curves see identical
channel realizations).

CSV output is fully self-describing: every row repeats the scenario
parameters next to its result, floats are printed with 9 significant digits
and rows appear in deterministic grid order.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .channel import (
    ArrayGeometry,
    BeamDomainCovariance,
    UserChannelProfile,
    beam_domain_covariance,
    covariance,
    dft_matrix,
    draw_user_profile,
)
from .classification import Classification, classify_users_greedy, classification_rows
from .codebooks import (
    Codebook,
    CodebookKind,
    approximate_subspace,
    dft_codebook,
    predicted_codebook,
    skewed_codebook,
)
from .rates import RateReport, monte_carlo_perfect_csi, monte_carlo_sum_rate, sum_rate_lower_bound

_GEOMETRY_STREAM = 0
_CODEBOOK_STREAM = 1
_TRIAL_STREAM = 2


class Scheme(str, Enum):
    HYBRID = "HybridProposed"
    CONV_DFT = "ConventionalDFT"
    CONV_SKEWED = "ConventionalSkewed"
    PERFECT = "PerfectCSI"


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class ScenarioConfig:
    num_antennas: int = 128
    num_users: int = 10
    num_paths: int = 20
    b_total: int = 40
    p_d_grid_db: tuple[float, ...] = (0.0, 5.0, 10.0, 15.0, 20.0)
    p_d_db: float = 10.0
    k_grid: tuple[int, ...] = (5, 10, 15, 20)
    b_total_grid: tuple[int, ...] = (10, 20, 30, 40)
    spread_deg: float = 10.0
    d_over_lambda: float = 0.5
    leakage_margin: int = 10
    power_threshold: float = 1e-3
    trials: int = 1000
    seed: int = 0
    scheme: Scheme = Scheme.HYBRID
    codebook: CodebookKind = CodebookKind.DFT
    bit_cap: int = 12

    @property
    def geometry(self) -> ArrayGeometry:
        return ArrayGeometry(num_antennas=self.num_antennas, spacing=self.d_over_lambda)

    @property
    def spread_rad(self) -> float:
        return math.radians(self.spread_deg)


_INT_KEYS = {
    "num_antennas", "num_users", "num_paths", "b_total", "leakage_margin",
    "trials", "seed", "bit_cap",
}
_FLOAT_KEYS = {"p_d_db", "spread_deg", "d_over_lambda", "power_threshold"}
_FLOAT_TUPLE_KEYS = {"p_d_grid_db"}
_INT_TUPLE_KEYS = {"k_grid", "b_total_grid"}


def validate_config(text: str) -> ScenarioConfig:
    """Parse flat ``key = value`` text (# comments allowed) into a checked config.

    Unknown keys, malformed values and out-of-range parameters raise
    ValueError with the offending line; a budget smaller than the user count
    only warns, because the conventional baseline then floors to a one-entry
    codebook rather than failing.
    """
    known = {f.name for f in fields(ScenarioConfig)}
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = (s.strip() for s in line.partition("="))
        if key not in known:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        try:
            if key in _INT_KEYS:
                values[key] = int(val)
            elif key in _FLOAT_KEYS:
                values[key] = float(val)
            elif key in _FLOAT_TUPLE_KEYS:
                values[key] = tuple(float(s) for s in val.split(",") if s.strip())
            elif key in _INT_TUPLE_KEYS:
                values[key] = tuple(int(s) for s in val.split(",") if s.strip())
            elif key == "scheme":
                values[key] = Scheme(val)
            elif key == "codebook":
                values[key] = CodebookKind(val)
        except ValueError as err:
            raise ValueError(f"line {lineno}: bad value for {key}: {err}") from None
    config = ScenarioConfig(**values)
    _check_config(config)
    return config


def _check_config(c: ScenarioConfig) -> None:
    if c.num_antennas < 2:
        raise ValueError("num_antennas must be at least 2")
    if c.num_users < 0:
        raise ValueError("num_users must be nonnegative")
    if c.num_paths < 1:
        raise ValueError("num_paths must be positive")
    if c.b_total < 0:
        raise ValueError("b_total must be nonnegative")
    if c.trials < 1:
        raise ValueError("trials must be positive")
    if c.seed < 0:
        raise ValueError("seed must be nonnegative")
    if c.spread_deg < 0:
        raise ValueError("spread_deg must be nonnegative")
    if c.d_over_lambda <= 0:
        raise ValueError("d_over_lambda must be positive")
    if c.leakage_margin < 0:
        raise ValueError("leakage_margin must be nonnegative")
    if not 0 < c.power_threshold <= 1:
        raise ValueError("power_threshold must be in (0, 1]")
    if c.bit_cap < 1:
        raise ValueError("bit_cap must be positive")
    if not c.p_d_grid_db:
        raise ValueError("p_d_grid_db must not be empty")
    if any(k < 0 for k in c.k_grid) or any(b < 0 for b in c.b_total_grid):
        raise ValueError("sweep grids must be nonnegative")
    if c.num_users > 0 and c.b_total < c.num_users:
        warnings.warn(
            f"b_total={c.b_total} is below num_users={c.num_users}: the conventional "
            "scheme floors to zero bits per user (single-entry codebook)",
            UserWarning,
            stacklevel=2,
        )


def load_config(path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return validate_config(fh.read())


def derived_rng(seed: int, *key: int) -> np.random.Generator:
    """The documented stream-split rule; see the module docstring."""
    return np.random.default_rng(np.random.SeedSequence([int(seed)] + [int(k) for k in key]))


def scenario_profiles(
    config: ScenarioConfig, num_users: int | None = None
) -> list[UserChannelProfile]:
    """Frozen user geometries.  User u's profile depends only on (seed, u),
    so prefixes agree across sweep points with different user counts."""
    k = config.num_users if num_users is None else num_users
    profiles = []
    for u in range(k):
        rng = derived_rng(config.seed, _GEOMETRY_STREAM, u)
        mean = rng.uniform(-np.pi / 2, np.pi / 2)
        profiles.append(draw_user_profile(mean, config.spread_rad, config.num_paths, rng))
    return profiles


def beam_domain_profiles(
    profiles: Sequence[UserChannelProfile], geometry: ArrayGeometry
) -> list[BeamDomainCovariance]:
    v = dft_matrix(geometry.num_antennas)
    return [beam_domain_covariance(covariance(p, geometry), v) for p in profiles]


def _materialized_bits(bits: int, config: ScenarioConfig) -> int:
    # codebooks finer than the array can resolve add nothing but memory
    return min(bits, config.bit_cap)


def build_codebook(
    kind: CodebookKind,
    user: int,
    size: int,
    profiles: Sequence[UserChannelProfile],
    geometry: ArrayGeometry,
    config: ScenarioConfig,
    bd_all: Sequence[BeamDomainCovariance] | None = None,
) -> Codebook:
    """One user's operational codebook of the requested kind and size."""
    if kind == CodebookKind.DFT:
        return dft_codebook(geometry.num_antennas, size)
    if kind == CodebookKind.SKEWED:
        rng = derived_rng(config.seed, _CODEBOOK_STREAM, user, size)
        return skewed_codebook(covariance(profiles[user], geometry), size, rng, owner=user)
    if bd_all is None:
        bd_all = beam_domain_profiles(profiles, geometry)
    bounds = approximate_subspace(bd_all[user], config.leakage_margin, config.power_threshold)
    return predicted_codebook(bounds, size, geometry.num_antennas)


def _all_class_i(num_users: int, bits: int) -> Classification:
    return Classification(
        class_i=tuple(range(num_users)), class_s=(), bits_per_user=bits, objective=0.0
    )


def evaluate_monte_carlo(
    config: ScenarioConfig,
    scheme: Scheme,
    codebook_kind: CodebookKind,
    profiles: Sequence[UserChannelProfile],
    b_total: int,
    p_d: float,
    rng: np.random.Generator,
    trials: int | None = None,
    bd_all: Sequence[BeamDomainCovariance] | None = None,
) -> RateReport:
    """Monte Carlo sum rate of one scheme at one operating point."""
    geometry = config.geometry
    k = len(profiles)
    trials = config.trials if trials is None else trials
    if k == 0:
        return RateReport(per_user_rate=np.zeros(0), sum_rate=0.0, trials=trials, half_width=0.0)
    if scheme == Scheme.PERFECT:
        return monte_carlo_perfect_csi(profiles, geometry, p_d, trials, rng)
    if scheme in (Scheme.CONV_DFT, Scheme.CONV_SKEWED):
        kind = CodebookKind.DFT if scheme == Scheme.CONV_DFT else CodebookKind.SKEWED
        bits = _materialized_bits(b_total // k, config)
        cls = _all_class_i(k, bits)
    else:
        if bd_all is None:
            bd_all = beam_domain_profiles(profiles, geometry)
        cls = classify_users_greedy(
            bd_all, b_total, p_d,
            leakage_margin=config.leakage_margin, power_threshold=config.power_threshold,
        )
        kind = codebook_kind
        bits = _materialized_bits(cls.bits_per_user, config)
    size = 2 ** bits
    codebooks = {
        u: build_codebook(kind, u, size, profiles, geometry, config, bd_all)
        for u in cls.class_i
    }
    return monte_carlo_sum_rate(profiles, geometry, cls, codebooks, p_d, trials, rng)


def evaluate_bound(
    config: ScenarioConfig,
    profiles: Sequence[UserChannelProfile],
    b_total: int,
    p_d: float,
    bd_all: Sequence[BeamDomainCovariance] | None = None,
) -> tuple[Classification, RateReport]:
    """Greedy classification and its covariance-only sum-rate bound."""
    if len(profiles) == 0:
        empty = Classification(class_i=(), class_s=(), bits_per_user=0, objective=0.0)
        return empty, RateReport(np.zeros(0), 0.0, 0, 0.0)
    if bd_all is None:
        bd_all = beam_domain_profiles(profiles, config.geometry)
    cls = classify_users_greedy(
        bd_all, b_total, p_d,
        leakage_margin=config.leakage_margin, power_threshold=config.power_threshold,
    )
    report = sum_rate_lower_bound(
        bd_all, cls, b_total, p_d,
        leakage_margin=config.leakage_margin, power_threshold=config.power_threshold,
    )
    return cls, report


RATE_COLUMNS = (
    "scenario_id", "fig", "curve", "scheme", "codebook", "M", "K", "P", "b_total",
    "p_d_db", "spread_deg", "d_over_lambda", "leakage_margin", "power_threshold",
    "trials", "seed", "sum_rate", "half_width",
)
CLASSIFY_COLUMNS = (
    "scenario_id", "fig", "p_d_db", "M", "K", "P", "b_total", "spread_deg",
    "d_over_lambda", "leakage_margin", "power_threshold", "seed",
    "user", "label", "selection_order", "bits_per_user", "objective",
)


def _fmt(value) -> str:
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, float):
        return format(value, ".9g")
    return str(value)


def rows_to_csv(rows: Sequence[dict], columns: Sequence[str]) -> str:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(row[c]) for c in columns))
    return "\n".join(lines) + "\n"


def _base_row(config: ScenarioConfig, fig: str, k: int, b_total: int) -> dict:
    return {
        "scenario_id": f"{fig}-M{config.num_antennas}-P{config.num_paths}-seed{config.seed}",
        "fig": fig,
        "M": config.num_antennas,
        "K": k,
        "P": config.num_paths,
        "b_total": b_total,
        "spread_deg": config.spread_deg,
        "d_over_lambda": config.d_over_lambda,
        "leakage_margin": config.leakage_margin,
        "power_threshold": config.power_threshold,
        "seed": config.seed,
    }


def _rate_row(base: dict, curve: str, scheme: Scheme, codebook: str,
              p_d_db: float, report: RateReport) -> dict:
    row = dict(base)
    row.update(
        curve=curve, scheme=scheme, codebook=codebook, p_d_db=float(p_d_db),
        trials=report.trials, sum_rate=report.sum_rate, half_width=report.half_width,
    )
    return row


def _run_tasks(tasks: Sequence[Callable[[], list[dict]]], threads: int) -> list[dict]:
    """Run independent grid tasks, preserving task order in the output."""
    if threads <= 1:
        chunks = [task() for task in tasks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda t: t(), tasks))
    return [row for chunk in chunks for row in chunk]


def run_fig1(config: ScenarioConfig, threads: int = 1) -> str:
    """Proposed-scheme Monte Carlo, its analytical bound and a perfect-CSI
    benchmark, swept over transmit power."""
    profiles = scenario_profiles(config)
    geometry = config.geometry
    bd_all = beam_domain_profiles(profiles, geometry)

    def point(g: int, p_d_db: float) -> Callable[[], list[dict]]:
        def task() -> list[dict]:
            p_d = db_to_linear(p_d_db)
            base = _base_row(config, "fig1", config.num_users, config.b_total)
            rows = []
            rng = derived_rng(config.seed, _TRIAL_STREAM, g)
            mc = evaluate_monte_carlo(
                config, Scheme.HYBRID, config.codebook, profiles,
                config.b_total, p_d, rng, bd_all=bd_all,
            )
            rows.append(_rate_row(base, "monte_carlo", Scheme.HYBRID,
                                  config.codebook.value, p_d_db, mc))
            _, bound = evaluate_bound(config, profiles, config.b_total, p_d, bd_all)
            rows.append(_rate_row(base, "lower_bound", Scheme.HYBRID, "none", p_d_db, bound))
            rng = derived_rng(config.seed, _TRIAL_STREAM, g)
            perfect = evaluate_monte_carlo(
                config, Scheme.PERFECT, config.codebook, profiles, config.b_total, p_d, rng,
            )
            rows.append(_rate_row(base, "monte_carlo", Scheme.PERFECT, "none", p_d_db, perfect))
            return rows
        return task

    tasks = [point(g, p) for g, p in enumerate(config.p_d_grid_db)]
    return rows_to_csv(_run_tasks(tasks, threads), RATE_COLUMNS)


_COMPARISON_CURVES = (
    (Scheme.HYBRID, CodebookKind.DFT),
    (Scheme.HYBRID, CodebookKind.SKEWED),
    (Scheme.CONV_DFT, CodebookKind.DFT),
    (Scheme.CONV_SKEWED, CodebookKind.SKEWED),
)


def _comparison_rows(
    config: ScenarioConfig,
    fig: str,
    g: int,
    profiles: Sequence[UserChannelProfile],
    b_total: int,
    p_d_db: float,
    bd_all: Sequence[BeamDomainCovariance],
) -> list[dict]:
    p_d = db_to_linear(p_d_db)
    base = _base_row(config, fig, len(profiles), b_total)
    rows = []
    for scheme, kind in _COMPARISON_CURVES:
        rng = derived_rng(config.seed, _TRIAL_STREAM, g)
        report = evaluate_monte_carlo(
            config, scheme, kind, profiles, b_total, p_d, rng, bd_all=bd_all
        )
        rows.append(_rate_row(base, "monte_carlo", scheme, kind.value, p_d_db, report))
    return rows


def run_fig2(config: ScenarioConfig, threads: int = 1) -> str:
    """Proposed vs conventional schemes (DFT and skewed codebooks) over power."""
    profiles = scenario_profiles(config)
    bd_all = beam_domain_profiles(profiles, config.geometry)
    tasks = [
        (lambda g=g, p=p: _comparison_rows(config, "fig2", g, profiles, config.b_total, p, bd_all))
        for g, p in enumerate(config.p_d_grid_db)
    ]
    return rows_to_csv(_run_tasks(tasks, threads), RATE_COLUMNS)


def run_fig3(config: ScenarioConfig, threads: int = 1) -> str:
    """Scheme comparison versus the number of users at fixed power and budget."""
    all_profiles = scenario_profiles(config, num_users=max(config.k_grid, default=0))
    geometry = config.geometry
    bd_full = beam_domain_profiles(all_profiles, geometry)

    def point(g: int, k: int) -> Callable[[], list[dict]]:
        def task() -> list[dict]:
            return _comparison_rows(
                config, "fig3", g, all_profiles[:k], config.b_total,
                config.p_d_db, bd_full[:k],
            )
        return task

    tasks = [point(g, k) for g, k in enumerate(config.k_grid)]
    return rows_to_csv(_run_tasks(tasks, threads), RATE_COLUMNS)


def run_fig4(config: ScenarioConfig, threads: int = 1) -> str:
    """Scheme comparison versus the global feedback budget at fixed power."""
    profiles = scenario_profiles(config)
    bd_all = beam_domain_profiles(profiles, config.geometry)

    def point(g: int, b_total: int) -> Callable[[], list[dict]]:
        def task() -> list[dict]:
            return _comparison_rows(
                config, "fig4", g, profiles, b_total, config.p_d_db, bd_all
            )
        return task

    tasks = [point(g, b) for g, b in enumerate(config.b_total_grid)]
    return rows_to_csv(_run_tasks(tasks, threads), RATE_COLUMNS)


def run_classify(config: ScenarioConfig, threads: int = 1) -> str:
    """Greedy classification at every power point, one row per user."""
    profiles = scenario_profiles(config)
    bd_all = beam_domain_profiles(profiles, config.geometry)

    def point(p_d_db: float) -> Callable[[], list[dict]]:
        def task() -> list[dict]:
            cls, _ = evaluate_bound(
                config, profiles, config.b_total, db_to_linear(p_d_db), bd_all
            )
            base = _base_row(config, "classify", config.num_users, config.b_total)
            rows = []
            for user_row in classification_rows(cls):
                row = dict(base)
                row.update(user_row, p_d_db=float(p_d_db))
                rows.append(row)
            return rows
        return task

    tasks = [point(p) for p in config.p_d_grid_db]
    return rows_to_csv(_run_tasks(tasks, threads), CLASSIFY_COLUMNS)


def run_bound(config: ScenarioConfig, threads: int = 1) -> str:
    """Covariance-only sum-rate bound at every power point."""
    profiles = scenario_profiles(config)
    bd_all = beam_domain_profiles(profiles, config.geometry)

    def point(p_d_db: float) -> Callable[[], list[dict]]:
        def task() -> list[dict]:
            _, report = evaluate_bound(
                config, profiles, config.b_total, db_to_linear(p_d_db), bd_all
            )
            base = _base_row(config, "bound", config.num_users, config.b_total)
            return [_rate_row(base, "lower_bound", Scheme.HYBRID, "none", p_d_db, report)]
        return task

    tasks = [point(p) for p in config.p_d_grid_db]
    return rows_to_csv(_run_tasks(tasks, threads), RATE_COLUMNS)
