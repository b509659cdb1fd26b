"""Seeded Monte-Carlo experiment runner.

Sweeps a single knob (SNR, maximum phase response, quantization bits,
antenna count, element count) over a set of values, runs the same seeded
channel realizations at every value, and averages the per-algorithm rates
into one CSV row per (value, algorithm). Per-realization seeds are spawned
from (master_seed, realization_index), so results are byte-identical under
any thread count and resumable in any value order.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .ao import ao_optimize
from .beamforming import achievable_rate, optimal_digital_beamformers
from .channel import SystemConfig, cascade, dbi_to_linear, generate_channel
from .complexity import CostModel, cost_a_gd, cost_ao, cost_c_gd
from .errors import ConfigError
from .gd import a_gd_optimize, c_gd_optimize
from .ris import RisState, build_phase_set, initial_state

__all__ = [
    "ALGORITHMS",
    "SWEEP_KINDS",
    "RisSettings",
    "ExperimentSpec",
    "SweepRow",
    "SweepResult",
    "NumericalFailure",
    "load_spec",
    "spec_from_dict",
    "desk_spec",
    "paper_spec",
    "run_realization",
    "run_sweep",
    "run_convergence",
    "run_complexity",
    "run_desk_suite",
]

ALGORITHMS = ("a_gd", "c_gd", "ao", "random_phase", "no_ris")
SWEEP_KINDS = ("snr", "phase_max", "bits", "n_ms", "n_ris", "convergence", "complexity")

DEFAULT_SWEEP_VALUES = {
    "snr": [-10.0, 0.0, 10.0, 20.0],
    "phase_max": [60.0, 120.0, 180.0, 240.0, 306.82, 360.0],
    "bits": [1, 2, 3, 4],
    "n_ms": [8, 16, 24, 32],
    "n_ris": [16, 32, 64, 128],
    "convergence": [0],
    "complexity": [16, 32, 64, 128, 256, 512],
}

SWEEP_CSV_HEADER = "sweep_value,algorithm,mean_rate_bpshz,std_rate,n_real,wall_ms"
CONVERGENCE_CSV_HEADER = "iteration,algorithm,mean_rate_bpshz"
COMPLEXITY_CSV_HEADER = "n_ris,cost_ao,cost_cgd,cost_agd,log10_ao,log10_cgd,log10_agd"


def _fmt(x: float) -> str:
    return f"{x:.9g}"


class NumericalFailure(RuntimeError):
    """A realization failed numerically; carries the seed for replay."""

    def __init__(self, message: str, seed, realization_index: int):
        super().__init__(message)
        self.seed = seed
        self.realization_index = realization_index


@dataclass(frozen=True)
class RisSettings:
    """Surface hardware knobs the sweeps vary."""

    phi_max_deg: float = 306.82
    mu_bar: float = 0.8
    b: int = 3

    def template(self, n_elements: int) -> RisState:
        return initial_state(
            n_elements, math.radians(self.phi_max_deg), self.b, self.mu_bar
        )


@dataclass(frozen=True)
class ExperimentSpec:
    """One experiment: a sweep kind, its values, and the shared setup."""

    sweep_kind: str = "snr"
    sweep_values: tuple = ()
    base: SystemConfig = field(default_factory=SystemConfig)
    ris: RisSettings = field(default_factory=RisSettings)
    algorithms: tuple = ALGORITHMS
    realizations: int = 50
    master_seed: int = 20240
    snr_db: float = 10.0
    a_gd_iters: int = 100
    c_gd_iters: int = 12
    ao_max_outer: int = 10
    ao_tol: float = 1e-3

    def __post_init__(self):
        if self.sweep_kind not in SWEEP_KINDS:
            raise ConfigError(f"unknown sweep kind {self.sweep_kind!r}")
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise ConfigError(f"unknown algorithms {sorted(unknown)}")
        if self.realizations < 1:
            raise ConfigError("realizations must be >= 1")
        values = self.sweep_values or tuple(DEFAULT_SWEEP_VALUES[self.sweep_kind])
        object.__setattr__(self, "sweep_values", tuple(values))
        object.__setattr__(self, "algorithms", tuple(self.algorithms))

    def setup_for_value(self, value) -> tuple[SystemConfig, RisSettings]:
        """Config and surface settings with the sweep knob applied."""
        cfg = replace(self.base, rho=10.0 ** (self.snr_db / 10.0), delta_sq=1.0)
        ris = self.ris
        kind = self.sweep_kind
        if kind == "snr":
            cfg = replace(cfg, rho=10.0 ** (float(value) / 10.0))
        elif kind == "phase_max":
            ris = replace(ris, phi_max_deg=float(value))
        elif kind == "bits":
            ris = replace(ris, b=int(value))
        elif kind == "n_ms":
            cfg = replace(cfg, n_ms=int(value))
        elif kind == "n_ris":
            cfg = replace(cfg, n_ris=int(value))
        return cfg, ris


def desk_spec(**overrides) -> ExperimentSpec:
    """Workstation-scale defaults: 64/32/16 antennas, 50 realizations."""
    return ExperimentSpec(**overrides)


def paper_spec(**overrides) -> ExperimentSpec:
    """Large-scale preset (512/128/32, two reflected paths, 1000 draws).

    Long-running; shipped for completeness.
    """
    base = SystemConfig(n_bs=512, n_ris=128, n_ms=32, l_paths=2)
    defaults = dict(base=base, realizations=1000)
    defaults.update(overrides)
    return ExperimentSpec(**defaults)


def _config_from_dict(d: dict) -> SystemConfig:
    d = dict(d)
    if "g_t_dbi" in d:
        d["g_t"] = dbi_to_linear(float(d.pop("g_t_dbi")))
    if "g_r_dbi" in d:
        d["g_r"] = dbi_to_linear(float(d.pop("g_r_dbi")))
    allowed = {f.name for f in fields(SystemConfig)}
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"unknown SystemConfig fields {sorted(unknown)}")
    try:
        return SystemConfig(**d)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad system config: {exc}") from exc


def spec_from_dict(d: dict) -> ExperimentSpec:
    """Build an ExperimentSpec from a JSON-style dict; every field optional."""
    d = dict(d)
    kwargs = {}
    if "base" in d:
        kwargs["base"] = _config_from_dict(d.pop("base"))
    if "ris" in d:
        ris_d = d.pop("ris")
        unknown = set(ris_d) - {f.name for f in fields(RisSettings)}
        if unknown:
            raise ConfigError(f"unknown ris fields {sorted(unknown)}")
        kwargs["ris"] = RisSettings(**ris_d)
    allowed = {f.name for f in fields(ExperimentSpec)} - {"base", "ris"}
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"unknown spec fields {sorted(unknown)}")
    kwargs.update(d)
    try:
        return ExperimentSpec(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad experiment spec: {exc}") from exc


def load_spec(path) -> ExperimentSpec:
    """Read an ExperimentSpec from a JSON file."""
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(payload, dict):
        raise ConfigError("config file must hold a JSON object")
    return spec_from_dict(payload)


def run_realization(
    cfg: SystemConfig,
    ris: RisSettings,
    algorithms,
    seed,
    *,
    a_gd_iters: int = 100,
    c_gd_iters: int = 12,
    ao_max_outer: int = 10,
    ao_tol: float = 1e-3,
) -> tuple[dict, dict]:
    """Run every requested algorithm on one seeded channel draw.

    All algorithms see identical matrices; the random-phase draw is
    consumed from the same stream whether or not it is requested, so the
    channel draw depends only on the seed. Returns (rates, wall_ms) keyed
    by algorithm name.
    """
    rng = np.random.default_rng(seed)
    h1, _ = generate_channel(cfg, "bs_ris", rng)
    h2, _ = generate_channel(cfg, "ris_ms", rng)
    h_direct, _ = generate_channel(cfg, "direct", rng)
    phase_set = build_phase_set(math.radians(ris.phi_max_deg), ris.b)
    random_angles = phase_set[rng.integers(0, phase_set.size, cfg.n_ris)]
    template = ris.template(cfg.n_ris)

    rates: dict[str, float] = {}
    walls: dict[str, float] = {}
    for alg in algorithms:
        start = time.perf_counter()
        if alg == "a_gd":
            rates[alg] = a_gd_optimize(h1, h2, cfg, template, max_iter=a_gd_iters).rate
        elif alg == "c_gd":
            rates[alg] = c_gd_optimize(h1, h2, cfg, template, max_iter=c_gd_iters).rate
        elif alg == "ao":
            rates[alg] = ao_optimize(
                h1, h2, cfg, template, max_outer=ao_max_outer, tol=ao_tol
            ).rate
        elif alg == "random_phase":
            state = template.with_phases(random_angles, quantized=True)
            h_e = cascade(h1, state, h2)
            f_opt, w_opt = optimal_digital_beamformers(h_e, cfg.n_s)
            rates[alg] = achievable_rate(h_e, f_opt, w_opt, cfg)
        elif alg == "no_ris":
            f_opt, w_opt = optimal_digital_beamformers(h_direct, cfg.n_s)
            rates[alg] = achievable_rate(h_direct, f_opt, w_opt, cfg)
        else:
            raise ConfigError(f"unknown algorithm {alg!r}")
        walls[alg] = (time.perf_counter() - start) * 1e3
    return rates, walls


@dataclass(frozen=True)
class SweepRow:
    sweep_value: float
    algorithm: str
    mean_rate_bpshz: float
    std_rate: float
    n_real: int
    wall_ms: float

    def to_csv(self) -> str:
        return ",".join(
            [
                _fmt(float(self.sweep_value)),
                self.algorithm,
                _fmt(self.mean_rate_bpshz),
                _fmt(self.std_rate),
                str(self.n_real),
                _fmt(self.wall_ms),
            ]
        )


@dataclass
class SweepResult:
    kind: str
    rows: list

    def by_algorithm(self, value=None) -> dict:
        """mean rates keyed by algorithm, optionally for one sweep value."""
        out = {}
        for row in self.rows:
            if value is None or row.sweep_value == value:
                out.setdefault(row.algorithm, row.mean_rate_bpshz)
        return out


def _realization_seeds(master_seed: int, count: int):
    return [np.random.SeedSequence((master_seed, i)) for i in range(count)]


def _run_many(spec: ExperimentSpec, cfg, ris, threads: int):
    seeds = _realization_seeds(spec.master_seed, spec.realizations)

    def one(args):
        idx, seed = args
        try:
            return run_realization(
                cfg,
                ris,
                spec.algorithms,
                seed,
                a_gd_iters=spec.a_gd_iters,
                c_gd_iters=spec.c_gd_iters,
                ao_max_outer=spec.ao_max_outer,
                ao_tol=spec.ao_tol,
            )
        except (ValueError, np.linalg.LinAlgError, FloatingPointError) as exc:
            raise NumericalFailure(
                f"realization {idx} failed: {exc} "
                f"(replay seed=(master_seed={spec.master_seed}, index={idx}))",
                seed=(spec.master_seed, idx),
                realization_index=idx,
            ) from exc

    work = list(enumerate(seeds))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, work))
    else:
        results = [one(w) for w in work]
    return results


def run_sweep(spec: ExperimentSpec, out_path=None, threads: int = 1) -> SweepResult:
    """Run the spec's sweep, optionally streaming rows to a CSV file.

    Rows appear in sweep-value order, then algorithm order, and are
    flushed per completed value. Aggregation over realizations is done in
    realization-index order, so the output is independent of thread count.
    """
    if spec.sweep_kind in ("convergence", "complexity"):
        raise ConfigError(f"use the dedicated runner for {spec.sweep_kind}")

    fh = None
    if out_path is not None:
        fh = open(out_path, "w", newline="")
        fh.write(SWEEP_CSV_HEADER + "\n")

    rows = []
    try:
        for value in spec.sweep_values:
            cfg, ris = spec.setup_for_value(value)
            results = _run_many(spec, cfg, ris, threads)
            for alg in spec.algorithms:
                rates = np.array([r[0][alg] for r in results])
                wall = float(np.mean([r[1][alg] for r in results]))
                row = SweepRow(
                    sweep_value=float(value),
                    algorithm=alg,
                    mean_rate_bpshz=float(rates.mean()),
                    std_rate=float(rates.std()),
                    n_real=len(rates),
                    wall_ms=wall,
                )
                rows.append(row)
                if fh is not None:
                    fh.write(row.to_csv() + "\n")
            if fh is not None:
                fh.flush()
    finally:
        if fh is not None:
            fh.close()
    return SweepResult(spec.sweep_kind, rows)


def _pad_to(arr: np.ndarray, length: int) -> np.ndarray:
    if arr.size >= length:
        return arr[:length]
    return np.concatenate([arr, np.full(length - arr.size, arr[-1])])


def run_convergence(spec: ExperimentSpec, out_path=None, threads: int = 1) -> dict:
    """Record incumbent rate versus iteration, averaged over realizations.

    Gradient methods report inner iterations (running-best rate of the
    quantized incumbent); the alternating loop reports outer iterations.
    Curves shorter than the longest one are padded with their final value.
    """
    cfg, ris = spec.setup_for_value(spec.sweep_values[0] if spec.sweep_values else 0)
    algorithms = [a for a in spec.algorithms if a in ("a_gd", "c_gd", "ao")]
    seeds = _realization_seeds(spec.master_seed, spec.realizations)
    template = ris.template(cfg.n_ris)

    def one(args):
        idx, seed = args
        rng = np.random.default_rng(seed)
        h1, _ = generate_channel(cfg, "bs_ris", rng)
        h2, _ = generate_channel(cfg, "ris_ms", rng)
        curves = {}
        if "a_gd" in algorithms:
            curves["a_gd"] = a_gd_optimize(
                h1, h2, cfg, template, max_iter=spec.a_gd_iters, collect_rates=True
            ).rate_history
        if "c_gd" in algorithms:
            curves["c_gd"] = c_gd_optimize(
                h1, h2, cfg, template, max_iter=spec.c_gd_iters, collect_rates=True
            ).rate_history
        if "ao" in algorithms:
            curves["ao"] = ao_optimize(
                h1, h2, cfg, template, max_outer=spec.ao_max_outer, tol=spec.ao_tol
            ).rate_history
        return curves

    work = list(enumerate(seeds))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_real = list(pool.map(one, work))
    else:
        per_real = [one(w) for w in work]

    mean_curves = {}
    for alg in algorithms:
        length = max(c[alg].size for c in per_real)
        stacked = np.vstack([_pad_to(np.asarray(c[alg], dtype=float), length) for c in per_real])
        mean_curves[alg] = stacked.mean(axis=0)

    if out_path is not None:
        with open(out_path, "w", newline="") as fh:
            fh.write(CONVERGENCE_CSV_HEADER + "\n")
            for alg in algorithms:
                for i, rate in enumerate(mean_curves[alg]):
                    fh.write(f"{i},{alg},{_fmt(float(rate))}\n")
    return mean_curves


def run_complexity(spec: ExperimentSpec, out_path=None) -> list:
    """Evaluate the closed-form costs over the element-count grid."""
    rows = []
    for n_ris in spec.sweep_values:
        model = CostModel(
            n_bs=spec.base.n_bs,
            n_ms=spec.base.n_ms,
            n_ris=int(n_ris),
            m_bs=spec.base.m_bs,
            n_s=spec.base.n_s,
            b=spec.ris.b,
            i_a=spec.a_gd_iters,
            i_c=spec.c_gd_iters,
        )
        ao = cost_ao(model)
        cgd = cost_c_gd(model)
        agd = cost_a_gd(model)
        rows.append((int(n_ris), ao, cgd, agd))
    if out_path is not None:
        with open(out_path, "w", newline="") as fh:
            fh.write(COMPLEXITY_CSV_HEADER + "\n")
            for n_ris, ao, cgd, agd in rows:
                fh.write(
                    f"{n_ris},{ao},{cgd},{agd},"
                    f"{_fmt(math.log10(ao))},{_fmt(math.log10(cgd))},{_fmt(math.log10(agd))}\n"
                )
    return rows


def run_desk_suite(out_dir, master_seed: int = 20240, threads: int = 1,
                   realizations: Optional[int] = None) -> list:
    """Run every sweep kind at desk scale, one CSV per sweep.

    Returns the list of written paths.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for kind in SWEEP_KINDS:
        overrides = dict(sweep_kind=kind, master_seed=master_seed)
        if realizations is not None:
            overrides["realizations"] = realizations
        spec = desk_spec(**overrides)
        path = out / f"{kind}.csv"
        if kind == "convergence":
            run_convergence(spec, out_path=path, threads=threads)
        elif kind == "complexity":
            run_complexity(spec, out_path=path)
        else:
            run_sweep(spec, out_path=path, threads=threads)
        paths.append(path)
    return paths
