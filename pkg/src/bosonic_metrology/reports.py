"""Dataset builders behind the CLI: the five-parameter summary table, the
frequency and temperature comparison figures, single bound/strategy
evaluations, deterministic CSV/JSON/SVG writers and the run manifest.

All computations run in loss-rate units (gamma = 1 defines the time
scale), so every emitted number is dimensionless or in powers of gamma as
annotated in the column headers.  The gamma supplied in the configuration
is recorded in the metadata for converting back to absolute units.
"""

from __future__ import annotations

import dataclasses
import json
import math
import platform
import time as _time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import (
    hnls_test,
    noise_rate_bound,
    passive_temperature_bounds,
    rate_bound,
    reference_bound_constant,
    reference_classical_constant,
)
from .cat import protocol_qfi, protocol_rate_optimum
from .core import (
    GaussianState,
    ParameterTag,
    build_fock_space,
    default_cutoff,
    make_gaussian,
    model_for_target,
)
from .fock import (
    ChannelSpec,
    classical_fisher,
    parity_fisher_squeezed_vacuum,
    squeezed_cutoff,
    thermal_env_cutoff,
    thermal_mix_distribution,
)
from .gaussian import homodyne_snr, optimize_iteration_time

AUDIT_SLACK = 1e-6


class AuditError(RuntimeError):
    """A post-emission consistency audit failed (numerical failure)."""


class PhysicsInfeasibleError(RuntimeError):
    """The requested quantity is degenerate at the given parameters."""


class StrategyLookupError(ValueError):
    """Unknown strategy name; the message lists the available ones."""


# --------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    """Validated inputs of one CLI run.

    Times are dimensionless (units of ``1/gamma``); ``t_min``/``t_max``/
    ``t_points`` left as ``None`` pick per-command defaults.
    """

    target: ParameterTag | None = None
    gamma: float = 1.0
    n_env: float = 0.1
    photons: float = 5.0
    t_min: float | None = None
    t_max: float | None = None
    t_points: int | None = None
    t_scale: str = "log"
    cutoff: int | None = None
    outdir: str = "."
    formats: tuple[str, ...] = ("csv", "json")
    seed: int = 7041
    strategy: str | None = None
    time: float | None = None

    def __post_init__(self):
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.n_env < 0:
            raise ValueError(f"n_env must be >= 0, got {self.n_env}")
        if self.photons < 0:
            raise ValueError(f"photons must be >= 0, got {self.photons}")
        if self.t_scale not in ("log", "linear"):
            raise ValueError(f"t_scale must be log or linear: {self.t_scale}")
        if self.t_points is not None and self.t_points < 2:
            raise ValueError("time grid needs at least 2 points")
        if self.t_min is not None and self.t_max is not None \
                and not (0 < self.t_min < self.t_max):
            raise ValueError("need 0 < t_min < t_max")
        if not self.formats:
            raise ValueError("at least one output format is required")
        bad = set(self.formats) - {"csv", "json", "svg"}
        if bad:
            raise ValueError(f"unknown output formats: {sorted(bad)}")
        if self.cutoff is not None and self.cutoff < 2:
            raise ValueError("cutoff must be >= 2")
        if self.time is not None and self.time <= 0:
            raise ValueError("time must be positive")

    def grid(self, default_min: float, default_max: float,
             default_points: int) -> np.ndarray:
        lo = self.t_min if self.t_min is not None else default_min
        hi = self.t_max if self.t_max is not None else default_max
        n = self.t_points if self.t_points is not None else default_points
        if not (0 < lo < hi):
            raise ValueError("need 0 < t_min < t_max")
        if self.t_scale == "log":
            return np.geomspace(lo, hi, n)
        return np.linspace(lo, hi, n)


@dataclass
class Dataset:
    """Rows of keyed values plus metadata; the unit of each key sits in
    ``meta['units']``."""

    name: str
    keys: list[str]
    rows: list[dict]
    meta: dict = field(default_factory=dict)


def _base_meta(cfg: RunConfig, units: dict) -> dict:
    return {"units": units, "photons": cfg.photons, "n_env": cfg.n_env,
            "gamma": cfg.gamma}


# --------------------------------------------------------------------------
# probes
# --------------------------------------------------------------------------


def _probe(target: ParameterTag, name: str, photons: float) -> GaussianState:
    n = photons
    if name == "coherent":
        if target is ParameterTag.FREQUENCY:
            return make_gaussian(1j * math.sqrt(n), 0.0)
        if target is ParameterTag.DISPLACEMENT:
            return make_gaussian(0.0, 0.0)
        return make_gaussian(math.sqrt(n), 0.0)  # loss: x-displaced
    if name == "squeezed":
        if target is ParameterTag.DISPLACEMENT:
            return make_gaussian(0.0, math.asinh(math.sqrt(n)))
        r = math.asinh(math.sqrt(n / 2.0))
        alpha = math.sqrt(n / 2.0)
        if target is ParameterTag.FREQUENCY:
            return make_gaussian(1j * alpha, r)
        return make_gaussian(alpha, r)  # loss: same axis as displacement
    raise StrategyLookupError(f"no Gaussian probe named {name!r}")


STRATEGIES = {
    ParameterTag.FREQUENCY: ("coherent", "squeezed"),
    ParameterTag.DISPLACEMENT: ("coherent", "squeezed"),
    ParameterTag.LOSS: ("coherent", "squeezed", "parity"),
    ParameterTag.TEMPERATURE: ("fock",),
    ParameterTag.SQUEEZING: ("cat",),
}


# --------------------------------------------------------------------------
# summary table
# --------------------------------------------------------------------------


def _classical_optimum(target: ParameterTag, cfg: RunConfig
                       ) -> tuple[float, float] | None:
    """(t_star, rate_star) of the best simple coherent/vacuum strategy,
    in loss-rate units."""
    n_env, n_ph = cfg.n_env, cfg.photons
    if target is ParameterTag.SQUEEZING:
        return None
    if target is ParameterTag.TEMPERATURE:
        if n_env == 0:
            return None
        # vacuum probe + photon counting; the rate supremum sits at t -> 0
        # and is read off at a short anchor time
        t_anchor = 1e-4
        fi = _counting_fisher(0, t_anchor, n_env)
        return t_anchor, fi / t_anchor
    model = model_for_target(target, gamma=1.0, n_env=n_env)
    probe = _probe(target, "coherent", n_ph)
    return optimize_iteration_time(probe, model)


def summary_table(cfg: RunConfig) -> Dataset:
    """Five-row comparison of the best simple strategy against the quantum
    bound, with the published large-N constants alongside."""
    keys = ["target", "classical_rate", "classical_t_star", "quantum_bound",
            "ratio", "reference_classical", "reference_bound", "note"]
    rows = []
    order = [ParameterTag.FREQUENCY, ParameterTag.DISPLACEMENT,
             ParameterTag.SQUEEZING, ParameterTag.LOSS,
             ParameterTag.TEMPERATURE]
    for target in order:
        note = ""
        model = model_for_target(target, gamma=1.0, n_env=cfg.n_env)
        report = rate_bound(model, cfg.photons)
        bound = None if report.unbounded else report.rate_bound
        if report.unbounded:
            note = "; ".join(report.notes) or "unbounded"
        classical = _classical_optimum(target, cfg)
        if classical is None:
            c_t = c_rate = None
            if target is ParameterTag.SQUEEZING:
                note = (note + "; " if note else "") + \
                    "no classical strategy (the drive itself is nonclassical)"
        else:
            c_t, c_rate = classical
        ratio = c_rate / bound if (c_rate is not None and bound) else None
        ref_c = reference_classical_constant(target, cfg.photons, 1.0,
                                             cfg.n_env)
        ref_b = reference_bound_constant(target, cfg.photons, 1.0, cfg.n_env)
        rows.append({
            "target": target.value,
            "classical_rate": c_rate,
            "classical_t_star": c_t,
            "quantum_bound": bound,
            "ratio": ratio,
            "reference_classical": (None if ref_c is None
                                    or not math.isfinite(ref_c) else ref_c),
            "reference_bound": (None if not math.isfinite(ref_b)
                                else ref_b),
            "note": note,
        })
    # information-rate dimensions differ per row, so the rate columns are
    # annotated generically as loss-rate units
    units = {"classical_rate": "gamma-units",
             "classical_t_star": "1/gamma",
             "quantum_bound": "gamma-units",
             "reference_classical": "gamma-units",
             "reference_bound": "gamma-units"}
    return Dataset(name="table", keys=keys, rows=rows,
                   meta=_base_meta(cfg, units))


# --------------------------------------------------------------------------
# figures
# --------------------------------------------------------------------------


def frequency_figure(cfg: RunConfig) -> Dataset:
    """SNR of coherent and split squeezed/displaced probes against the
    quadratic and linear frequency bounds on a log time grid."""
    if cfg.target not in (None, ParameterTag.FREQUENCY):
        raise ValueError("frequency figure requires target=frequency")
    n_env, n_ph = cfg.n_env, cfg.photons
    model = model_for_target(ParameterTag.FREQUENCY, gamma=1.0, n_env=n_env)
    probe_c = _probe(ParameterTag.FREQUENCY, "coherent", n_ph)
    probe_s = _probe(ParameterTag.FREQUENCY, "squeezed", n_ph)
    grid = cfg.grid(1e-3, 10.0, 200)

    lin_rate = rate_bound(model, n_ph).rate_bound  # 4 <a(h*)>
    var_cap = 2.0 * n_ph * (n_ph + 1.0)  # Gaussian-state variance cap
    rows = []
    for u in grid:
        rows.append({
            "t": u,
            "snr_coherent": homodyne_snr(probe_c, model, u).snr,
            "snr_squeezed": homodyne_snr(probe_s, model, u).snr,
            "bound_quadratic": 4.0 * u * u * var_cap,
            "bound_linear": lin_rate * u,
        })
    units = {"t": "1/gamma", "snr_coherent": "1/gamma^2",
             "snr_squeezed": "1/gamma^2", "bound_quadratic": "1/gamma^2",
             "bound_linear": "1/gamma^2"}
    meta = _base_meta(cfg, units)
    meta["crossover_time"] = lin_rate / (4.0 * var_cap)
    meta["energy_split"] = {
        "coherent": n_ph,
        "squeezed": {"displacement": n_ph / 2.0,
                     "squeeze_photons": n_ph / 2.0},
    }
    ds = Dataset(name="figure-frequency",
                 keys=["t", "snr_coherent", "snr_squeezed",
                       "bound_quadratic", "bound_linear"],
                 rows=rows, meta=meta)
    _audit_dominance(ds, strategies=("snr_coherent", "snr_squeezed"),
                     bounds=("bound_quadratic", "bound_linear"))
    return ds


def _counting_fisher(n_in: int, u: float, n_env: float) -> float:
    spec = ChannelSpec(kappa=math.exp(-u), n_env=n_env,
                       env_cutoff=thermal_env_cutoff(n_env))
    return classical_fisher(thermal_mix_distribution(n_in, spec))


def temperature_figure(cfg: RunConfig) -> Dataset:
    """Passive Fock-probe information and the fast-repetition strategy
    against the passive and any-strategy temperature bounds."""
    if cfg.target not in (None, ParameterTag.TEMPERATURE):
        raise ValueError("temperature figure requires target=temperature")
    n_env = cfg.n_env
    if n_env <= 0:
        raise PhysicsInfeasibleError(
            "temperature estimation is degenerate at n_env = 0"
        )
    n_in = int(round(cfg.photons))
    model = model_for_target(ParameterTag.TEMPERATURE, gamma=1.0,
                             n_env=n_env)
    lin_rate = noise_rate_bound(model, float(n_in)).rate_bound
    u_fast = 1.0 / (10.0 * max(n_in, 1))
    fast_rate = _counting_fisher(n_in, u_fast, n_env) / u_fast
    grid = cfg.grid(1e-3, 50.0, 120)
    rows = []
    for u in grid:
        single, purif = passive_temperature_bounds(n_env, float(n_in),
                                                   math.exp(-u))
        rows.append({
            "t": u,
            "bound_single_shot": single,
            "bound_purification": purif,
            "bound_linear": lin_rate * u,
            "fi_passive_fock": _counting_fisher(n_in, u, n_env),
            "fi_fast_protocol": fast_rate * u,
        })
    units = {"t": "1/gamma", "bound_single_shot": "1",
             "bound_purification": "1", "bound_linear": "1",
             "fi_passive_fock": "1", "fi_fast_protocol": "1"}
    meta = _base_meta(cfg, units)
    meta["photons"] = n_in
    meta["single_sensing_time"] = u_fast
    meta["fast_protocol_rate"] = fast_rate
    ds = Dataset(name="figure-temperature",
                 keys=["t", "bound_single_shot", "bound_purification",
                       "bound_linear", "fi_passive_fock",
                       "fi_fast_protocol"],
                 rows=rows, meta=meta)
    # the passive probe must respect every emitted bound; the repeated
    # protocol performs measurements in between, so only the any-strategy
    # linear bound constrains it
    _audit_dominance(ds, strategies=("fi_passive_fock",),
                     bounds=("bound_single_shot", "bound_purification",
                             "bound_linear"))
    _audit_dominance(ds, strategies=("fi_fast_protocol",),
                     bounds=("bound_linear",))
    return ds


def _audit_dominance(ds: Dataset, strategies, bounds) -> None:
    """Every emitted strategy point must stay below the binding bound."""
    worst = 0.0
    for row in ds.rows:
        limit = min(row[b] for b in bounds)
        for s in strategies:
            worst = max(worst, row[s] - limit)
    ds.meta.setdefault("audit_max_excess", 0.0)
    ds.meta["audit_max_excess"] = max(ds.meta["audit_max_excess"], worst)
    if worst > AUDIT_SLACK:
        raise AuditError(
            f"{ds.name}: strategy exceeds an emitted bound by {worst:.3e}"
        )


# --------------------------------------------------------------------------
# single bound / strategy evaluations
# --------------------------------------------------------------------------


def bound_dataset(cfg: RunConfig) -> Dataset:
    if cfg.target is None:
        raise ValueError("bound evaluation requires a target")
    if cfg.target is ParameterTag.TEMPERATURE and cfg.n_env == 0:
        raise PhysicsInfeasibleError(
            "temperature bound diverges at n_env = 0"
        )
    model = model_for_target(cfg.target, gamma=1.0, n_env=cfg.n_env)
    report = rate_bound(model, cfg.photons)
    row = {
        "target": cfg.target.value,
        "rate_bound": None if report.unbounded else report.rate_bound,
        "tau": report.tau,
        "unbounded": report.unbounded,
        "note": "; ".join(report.notes),
    }
    for key, val in sorted(report.components.items()):
        row[key] = None if not math.isfinite(val) else val
    keys = list(row.keys())
    units = {"rate_bound": "gamma-units", "tau": "1/gamma"}
    meta = _base_meta(cfg, units)
    if cfg.target.is_hamiltonian:
        space = build_fock_space(cfg.cutoff or default_cutoff(cfg.photons))
        meta["hnls"] = bool(hnls_test(model, space))
    return Dataset(name=f"bound-{cfg.target.value}", keys=keys, rows=[row],
                   meta=meta)


def strategy_dataset(cfg: RunConfig) -> Dataset:
    """Evaluate one named strategy; series over the time grid, or a single
    point when ``time`` is set (parity is always single-point)."""
    if cfg.target is None:
        raise ValueError("strategy evaluation requires a target")
    available = STRATEGIES[cfg.target]
    name = cfg.strategy
    if name not in available:
        raise StrategyLookupError(
            f"unknown strategy {name!r} for target {cfg.target.value}; "
            f"available: {', '.join(available)}"
        )
    n_env, n_ph = cfg.n_env, cfg.photons

    if name == "parity":
        model = model_for_target(ParameterTag.LOSS, gamma=1.0, n_env=n_env)
        r = math.asinh(math.sqrt(n_ph))
        u = cfg.time if cfg.time is not None else 1e-3 / (
            n_ph * (1.0 + n_env))
        space = build_fock_space(cfg.cutoff or squeezed_cutoff(r))
        res = parity_fisher_squeezed_vacuum(r, model, u, space)
        units = {"t": "1/gamma", "fisher": "1/gamma^2", "rate": "1/gamma",
                 "prediction": "1/gamma^2"}
        meta = _base_meta(cfg, units)
        meta.update(strategy=name, probe_photons=res.probe_photons)
        row = {"t": u, "fisher": res.fisher, "rate": res.fisher / u,
               "prediction": res.short_time_prediction, "p_odd": res.p_odd}
        return Dataset(name="strategy-loss-parity",
                       keys=["t", "fisher", "rate", "prediction", "p_odd"],
                       rows=[row], meta=meta)

    if name == "fock":
        if n_env <= 0:
            raise PhysicsInfeasibleError(
                "temperature estimation is degenerate at n_env = 0"
            )
        n_in = int(round(n_ph))
        grid = (np.array([cfg.time]) if cfg.time is not None
                else cfg.grid(1e-3, 20.0, 120))
        rows = []
        for u in grid:
            fi = _counting_fisher(n_in, u, n_env)
            rows.append({"t": u, "fisher": fi, "rate": fi / u})
        units = {"t": "1/gamma", "fisher": "1", "rate": "gamma"}
        meta = _base_meta(cfg, units)
        meta.update(strategy=name, photons=n_in)
        return Dataset(name="strategy-temperature-fock",
                       keys=["t", "fisher", "rate"], rows=rows, meta=meta)

    if name == "cat":
        grid = (np.array([cfg.time]) if cfg.time is not None
                else cfg.grid(1e-3, 20.0, 120))
        margin_coeff = math.sqrt(4.0 * n_ph + 2.0)
        rows = [{"t": u,
                 "qfi": protocol_qfi(n_ph, 1.0, u),
                 "rate": protocol_qfi(n_ph, 1.0, u) / u,
                 "validity_margin_per_drive": u * margin_coeff}
                for u in grid]
        t_star, rate_star = protocol_rate_optimum(n_ph, 1.0)
        units = {"t": "1/gamma", "qfi": "1/gamma^2", "rate": "1/gamma",
                 "validity_margin_per_drive": "1/drive[gamma]"}
        meta = _base_meta(cfg, units)
        meta.update(strategy=name)
        meta["optimum"] = {
            "t": t_star, "rate": rate_star,
            "rate_over_photons_squared": (rate_star / n_ph ** 2
                                          if n_ph else None),
        }
        # the two-level description needs drive * margin << 1
        meta["validity_time_limit_per_unit_drive"] = 0.1 / margin_coeff
        return Dataset(name="strategy-squeezing-cat",
                       keys=["t", "qfi", "rate",
                             "validity_margin_per_drive"],
                       rows=rows, meta=meta)

    # Gaussian homodyne strategies
    model = model_for_target(cfg.target, gamma=1.0, n_env=n_env)
    probe = _probe(cfg.target, name, n_ph)
    grid = (np.array([cfg.time]) if cfg.time is not None
            else cfg.grid(1e-3, 20.0, 120))
    rows = []
    for u in grid:
        res = homodyne_snr(probe, model, u)
        rows.append({"t": u, "snr": res.snr, "rate": res.rate})
    t_star, rate_star = optimize_iteration_time(probe, model)
    units = {"t": "1/gamma", "snr": "1/gamma^2", "rate": "1/gamma"}
    meta = _base_meta(cfg, units)
    meta.update(strategy=name)
    meta["optimum"] = {"t": t_star, "rate": rate_star}
    return Dataset(name=f"strategy-{cfg.target.value}-{name}",
                   keys=["t", "snr", "rate"], rows=rows, meta=meta)


# --------------------------------------------------------------------------
# writers and manifest
# --------------------------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    return str(value)


def write_csv(ds: Dataset, path: Path) -> None:
    units = ds.meta.get("units", {})
    header = ",".join(
        f"{k}[{units[k]}]" if k in units else k for k in ds.keys)
    lines = [header]
    for row in ds.rows:
        lines.append(",".join(_fmt(row.get(k)) for k in ds.keys))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"not JSON-serializable: {type(obj)}")


def write_json(ds: Dataset, path: Path) -> None:
    payload = {"name": ds.name, "keys": ds.keys, "rows": ds.rows,
               "meta": ds.meta}
    path.write_text(
        json.dumps(payload, indent=2, sort_keys=True, default=_jsonable)
        + "\n",
        encoding="utf-8",
    )


def write_svg(ds: Dataset, path: Path) -> None:
    """Thin rendering layer over the dataset; no computation of its own."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "bosonic-metrology"
    xkey = ds.keys[0]
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for key in ds.keys[1:]:
        xs, ys = [], []
        for row in ds.rows:
            x, y = row.get(xkey), row.get(key)
            if isinstance(x, (int, float)) and isinstance(y, (int, float)) \
                    and math.isfinite(y):
                xs.append(x)
                ys.append(y)
        if len(xs) > 1:
            ax.plot(xs, ys, label=key)
    positive = [row[k] for row in ds.rows for k in ds.keys[1:]
                if isinstance(row.get(k), (int, float)) and row[k] > 0]
    if len(ds.rows) > 1 and positive:
        ax.set_xscale("log")
        ax.set_yscale("log")
    unit = ds.meta.get("units", {}).get(xkey)
    ax.set_xlabel(f"{xkey} [{unit}]" if unit else xkey)
    ax.set_title(ds.name)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def write_outputs(ds: Dataset, outdir: Path, stamp: str,
                  formats: tuple[str, ...]) -> list[Path]:
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for fmt in formats:
        if fmt == "svg" and len(ds.rows) < 2:
            continue  # nothing to draw for single-row outputs
        path = outdir / f"{ds.name}-{stamp}.{fmt}"
        {"csv": write_csv, "json": write_json, "svg": write_svg}[fmt](
            ds, path)
        written.append(path)
    return written


def write_manifest(outdir: Path, command: str, cfg: RunConfig,
                   outputs: list[Path], wall_time_s: float,
                   extra: dict | None = None) -> Path:
    cfg_dict = dataclasses.asdict(cfg)
    cfg_dict["target"] = cfg.target.value if cfg.target else None
    cfg_dict["formats"] = list(cfg.formats)
    manifest = {
        "command": command,
        "config": cfg_dict,
        "seed": cfg.seed,
        "outputs": [str(p) for p in outputs],
        "wall_time_s": wall_time_s,
        "versions": {
            "package": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
        },
    }
    if extra:
        manifest.update(extra)
    path = outdir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True,
                               default=_jsonable) + "\n", encoding="utf-8")
    return path


def stamp_now() -> str:
    return _time.strftime("%Y%m%dT%H%M%S", _time.gmtime()) + \
        f"{_time.time() % 1:.6f}"[1:]
