"""Scenario orchestration: configures, executes, parallelizes and persists
the six numerical experiments (spectrum, transmit, sweep, resonances,
asymmetric, bragg-table).

All physics runs in the reduced unit system (lengths in barrier widths,
energies in barrier heights); SI values appear in configs and output files.
Sweep points execute on a process pool; the reduction is order-fixed, so a
run is bit-reproducible for any worker count.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
import traceback
from dataclasses import asdict, dataclass, field
from multiprocessing import Pool, get_context
from pathlib import Path

import numpy as np

from . import svgplot
from .grid import build_grid
from .model import InvalidParameterError, ModelParams, Scales, make_scales
from .potentials import cavity_potential, triangular_eigenenergies
from .propagator import evolve, evolve_until_scattered, suggest_dt
from .resonances import find_resonances, track_vs_gravity
from .scattering import transmission_spectrum
from .sensing import bragg_rabi, project, rel_uncertainty_minus, rel_uncertainty_right
from .wavepackets import gaussian_packet, symmetric_superposition

ARTIFACT_VERSION = "mwfpi-0.1.0"
SCENARIOS = ("spectrum", "transmit", "sweep", "resonances", "asymmetric", "bragg-table")


class ConfigError(ValueError):
    """The scenario configuration is invalid."""


def _axis(spec) -> np.ndarray:
    """Materialize an axis given either a list or {start, stop, num}."""
    if isinstance(spec, dict):
        return np.linspace(float(spec["start"]), float(spec["stop"]), int(spec["num"]))
    arr = np.asarray(spec, dtype=float)
    if arr.ndim == 0:
        arr = arr[None]
    return arr


def default_config(scenario: str) -> dict:
    """Built-in desk-scale configuration for a scenario."""
    base = {
        "scenario": scenario,
        "params": json.loads(ModelParams().to_json()),
        "grid": {"z_min_m": -1.5e-3, "z_max_m": 1.5e-3, "n_points": 8192},
        "solver": {
            "dt_s": None,
            "t_cap_s": 1.0,
            "theta_rad": 0.15,
            "basis_size": 512,
            "spectrum_tol": 1e-6,
        },
        "sweep": {},
        "output_dir": "mwfpi-out",
        "workers": None,
        "emit_svg": True,
    }
    if scenario == "spectrum":
        base["sweep"] = {"energy_over_vb": {"start": 0.005, "stop": 1.3, "num": 2000}}
    elif scenario == "transmit":
        base["sweep"] = {"energy_over_vb": [0.6]}
    elif scenario == "sweep":
        base["sweep"] = {
            "g_m_s2": {"start": -2e-3, "stop": 2e-3, "num": 30},
            "energy_over_vb": {"start": 0.05, "stop": 1.3, "num": 30},
        }
    elif scenario == "resonances":
        base["sweep"] = {"g_m_s2": {"start": -2e-3, "stop": 2e-3, "num": 13}}
    elif scenario == "asymmetric":
        base["params"]["packet_width_m"] = 3e-6
        base["params"]["packet_center_m"] = 0.0
        base["grid"] = {"z_min_m": -3e-3, "z_max_m": 3e-3, "n_points": 16384}
        base["sweep"] = {
            # linear-response tilt range; T_- saturates well below 1 mm/s^2
            "g_m_s2": {"start": -2e-4, "stop": 2e-4, "num": 13},
            "kick_energy_over_vb": {"start": 0.05, "stop": 1.0, "num": 12},
        }
    elif scenario == "bragg-table":
        base["sweep"] = {}
    else:
        raise ConfigError(f"unknown scenario {scenario!r}; choose from {SCENARIOS}")
    return base


@dataclass
class ScenarioConfig:
    scenario: str
    params: ModelParams
    grid: dict
    sweep: dict
    solver: dict
    output_dir: str
    workers: int = 1
    emit_svg: bool = True

    @classmethod
    def from_dict(cls, raw: dict) -> "ScenarioConfig":
        scenario = raw.get("scenario")
        if scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {scenario!r}; choose from {SCENARIOS}")
        merged = default_config(scenario)
        for key in ("grid", "solver", "sweep", "params"):
            if key in raw:
                merged[key] = {**merged[key], **raw[key]}
        for key in ("output_dir", "workers", "emit_svg"):
            if key in raw and raw[key] is not None:
                merged[key] = raw[key]
        try:
            params = ModelParams.from_json(json.dumps(merged["params"]))
        except (TypeError, InvalidParameterError) as exc:
            raise ConfigError(f"bad params: {exc}") from exc
        workers = merged["workers"]
        if workers is None:
            workers = int(os.environ.get("MWFPI_WORKERS", "1"))
        if workers < 1:
            raise ConfigError("workers must be >= 1")
        cfg = cls(
            scenario=scenario,
            params=params,
            grid=merged["grid"],
            sweep=merged["sweep"],
            solver=merged["solver"],
            output_dir=str(merged["output_dir"]),
            workers=int(workers),
            emit_svg=bool(merged["emit_svg"]),
        )
        cfg.validate()
        return cfg

    def validate(self):
        needed = {
            "spectrum": ["energy_over_vb"],
            "transmit": ["energy_over_vb"],
            "sweep": ["g_m_s2", "energy_over_vb"],
            "resonances": ["g_m_s2"],
            "asymmetric": ["g_m_s2", "kick_energy_over_vb"],
            "bragg-table": [],
        }[self.scenario]
        for key in needed:
            axis = _axis(self.sweep.get(key, []))
            if axis.size == 0:
                raise ConfigError(f"scenario {self.scenario!r} needs sweep axis {key!r}")
            if axis.size > 1 and not np.all(np.diff(axis) > 0):
                raise ConfigError(f"sweep axis {key!r} must be strictly increasing")
        if self.scenario == "resonances" and not np.any(_axis(self.sweep["g_m_s2"]) == 0.0):
            raise ConfigError("resonances g grid must include 0")

    def snapshot(self) -> dict:
        return {
            "scenario": self.scenario,
            "params": json.loads(self.params.to_json()),
            "grid": self.grid,
            "sweep": self.sweep,
            "solver": self.solver,
            "output_dir": self.output_dir,
            "workers": self.workers,
            "emit_svg": self.emit_svg,
        }


@dataclass
class RunManifest:
    scenario: str
    config: dict
    version: str = ARTIFACT_VERSION
    points: list = field(default_factory=list)
    outputs: dict = field(default_factory=dict)
    wall_time_s: float = 0.0

    @property
    def failures(self) -> int:
        return sum(1 for p in self.points if p.get("status") == "error")

    def write(self, out_dir: Path) -> None:
        for name in sorted(os.listdir(out_dir)):
            path = out_dir / name
            if name == "manifest.json" or not path.is_file():
                continue
            self.outputs[name] = hashlib.sha256(path.read_bytes()).hexdigest()
        with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
            json.dump(asdict(self), fh, indent=2, allow_nan=True)


def parallel_map(fn, payloads, worker_count: int = 1):
    """Order-preserving map over independent points on a process pool.

    Every payload runs through the same wrapper in a pool process, so
    results (including their float bit patterns) do not depend on
    worker_count.  Exceptions are captured per point.
    """
    if worker_count < 1:
        raise InvalidParameterError("worker_count must be >= 1")
    payloads = list(payloads)
    if not payloads:
        return []
    try:
        pool_cls = get_context("fork").Pool
    except ValueError:  # platform without fork
        pool_cls = Pool
    with pool_cls(processes=min(worker_count, len(payloads))) as pool:
        return pool.map(_guarded_call, [(fn, p) for p in payloads], chunksize=1)


def _guarded_call(fn_payload):
    fn, payload = fn_payload
    start = time.perf_counter()
    try:
        value = fn(payload)
        return {"status": "ok", "value": value, "wall_time_s": time.perf_counter() - start}
    except Exception as exc:
        return {
            "status": "error",
            "error": f"{type(exc).__name__}: {exc}",
            "trace": traceback.format_exc(limit=6),
            "wall_time_s": time.perf_counter() - start,
        }


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


# ----------------------------------------------------------------------
# reduced-unit setup shared by the wave-packet scenarios


def _reduced(cfg: ScenarioConfig):
    scales = make_scales(cfg.params)
    red = scales.reduce_params(cfg.params)
    g = cfg.grid
    grid_args = (
        scales.length(float(g["z_min_m"])),
        scales.length(float(g["z_max_m"])),
        int(g["n_points"]),
    )
    return scales, red, grid_args


def _transmit_case(red: ModelParams, grid_args, energy_ratio, gravity_red, solver, scales):
    """One wave-packet transmission run in reduced units -> observables dict."""
    grid = build_grid(*grid_args, hbar=1.0)
    p = red.with_(gravity=gravity_red)
    e0 = energy_ratio + p.mass * p.gravity * abs(p.packet_center)
    if e0 <= 0.0:
        return {"feasible": False, "energy_over_vb": float(energy_ratio)}
    p = p.with_(packet_momentum=float(np.sqrt(2.0 * p.mass * e0)))
    pot = cavity_potential(p, grid)
    psi0 = gaussian_packet(p, grid)
    dt = solver.get("dt_s")
    dt = scales.time(float(dt)) if dt else None
    t_cap = scales.time(float(solver.get("t_cap_s", 1.0)))
    record_moments = bool(solver.get("record_moments", False))
    psi, rec = evolve_until_scattered(
        psi0, pot, p, dt=dt, t_cap=t_cap, record_moments=record_moments
    )
    obs = project(psi, p)
    out = {
        "feasible": True,
        "energy_over_vb": float(energy_ratio),
        "t_r": obs.transmitted_right,
        "t_l": obs.transmitted_left,
        "t_plus": obs.total,
        "t_minus": obs.asymmetry,
        "var_t_r": obs.var_right,
        "stop_reason": rec.stop_reason,
        "converged": rec.converged,
        "stop_time_s": scales.time_si(rec.times[-1]),
    }
    if record_moments:
        p_unit = scales.hbar / scales.length_unit
        out["moments_si"] = np.column_stack(
            [
                scales.time_si(rec.moment_times),
                rec.mean_momentum * p_unit,
                rec.momentum_width * p_unit,
            ]
        )
    return out


def _transmit_point(payload):
    red, grid_args, eps, g_red, solver, scales = payload
    return _transmit_case(red, grid_args, eps, g_red, solver, scales)


def _asym_point(payload):
    """One intra-cavity run; returns T_+/- time series so the driver can
    evaluate every sweep point at a common measurement time."""
    red, grid_args, kick_eps, g_red, solver, scales, t_end = payload
    grid = build_grid(*grid_args, hbar=1.0)
    p = red.with_(gravity=g_red)
    p = p.with_(packet_momentum=float(np.sqrt(2.0 * p.mass * kick_eps)))
    pot = cavity_potential(p, grid)
    psi0 = symmetric_superposition(p, grid)
    dt = solver.get("dt_s")
    dt = scales.time(float(dt)) if dt else suggest_dt(p, grid, pot)
    _, rec = evolve(
        psi0,
        pot,
        p.mass,
        dt,
        t_end,
        stop_at_edge=True,
        cavity_bounds=(p.z_minus, p.z_plus),
    )
    return {
        "kick_energy_over_vb": float(kick_eps),
        "times": rec.times,
        "t_plus_series": rec.left_fraction + rec.right_fraction,
        "t_minus_series": rec.left_fraction - rec.right_fraction,
        "stop_time": float(rec.times[-1]),
    }


def _resonance_kwargs(solver, red):
    kw = {
        "theta": float(solver.get("theta_rad", 0.15)),
        "basis_size": int(solver.get("basis_size", 512)),
    }
    margin = solver.get("box_margin_sigma")
    if margin is not None:
        kw["box"] = (red.z_minus - float(margin), red.z_plus + float(margin))
    return kw


def _resonance_point(payload):
    red, g_red, solver = payload
    res = find_resonances(red.with_(gravity=g_red), **_resonance_kwargs(solver, red))
    return [
        {
            "j": r.index,
            "e_r": r.energy,
            "gamma": r.width,
            "theta": r.theta,
            "plateau": r.plateau_width,
        }
        for r in res
    ]




# ----------------------------------------------------------------------
# scenario drivers


def run(config: ScenarioConfig | dict) -> RunManifest:
    """Execute a scenario and persist its outputs plus manifest.json."""
    if isinstance(config, dict):
        config = ScenarioConfig.from_dict(config)
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(scenario=config.scenario, config=config.snapshot())
    started = time.perf_counter()
    driver = {
        "spectrum": _run_spectrum,
        "transmit": _run_transmit,
        "sweep": _run_sweep,
        "resonances": _run_resonances,
        "asymmetric": _run_asymmetric,
        "bragg-table": _run_bragg_table,
    }[config.scenario]
    driver(config, out_dir, manifest)
    manifest.wall_time_s = time.perf_counter() - started
    manifest.write(out_dir)
    return manifest


def _run_spectrum(cfg: ScenarioConfig, out_dir: Path, manifest: RunManifest):
    scales, red, _ = _reduced(cfg)
    if cfg.params.gravity != 0.0:
        raise ConfigError("spectrum scenario requires g = 0 (plane-wave asymptotics)")
    ratios = _axis(cfg.sweep["energy_over_vb"])
    spec = transmission_spectrum(red, ratios, tol=float(cfg.solver.get("spectrum_tol", 1e-6)))
    write_csv(
        out_dir / "spectrum.csv",
        ["E_over_Vb", "tau_sq"],
        zip(spec.energies_over_barrier, spec.transmission),
    )
    with open(out_dir / "spectrum_meta.json", "w", encoding="utf-8") as fh:
        json.dump(
            {
                "n_steps": spec.n_steps,
                "converged": bool(spec.converged),
                "tolerance": float(cfg.solver.get("spectrum_tol", 1e-6)),
            },
            fh,
            indent=2,
        )
    manifest.points.append({"status": "ok", "n_energies": int(ratios.size)})
    if cfg.emit_svg:
        svgplot.line_plot(
            out_dir / "spectrum.svg",
            spec.energies_over_barrier,
            [spec.transmission],
            title="Cavity transmission spectrum",
            xlabel="E / V_b",
            ylabel="|tau|^2",
        )


def _sweep_points(cfg, g_values, e_values):
    scales, red, grid_args = _reduced(cfg)
    payloads = []
    for g in g_values:
        g_red = scales.gravity_tilt(g, cfg.params.mass) / red.mass
        for eps in e_values:
            payloads.append((red, grid_args, float(eps), float(g_red), cfg.solver, scales))
    return payloads


def _run_transmit(cfg: ScenarioConfig, out_dir: Path, manifest: RunManifest):
    e_values = _axis(cfg.sweep["energy_over_vb"])
    payloads = _sweep_points(cfg, [cfg.params.gravity], e_values)
    results = parallel_map(_transmit_point, payloads, cfg.workers)
    rows = []
    for k, (eps, res) in enumerate(zip(e_values, results)):
        manifest.points.append(_point_meta(res, g=cfg.params.gravity, e=float(eps)))
        rows.append(_transmit_row(cfg.params.gravity, eps, res))
        if res["status"] == "ok" and "moments_si" in res.get("value", {}):
            write_csv(
                out_dir / f"moments_{k}.csv",
                ["t_s", "mean_p_kg_m_s", "width_p_kg_m_s"],
                res["value"]["moments_si"],
            )
    write_csv(out_dir / "transmit.csv", _TRANSMIT_HEADER, rows)
    if cfg.emit_svg and e_values.size > 1:
        t_r = [r[2] if not isinstance(r[2], str) else np.nan for r in rows]
        svgplot.line_plot(
            out_dir / "transmit.svg",
            e_values,
            [t_r],
            title=f"Wave-packet transmission, g = {cfg.params.gravity} m/s^2",
            xlabel="E / V_b",
            ylabel="T_R",
        )


_TRANSMIT_HEADER = [
    "g_m_s2",
    "E_over_Vb",
    "T_R",
    "T_L",
    "T_plus",
    "T_minus",
    "var_T_R",
    "stop_reason",
    "converged",
    "stop_time_s",
]


def _transmit_row(g, eps, res):
    if res["status"] != "ok":
        return [g, float(eps), "nan", "nan", "nan", "nan", "nan", "error", False, "nan"]
    v = res["value"]
    if not v["feasible"]:
        return [g, float(eps), "nan", "nan", "nan", "nan", "nan", "infeasible", False, "nan"]
    return [
        g,
        float(eps),
        v["t_r"],
        v["t_l"],
        v["t_plus"],
        v["t_minus"],
        v["var_t_r"],
        v["stop_reason"],
        v["converged"],
        v["stop_time_s"],
    ]


def _point_meta(res, **ident):
    meta = dict(ident)
    meta["status"] = res["status"]
    meta["wall_time_s"] = res["wall_time_s"]
    if res["status"] == "ok":
        v = res["value"]
        if isinstance(v, dict):
            meta["stop_reason"] = v.get("stop_reason", "")
            meta["converged"] = v.get("converged", True)
            if not v.get("feasible", True):
                meta["status"] = "infeasible"
    else:
        meta["error"] = res["error"]
    return meta


def _run_sweep(cfg: ScenarioConfig, out_dir: Path, manifest: RunManifest):
    g_values = _axis(cfg.sweep["g_m_s2"])
    e_values = _axis(cfg.sweep["energy_over_vb"])
    payloads = _sweep_points(cfg, g_values, e_values)
    results = parallel_map(_transmit_point, payloads, cfg.workers)
    t_map = np.full((g_values.size, e_values.size), np.nan)
    rows = []
    for idx, res in enumerate(results):
        i, j = divmod(idx, e_values.size)
        manifest.points.append(_point_meta(res, g=float(g_values[i]), e=float(e_values[j])))
        rows.append(_transmit_row(float(g_values[i]), e_values[j], res))
        if res["status"] == "ok" and res["value"]["feasible"]:
            t_map[i, j] = res["value"]["t_r"]
    write_csv(out_dir / "transmit_map.csv", _TRANSMIT_HEADER, rows)
    if g_values.size < 3:
        return  # too few tilt samples for derivative maps

    map_rows = []
    for variant, include in (("full", True), ("intrinsic", False)):
        dg = rel_uncertainty_right(
            t_map,
            g_values,
            e_values * cfg.params.barrier_height,  # ratios -> absolute energies
            packet_center=cfg.params.packet_center,
            mass=cfg.params.mass,
            include_propagation=include,
        )
        for i, g in enumerate(g_values):
            for j, e in enumerate(e_values):
                t = t_map[i, j]
                sig = np.sqrt(max(t * (1.0 - t), 0.0)) if np.isfinite(t) else np.nan
                map_rows.append([g, e, t, sig, dg[i, j], variant])
        if cfg.emit_svg:
            svgplot.heatmap(
                out_dir / f"delta_g_{variant}.svg",
                e_values,
                g_values * 1e3,
                dg,
                title=f"sqrt(N nu) delta-g, {variant}",
                xlabel="E / V_b",
                ylabel="g [mm/s^2]",
                clip_percentile=75,
            )
    write_csv(
        out_dir / "sensitivity_map.csv",
        ["g_m_s2", "E_over_Vb", "T", "dT", "delta_g_scaled", "variant"],
        map_rows,
    )
    if cfg.emit_svg:
        svgplot.heatmap(
            out_dir / "transmission_map.svg",
            e_values,
            g_values * 1e3,
            t_map,
            title="T_R(g, E)",
            xlabel="E / V_b",
            ylabel="g [mm/s^2]",
        )


def _run_resonances(cfg: ScenarioConfig, out_dir: Path, manifest: RunManifest):
    scales, red, _ = _reduced(cfg)
    g_values = _axis(cfg.sweep["g_m_s2"])
    g_reds = np.array([scales.gravity_tilt(g, cfg.params.mass) / red.mass for g in g_values])
    payloads = [(red, g_red, cfg.solver) for g_red in g_reds]
    results = parallel_map(_resonance_point, payloads, cfg.workers)
    candidates = {}
    for g_si, g_red, res in zip(g_values, g_reds, results):
        manifest.points.append(_point_meta(res, g=float(g_si)))
        rows_g = res["value"] if res["status"] == "ok" else []
        candidates[float(g_red)] = np.array(
            [r["e_r"] - 0.5j * r["gamma"] for r in rows_g], dtype=complex
        )
    kw = _resonance_kwargs(cfg.solver, red)
    theta = kw["theta"]
    trajs = track_vs_gravity(red, g_reds, candidates_by_g=candidates, **kw)
    g_si_by_red = {float(gr): float(gs) for gr, gs in zip(g_reds, g_values)}
    rows = []
    for traj in trajs:
        manifest.points.append(
            {
                "status": "ok",
                "track_id": traj.track_id,
                "lost": traj.lost,
                "triangular_level_over_vb": traj.triangular_level,
                "triangular_distance_over_vb": traj.triangular_distance,
            }
        )
        for g_red, e_r, gam in zip(traj.gravities, traj.energies, traj.widths):
            rows.append([g_si_by_red[float(g_red)], traj.track_id, e_r, gam, theta, 0.2 * theta])
    rows.sort(key=lambda r: (r[0], r[1]))
    write_csv(
        out_dir / "resonances.csv",
        ["g_m_s2", "j", "Er_over_Vb", "Gamma_over_Vb", "theta_rad", "plateau_rad"],
        rows,
    )
    tri_rows = []
    for g in g_values:
        if g == 0.0:
            continue
        z_wall = red.z_minus if g > 0 else red.z_plus
        g_red = scales.gravity_tilt(abs(g), cfg.params.mass) / red.mass
        offset = red.mass * (g_red if g > 0 else -g_red) * z_wall
        levels = offset + triangular_eigenenergies(g_red, red.mass, 4, hbar=1.0)
        for n, lev in enumerate(levels):
            tri_rows.append([float(g), n + 1, float(lev)])
    write_csv(out_dir / "triangular.csv", ["g_m_s2", "n", "E_over_Vb"], tri_rows)
    if cfg.emit_svg and trajs:
        series_e, series_w = [], []
        for traj in trajs:
            by_g = dict(zip(traj.gravities, zip(traj.energies, traj.widths)))
            series_e.append([by_g.get(float(gr), (np.nan, np.nan))[0] for gr in g_reds])
            series_w.append([by_g.get(float(gr), (np.nan, np.nan))[1] for gr in g_reds])
        svgplot.line_plot(
            out_dir / "resonances_vs_g.svg",
            g_values * 1e3,
            series_e,
            title="Resonance energies vs gravity",
            xlabel="g [mm/s^2]",
            ylabel="E_r / V_b",
        )
        svgplot.line_plot(
            out_dir / "widths_vs_g.svg",
            g_values * 1e3,
            series_w,
            title="Resonance widths vs gravity",
            xlabel="g [mm/s^2]",
            ylabel="Gamma / V_b",
            logy=True,
        )


def _run_asymmetric(cfg: ScenarioConfig, out_dir: Path, manifest: RunManifest):
    scales, red, grid_args = _reduced(cfg)
    g_values = _axis(cfg.sweep["g_m_s2"])
    kicks = _axis(cfg.sweep["kick_energy_over_vb"])
    res0 = find_resonances(red, **_resonance_kwargs(cfg.solver, red))
    if len(res0) < 3:
        raise ConfigError("need at least three g = 0 resonances for the stop time")
    t_end = 2.0 / res0[2].width  # twice hbar/Gamma of the third resonance (hbar = 1)
    payloads = []
    for g in g_values:
        g_red = scales.gravity_tilt(g, cfg.params.mass) / red.mass
        for kick in kicks:
            payloads.append(
                (red, grid_args, float(kick), float(g_red), cfg.solver, scales, t_end)
            )
    results = parallel_map(_asym_point, payloads, cfg.workers)
    # evaluate all points at the common largest time every run reached (the
    # Gamma_2 stop time unless faint leak fronts hit the grid edge earlier)
    t_common = t_end
    for res in results:
        if res["status"] == "ok":
            t_common = min(t_common, res["value"]["stop_time"])
    tm = np.full((g_values.size, kicks.size), np.nan)
    tp = np.full((g_values.size, kicks.size), np.nan)
    rows = []
    for idx, res in enumerate(results):
        i, j = divmod(idx, kicks.size)
        manifest.points.append(_point_meta(res, g=float(g_values[i]), kick=float(kicks[j])))
        if res["status"] == "ok":
            v = res["value"]
            tp[i, j] = float(np.interp(t_common, v["times"], v["t_plus_series"]))
            tm[i, j] = float(np.interp(t_common, v["times"], v["t_minus_series"]))
            var = tp[i, j] - tm[i, j] ** 2
            rows.append([float(g_values[i]), float(kicks[j]), tp[i, j], tm[i, j], var])
        else:
            rows.append([float(g_values[i]), float(kicks[j]), "nan", "nan", "nan"])
    write_csv(
        out_dir / "asymmetric.csv",
        ["g_m_s2", "kick_E_over_Vb", "T_plus", "T_minus", "var_T_minus"],
        rows,
    )
    dg = rel_uncertainty_minus(tm, tp, g_values)
    map_rows = []
    for i, g in enumerate(g_values):
        for j, k in enumerate(kicks):
            var = tp[i, j] - tm[i, j] ** 2
            sig = np.sqrt(var) if np.isfinite(var) and var > 0 else np.nan
            map_rows.append([float(g), float(k), tm[i, j], sig, dg[i, j], "asymmetric"])
    write_csv(
        out_dir / "sensitivity_map.csv",
        ["g_m_s2", "E_over_Vb", "T", "dT", "delta_g_scaled", "variant"],
        map_rows,
    )
    with open(out_dir / "asymmetric_meta.json", "w", encoding="utf-8") as fh:
        json.dump(
            {
                "stop_time_s": scales.time_si(t_end),
                "common_measurement_time_s": scales.time_si(t_common),
            },
            fh,
            indent=2,
        )
    if cfg.emit_svg:
        svgplot.heatmap(
            out_dir / "asymmetry_map.svg",
            kicks,
            g_values * 1e3,
            tm,
            title="T_minus(g, kick)",
            xlabel="kick E / V_b",
            ylabel="g [mm/s^2]",
        )
        svgplot.heatmap(
            out_dir / "delta_g_asymmetric.svg",
            kicks,
            g_values * 1e3,
            dg,
            title="sqrt(N nu) delta-g, asymmetric",
            xlabel="kick E / V_b",
            ylabel="g [mm/s^2]",
            clip_percentile=75,
        )


def _run_bragg_table(cfg: ScenarioConfig, out_dir: Path, manifest: RunManifest):
    scales, red, _ = _reduced(cfg)
    res = find_resonances(red, **_resonance_kwargs(cfg.solver, red))
    rows = []
    si_rows = []
    for r in res:
        e_si = scales.energy_si(r.energy)
        gamma_si = scales.energy_si(r.width)
        omega = bragg_rabi(
            _si_resonance(r, scales), cfg.params.mass, cfg.params.bragg_wavevector
        )
        rows.append([r.energy, r.width, omega / (2.0 * np.pi)])
        si_rows.append([r.index, e_si, gamma_si, cfg.params.hbar / gamma_si])
    write_csv(
        out_dir / "bragg_table.csv",
        ["Er_over_Vb", "Gamma_over_Vb", "Omega_over_2pi_Hz"],
        rows,
    )
    write_csv(
        out_dir / "resonances_si.csv",
        ["j", "Er_J", "gamma_J", "lifetime_s"],
        si_rows,
    )
    manifest.points.append({"status": "ok", "n_resonances": len(res)})


def _si_resonance(r, scales: Scales):
    from .resonances import Resonance

    return Resonance(
        energy=scales.energy_si(r.energy),
        width=scales.energy_si(r.width),
        theta=r.theta,
        plateau_shift=r.plateau_shift,
        index=r.index,
        hbar=scales.hbar,
    )
