"""Command line entry point.

    mwfpi <scenario> [--config FILE] [--out DIR] [--workers N]
          [--override key=value ...] [--dump-potential] [--no-svg]

Exit codes: 0 full success, 1 configuration error, 2 per-point failures.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from . import runner
from .grid import build_grid
from .model import InvalidParameterError
from .potentials import cavity_potential
from .runner import ConfigError, ScenarioConfig, default_config
from .wavepackets import dump_wavefunction_csv, gaussian_packet, symmetric_superposition


def _apply_override(cfg: dict, key: str, value: str) -> None:
    """Set a dotted key (e.g. params.gravity_m_s2=-8e-4) in the raw config."""
    try:
        parsed = json.loads(value)
    except json.JSONDecodeError:
        parsed = value
    node = cfg
    parts = key.split(".")
    for part in parts[:-1]:
        node = node.setdefault(part, {})
    node[parts[-1]] = parsed


@click.command(name="mwfpi")
@click.argument("scenario", type=click.Choice(runner.SCENARIOS))
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="JSON config; built-in defaults are used when omitted.")
@click.option("--out", "out_dir", default=None, help="Output directory.")
@click.option("--workers", type=int, default=None,
              help="Worker processes (default: MWFPI_WORKERS or 1).")
@click.option("--override", "overrides", multiple=True, metavar="KEY=VALUE",
              help="Override a config entry, dotted keys allowed.")
@click.option("--dump-potential", is_flag=True, help="Also write potential.csv (z_m, V_J).")
@click.option("--dump-initial-state", is_flag=True,
              help="Also write initial_state.csv (z, Re psi, Im psi, density).")
@click.option("--no-svg", is_flag=True, help="Skip SVG rendering.")
def main(scenario, config_path, out_dir, workers, overrides, dump_potential,
         dump_initial_state, no_svg):
    raw = default_config(scenario)
    if config_path:
        with open(config_path, "r", encoding="utf-8") as fh:
            user = json.load(fh)
        user["scenario"] = user.get("scenario", scenario)
        if user["scenario"] != scenario:
            click.echo(f"config is for scenario {user['scenario']!r}, not {scenario!r}", err=True)
            sys.exit(1)
        for key in ("params", "grid", "solver", "sweep"):
            if key in user:
                raw[key] = {**raw[key], **user[key]}
        for key in ("output_dir", "workers", "emit_svg"):
            if key in user:
                raw[key] = user[key]
    for item in overrides:
        if "=" not in item:
            click.echo(f"bad --override {item!r}, expected key=value", err=True)
            sys.exit(1)
        key, _, value = item.partition("=")
        _apply_override(raw, key.strip(), value.strip())
    if out_dir:
        raw["output_dir"] = out_dir
    if workers is not None:
        raw["workers"] = workers
    if no_svg:
        raw["emit_svg"] = False

    try:
        cfg = ScenarioConfig.from_dict(raw)
    except (ConfigError, InvalidParameterError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(1)

    manifest = runner.run(cfg)
    if dump_potential or dump_initial_state:
        if dump_potential:
            _dump_potential(cfg)
        if dump_initial_state:
            _dump_initial_state(cfg)
        manifest.write(Path(cfg.output_dir))
    failures = manifest.failures
    done = len(manifest.points)
    click.echo(
        f"{scenario}: {done - failures}/{done} points ok, "
        f"{manifest.wall_time_s:.1f} s -> {cfg.output_dir}"
    )
    if failures:
        click.echo(f"{failures} point(s) failed; see manifest.json", err=True)
        sys.exit(2)


def _dump_potential(cfg: ScenarioConfig) -> None:
    g = cfg.grid
    grid = build_grid(float(g["z_min_m"]), float(g["z_max_m"]), int(g["n_points"]))
    pot = cavity_potential(cfg.params, grid)
    data = np.column_stack([grid.z, pot.values])
    np.savetxt(f"{cfg.output_dir}/potential.csv", data, delimiter=",",
               header="z_m,V_J", comments="")


def _dump_initial_state(cfg: ScenarioConfig) -> None:
    g = cfg.grid
    grid = build_grid(float(g["z_min_m"]), float(g["z_max_m"]), int(g["n_points"]))
    if cfg.scenario == "asymmetric":
        psi = symmetric_superposition(cfg.params, grid)
    else:
        psi = gaussian_packet(cfg.params, grid)
    dump_wavefunction_csv(psi, Path(cfg.output_dir) / "initial_state.csv")


if __name__ == "__main__":
    main()
