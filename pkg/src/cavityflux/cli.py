"""Command-line front-end: sweeps, cross-method comparison, scene validation."""

from __future__ import annotations

import json
import sys

import click

from . import harness
from .geometry import SceneError, load_scene
from .raytrace import RtConfig


@click.group()
def main():
    """2D multi-cavity energy-flow simulator (PWB / RT / DEA)."""


@main.command()
@click.option("--scene", required=True,
              help="Preset name (fig1a, fig1b, fig2, fig3) or scene JSON path.")
@click.option("--methods", default="pwb,rt,dea", show_default=True,
              help="Comma-separated subset of pwb,rt,dea.")
@click.option("--alphas", default="default", show_default=True,
              help="Comma-separated absorption factors, or 'default'.")
@click.option("--source", "sources", multiple=True,
              help="port:ID | point:x,y | table1:N (repeatable; "
                   "default port:P1).")
@click.option("--out", "out_dir", default="out", show_default=True)
@click.option("--rays", default=8002, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--max-bounces", default=10_000, show_default=True)
@click.option("--n-dir", default=64, show_default=True,
              help="Direction bins per boundary element.")
@click.option("--elem-len", default=None, type=float,
              help="Boundary element target length (default: per-scene).")
@click.option("--heatmaps", is_flag=True, help="Write density/adjoint heatmap grids.")
@click.option("--grid-resolution", default=None, type=float,
              help="RT density tally resolution (cells per unit length).")
def run(scene, methods, alphas, sources, out_dir, rays, seed, max_bounces,
        n_dir, elem_len, heatmaps, grid_resolution):
    """Run a sweep and write sweep.csv (plus optional heatmap grids)."""
    alpha_values = (harness.DEFAULT_ALPHAS if alphas == "default"
                    else [float(a) for a in alphas.split(",")])
    src_list = ([harness.parse_source(s) for s in sources]
                or [harness.parse_source("port:P1")])
    spec = harness.SweepSpec(
        scene=scene,
        methods=[m.strip() for m in methods.split(",") if m.strip()],
        alpha_values=alpha_values,
        sources=src_list,
        rt=RtConfig(n_rays=rays, rng_seed=seed, max_bounces=max_bounces,
                    grid_resolution=grid_resolution),
        n_dir=n_dir, elem_len=elem_len, out_dir=out_dir, heatmaps=heatmaps)
    path = harness.run_sweep(spec)
    click.echo(f"wrote {path}")


@main.command()
@click.argument("csvs", nargs=-1, required=True,
                type=click.Path(exists=True, dir_okay=False))
@click.option("--bands", "bands_path", default=None,
              type=click.Path(exists=True, dir_okay=False),
              help="JSON tolerance bands; default: RT vs DEA within 5%.")
def compare(csvs, bands_path):
    """Compare overlapping rows across sweep CSVs; exit 0 iff all bands pass."""
    bands = harness.load_bands(bands_path) if bands_path else None
    summary = harness.compare(csvs, bands)
    click.echo(json.dumps(summary, indent=2, default=str))
    if summary["missing"]:
        click.echo(f"warning: {len(summary['missing'])} keys lack some methods",
                   err=True)
    sys.exit(0 if summary["ok"] else 1)


@main.group()
def scene():
    """Scene description utilities."""


@scene.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
def validate(path):
    """Validate a scene JSON file against all geometric invariants."""
    try:
        sc = load_scene(path)
    except SceneError as exc:
        click.echo(f"INVALID: {exc}", err=True)
        sys.exit(1)
    click.echo(f"OK: {len(sc.cavities)} cavities, {len(sc.openings)} openings, "
               f"{len(sc.discs)} discs, alpha={sc.alpha}")


if __name__ == "__main__":
    main()
