"""Command-line harness: run / convergence / compare / eigen."""

import dataclasses

import click

from . import experiments
from .experiments import ExperimentConfig

_FIELD_ALIASES = {"lambda": "lambda_slip", "models": "compare_models"}
_TUPLE_FIELDS = {"mesh_sizes": int, "snapshot_times": float, "compare_models": str}
_BOOL_FIELDS = ("friction",)


def parse_config_file(path):
    """Flat key=value text; '#' starts a comment, blank lines are skipped."""
    raw = {}
    with open(path) as f:
        for lineno, line in enumerate(f, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise click.ClickException(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            raw[_FIELD_ALIASES.get(key, key)] = value
    return build_config(raw)


def build_config(raw):
    fields = {f.name: f for f in dataclasses.fields(ExperimentConfig)}
    kwargs = {}
    for key, value in raw.items():
        if key not in fields:
            raise click.ClickException(f"unknown config key {key!r}")
        if key in _TUPLE_FIELDS:
            conv = _TUPLE_FIELDS[key]
            kwargs[key] = tuple(conv(v.strip()) for v in str(value).split(",") if v.strip())
        elif key in _BOOL_FIELDS:
            kwargs[key] = str(value).lower() in ("1", "true", "yes", "on")
        elif fields[key].type in (int, "int"):
            kwargs[key] = int(value)
        elif fields[key].type in (float, "float"):
            kwargs[key] = float(value)
        else:
            kwargs[key] = value
    try:
        return ExperimentConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise click.ClickException(str(exc))


def _print_convergence(cfg, rows):
    click.echo(f"# {cfg.scenario} {cfg.model} GF-WENO{cfg.order} {cfg.flux}")
    header = experiments.convergence_columns(cfg.model)
    click.echo("  ".join(f"{h:>11s}" for h in header))
    for N, err, eoas in rows:
        cells = [f"{N:11d}"]
        for e, o in zip(err, eoas):
            cells.append(f"{e:11.3e}")
            cells.append(f"{o:11.2f}" if o is not None else f"{'--':>11s}")
        click.echo("  ".join(cells))


@click.group()
def main():
    """Global-flux WENO solver for shallow water moment models."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True),
              help="flat key=value scenario file")
def run(config_path):
    """Run the scenario described by a config file."""
    cfg = parse_config_file(config_path)
    if cfg.scenario == "eigenvalue_report":
        rows = experiments.run_eigen_report(cfg)
        _echo_eigen(rows)
    elif cfg.scenario == "perturbation_comparison":
        experiments.run_compare(cfg)
        click.echo(f"comparison outputs in {cfg.out_dir}")
    elif cfg.perturb_amplitude is not None or cfg.scenario == "lar_perturbation":
        cfg = _with_default_amplitude(cfg)
        experiments.run_perturbation(cfg)
        click.echo(f"perturbation outputs in {cfg.out_dir}")
    else:
        experiments.run_single(cfg)
        click.echo(f"solution outputs in {cfg.out_dir}")


def _with_default_amplitude(cfg):
    if cfg.perturb_amplitude is not None:
        return cfg
    preset = experiments._PRESET[cfg.scenario][3]
    return dataclasses.replace(cfg, perturb_amplitude=preset if preset is not None else 1e-3)


@main.command()
@click.option("--scenario", default="supercritical",
              type=click.Choice(["lake_at_rest", "supercritical", "subcritical"]))
@click.option("--model", default="swme1")
@click.option("--order", default="5", type=click.Choice(["1", "3", "5"]))
@click.option("--flux", default="central", type=click.Choice(["upwind", "central"]))
@click.option("--mesh-sizes", default="100,200,400,600,800", help="comma list")
@click.option("--out-dir", default="out")
def convergence(scenario, model, order, flux, mesh_sizes, out_dir):
    """Convergence table against the analytic steady reference."""
    cfg = ExperimentConfig(
        scenario=scenario, model=model, order=int(order), flux=flux,
        mesh_sizes=tuple(int(s) for s in mesh_sizes.split(",")), out_dir=out_dir)
    rows = experiments.run_convergence(cfg)
    _print_convergence(cfg, rows)


@main.command()
@click.option("--models", "model_list", default="swme1,swlme2,hswme2,swme2", help="comma list")
@click.option("--order", default="5", type=click.Choice(["1", "3", "5"]))
@click.option("--n-cells", default=200)
@click.option("--amplitude", default=1e-3, type=float)
@click.option("--out-dir", default="out")
def compare(model_list, order, n_cells, amplitude, out_dir):
    """Perturbed steady states with friction for several models."""
    cfg = ExperimentConfig(
        scenario="perturbation_comparison", order=int(order), n_cells=n_cells,
        compare_models=tuple(model_list.split(",")), perturb_amplitude=amplitude,
        out_dir=out_dir)
    experiments.run_compare(cfg)
    click.echo(f"comparison outputs in {out_dir}")


def _echo_eigen(rows):
    click.echo(f"{'model':8s} {'lambda_1':>10s} {'lambda_2':>10s} {'lambda_3':>10s} {'lambda_4':>10s}")
    for model, x, w, lams in rows:
        cells = [f"{v:10.2f}" if not isinstance(v, str) and v is not None else f"{'--':>10s}"
                 for v in lams]
        click.echo(f"{model:8s} " + " ".join(cells))


@main.command()
@click.option("--n-cells", default=100)
@click.option("--order", default="5", type=click.Choice(["1", "3", "5"]))
@click.option("--x-sample", default=23.0, type=float)
@click.option("--out-dir", default="out")
def eigen(n_cells, order, x_sample, out_dir):
    """Eigenvalue comparison at a station of the friction steady state."""
    cfg = ExperimentConfig(scenario="eigenvalue_report", n_cells=n_cells,
                           order=int(order), x_sample=x_sample, out_dir=out_dir)
    rows = experiments.run_eigen_report(cfg)
    _echo_eigen(rows)


if __name__ == "__main__":
    main()
