"""Command-line front end: data generation, learning, experiments, serving.

Exit codes: 2 invalid configuration, 3 learner error, 4 port busy.
"""

from __future__ import annotations

import errno
import json
import os
import shutil
import sys
from pathlib import Path

import click

from . import kg as kgmod
from .dataset import load_dataset, save_dataset
from .errors import InfeasibleConfig, RcaError
from .experiments import CSV_HEADER, mean_std, run_feedback, run_kg_fraction
from .graphs import graph_to_json
from .learner import LearnParams, learn
from .preprocess import preprocess
from .synth import GeneratorConfig, generate_plant, sample_data, truth_to_json


def _load_config(path: str | None, seed: int | None) -> GeneratorConfig:
    raw = {}
    if path:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if seed is not None:
        raw["seed"] = seed
    for key in ("steps_per_station", "vars_per_step", "noise_std", "mechanisms"):
        if key in raw:
            raw[key] = tuple(raw[key])
    try:
        return GeneratorConfig(**raw)
    except (TypeError, InfeasibleConfig) as exc:
        raise click.exceptions.Exit(2) from _echo_err(f"invalid config: {exc}")


def _echo_err(msg: str):
    click.echo(msg, err=True)
    return None


def _load_params(path: str | None) -> LearnParams:
    if not path:
        return LearnParams()
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        return LearnParams(**raw)
    except (TypeError, RcaError) as exc:
        raise click.exceptions.Exit(2) from _echo_err(f"invalid params: {exc}")


@click.group()
def main():
    """Interactive root-cause-analysis toolkit."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", "out_dir", type=click.Path(), required=True)
def generate(config_path, seed, out_dir):
    """Write kg.json, truth.json, and data.csv for a synthetic plant."""
    cfg = _load_config(config_path, seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        kg, truth = generate_plant(cfg)
    except InfeasibleConfig as exc:
        _echo_err(f"invalid config: {exc}")
        raise click.exceptions.Exit(2)
    (out / "kg.json").write_bytes(kgmod.save(kg))
    (out / "truth.json").write_text(truth_to_json(truth), encoding="utf-8")
    save_dataset(sample_data(truth, cfg.n_rows, cfg.seed), out / "data.csv")
    click.echo(f"wrote kg.json, truth.json, data.csv to {out}")


@main.command("learn")
@click.option("--kg", "kg_path", type=click.Path(exists=True), required=True)
@click.option("--data", "data_path", type=click.Path(exists=True), required=True)
@click.option("--params", "params_path", type=click.Path(exists=True), default=None)
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--seed", type=int, default=None)
def learn_cmd(kg_path, data_path, params_path, out_path, seed):
    """Preprocess the data and learn a root cause graph."""
    params = _load_params(params_path)
    if seed is not None:
        params.seed = seed
    try:
        kg = kgmod.load(Path(kg_path).read_bytes())
    except RcaError as exc:
        _echo_err(f"invalid knowledge graph: {exc}")
        raise click.exceptions.Exit(2)
    lines = sorted(n.id for n in kg.nodes if n.kind == kgmod.NodeKind.LINE)
    if not lines:
        _echo_err("knowledge graph has no line")
        raise click.exceptions.Exit(2)
    try:
        ds, _ = preprocess(load_dataset(data_path))
        graph, report = learn(ds, kg, lines[0], params)
    except RcaError as exc:
        _echo_err(f"learner error: {exc}")
        raise click.exceptions.Exit(3)
    Path(out_path).write_text(graph_to_json(graph), encoding="utf-8")
    click.echo(json.dumps(report.to_dict()))


@main.group()
def experiment():
    """Reproduce the evaluation studies at desk scale."""


def _write_rows(rows, out_path, config_note: str):
    lines = [f"# {config_note}", CSV_HEADER] + [r.csv() for r in rows]
    text = "\n".join(lines) + "\n"
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


@experiment.command("kg-fraction")
@click.option("--fractions", default="25,50,75,100", show_default=True)
@click.option("--repeats", type=int, default=5, show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--seed", type=int, default=0)
@click.option("--out", "out_path", type=click.Path(), default=None)
def kg_fraction_cmd(fractions, repeats, config_path, seed, out_path):
    """Learning time and edge count versus retained KG facts."""
    try:
        fracs = [float(f) / 100.0 for f in fractions.split(",") if f.strip()]
        if not fracs or any(not 0 <= f <= 1 for f in fracs):
            raise ValueError(fractions)
    except ValueError:
        _echo_err(f"bad fraction list: {fractions!r}")
        raise click.exceptions.Exit(2)
    if config_path:
        cfg = _load_config(config_path, seed)
    else:
        cfg = GeneratorConfig(
            stations=5,
            steps_per_station=(2, 2),
            vars_per_step=(3, 3),
            edge_density=0.15,
            root_fraction=0.15,
            leaf_fraction=0.15,
            irrelevant_fraction=0.1,
            noimpact_facts=40,
            mechanisms=("sigmoid", "sine"),
            n_rows=300,
            seed=seed,
        )
    rows = run_kg_fraction(cfg, fracs, repeats)
    _write_rows(rows, out_path, f"kg-fraction config={cfg} fractions={fracs}")


@experiment.command("feedback")
@click.option("--vars", "n_vars", type=int, default=8, show_default=True)
@click.option("--samples", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0)
@click.option("--out", "out_path", type=click.Path(), default=None)
def feedback_cmd(n_vars, samples, seed, out_path):
    """Partial-truth distance before/after one correct hasNoImpact."""
    if n_vars < 4 or n_vars % 4 != 0:
        _echo_err("--vars must be a positive multiple of 4")
        raise click.exceptions.Exit(2)
    rows = run_feedback(n_samples=samples, seed=seed, vars_per_step=n_vars // 4)
    _write_rows(rows, out_path, f"feedback vars={n_vars} samples={samples} seed={seed}")
    mb, sb = mean_std(rows, "before")
    ma, sa = mean_std(rows, "after")
    click.echo(
        f"aSHD before mean={mb:.3f} std={sb:.3f}; after mean={ma:.3f} std={sa:.3f}",
        err=True,
    )


@main.command()
@click.option("--kg", "kg_path", type=click.Path(exists=True), required=True)
@click.option("--data", "data_path", type=click.Path(exists=True), required=True)
@click.option("--port", type=int, default=None)
def serve(kg_path, data_path, port):
    """Boot the HTTP service on RCA_PORT (default 8080)."""
    import uvicorn

    from .service import create_app

    try:
        kgmod.load(Path(kg_path).read_bytes())
    except RcaError as exc:
        _echo_err(f"invalid knowledge graph: {exc}")
        raise click.exceptions.Exit(2)
    data_dir = Path(os.environ.get("RCA_DATA_DIR", ".rca-data"))
    data_dir.mkdir(parents=True, exist_ok=True)
    shutil.copy(kg_path, data_dir / "kg.json")
    shutil.copy(data_path, data_dir / "data.csv")
    sidecar = Path(data_path).with_suffix(".meta.json")
    if sidecar.exists():
        shutil.copy(sidecar, data_dir / "data.meta.json")
    app = create_app(data_dir)
    port = port if port is not None else int(os.environ.get("RCA_PORT", "8080"))
    try:
        uvicorn.run(app, host="127.0.0.1", port=port)
    except OSError as exc:
        if exc.errno == errno.EADDRINUSE:
            _echo_err(f"port {port} is busy")
            raise click.exceptions.Exit(4)
        raise


if __name__ == "__main__":
    sys.exit(main())
