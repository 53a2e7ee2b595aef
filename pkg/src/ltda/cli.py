"""Command-line entry point: ltda {validate,gh,landscape,compare,pairwise}."""
from __future__ import annotations

import csv
import itertools
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .filtration import vietoris_rips
from .gh import (DEFAULT_BUDGET, GHBudgetExceeded, gh_k_exact, gh_lower_bound_diam, gh_perm_exact, gh_plain,
                 gh_stab_exact)
from .landscape import (DEFAULT_GRID, default_grid, default_levels, element_name, generalized_landscape,
                        mse_distance, restrict_to, to_json_doc, to_long_csv)
from .metric_space import FormatError, LabelError, LabeledMetricSpace, from_point_cloud, parse_document, validate
from .persistence import barcode, evaluate_1d, landscape_1d
from .poset import make_weighting, power_poset

EXIT_INVALID = 1
EXIT_FORMAT = 2
EXIT_BUDGET = 3

WEIGHTINGS = ["constant", "diameter", "hausdorff"]
DEFAULT_PARAM = {"constant": 0.1, "diameter": None, "hausdorff": 0.1}


class _BadFormat(click.ClickException):
    exit_code = EXIT_FORMAT


def _read_json(path: str):
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise _BadFormat(f"{path}: parse error at line {e.lineno}, column {e.colno}: {e.msg}")


def _load(path: str, strict: bool = True) -> LabeledMetricSpace:
    doc = _read_json(path)
    try:
        return parse_document(doc, strict=strict)
    except FormatError as e:
        raise _BadFormat(f"{path}: format error: {e}")
    except LabelError as e:
        raise click.ClickException(f"{path}: {e}")


def _fail(msg: str, code: int):
    click.echo(f"error: {msg}", err=True)
    sys.exit(code)


def _weighting(config_path, weighting, weight_param):
    """Resolve the weighting from flags, falling back to a config file."""
    scheme, value = "hausdorff", None
    if config_path:
        cfg = _read_json(config_path)
        scheme = cfg.get("weighting", scheme)
        value = cfg.get("value", value)
    if weighting:
        scheme = weighting
    if weight_param is not None:
        value = weight_param
    if scheme not in WEIGHTINGS:
        raise click.ClickException(f"unknown weighting {scheme!r}")
    if value is None:
        value = DEFAULT_PARAM[scheme]
    return scheme, value


def _fmt(v: float) -> str:
    return f"{v:.12g}"


@click.group()
@click.version_option(__version__)
def main():
    """Labeled Gromov-Hausdorff distances and generalized persistence landscapes."""


@main.command("validate")
@click.argument("input", type=click.Path(exists=True, dir_okay=False))
def cmd_validate(input):
    """Check a labeled metric space file. Exit 0 valid, 1 invalid, 2 unreadable."""
    lms = _load(input, strict=False)
    report = validate(lms)
    if report:
        for line in report:
            click.echo(line)
        sys.exit(EXIT_INVALID)
    click.echo(f"valid: {lms.n_points} points, {lms.k} labels")


@main.command("gh")
@click.argument("x_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("y_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--variant", type=click.Choice(["k", "perm", "stab", "plain", "lower-bound"]), default="k")
@click.option("--budget", type=float, default=float(DEFAULT_BUDGET), show_default=True,
              help="Largest exhaustive enumeration allowed.")
@click.option("--witness", type=click.Path(dir_okay=False), default=None, help="Write the optimal maps as JSON.")
def cmd_gh(x_path, y_path, variant, budget, witness):
    """Labeled Gromov-Hausdorff distance between two files."""
    X, Y = _load(x_path), _load(y_path)
    try:
        if variant == "lower-bound":
            click.echo(_fmt(gh_lower_bound_diam(X, Y)))
            return
        solver = {"k": gh_k_exact, "perm": gh_perm_exact, "stab": gh_stab_exact, "plain": gh_plain}[variant]
        res = solver(X, Y, budget=budget)
    except GHBudgetExceeded as e:
        _fail(f"{e}. Try --variant lower-bound.", EXIT_BUDGET)
    except ValueError as e:
        raise click.ClickException(str(e))
    click.echo(_fmt(res.value))
    if witness:
        Xw = X if variant != "plain" else LabeledMetricSpace(X.dist, (tuple(range(X.n_points)),))
        Yw = Y if variant != "plain" else LabeledMetricSpace(Y.dist, (tuple(range(Y.n_points)),))
        doc = {
            "variant": variant,
            "value": res.value,
            "maps": res.witness.to_json(Xw, Yw),
            "sigma": None if res.sigma is None else [s + 1 for s in res.sigma],
            "correspondence": None if res.correspondence is None else [[i + 1, j + 1] for i, j in res.correspondence],
        }
        Path(witness).write_text(json.dumps(doc, indent=2) + "\n")


def _landscape_options(f):
    f = click.option("--degree", type=int, default=0, show_default=True)(f)
    f = click.option("--levels", type=int, default=None, help="Number of levels (default: largest union size).")(f)
    f = click.option("--grid", type=int, default=DEFAULT_GRID, show_default=True, help="Grid size |Z|.")(f)
    f = click.option("--weighting", type=click.Choice(WEIGHTINGS), default=None,
                     help="Edge weights (default hausdorff).")(f)
    f = click.option("--weight-param", type=float, default=None,
                     help="Constant weight or Hausdorff fraction (default 0.1).")(f)
    f = click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
                     help='JSON {"weighting": ..., "value": ...}.')(f)
    f = click.option("--seed", type=int, default=0, show_default=True)(f)
    f = click.option("--out", type=click.Path(), default=None, help="Output path prefix.")(f)
    return f


def _positive(**kw):
    for name, v in kw.items():
        if v is not None and v <= 0:
            raise click.ClickException(f"--{name} must be positive")


def _run(lms, degree, levels, grid, scheme, value):
    P = make_weighting(power_poset(lms.k), lms, scheme, value)
    Z = default_grid(lms, P, grid)
    n_max = levels or default_levels(lms, P)
    return generalized_landscape(lms, P, degree, Z, n_max)


def _config(command, inputs, degree, levels, grid, scheme, value, seed, **extra):
    cfg = {"command": command, "inputs": inputs, "degree": degree, "levels": levels, "grid": grid,
           "weighting": scheme, "weight_param": value, "seed": seed, "version": __version__}
    cfg.update(extra)
    return cfg


@main.command("landscape")
@click.argument("input", type=click.Path(exists=True, dir_okay=False))
@_landscape_options
def cmd_landscape(input, degree, levels, grid, weighting, weight_param, config_path, seed, out):
    """Generalized landscape of one labeled space; writes OUT.csv and OUT.json."""
    _positive(levels=levels, grid=grid)
    scheme, value = _weighting(config_path, weighting, weight_param)
    lms = _load(input)
    gl = _run(lms, degree, levels, grid, scheme, value)
    cfg = _config("landscape", [Path(input).name], degree, gl.n_max, grid, scheme, value, seed)
    if out:
        Path(f"{out}.csv").write_text(to_long_csv(gl, cfg))
        Path(f"{out}.json").write_text(json.dumps(to_json_doc(gl, cfg), indent=2) + "\n")
    click.echo(f"degree {degree}, {gl.n_max} levels, {len(gl.Z)} grid values, {len(gl.paths)} paths")
    for c, e in enumerate(gl.elements):
        click.echo(f"  {element_name(e)}: max {_fmt(float(gl.values[:, :, c].max()))}")


def class_comparison(lms: LabeledMetricSpace, degree: int, levels, grid: int, scheme: str, value):
    """Union slice of the labeled landscape against the plain landscape of all points."""
    gl = _run(lms, degree, levels, grid, scheme, value)
    aware = restrict_to(gl, range(lms.k))
    naive = landscape_1d(barcode(vietoris_rips(lms, range(lms.k), degree), degree), gl.n_max)
    sampled = np.array([evaluate_1d(naive, n, gl.Z) for n in range(1, gl.n_max + 1)])
    mse = mse_distance(aware, naive, len(gl.Z))
    sup = float(np.abs(aware.values - sampled).max())
    return gl, aware, sampled, mse, sup


def _slice_csv(Z, values, cfg):
    lines = ["# " + json.dumps(cfg, sort_keys=True), "level,r,value"]
    for n in range(values.shape[0]):
        for z, r in enumerate(Z):
            lines.append(f"{n + 1},{float(r)!r},{float(values[n, z])!r}")
    return "\n".join(lines) + "\n"


@main.command("compare")
@click.argument("input", type=click.Path(exists=True, dir_okay=False))
@_landscape_options
def cmd_compare(input, degree, levels, grid, weighting, weight_param, config_path, seed, out):
    """Class-aware union landscape vs the class-naive landscape (MSE and sup)."""
    _positive(levels=levels, grid=grid)
    scheme, value = _weighting(config_path, weighting, weight_param)
    lms = _load(input)
    gl, aware, naive, mse, sup = class_comparison(lms, degree, levels, grid, scheme, value)
    cfg = _config("compare", [Path(input).name], degree, gl.n_max, grid, scheme, value, seed)
    if out:
        Path(f"{out}.aware.csv").write_text(_slice_csv(gl.Z, aware.values, cfg))
        Path(f"{out}.naive.csv").write_text(_slice_csv(gl.Z, naive, cfg))
    click.echo(f"mse {_fmt(mse)}")
    click.echo(f"sup {_fmt(sup)}")


def _read_class(path: Path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    try:
        return np.array([[float(v) for v in r] for r in rows])
    except ValueError:
        # one header row is allowed
        return np.array([[float(v) for v in r] for r in rows[1:]])


def pairwise_matrix(classes: dict, samples: int, seed: int, degree: int, levels, grid: int, scheme: str, value,
                    pairs=None):
    names = sorted(classes)
    rng = np.random.default_rng(seed)
    picked = {}
    for name in names:
        X = classes[name]
        m = min(samples, len(X))
        picked[name] = X[np.sort(rng.choice(len(X), size=m, replace=False))]
    M = np.full((len(names), len(names)), np.nan)
    np.fill_diagonal(M, 0.0)
    todo = pairs if pairs is not None else list(itertools.combinations(range(len(names)), 2))
    for a, b in todo:
        A, B = picked[names[a]], picked[names[b]]
        lms = from_point_cloud(np.vstack([A, B]), [range(len(A)), range(len(A), len(A) + len(B))])
        mse = class_comparison(lms, degree, levels, grid, scheme, value)[3]
        M[a, b] = M[b, a] = mse
    return names, M


@main.command("pairwise")
@click.argument("dataset_dir", type=click.Path(exists=True, file_okay=False))
@_landscape_options
@click.option("--samples", type=int, default=10, show_default=True, help="Points sampled per class.")
@click.option("--pairs", type=str, default=None, help='Subset of pairs, e.g. "0-1,2-5" (class names).')
def cmd_pairwise(dataset_dir, degree, levels, grid, weighting, weight_param, config_path, seed, out, samples, pairs):
    """MSE matrix over all pairs of per-class CSV files in DATASET_DIR."""
    _positive(levels=levels, grid=grid, samples=samples)
    scheme, value = _weighting(config_path, weighting, weight_param)
    files = sorted(Path(dataset_dir).glob("*.csv"))
    if len(files) < 2:
        _fail("need at least two class files (*.csv)", EXIT_INVALID)
    classes = {f.stem: _read_class(f) for f in files}
    names = sorted(classes)
    todo = None
    if pairs:
        todo = []
        for item in pairs.split(","):
            a, b = item.split("-")
            if a not in classes or b not in classes:
                raise click.ClickException(f"unknown class in pair {item!r}")
            todo.append((names.index(a), names.index(b)))
    names, M = pairwise_matrix(classes, samples, seed, degree, levels, grid, scheme, value, todo)
    cfg = _config("pairwise", names, degree, levels, grid, scheme, value, seed, samples=samples, pairs=pairs)
    lines = ["# " + json.dumps(cfg, sort_keys=True), ",".join(["class"] + names)]
    for i, n in enumerate(names):
        lines.append(",".join([n] + [repr(float(v)) for v in M[i]]))
    text = "\n".join(lines) + "\n"
    if out:
        Path(out).write_text(text)
    click.echo(text, nl=False)


if __name__ == "__main__":
    main()
