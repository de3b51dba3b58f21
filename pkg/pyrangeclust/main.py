"""
Console entry point: build an index bundle, answer queries on it, validate
it against the oracle suites and generate synthetic datasets.
"""

import json
import logging
from pathlib import Path
from typing import List, Optional

import click
import numpy as np

from pyrangeclust.engines.service import QueryService
from pyrangeclust.index.service import SpatialIndex
from pyrangeclust.models.requests import BuildParams, GenSpec, QuerySpec, QueryType, parse_range
from pyrangeclust.models.responses import ClusteringAnswer
from pyrangeclust.utils import data
from pyrangeclust.utils.exceptions import DataError, QuerySpecError
from pyrangeclust.utils.misc import load_environment, load_params, log_level, thread_count
from pyrangeclust.utils.wrappers import cli_exec
from pyrangeclust.validation.suites import SUITES, run_validation

CSV_FIELDS = ("type", "k", "eps", "cost", "solver", "coreset_size", "point_accesses", "wall_ms")


def answer_csv(answer: ClusteringAnswer) -> str:
    """Summary row followed by the centers."""
    row = [answer.type, "" if answer.k is None else str(answer.k), repr(answer.eps),
           repr(answer.cost), answer.solver, str(answer.coreset_size),
           str(answer.point_accesses), repr(answer.wall_ms)]
    text = ",".join(CSV_FIELDS) + "\n" + ",".join(row) + "\n"
    if answer.centers:
        text += data.format_csv(np.asarray(answer.centers))
    return text


def read_range_file(path: str) -> (List[float], List[float]):
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        return [float(v) for v in payload["lo"]], [float(v) for v in payload["hi"]]
    except (OSError, ValueError, KeyError, TypeError) as error:
        raise QuerySpecError(f"Cannot read a range from {path}: {error}")


def read_batch(path: str) -> List[QuerySpec]:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as error:
        raise QuerySpecError(f"Cannot read the batch file {path}: {error}")
    if not isinstance(payload, list):
        raise QuerySpecError("A batch file holds a JSON list of queries")
    return [QuerySpec(**item) for item in payload]


@click.group()
def cli():
    """Range-clustering engine over a preprocessed point set."""
    load_environment()
    logging.basicConfig(level=log_level(), format="%(levelname)s %(name)s: %(message)s")


@cli.command()
@click.argument("input_path", type=click.Path())
@click.argument("output_path", type=click.Path())
@click.option("--weighted", is_flag=True, help="Last CSV column is a point weight.")
@click.option("--params", "params_path", type=click.Path(), default=None,
              help="YAML file of build parameters.")
@click.option("--delta", type=float, default=None)
@click.option("--k-max", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--eager", is_flag=True, help="Build every stored coreset now.")
@cli_exec
def build(input_path: str, output_path: str, weighted: bool, params_path: Optional[str],
          delta: Optional[float], k_max: Optional[int], seed: Optional[int],
          eager: bool):
    """Read a CSV dataset, build its index and write the bundle."""
    raw = load_params(params_path, {"delta": delta, "k_max": k_max, "seed": seed,
                                    "eager_coresets": eager or None})
    params = BuildParams(**raw)
    points, weights = data.read_csv(input_path, weighted=weighted)
    index = SpatialIndex(points, weights, params, thread_count())
    index.save(output_path)
    logging.info(f"Bundle written to {output_path}")


@cli.command()
@click.argument("bundle", type=click.Path())
@click.option("--type", "query_type", type=click.Choice([t.value for t in QueryType]),
              default=None)
@click.option("--range", "range_text", default=None, help="lo1,lo2,...xhi1,hi2,...")
@click.option("--range-file", default=None, type=click.Path(),
              help="JSON object with lo and hi lists.")
@click.option("-k", "--k", "k", type=int, default=None)
@click.option("--eps", type=float, default=0.2, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json")
@click.option("--with-coreset", is_flag=True, help="Attach the final coreset.")
@click.option("--batch", "batch_path", default=None, type=click.Path(),
              help="JSON list of queries, answered as JSON lines.")
@click.option("--no-timing", is_flag=True, help="Report wall_ms as 0.")
@click.option("--validate", "check", is_flag=True,
              help="Check coreset representatives against their centers.")
@cli_exec
def query(bundle: str, query_type: Optional[str], range_text: Optional[str],
          range_file: Optional[str], k: Optional[int], eps: float, fmt: str,
          with_coreset: bool, batch_path: Optional[str], no_timing: bool, check: bool):
    """Answer one query, or a batch, against a bundle."""
    index = SpatialIndex.load(bundle, thread_count())
    service = QueryService(index, validate=check, with_coreset=with_coreset,
                           timing=not no_timing)
    if batch_path is not None:
        specs = read_batch(batch_path)
        for answer in service.answer_batch(specs, thread_count()):
            click.echo(answer.to_json())
        return
    if query_type is None:
        raise QuerySpecError("--type is required without --batch")
    if (range_text is None) == (range_file is None):
        raise QuerySpecError("Give exactly one of --range and --range-file")
    lo, hi = parse_range(range_text) if range_text is not None else read_range_file(range_file)
    spec = QuerySpec(type=query_type, lo=lo, hi=hi, k=k, eps=eps)
    answer = service.answer(spec)
    click.echo(answer.to_json() if fmt == "json" else answer_csv(answer), nl=fmt == "json")


@cli.command()
@click.argument("bundle", type=click.Path())
@click.option("--suite", type=click.Choice(list(SUITES) + ["all"]), default="all",
              show_default=True)
@click.option("--budget", type=int, default=20, show_default=True,
              help="Random instances per suite.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json")
@cli_exec
def validate(bundle: str, suite: str, budget: int, fmt: str):
    """Run the property suites on a bundle and print the report."""
    index = SpatialIndex.load(bundle, thread_count())
    report = run_validation(index, suite, budget)
    click.echo(report.to_json() if fmt == "json" else report.to_csv(), nl=fmt == "json")
    if not report.passed:
        logging.warning("Some properties failed; see the report")


@cli.command()
@click.argument("output_path", type=click.Path())
@click.option("-n", "--n", "n", type=int, required=True)
@click.option("-d", "--d", "d", type=int, required=True)
@click.option("--mixture", type=click.Choice(["uniform", "gaussians"]), default="uniform")
@click.option("-m", "--m", "m", type=int, default=5, show_default=True)
@click.option("--sigma", type=float, default=0.05, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@cli_exec
def gen(output_path: str, n: int, d: int, mixture: str, m: int, sigma: float, seed: int):
    """Write a reproducible synthetic dataset as CSV."""
    spec = GenSpec(n=n, d=d, mixture=mixture, m=m, sigma=sigma, seed=seed)
    points = data.generate_points(spec.n, spec.d, spec.mixture.value, spec.m, spec.sigma,
                                  spec.seed)
    try:
        Path(output_path).write_text(data.format_csv(points), encoding="utf-8")
    except OSError as error:
        raise DataError(f"Cannot write {output_path}: {error}")
    logging.info(f"Generated {spec.n} {spec.mixture.value} points in {spec.d} dimensions")


def run():
    cli()


if __name__ == "__main__":
    run()
