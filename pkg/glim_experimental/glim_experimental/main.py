import importlib.util
import json
import logging
import math
import os
import sys

import click
from rich import box
from rich.console import Console
from rich.logging import RichHandler
from rich.progress import BarColumn, Progress, TimeRemainingColumn
from rich.table import Table
from rich.text import Text
from rich.theme import Theme

from glim.errors import ConfigError
from glim.io import atomic_write_text, graph_to_text, read_graph
from glim.json import dumps
from glim.models.balls import neighborhood_distribution
from glim.models.graph import MarkedGraph
from glim.spectral.eigen import (
    DENSE_NONSYMMETRIC_LIMIT,
    SpectrumReport,
    eig_dense_nonsymmetric,
    eig_dense_symmetric,
    eig_extreme_symmetric,
    eig_top_nonsymmetric,
)
from glim.spectral.laws import kesten_mckay_density
from glim.spectral.operators import non_backtracking, weighted_adjacency

from glim_experimental.cli.accumulators import (
    CsvDataAccumulator,
    JsonDataAccumulator,
    PlotAccumulator,
    StatisticsAccumulator,
)
from glim_experimental.cli.cli_experiments import (
    CUSTOM_ACCUMULATORS,
    experiment_help_table,
    find_experiment,
)
from glim_experimental.cli.plots import (
    csv_text,
    scatter_rows,
    svg_histogram,
    svg_scatter,
)
from glim_experimental.config import RunConfig
from glim_experimental.experiments.base import TrialAccumulator
from glim_experimental.experiments.ensembles import (
    ENSEMBLES,
    STOCHASTIC,
    sample_ensemble,
)
from glim_experimental.runner import run_experiment
from glim_experimental.utils import ensure_dir, format_secs

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FAIL = 2

custom_theme = Theme(
    {
        "progress.remaining": "",
        "progress.percentage": "",
        "bar.complete": "green",
        "bar.finished": "green",
    }
)
console = Console(theme=custom_theme)
PASS_STYLE = {True: "[green]pass[/green]", False: "[red]fail[/red]"}
EXTRA_ARGS = {"ignore_unknown_options": True, "allow_extra_args": True}


class CustomTimeRemainingColumn(TimeRemainingColumn):
    """Renders estimated time remaining according to show_time field."""

    def render(self, task):
        """Show time remaining."""
        show = task.fields.get("show_time", True)
        if not show:
            return Text("")
        return super().render(task)


class GlimGroup(click.Group):
    """Maps every outcome to an exit code: 0 success, 2 failed verdict, 1 error."""

    def main(
        self,
        args=None,
        prog_name=None,
        complete_var=None,
        standalone_mode=True,
        **extra,
    ):
        try:
            rv = super().main(
                args, prog_name, complete_var, standalone_mode=False, **extra
            )
        except click.exceptions.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(EXIT_ERROR)
        except click.ClickException as err:
            err.show()
            sys.exit(EXIT_ERROR)
        except Exception as err:
            logger.error(f"{type(err).__name__}: {err}")
            logger.debug("Traceback", exc_info=True)
            sys.exit(EXIT_ERROR)
        sys.exit(rv if isinstance(rv, int) else EXIT_OK)


def setup_logging(verbose: bool, quiet: bool):
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def parse_value(text):
    """JSON scalars and lists; comma-separated lists; anything else is a string."""
    try:
        return json.loads(text)
    except ValueError:
        pass
    if "," in text:
        return [parse_value(part) for part in text.split(",") if part]
    return text


def parse_extra_args(args):
    """``--key value`` / ``--key=value`` pairs into parameters.

    Dashes in keys become underscores.
    """
    params = {}
    i = 0
    while i < len(args):
        token = args[i]
        if not token.startswith("--") or len(token) == 2:
            raise ConfigError(f"Unexpected argument {token!r}")
        key, sep, value = token[2:].partition("=")
        if not sep:
            if i + 1 < len(args) and not args[i + 1].startswith("--"):
                value = args[i + 1]
                i += 1
            else:
                value = "true"
        params[key.replace("-", "_")] = parse_value(value)
        i += 1
    return params


def parse_tolerances(items):
    tolerances = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"Tolerance must look like name=value, got {item!r}")
        try:
            tolerances[key] = float(value)
        except ValueError as err:
            raise ConfigError(f"Invalid tolerance value {value!r}") from err
    return tolerances


def load_code(code):
    abspath = os.path.abspath(code)
    spec = importlib.util.spec_from_file_location("module.name", abspath)
    if spec is not None and spec.loader is not None:
        user_module = importlib.util.module_from_spec(spec)
        spec.loader.exec_module(user_module)


def load_graph(config: RunConfig) -> MarkedGraph:
    """``target`` is a graph file or an ensemble sampled with ``params``."""
    target = config.target
    if target and os.path.exists(target):
        return read_graph(target)
    if target in ENSEMBLES:
        params = dict(config.params)
        if "n" not in params:
            raise ConfigError(f"Ensemble {target} requires --n")
        seed = config.require_seed() if target in STOCHASTIC else 0
        return sample_ensemble(target, int(params.pop("n")), params, seed)
    raise ConfigError(
        f"{target!r} is neither a graph file nor an ensemble {sorted(ENSEMBLES)}"
    )


def write_output(config: RunConfig, text: str):
    if config.out:
        atomic_write_text(config.out, text)
        logger.info(f"Wrote {config.out}")
    else:
        click.echo(text, nl=False)


def common_options(fn):
    fn = click.option(
        "--config",
        "config_path",
        default=None,
        help="TOML file with seed, params and tolerances.",
    )(fn)
    fn = click.option(
        "--seed",
        type=int,
        default=None,
        help="Seed; mandatory for stochastic commands.",
    )(fn)
    fn = click.option(
        "-o",
        "--out",
        default=None,
        help="Output file (default: standard output).",
    )(fn)
    fn = click.option(
        "--format",
        "fmt",
        default=None,
        type=click.Choice(["json", "csv"]),
        help="Output format.",
    )(fn)
    return fn


@click.group(cls=GlimGroup)
@click.option("-v", "--verbose", is_flag=True, default=False, help="Debug logging.")
@click.option("--quiet", is_flag=True, default=False, help="Only warnings and errors.")
@click.pass_context
def cli(ctx, verbose, quiet):
    """
    Sparse random graphs, their local limits and their spectra.

    Examples:\n\n
        glim gen regular --n 4000 --d 4 --seed 7 -o g.glim\n
        glim spec g.glim --op adjacency --dense -o spectrum.json\n
        glim exp kesten-mckay --n 4000 --d 4 --seed 1\n
        glim exp friedman --config friedman.toml --jobs 4\n
        glim census g.glim --r 2\n
        glim nb-scatter er --n 400 --d 4 --seed 3 -o scatter.csv
    """
    ctx.ensure_object(dict)
    ctx.obj["quiet"] = quiet
    setup_logging(verbose, quiet)


# ===== gen
@cli.command(context_settings=EXTRA_ARGS)
@click.argument("ensemble")
@common_options
@click.pass_context
def gen(ctx, ensemble, config_path, seed, out, fmt):
    """Samples a graph from ENSEMBLE; parameters are passed as --key value."""
    config = RunConfig.from_sources(
        "gen",
        ensemble,
        config_path,
        {"seed": seed, "out": out, "params": parse_extra_args(ctx.args)},
    )
    if ensemble not in ENSEMBLES:
        raise ConfigError(
            f"Unknown ensemble {ensemble!r}; choose from {sorted(ENSEMBLES)}"
        )
    g = load_graph(config)
    logger.info(f"Sampled {g!r}")
    write_output(config, graph_to_text(g))
    return EXIT_OK


# ===== spec
def spectrum_report(
    g: MarkedGraph,
    op_name: str,
    dense: bool,
    extreme: int,
    bins: int,
    moments: int,
    max_dim: int,
):
    op = non_backtracking(g) if op_name == "nb" else weighted_adjacency(g)
    if dense:
        if op.symmetric:
            return eig_dense_symmetric(op, bins, moments)
        return eig_dense_nonsymmetric(op, max_dim=max_dim, moments=moments)
    if op.symmetric:
        top = eig_extreme_symmetric(op, extreme, "top")
        bottom = eig_extreme_symmetric(op, extreme, "bottom")
        second = top[1] if top.size > 1 else top[0]
        return SpectrumReport(
            eigenvalues=top,
            extremes=(float(top[0]), float(second), float(bottom[0])),
            method="lanczos",
            notes=[f"{extreme} top eigenvalues only; bottom: {bottom.tolist()}"],
        )
    values = eig_top_nonsymmetric(op, extreme)
    second = values[min(1, values.size - 1)]
    return SpectrumReport(
        eigenvalues=values,
        extremes=(complex(values[0]), complex(second), complex(values[-1])),
        method="arnoldi",
        notes=[f"{extreme} largest-modulus eigenvalues only"],
    )


@cli.command(context_settings=EXTRA_ARGS)
@click.argument("target")
@click.option(
    "--op",
    "op_name",
    default="adjacency",
    type=click.Choice(["adjacency", "nb"]),
    help="Operator.",
)
@click.option(
    "--dense/--extreme",
    default=True,
    help="Full spectrum, or extreme eigenvalues only.",
)
@click.option("-k", default=2, help="Number of extreme eigenvalues (with --extreme).")
@click.option("--bins", default=100, help="Histogram bins.")
@click.option("--moments", default=6, help="Highest ESD moment.")
@click.option(
    "--max-dim",
    default=DENSE_NONSYMMETRIC_LIMIT,
    help="Largest dense nonsymmetric solve.",
)
@click.option(
    "--plot",
    default=None,
    help="SVG histogram (real spectra) or scatter (complex).",
)
@common_options
@click.pass_context
def spec(
    ctx,
    target,
    op_name,
    dense,
    k,
    bins,
    moments,
    max_dim,
    plot,
    config_path,
    seed,
    out,
    fmt,
):
    """Spectrum of the adjacency or non-backtracking operator of TARGET.

    TARGET is a graph file or an ensemble.
    """
    config = RunConfig.from_sources(
        "spec",
        target,
        config_path,
        {
            "seed": seed,
            "out": out,
            "format": fmt,
            "params": parse_extra_args(ctx.args),
        },
    )
    g = load_graph(config)
    report = spectrum_report(g, op_name, dense, k, bins, moments, max_dim)
    if config.fmt == "csv":
        values = report.eigenvalues
        if report.is_real:
            text = csv_text(["value"], [[repr(float(x))] for x in values])
        else:
            text = csv_text(["re", "im"], scatter_rows(values))
    else:
        text = dumps({**report.to_dict(), "config": config.to_dict()}, indent=2) + "\n"
    write_output(config, text)
    if plot:
        if report.is_real and report.histogram is not None:
            svg_histogram(plot, report.histogram, title=f"{op_name} spectrum")
        else:
            svg_scatter(plot, report.eigenvalues, title=f"{op_name} spectrum")
    return EXIT_OK


# ===== exp
class ProgressAccumulator(TrialAccumulator):
    def __init__(self, progress, task):
        self.progress = progress
        self.task = task

    def after(self, trial):
        self.progress.update(self.task, advance=1)


def plot_accumulator(name, params, output):
    if name == "kesten-mckay":
        d = int(params["d"])
        return PlotAccumulator(output, density=lambda xs: kesten_mckay_density(d, xs))
    if name == "er-edges":
        return PlotAccumulator(output, radius=math.sqrt(float(params["d"])))
    return PlotAccumulator(output)


def print_report(report):
    table = Table(title=f"{report.name} checks", box=box.MINIMAL)
    table.add_column("CHECK")
    table.add_column("VALUE", justify="right")
    table.add_column("", justify="center")
    table.add_column("THRESHOLD", justify="right")
    table.add_column("REQUIRED", justify="center")
    table.add_column("RESULT", justify="center")
    for check in report.checks:
        table.add_row(
            check.name,
            f"{check.value:.4g}",
            check.relation,
            f"{check.threshold:.4g}",
            "yes" if check.required else "no",
            PASS_STYLE[check.passed],
        )
    console.print(table)

    table = Table(title="Trial Summary", box=box.MINIMAL)
    table.add_column("TRIALS", justify="right")
    table.add_column("AVG DURATION", justify="right")
    table.add_column("WALL CLOCK", justify="right")
    table.add_column("SEED", justify="right")
    table.add_column("VERDICT", justify="center")
    durations = [t.duration for t in report.trials]
    avg = sum(durations) / len(durations) if durations else 0.0
    table.add_row(
        str(len(report.trials)),
        format_secs(avg),
        format_secs(report.wall_clock),
        str(report.seed),
        PASS_STYLE[report.passed],
    )
    console.print(table)
    for note in report.notes:
        console.print(f"[yellow]note:[/yellow] {note}")


def trials_csv(report) -> str:
    columns = ["index", "seed"]
    rows = []
    for trial in report.trials:
        row = {"index": trial.spec.index, "seed": trial.spec.seed}
        row.update(trial.spec.params)
        row.update(
            {
                k: v
                for k, v in trial.stats.items()
                if isinstance(v, (bool, int, float, str))
            }
        )
        columns.extend(key for key in row if key not in columns)
        rows.append(row)
    return csv_text(columns, [[row.get(c, "") for c in columns] for row in rows])


@cli.command(context_settings=EXTRA_ARGS)
@click.argument("name", required=False)
@common_options
@click.option(
    "--jobs",
    type=int,
    default=None,
    help="Parallel trials (default: $GLIM_JOBS or 1).",
)
@click.option(
    "--tol",
    "tolerances",
    multiple=True,
    help="Tolerance override name=value (repeatable).",
)
@click.option(
    "--trial-dir",
    default=None,
    help="Directory for per-trial JSON (and CSV with --format csv).",
)
@click.option(
    "--plot-dir",
    default=None,
    help="Directory for per-trial SVG histograms and scatters.",
)
@click.option(
    "--code",
    default=None,
    help="Path to file with custom Experiments and Accumulators to import and use.",
)
@click.option(
    "--help-experiments",
    is_flag=True,
    default=False,
    help="Show experiment codes and exits.",
)
@click.pass_context
def exp(
    ctx,
    name,
    config_path,
    seed,
    out,
    fmt,
    jobs,
    tolerances,
    trial_dir,
    plot_dir,
    code,
    help_experiments,
):
    """Runs experiment NAME.

    Parameters are passed as --key value and override --config.
    """
    if code:
        load_code(code)
    if help_experiments or name is None:
        console.print(experiment_help_table())
        return EXIT_OK
    cli_experiment = find_experiment(name)
    if cli_experiment is None:
        raise ConfigError(f"Unknown experiment {name!r}; see --help-experiments")
    config = RunConfig.from_sources(
        "exp",
        name,
        config_path,
        {
            "seed": seed,
            "out": out,
            "format": fmt,
            "jobs": jobs,
            "params": parse_extra_args(ctx.args),
            "tolerances": parse_tolerances(tolerances),
        },
    )
    config.require_seed()
    experiment = cli_experiment.import_fn()
    params = experiment.resolve(config.params)

    statistics_accumulator = StatisticsAccumulator()
    accumulators = [statistics_accumulator]
    if trial_dir:
        ensure_dir(trial_dir)
        accumulators.append(JsonDataAccumulator(trial_dir))
        if config.fmt == "csv":
            accumulators.append(CsvDataAccumulator(trial_dir))
    if plot_dir:
        ensure_dir(plot_dir)
        accumulators.append(plot_accumulator(name, params, plot_dir))
    for accumulator_class in CUSTOM_ACCUMULATORS:
        accumulators.append(accumulator_class(experiment=experiment, config=config))

    def run(extra):
        return run_experiment(
            experiment,
            config.params,
            seed=config.seed,
            tolerances=config.tolerances,
            accumulators=accumulators + extra,
            jobs=config.jobs,
            config=config.to_dict(),
        )

    if ctx.obj.get("quiet"):
        report = run([])
    else:
        total = len(experiment.plan(params))
        with Progress(
            "[progress.description]{task.description}",
            BarColumn(),
            "[progress.percentage]{task.percentage:>3.0f}%",
            CustomTimeRemainingColumn(),
            console=console,
        ) as progress:
            task = progress.add_task(
                f"Running {total} trials of {name}...", total=total
            )
            report = run([ProgressAccumulator(progress, task)])
            progress.refresh()
        print_report(report)

    # without --out the report goes to stdout only when the tables are silenced
    if config.out or ctx.obj.get("quiet"):
        if config.fmt == "csv":
            write_output(config, trials_csv(report))
        else:
            write_output(config, dumps(report.to_dict(), indent=2) + "\n")
    return EXIT_OK if report.passed else EXIT_FAIL


# ===== census
@cli.command(context_settings=EXTRA_ARGS)
@click.argument("target")
@click.option("-r", "--r", "--radius", "radius", default=2, help="Ball radius.")
@common_options
@click.pass_context
def census(ctx, target, radius, config_path, seed, out, fmt):
    """Neighborhood distribution of TARGET (graph file or ensemble)."""
    config = RunConfig.from_sources(
        "census",
        target,
        config_path,
        {
            "seed": seed,
            "out": out,
            "format": fmt,
            "params": parse_extra_args(ctx.args),
        },
    )
    g = load_graph(config)
    distribution = neighborhood_distribution(g, radius)
    data = distribution.to_dict()
    if config.fmt == "csv":
        columns = ["code", "kind", "size", "exact", "count", "weight"]
        rows = [[c[key] for key in columns] for c in data["classes"]]
        text = csv_text(columns, rows)
    else:
        document = {"schema": "glim.census/1", **data, "config": config.to_dict()}
        text = dumps(document, indent=2) + "\n"
    write_output(config, text)
    logger.info(f"{len(distribution.weights)} classes at radius {radius}")
    return EXIT_OK


# ===== nb-scatter
@cli.command("nb-scatter", context_settings=EXTRA_ARGS)
@click.argument("target")
@click.option(
    "--weighted",
    is_flag=True,
    default=False,
    help="Use the marks of the half-edges.",
)
@click.option(
    "--max-dim",
    default=2000,
    help="Largest number of half-edges to diagonalize.",
)
@click.option(
    "--plot",
    default=None,
    help="SVG scatter with the circle of radius sqrt(|λ₁|).",
)
@common_options
@click.pass_context
def nb_scatter(ctx, target, weighted, max_dim, plot, config_path, seed, out, fmt):
    """Complex spectrum of the non-backtracking operator of TARGET as (re, im) CSV."""
    config = RunConfig.from_sources(
        "nb-scatter",
        target,
        config_path,
        {"seed": seed, "out": out, "params": parse_extra_args(ctx.args)},
    )
    g = load_graph(config)
    report = eig_dense_nonsymmetric(non_backtracking(g, weighted), max_dim=max_dim)
    write_output(config, csv_text(["re", "im"], scatter_rows(report.eigenvalues)))
    if plot:
        radius = math.sqrt(abs(report.extremes[0])) if report.extremes else None
        svg_scatter(plot, report.eigenvalues, radius, title="non-backtracking spectrum")
    return EXIT_OK


if __name__ == "__main__":
    cli()
