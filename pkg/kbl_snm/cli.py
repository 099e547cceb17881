"""Command line interface ``kbl``."""

import functools
import json
import sys
from os.path import join

import click

from . import DATADIR, __version__
from .check_config import CheckConfig
from .errors import BoundExhaustedError, KBLError
from .kripke import frame_properties, kripke_sat
from .log import setuplog
from .utils import (
    parse_formula,
    print_kripke,
    read_kripke,
    read_model,
    write_kripke,
    write_model,
)
from .workflows.bench import BenchSuite, run_bench
from .workflows.checker import Verdict, evaluate, outer_verdicts
from .workflows.cost import cost_report
from .workflows.deduction import group_premises, prove
from .workflows.syntax import ground, literalize, to_text
from .workflows.translate import kripke_to_snm, kt

EXIT_TRUE, EXIT_FALSE, EXIT_ERROR, EXIT_BOUND = 0, 1, 2, 3


def _handle_errors(func):
    """Map errors to the exit codes of the command line."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except BoundExhaustedError as err:
            click.echo(f"error: {err}", err=True)
            sys.exit(EXIT_BOUND)
        except (KBLError, ValueError, OSError) as err:
            click.echo(f"error: {err}", err=True)
            sys.exit(EXIT_ERROR)

    return wrapper


def _echo_json(data) -> None:
    click.echo(json.dumps(data, indent=2, default=str))


json_option = click.option("--json", "as_json", is_flag=True, help="Print JSON.")


@click.group()
@click.version_option(__version__, prog_name="kbl")
@click.option("-v", "--verbose", count=True, help="Increase verbosity.")
@click.option("-q", "--quiet", count=True, help="Decrease verbosity.")
@click.option(
    "--config",
    type=click.Path(exists=True, dir_okay=False),
    help="Settings file with 'key = value' lines.",
)
@click.pass_context
@_handle_errors
def main(ctx, verbose, quiet, config):
    """Model checking of knowledge-based logic over social network models."""
    log_level = min(max(20 - 10 * verbose + 10 * quiet, 10), 50)
    setuplog("kbl_snm", log_level=log_level)
    ctx.obj = CheckConfig.from_file(config) if config else CheckConfig()


def _config(ctx, **overrides) -> CheckConfig:
    cfg = CheckConfig.from_dict(ctx.obj.to_dict())
    for key, value in overrides.items():
        if value is not None:
            cfg[key] = value
    cfg.validate()
    return cfg


## MODEL CHECKING ##


@main.command()
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@click.argument("formula")
@click.option("--common-bound", type=int, help="Unroll bound of common knowledge.")
@click.option("--parallel", is_flag=True, default=None, help="Prove in threads.")
@json_option
@click.pass_context
@_handle_errors
def check(ctx, model, formula, common_bound, parallel, as_json):
    """Check FORMULA on the social network MODEL.

    Exits 0 if it holds, 1 if not and 3 if common knowledge is undecided
    within the bound.
    """
    cfg = _config(ctx, common_bound=common_bound, parallel=parallel)
    snm = read_model(model)
    phi = parse_formula(formula, snm.vocab)
    verdict = evaluate(snm, phi, cfg)
    if as_json:
        _echo_json(
            {
                "formula": to_text(phi),
                "verdict": verdict.value,
                "outer_k": outer_verdicts(snm, phi, cfg),
                "cost": cost_report(snm, phi, cfg, run_check=False).to_dict(),
            }
        )
    else:
        click.echo(verdict.value)
    codes = {Verdict.TRUE: EXIT_TRUE, Verdict.FALSE: EXIT_FALSE}
    sys.exit(codes.get(verdict, EXIT_BOUND))


@main.command()
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@click.argument("agents")
@click.argument("formula")
@click.option("--trace", is_flag=True, help="Print the tableau and countermodel.")
@json_option
@click.pass_context
@_handle_errors
def derive(ctx, model, agents, formula, trace, as_json):
    """Decide whether the knowledge of AGENTS derives FORMULA.

    AGENTS is one agent or a comma separated group, whose knowledge bases
    are joined. Exits 0 if derivable and 1 if not.
    """
    cfg = _config(ctx, trace=trace or None)
    snm = read_model(model)
    phi = ground(parse_formula(formula, snm.vocab), snm.vocab)
    names = [a.strip() for a in agents.split(",") if a.strip()]
    kbs = [snm.kb(a) for a in names]
    if len(kbs) == 1:
        group, premises = None, list(kbs[0].closure())
    else:
        group, premises = group_premises(kbs)
    result = prove(premises, phi, budget=cfg.step_budget, trace=cfg.trace, group=group)
    if as_json:
        countermodel = result.countermodel
        _echo_json(
            {
                "formula": to_text(phi),
                "agents": names,
                "derived": result.proved,
                "steps": result.steps,
                "countermodel": print_kripke(countermodel) if countermodel else None,
                "trace": result.trace if cfg.trace else None,
            }
        )
    else:
        click.echo("derived" if result.proved else "not derived")
        if cfg.trace:
            click.echo(result.text())
    sys.exit(EXIT_TRUE if result.proved else EXIT_FALSE)


@main.command(name="kripke-sat")
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@click.argument("state")
@click.argument("formula")
@json_option
@_handle_errors
def kripke_sat_cmd(model, state, formula, as_json):
    """Check FORMULA at STATE of the Kripke MODEL. Exits 0 if it holds."""
    m = read_kripke(model)
    phi = literalize(parse_formula(formula))
    holds = kripke_sat(m, state, phi)
    if as_json:
        frames = frame_properties(m)
        _echo_json(
            {
                "formula": to_text(phi),
                "state": state,
                "holds": holds,
                "serial": frames.serial,
                "transitive": frames.transitive,
            }
        )
    else:
        click.echo("true" if holds else "false")
    sys.exit(EXIT_TRUE if holds else EXIT_FALSE)


@main.command()
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@click.argument("formula")
@click.option("--common-bound", type=int, help="Unroll bound of common knowledge.")
@json_option
@click.pass_context
@_handle_errors
def cost(ctx, model, formula, common_bound, as_json):
    """Print the symbolic checking costs of FORMULA on MODEL."""
    cfg = _config(ctx, common_bound=common_bound)
    snm = read_model(model)
    report = cost_report(snm, parse_formula(formula, snm.vocab), cfg)
    if as_json:
        _echo_json(report.to_dict())
    else:
        for key, value in report.to_dict().items():
            click.echo(f"{key.ljust(20)} = {value}")


@main.command()
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@json_option
@_handle_errors
def validate(model, as_json):
    """List the diagnostics of MODEL. Exits 0 if there are none."""
    diagnostics = read_model(model, validate=False).validate()
    if as_json:
        _echo_json({"model": model, "diagnostics": diagnostics})
    else:
        for line in diagnostics:
            click.echo(line)
    sys.exit(EXIT_FALSE if diagnostics else EXIT_TRUE)


## TRANSLATION ##


@main.command()
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@click.option("--marked", is_flag=True, help="Use the marked characteristic set.")
@click.option("--guard", type=int, help="Largest number of subformulas.")
@click.option("-o", "--output", type=click.Path(dir_okay=False), help="Output file.")
@click.pass_context
@_handle_errors
def translate(ctx, model, marked, guard, output):
    """Translate MODEL to the canonical Kripke model of its characteristic
    formula."""
    cfg = _config(ctx, canonical_guard=guard)
    snm = read_model(model)
    m = kt(snm, marked=marked, guard=cfg.canonical_guard, budget=cfg.step_budget)
    if output:
        write_kripke(output, m)
    else:
        click.echo(print_kripke(m), nl=False)


@main.command()
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", type=click.Path(dir_okay=False), help="Output file.")
@_handle_errors
def invert(model, output):
    """Reconstruct the social network model of a marked Kripke MODEL."""
    snm = kripke_to_snm(read_kripke(model))
    if output:
        write_model(output, snm)
    else:
        click.echo(snm.to_text(), nl=False)


## BENCHMARK ##


@main.command()
@click.argument("suite", required=False, type=click.Path(exists=True, dir_okay=False))
@click.option("--seed", type=int, help="Seed of the generated corpus.")
@click.option("--guard", type=int, help="Largest number of subformulas.")
@click.option("--parallel", is_flag=True, help="Run rows in threads.")
@click.option("-o", "--output", type=click.Path(dir_okay=False), help="CSV file.")
@json_option
@click.pass_context
@_handle_errors
def bench(ctx, suite, seed, guard, parallel, output, as_json):
    """Run a benchmark SUITE, by default the shipped bench.yml.

    Exits 1 if a row violates the bound inequality.
    """
    cfg = _config(ctx)
    bench_suite = BenchSuite.from_yaml(suite or join(DATADIR, "bench.yml"))
    if seed is not None:
        bench_suite.seed = seed
    if guard is not None:
        bench_suite.guard = guard
    if parallel:
        bench_suite.parallel = True
    df = run_bench(bench_suite, cfg)
    if output:
        df.to_csv(output)
    if as_json:
        click.echo(df.to_json(orient="records", indent=2))
    else:
        click.echo(df.to_string())
    sys.exit(EXIT_FALSE if df["bound_holds"].eq(False).any() else EXIT_TRUE)


if __name__ == "__main__":
    main()
