"""
Options and output helpers shared by the commands.
"""

import functools

import click

from config.fixedspace_config import DEFAULT_SAMPLES, get_exit_code, get_seed
from functions.exceptions import InputError
from functions.numerics import get_tolerance_policy


def tolerance_options(command):
    """Add --tol-rank, --tol-fixed, --tol-spec and --tol-cert."""
    for name, text in reversed([
        ("--tol-rank", "Relative singular-value cutoff"),
        ("--tol-fixed", "Fixed-point residual"),
        ("--tol-spec", "Eigenvalue clustering width"),
        ("--tol-cert", "Structure-residual acceptance"),
    ]):
        command = click.option(name, type=float, default=None, help=text)(command)
    return command


def run_options(command):
    """Add --seed, --samples and --out."""
    command = click.option("--out", type=click.Path(dir_okay=False), default=None,
                           help="Write the output to this file instead of stdout")(command)
    command = click.option("--samples", type=click.IntRange(min=1), default=None,
                           help=f"Random probes per check (default {DEFAULT_SAMPLES})")(command)
    command = click.option("--seed", type=int, default=None, help="Random seed")(command)
    return command


def resolve_run(tol_rank, tol_fixed, tol_spec, tol_cert, seed, samples):
    """Policy, seed and samples with flag > environment > default precedence."""
    policy = get_tolerance_policy(tol_rank=tol_rank, tol_fixed=tol_fixed, tol_spec=tol_spec, tol_cert=tol_cert)
    return policy, get_seed(seed), DEFAULT_SAMPLES if samples is None else samples


def write_output(text: str, out) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    else:
        click.echo(text)


def fail_input(error) -> None:
    """Report an input error on stderr and exit with code 1."""
    click.echo(f"error: {error.detail}", err=True)
    raise SystemExit(get_exit_code("input_error"))


def handles_input_errors(command):
    """Turn InputError into exit code 1."""
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except InputError as e:
            fail_input(e)
    return wrapper
