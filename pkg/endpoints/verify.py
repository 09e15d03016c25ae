"""
verify-lemmas: oracle sweep over the projection of a channel file.
"""

import click

from config.fixedspace_config import STATUS_INCONSISTENT, get_exit_code
from endpoints.options import handles_input_errors, resolve_run, run_options, tolerance_options, write_output
from functions.channelio import load_channel
from functions.pipeline import format_verdicts, has_failures, verify_channel


@click.command("verify-lemmas")
@click.argument("path", type=click.Path(dir_okay=False))
@tolerance_options
@run_options
@handles_input_errors
def verify_lemmas(path, tol_rank, tol_fixed, tol_spec, tol_cert, seed, samples, out):
    """
    Run the lemma oracles on PATH and print JSON lines.

    Exits 0 when no verdict failed.
    """
    policy, seed, samples = resolve_run(tol_rank, tol_fixed, tol_spec, tol_cert, seed, samples)
    psi = load_channel(path)
    verdicts, notes = verify_channel(psi, policy, samples, seed)
    write_output(format_verdicts(verdicts, notes, seed), out)
    raise SystemExit(get_exit_code(STATUS_INCONSISTENT) if has_failures(verdicts) else 0)
