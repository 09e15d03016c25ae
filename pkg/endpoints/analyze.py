"""
analyze: end-to-end structural analysis of a channel file.
"""

import logging

import click

from config.fixedspace_config import get_exit_code
from endpoints.options import handles_input_errors, resolve_run, run_options, tolerance_options, write_output
from functions.channelio import load_channel
from functions.pipeline import analyze_channel, format_report

logger = logging.getLogger(__name__)


@click.command("analyze")
@click.argument("path", type=click.Path(dir_okay=False))
@tolerance_options
@run_options
@handles_input_errors
def analyze(path, tol_rank, tol_fixed, tol_spec, tol_cert, seed, samples, out):
    """
    Analyze the channel in PATH and print a JSON report.

    Exit codes: 0 Certified, 1 input error, 2 Undetermined, 3 Inconsistent.
    """
    policy, seed, samples = resolve_run(tol_rank, tol_fixed, tol_spec, tol_cert, seed, samples)
    psi = load_channel(path)
    report = analyze_channel(psi, policy, seed, samples)
    write_output(format_report(report), out)
    logger.info(f"Analysis finished with status {report.status}")
    raise SystemExit(get_exit_code(report.status))
