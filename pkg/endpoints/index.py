"""
Command-line entry: the fixedspace command group.
"""

import click

from config.fixedspace_config import TOOL_NAME, TOOL_VERSION
from endpoints.analyze import analyze
from endpoints.generate import generate
from endpoints.verify import verify_lemmas


@click.group(name=TOOL_NAME)
@click.version_option(TOOL_VERSION, prog_name=TOOL_NAME)
def cli():
    """Fixed spaces and block structure of PTP and CPTP super-operators."""


cli.add_command(analyze)
cli.add_command(generate)
cli.add_command(verify_lemmas)
