"""
generate: write a zoo channel in the JSON channel format.
"""

import logging
from typing import List, Optional, Tuple

import click
from pydantic import ValidationError

from config.fixedspace_config import CASE_HALF, CASE_PARTITION, ZOO_KINDS
from endpoints.options import handles_input_errors, write_output
from functions.channelio import dump_channel
from functions.exceptions import InputError
from functions.zoo import builtin_channel
from models.report_models import ZooSpec

logger = logging.getLogger(__name__)


def _invalid(name: str, text: str) -> InputError:
    return InputError.from_template("invalid_parameter", name=name, reason=f"cannot parse {text!r}")


def parse_floats(text: Optional[str], name: str) -> Optional[List[float]]:
    if text is None:
        return None
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise _invalid(name, text)


def parse_blocks(text: Optional[str]) -> Optional[List[Tuple[int, List[float]]]]:
    """"2:0.75,0.25;1:1" -> [(2, [0.75, 0.25]), (1, [1.0])]."""
    if text is None:
        return None
    blocks = []
    try:
        for item in text.split(";"):
            dim_y, spectrum = item.split(":")
            blocks.append((int(dim_y), parse_floats(spectrum, "blocks")))
    except ValueError:
        raise _invalid("blocks", text)
    return blocks


def parse_partition(text: Optional[str]) -> Optional[Tuple[List[int], List[int]]]:
    """One-based "1;2" -> ([0], [1]); an empty side is allowed, as in "1,2;"."""
    if text is None:
        return None
    parts = text.split(";")
    if len(parts) != 2:
        raise _invalid("partition", text)
    try:
        s0, s1 = ([int(k) - 1 for k in part.split(",") if k.strip()] for part in parts)
    except ValueError:
        raise _invalid("partition", text)
    return s0, s1


def parse_factors(text: Optional[str]) -> Optional[List[Tuple[int, int]]]:
    """"2x2,1x1" -> [(2, 2), (1, 1)]."""
    if text is None:
        return None
    try:
        return [tuple(int(n) for n in item.split("x")) for item in text.split(",")]
    except ValueError:
        raise _invalid("factors", text)


@click.command("generate")
@click.argument("kind", type=click.Choice([kind.replace("_", "-") for kind in ZOO_KINDS]))
@click.option("--dim", type=int, default=None, help="Dimension d")
@click.option("--p", type=float, default=None, help="Noise parameter in [0, 1]")
@click.option("--phases", default=None, help="Eigenphases of a diagonal unitary, comma separated")
@click.option("--blocks", default=None, help='Conditional-expectation blocks, e.g. "2:0.75,0.25;1:1"')
@click.option("--transient", type=int, default=0, help="Dimensions drained into the first block")
@click.option("--m", "m", type=int, default=None, help="Block dimension of a spec-case projector")
@click.option("--r", "r", default=None, help="Spectrum of a spec-case projector, comma separated")
@click.option("--partition", default=None, help='One-based (S0;S1), e.g. "1;2"; omit for the Half case')
@click.option("--l", "l", type=int, default=None, help="Number of blocks in a spec-case class")
@click.option("--pad", type=int, default=0, help="Dimension of an appended depolarizing block")
@click.option("--factors", default=None, help='Structured-channel factors, e.g. "2x2,1x1"')
@click.option("--rotate", is_flag=True, help="Conjugate by a Haar-random unitary")
@click.option("--kraus", "kraus_count", type=int, default=None, help="Number of Kraus operators")
@click.option("--seed", type=int, default=None, help="Random seed")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Output file")
@handles_input_errors
def generate(kind, dim, p, phases, blocks, transient, m, r, partition, l, pad, factors, rotate,
             kraus_count, seed, out):
    """Generate a channel of KIND as a JSON channel file."""
    parsed_partition = parse_partition(partition)
    try:
        spec = ZooSpec(
            kind=kind, dim=dim, p=p, phases=parse_floats(phases, "phases"),
            blocks=parse_blocks(blocks), transient=transient, m=m, r=parse_floats(r, "r"),
            case=CASE_PARTITION if parsed_partition is not None else CASE_HALF,
            partition=parsed_partition, l=l, pad=pad, factors=parse_factors(factors),
            rotate=rotate, kraus_count=kraus_count, seed=seed
        )
    except ValidationError as e:
        error = e.errors()[0]
        raise InputError.from_template(
            "invalid_parameter", name=".".join(str(part) for part in error["loc"]), reason=error["msg"]
        )
    psi = builtin_channel(spec)
    write_output(dump_channel(psi), out)
    logger.info(f"Generated {kind} channel with d={psi.dim}")
