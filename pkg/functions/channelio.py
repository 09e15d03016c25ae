"""
JSON channel format: {"dim": d, "kraus" | "choi" | "natural": ...}.

Complex scalars are [re, im] pairs and matrices are row-major nested arrays.
"""

import json
import logging
from typing import Any, Dict, List

import numpy as np
from pydantic import ValidationError

from functions.channel import build_superop
from functions.exceptions import InputError
from models.channel_models import SuperOperator
from models.report_models import ChannelFileModel

logger = logging.getLogger(__name__)


def encode_matrix(matrix: np.ndarray) -> List[List[List[float]]]:
    return [[[float(entry.real), float(entry.imag)] for entry in row] for row in np.asarray(matrix, dtype=complex)]


def decode_matrix(rows, name: str) -> np.ndarray:
    try:
        pairs = np.array(rows, dtype=float)
    except ValueError:
        raise InputError.from_template("invalid_channel", reason=f"{name} is not a rectangular matrix")
    if pairs.ndim != 3 or pairs.shape[2] != 2:
        raise InputError.from_template("invalid_channel", reason=f"{name} entries must be [re, im] pairs")
    return pairs[..., 0] + 1j * pairs[..., 1]


def channel_to_payload(psi: SuperOperator) -> Dict[str, Any]:
    """Kraus form when known, otherwise the natural matrix."""
    if psi.kraus is not None:
        return {"dim": psi.dim, "kraus": [encode_matrix(op) for op in psi.kraus]}
    return {"dim": psi.dim, "natural": encode_matrix(psi.natural)}


def dump_channel(psi: SuperOperator) -> str:
    return json.dumps(channel_to_payload(psi), indent=2, sort_keys=True)


def parse_channel(text: str) -> SuperOperator:
    """
    Parse and validate a channel document.

    Raises:
        InputError: malformed JSON (with line and column) or an invalid channel
    """
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError.from_template("malformed_json", line=e.lineno, column=e.colno, reason=e.msg)
    try:
        model = ChannelFileModel.model_validate(payload)
    except ValidationError as e:
        error = e.errors()[0]
        location = ".".join(str(part) for part in error["loc"]) or "document"
        raise InputError.from_template("invalid_channel", reason=f"{location}: {error['msg']}")

    if model.kraus is not None:
        return build_superop(model.dim, kraus=[decode_matrix(op, f"kraus[{k}]") for k, op in enumerate(model.kraus)])
    if model.choi is not None:
        return build_superop(model.dim, choi=decode_matrix(model.choi, "choi"))
    return build_superop(model.dim, natural=decode_matrix(model.natural, "natural"))


def load_channel(path: str) -> SuperOperator:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as e:
        raise InputError.from_template("invalid_channel", reason=f"cannot read {path}: {e.strerror}")
    psi = parse_channel(text)
    logger.info(f"Loaded channel with d={psi.dim} from {path}")
    return psi
