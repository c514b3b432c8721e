"""Deterministic CSV/JSON emission.

Floats are printed with 12 significant digits everywhere; JSON keys are
sorted.  Identical inputs and parameters give byte-identical output.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import InputError

TOOL = "plasticity"
SIG_DIGITS = 12


def fmt_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    s = format(x, f".{SIG_DIGITS}g")
    return "0" if s == "-0" else s


def _normalize(obj):
    """Recursively convert numpy/enum values and round floats for JSON."""
    if isinstance(obj, dict):
        return {str(k): _normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_normalize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _normalize(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return None
        return float(fmt_float(x)) if x != 0 else 0.0
    if hasattr(obj, "value") and isinstance(obj.value, str):
        return obj.value
    return obj


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt_float(v)
    return str(v)


@dataclass
class Report:
    command: str
    parameters: dict
    result: object
    input_digest: str | None = None
    table: tuple = field(default=())  # (header, rows) for CSV output
    plain: str | None = None  # replaces CSV when a command emits bare lines

    def to_json(self, version: str) -> str:
        doc = {
            "tool": TOOL,
            "version": version,
            "command": self.command,
            "input_digest": self.input_digest,
            "parameters": self.parameters,
            "result": self.result,
        }
        return json.dumps(_normalize(doc), sort_keys=True, indent=2, ensure_ascii=True) + "\n"

    def to_csv(self) -> str:
        header, rows = self.table
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
        text = buf.getvalue()
        if not text.isascii():
            raise InputError("CSV output must be ASCII; rename non-ASCII letters")
        return text


def flatten(obj, prefix: str = "") -> list:
    """``(key, value)`` pairs for a nested dict, dotted keys, lists indexed."""
    out = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            out.extend(flatten(obj[k], f"{prefix}.{k}" if prefix else str(k)))
    elif isinstance(obj, (list, tuple, np.ndarray)):
        for i, v in enumerate(obj):
            out.extend(flatten(v, f"{prefix}.{i}"))
    else:
        out.append((prefix, obj))
    return out
