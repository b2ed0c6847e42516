"""Canonical JSON emission: fixed field order, 17-significant-digit floats.

Doubles round-trip exactly at 17 significant digits, so identical inputs
yield byte-identical reports regardless of platform.
"""

from __future__ import annotations

import json
import math

from .errors import ValidationError


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValidationError("reports may not contain NaN or infinities")
    if x == int(x) and abs(x) < 1e16:
        return f"{x:.1f}"
    return f"{x:.17g}"


def dumps(obj, indent: int = 0) -> str:
    """Serialize with insertion-ordered keys and canonical float formatting."""
    out: list[str] = []
    _emit(obj, out, indent, 0)
    return "".join(out)


def _emit(obj, out, indent, depth):
    pad = " " * (indent * (depth + 1)) if indent else ""
    close_pad = " " * (indent * depth) if indent else ""
    nl = "\n" if indent else ""
    sep = "," + nl if indent else ", "
    if obj is None or isinstance(obj, (bool, int)) and not isinstance(obj, float):
        out.append(json.dumps(obj))
    elif isinstance(obj, float):
        out.append(_fmt_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{" + nl)
        for i, (k, v) in enumerate(obj.items()):
            if not isinstance(k, str):
                raise ValidationError("JSON object keys must be strings")
            out.append(pad + json.dumps(k) + ": ")
            _emit(v, out, indent, depth + 1)
            if i < len(obj) - 1:
                out.append(sep)
        out.append(nl + close_pad + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        out.append("[" + nl)
        for i, v in enumerate(obj):
            if indent:
                out.append(pad)
            _emit(v, out, indent, depth + 1)
            if i < len(obj) - 1:
                out.append(sep)
        out.append(nl + close_pad + "]")
    else:
        raise ValidationError(f"cannot serialize {type(obj).__name__}")
