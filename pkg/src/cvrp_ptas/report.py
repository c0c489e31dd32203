"""Report rendering as JSON or as a flat key/value table."""
from __future__ import annotations

import json
from fractions import Fraction


def _plain(obj):
    if hasattr(obj, "to_dict"):
        return _plain(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, Fraction):
        return obj.numerator if obj.denominator == 1 else float(obj)
    return obj


def flatten(doc, prefix: str = "") -> list[tuple[str, object]]:
    """Dotted-key leaves of a nested document, keys sorted."""
    if isinstance(doc, dict):
        out = []
        for k in sorted(doc):
            out.extend(flatten(doc[k], f"{prefix}.{k}" if prefix else k))
        return out
    if isinstance(doc, list) and any(isinstance(v, (dict, list)) for v in doc):
        out = []
        for i, v in enumerate(doc):
            out.extend(flatten(v, f"{prefix}.{i}"))
        return out
    return [(prefix, doc)]


def emit_report(report, fmt: str = "table") -> str:
    """Render a report (anything with ``to_dict`` or a plain mapping).

    JSON output has sorted keys so identical runs give identical bytes. The
    table prints one ``key  value`` line per leaf with values JSON-encoded,
    so both formats carry the same numbers.
    """
    doc = _plain(report)
    if fmt == "json":
        return json.dumps(doc, sort_keys=True, indent=2)
    if fmt != "table":
        raise ValueError(f"unknown format {fmt!r}")
    rows = flatten(doc)
    width = max((len(k) for k, _ in rows), default=0)
    return "\n".join(f"{k.ljust(width)}  {json.dumps(v, sort_keys=True)}" for k, v in rows)


def parse_table(text: str) -> dict[str, object]:
    """Inverse of the table rendering: dotted key to decoded value."""
    out = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        key, _, raw = line.partition("  ")
        out[key.strip()] = json.loads(raw.strip())
    return out
