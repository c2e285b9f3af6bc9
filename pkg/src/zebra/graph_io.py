"""Reading and writing confusion graphs.

Text format: the first non-comment line holds ``k``; every further line an
edge ``a b``. JSON format: ``{"k": 3, "edges": [[1, 2]]}``. Letters are
1-based unless ``zero_based`` is set (``0..k-1``, as in ``s0, s1, s2``);
a JSON document may also carry ``"zero_based": true``. Letters may be
written bare or with an ``s``/``σ`` prefix.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Union

from .graph import ConfusionGraph


class GraphFormatError(ValueError):
    pass


def _letter(token, zero_based: bool) -> int:
    text = str(token).strip()
    if text[:1] in ("s", "σ"):
        text = text[1:]
    try:
        value = int(text)
    except ValueError:
        raise GraphFormatError(f"bad letter {token!r}") from None
    if value == 0 and not zero_based:
        raise GraphFormatError("letter 0 in a 1-based graph; use zero-based input")
    return value + 1 if zero_based else value


def _build(k, edges, zero_based: bool) -> ConfusionGraph:
    try:
        k = int(k)
        pairs = [(_letter(a, zero_based), _letter(b, zero_based)) for a, b in edges]
        return ConfusionGraph(k, pairs)
    except GraphFormatError:
        raise
    except (TypeError, ValueError) as exc:
        raise GraphFormatError(str(exc)) from None


def parse_graph_text(text: str, zero_based: bool = False) -> ConfusionGraph:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise GraphFormatError("empty graph file")
    edges = []
    for ln in lines[1:]:
        parts = ln.replace(",", " ").split()
        if len(parts) != 2:
            raise GraphFormatError(f"expected an edge 'a b', got {ln!r}")
        edges.append(parts)
    return _build(lines[0], edges, zero_based)


def parse_graph_json(obj: Union[str, dict], zero_based: bool = False) -> ConfusionGraph:
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict) or "k" not in obj:
        raise GraphFormatError("JSON graph needs a 'k' field")
    zero_based = bool(obj.get("zero_based", zero_based))
    return _build(obj["k"], obj.get("edges", []), zero_based)


def parse_graph(text: str, zero_based: bool = False) -> ConfusionGraph:
    if text.lstrip().startswith("{"):
        return parse_graph_json(text, zero_based)
    return parse_graph_text(text, zero_based)


def load_graph(path: Union[str, Path], zero_based: bool = False) -> ConfusionGraph:
    return parse_graph(Path(path).read_text(encoding="utf-8"), zero_based)


def graph_to_dict(g: ConfusionGraph, zero_based: bool = False) -> dict:
    off = 1 if zero_based else 0
    out = {"k": g.k, "edges": [[a - off, b - off] for a, b in sorted(g.edges)]}
    if zero_based:
        out["zero_based"] = True
    return out


def graph_to_text(g: ConfusionGraph) -> str:
    return "\n".join([str(g.k)] + [f"{a} {b}" for a, b in sorted(g.edges)]) + "\n"
