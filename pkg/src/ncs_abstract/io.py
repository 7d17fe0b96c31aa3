"""JSON interchange and DOT export.

System files are JSON objects with ``states``, ``initial``, ``inputs``
(arrays of strings), ``transitions`` (array of ``[src, input, dst]``),
``outputs`` (object mapping state to label) and ``metric`` (the kind
string).  Labels are strings for atoms, arrays of numbers for vectors, the
literal string ``"__q__"`` for the dummy symbol and ``{"pair": [l1, l2]}``
for pairs.

Relation files are JSON arrays of ``[left-state, right-state]`` string
pairs.  Plant-spec files carry either ``A``/``B`` matrices or an ``rhs``
name plus ``domain``, ``input_box``, ``tau``, ``eta``, ``mu``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Union

from .builder import Q_TOKEN
from .errors import NcsAbstractError, ParseError
from .fts import MetricDescriptor, OutputLabel, Pair, Q, System
from .grid import PlantSpec
from .relations import Relation

PathLike = Union[str, Path]


def label_to_json(label: OutputLabel):
    if label is Q:
        return Q_TOKEN
    if isinstance(label, Pair):
        return {"pair": [label_to_json(label.first), label_to_json(label.second)]}
    if isinstance(label, tuple):
        return list(label)
    if isinstance(label, str):
        return label
    raise ParseError(f"cannot serialize output label {label!r}")


def label_from_json(raw) -> OutputLabel:
    if raw == Q_TOKEN:
        return Q
    if isinstance(raw, str):
        return raw
    if isinstance(raw, list):
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw):
            raise ParseError(f"vector label must hold numbers: {raw!r}")
        return tuple(float(v) for v in raw)
    if isinstance(raw, dict) and set(raw) == {"pair"} and len(raw["pair"]) == 2:
        first, second = (label_from_json(part) for part in raw["pair"])
        return Pair(first, second)
    raise ParseError(f"cannot decode output label {raw!r}")


def system_to_json(system: System) -> dict:
    states = sorted(system.states)
    if not all(isinstance(s, str) for s in states) or not all(
        isinstance(u, str) for u in system.inputs
    ):
        raise ParseError("only systems with string identifiers can be serialized")
    return {
        "states": states,
        "initial": sorted(system.initial),
        "inputs": sorted(system.inputs),
        "transitions": [list(t) for t in sorted(system.transitions)],
        "outputs": {s: label_to_json(system.outputs[s]) for s in states},
        "metric": system.metric.kind,
    }


def system_from_json(data: dict) -> System:
    try:
        states = data["states"]
        initial = data["initial"]
        inputs = data["inputs"]
        transitions = data["transitions"]
        outputs = data["outputs"]
        metric = data["metric"]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"system object is missing field {exc}") from exc
    if not states:
        raise ParseError("system object declares no states")
    try:
        return System(
            states=states,
            initial=initial,
            inputs=inputs,
            transitions=[tuple(t) for t in transitions],
            outputs={s: label_from_json(lab) for s, lab in outputs.items()},
            metric=MetricDescriptor(metric),
        )
    except NcsAbstractError as exc:
        raise ParseError(f"inconsistent system object: {exc}") from exc


def load_system(path: PathLike) -> System:
    """Read a system from a JSON file; raises :class:`ParseError` with the
    offending location on malformed input."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: not valid JSON ({exc})") from exc
    try:
        return system_from_json(data)
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def save_system(system: System, path: PathLike) -> None:
    Path(path).write_text(json.dumps(system_to_json(system), indent=2) + "\n", encoding="utf-8")


def relation_to_json(relation: Relation) -> list:
    return sorted([str(a), str(b)] for a, b in relation.pairs)


def load_relation(path: PathLike, left: System, right: System) -> Relation:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(data, list) or not all(isinstance(p, list) and len(p) == 2 for p in data):
        raise ParseError(f"{path}: a relation file is an array of [left, right] pairs")
    try:
        return Relation(left, right, frozenset((a, b) for a, b in data))
    except NcsAbstractError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def save_relation(relation: Relation, path: PathLike) -> None:
    Path(path).write_text(json.dumps(relation_to_json(relation), indent=2) + "\n", encoding="utf-8")


def plant_spec_from_json(data: dict) -> PlantSpec:
    try:
        kwargs = {
            "domain": [tuple(ax) for ax in data["domain"]],
            "input_box": [tuple(ax) for ax in data["input_box"]],
            "tau": data["tau"],
            "eta": data["eta"],
            "mu": data["mu"],
        }
    except (KeyError, TypeError) as exc:
        raise ParseError(f"plant spec is missing field {exc}") from exc
    if "rhs" in data:
        kwargs["rhs"] = data["rhs"]
    else:
        try:
            kwargs["a"] = [tuple(row) for row in data["A"]]
            kwargs["b"] = [tuple(row) for row in data["B"]]
        except (KeyError, TypeError) as exc:
            raise ParseError("plant spec needs either matrices A and B or an rhs name") from exc
    try:
        return PlantSpec(**kwargs)
    except NcsAbstractError as exc:
        raise ParseError(f"inconsistent plant spec: {exc}") from exc


def load_plant_spec(path: PathLike) -> PlantSpec:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: not valid JSON ({exc})") from exc
    try:
        return plant_spec_from_json(data)
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def _dot_quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(system: System, graph_name: str = "model") -> str:
    """Graphviz rendering: node label = state, edge label = input, initial
    states marked by sourceless arrows.  Output is sorted, so the edge set
    is layout-independent and diffs cleanly."""
    lines = [f"digraph {_dot_quote(graph_name)} {{", "  rankdir=LR;", "  node [shape=box];"]
    initial = sorted(map(str, system.initial))
    for i, state in enumerate(initial):
        lines.append(f'  "__init_{i}" [shape=point, style=invis];')
    for state in sorted(map(str, system.states)):
        lines.append(f"  {_dot_quote(state)};")
    for i, state in enumerate(initial):
        lines.append(f'  "__init_{i}" -> {_dot_quote(state)};')
    for src, label, dst in sorted((str(a), str(u), str(b)) for a, u, b in system.transitions):
        lines.append(f"  {_dot_quote(src)} -> {_dot_quote(dst)} [label={_dot_quote(label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
