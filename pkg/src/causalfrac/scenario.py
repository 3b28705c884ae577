"""Scenario files: JSON documents describing an order, a space and a table.

Two shapes are accepted::

    {"builtin": "interleaved-bell", "gamma0": 0.3, "gamma1": 1.2, "variant": "base"}

    {"events": ["A", "B"], "covers": [["A", "B"]],
     "inputs": [2, 2], "outputs": [2, 2],
     "table": [["0.5", "0.5", "0", "0"], ...]}

Explicit tables have one row per joint input index and one column per joint
output index (lowest event = least significant digit). Probabilities are
written as decimal strings with 17 significant digits so that a
write/read cycle is bit-exact; plain JSON numbers are accepted on input.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .distributions import TOL_INGESTED, ConditionalDistribution, pr_box
from .errors import CausalFracError, ValidationError
from .joint import SpaceSpec
from .order import StaticCausalOrder, make_order
from .quantum import (
    TSIRELSON_ANGLES,
    VARIANTS,
    ScenarioParams,
    bipartite_bell_distribution,
    interleaved_distribution,
)

BUILTINS = ("interleaved-bell", "bipartite-bell", "chsh", "pr-box")


class ScenarioError(CausalFracError, ValueError):
    """Malformed scenario or order file; the message names the offending field."""


@dataclass(frozen=True)
class Scenario:
    distribution: ConditionalDistribution
    name: str = "explicit"

    @property
    def order(self) -> StaticCausalOrder:
        return self.distribution.order

    @property
    def spec(self) -> SpaceSpec:
        return self.distribution.spec


def _field(doc: dict, key: str, where: str, kind=None):
    if key not in doc:
        raise ScenarioError(f"{where}: missing field '{key}'")
    value = doc[key]
    if kind is not None and not isinstance(value, kind):
        raise ScenarioError(f"{where}: field '{key}' must be {getattr(kind, '__name__', kind)}")
    return value


def _angle(doc: dict, key: str, where: str, degrees: bool) -> float:
    value = _field(doc, key, where)
    try:
        g = float(value)
    except (TypeError, ValueError):
        raise ScenarioError(f"{where}: field '{key}' is not a number: {value!r}") from None
    return math.radians(g) if degrees else g


def order_from_doc(doc: Any, where: str = "order") -> StaticCausalOrder:
    if not isinstance(doc, dict):
        raise ScenarioError(f"{where}: expected an object with 'events' and 'covers'")
    events = _field(doc, "events", where, list)
    covers = doc.get("covers", [])
    if not isinstance(covers, list) or any(not (isinstance(c, list) and len(c) == 2) for c in covers):
        raise ScenarioError(f"{where}: field 'covers' must be a list of [lower, upper] pairs")
    try:
        return make_order([str(e) for e in events], [(str(a), str(b)) for a, b in covers])
    except (CausalFracError, ValueError, KeyError) as exc:
        raise ScenarioError(f"{where}: {exc}") from exc


def order_to_doc(order: StaticCausalOrder) -> dict:
    return {"events": list(order.labels), "covers": [list(p) for p in order.covers()]}


def _cards(doc: dict, key: str, n: int, where: str) -> tuple[int, ...]:
    value = _field(doc, key, where)
    if isinstance(value, int):
        value = [value] * n
    if not isinstance(value, list) or len(value) != n or any(not isinstance(v, int) or v < 1 for v in value):
        raise ScenarioError(f"{where}: field '{key}' must be {n} positive integers")
    return tuple(value)


def _parse_table(rows: Any, spec: SpaceSpec, where: str) -> np.ndarray:
    if not isinstance(rows, list) or len(rows) != spec.n_inputs:
        raise ScenarioError(f"{where}: field 'table' must have {spec.n_inputs} rows (one per joint input)")
    table = np.zeros((spec.n_inputs, spec.n_outputs))
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != spec.n_outputs:
            raise ScenarioError(f"{where}: table row {i} must have {spec.n_outputs} entries")
        for o, v in enumerate(row):
            try:
                table[i, o] = float(v)
            except (TypeError, ValueError):
                raise ScenarioError(f"{where}: table[{i}][{o}] is not a number: {v!r}") from None
    return table


def scenario_from_doc(doc: Any, *, degrees: bool = False, tol: float | None = None, renormalize: bool = False) -> Scenario:
    where = "scenario"
    if not isinstance(doc, dict):
        raise ScenarioError(f"{where}: top level must be an object")
    degrees = bool(doc.get("degrees", degrees))
    if "builtin" in doc:
        name = doc["builtin"]
        if name == "interleaved-bell":
            variant = doc.get("variant", "base")
            if variant not in VARIANTS:
                raise ScenarioError(f"{where}: field 'variant' must be one of {VARIANTS}")
            params = ScenarioParams(_angle(doc, "gamma0", where, degrees), _angle(doc, "gamma1", where, degrees), variant)
            return Scenario(interleaved_distribution(params), name)
        if name == "bipartite-bell":
            angles = []
            for key in ("angles_a", "angles_b"):
                vals = _field(doc, key, where, list)
                try:
                    angles.append([math.radians(float(v)) if degrees else float(v) for v in vals])
                except (TypeError, ValueError):
                    raise ScenarioError(f"{where}: field '{key}' must be a list of numbers") from None
            return Scenario(bipartite_bell_distribution(*angles), name)
        if name == "chsh":
            return Scenario(bipartite_bell_distribution(*TSIRELSON_ANGLES), name)
        if name == "pr-box":
            return Scenario(pr_box(), name)
        raise ScenarioError(f"{where}: unknown builtin {name!r}; choose from {BUILTINS}")

    order = order_from_doc(doc, where)
    spec = SpaceSpec(_cards(doc, "inputs", order.n, where), _cards(doc, "outputs", order.n, where))
    table = _parse_table(_field(doc, "table", where), spec, where)
    tol = float(doc.get("tol", TOL_INGESTED)) if tol is None else tol
    try:
        d = ConditionalDistribution(order, spec, table, tol=tol, renormalize=renormalize)
    except ValidationError as exc:
        raise ScenarioError(f"{where}: table: {exc}") from exc
    return Scenario(d, str(doc.get("name", "explicit")))


def _load_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ScenarioError(f"{path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def load_scenario(path: str | Path, **kwargs) -> Scenario:
    try:
        return scenario_from_doc(_load_json(path), **kwargs)
    except ScenarioError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc


def load_order(path: str | Path) -> StaticCausalOrder:
    return order_from_doc(_load_json(path), str(path))


def format_prob(x: float) -> str:
    return f"{x:.17g}"


def scenario_to_doc(d: ConditionalDistribution, name: str | None = None) -> dict:
    doc = order_to_doc(d.order)
    doc["inputs"] = list(d.spec.inputs)
    doc["outputs"] = list(d.spec.outputs)
    doc["tol"] = d.tol
    if name:
        doc["name"] = name
    doc["table"] = [[format_prob(x) for x in row] for row in d.table]
    return doc


def save_scenario(d: ConditionalDistribution, path: str | Path, name: str | None = None) -> None:
    Path(path).write_text(json.dumps(scenario_to_doc(d, name), indent=1) + "\n")
