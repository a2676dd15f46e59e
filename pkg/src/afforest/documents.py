"""JSON documents describing one organisational situation.

Example::

    {
      "schema_version": "1",
      "nodes": ["1", "2", "3"],
      "arcs": [["1", "2"], ["1", "3"]],
      "game": {"type": "table", "values": {"1,2": 1.0, "1,2,3": 2.5}, "strict": false}
    }

Table keys list the members' labels sorted lexicographically and joined by
commas without spaces; ``""`` is the empty coalition.  Other game types are
``{"type": "additive", "weights": {label: number}}``,
``{"type": "attachment"}`` and ``{"type": "symmetric", "by_size": [...]}``
with ``n + 1`` entries starting at 0.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

import jsonschema

from .digraph import build_org_structure
from .errors import MissingTableEntry, ParseError, SchemaError
from .games import AdditiveGame, AttachmentGame, SymmetricGame, TableGame
from .measures import OrganisationalSituation

log = logging.getLogger(__name__)

_NUMBER = {"type": "number"}
_LABEL = {"type": "string", "minLength": 1, "pattern": "^[^,]+$"}

SCHEMA = {
    "type": "object",
    "required": ["schema_version", "nodes", "arcs", "game"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": "1"},
        "nodes": {"type": "array", "items": _LABEL, "minItems": 1},
        "arcs": {
            "type": "array",
            "items": {"type": "array", "items": _LABEL, "minItems": 2, "maxItems": 2},
        },
        "game": {
            "type": "object",
            "required": ["type"],
            "properties": {"type": {"enum": ["table", "additive", "attachment", "symmetric"]}},
            "allOf": [
                {
                    "if": {"properties": {"type": {"const": "table"}}},
                    "then": {
                        "required": ["values"],
                        "additionalProperties": False,
                        "properties": {
                            "type": {},
                            "values": {"type": "object", "additionalProperties": _NUMBER},
                            "strict": {"type": "boolean"},
                        },
                    },
                },
                {
                    "if": {"properties": {"type": {"const": "additive"}}},
                    "then": {
                        "required": ["weights"],
                        "additionalProperties": False,
                        "properties": {
                            "type": {},
                            "weights": {"type": "object", "additionalProperties": _NUMBER},
                        },
                    },
                },
                {
                    "if": {"properties": {"type": {"const": "attachment"}}},
                    "then": {"additionalProperties": False, "properties": {"type": {}}},
                },
                {
                    "if": {"properties": {"type": {"const": "symmetric"}}},
                    "then": {
                        "required": ["by_size"],
                        "additionalProperties": False,
                        "properties": {"type": {}, "by_size": {"type": "array", "items": _NUMBER}},
                    },
                },
            ],
        },
    },
}


def coalition_key(labels) -> str:
    return ",".join(sorted(labels))


def _game_from_doc(doc: dict, labels: tuple[str, ...], warnings: list):
    spec = doc["game"]
    kind = spec["type"]
    n = len(labels)
    index = {lab: i for i, lab in enumerate(labels)}
    if kind == "attachment":
        return AttachmentGame(n)
    if kind == "symmetric":
        by_size = spec["by_size"]
        if len(by_size) != n + 1:
            raise SchemaError(f"by_size needs {n + 1} entries for {n} nodes, got {len(by_size)}")
        if by_size[0] != 0:
            raise SchemaError("by_size[0] must be 0")
        return SymmetricGame(by_size)
    if kind == "additive":
        weights = spec["weights"]
        unknown = sorted(set(weights) - set(labels))
        if unknown:
            raise SchemaError(f"weights given for unknown nodes {unknown}")
        missing = [lab for lab in labels if lab not in weights]
        if missing:
            warnings.append(f"{len(missing)} node(s) without a weight default to 0: {', '.join(missing)}")
        return AdditiveGame([weights.get(lab, 0.0) for lab in labels])

    values = {}
    for key, x in spec["values"].items():
        members = key.split(",") if key else []
        if len(set(members)) != len(members):
            raise SchemaError(f"coalition key {key!r} repeats a member")
        unknown = [m for m in members if m not in index]
        if unknown:
            raise SchemaError(f"coalition key {key!r} names unknown nodes {unknown}")
        canonical = coalition_key(members)
        if key != canonical:
            raise SchemaError(f"coalition key {key!r} is not canonical; write {canonical!r}")
        if not members and x != 0:
            raise SchemaError("the empty coalition must be worth 0")
        mask = 0
        for m in members:
            mask |= 1 << index[m]
        if mask:
            values[mask] = x
    strict = spec.get("strict", False)
    game = TableGame(n, values, strict=strict)
    if game.defaulted and strict:
        raise MissingTableEntry(f"strict table is missing {game.defaulted} coalition(s)")
    if game.defaulted:
        warnings.append(f"{game.defaulted} coalition(s) missing from the table default to 0")
    return game


def situation_from_dict(doc) -> OrganisationalSituation:
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaError(f"{where}: {exc.message}") from None
    structure = build_org_structure(doc["nodes"], [tuple(a) for a in doc["arcs"]])
    warnings = []
    game = _game_from_doc(doc, structure.labels, warnings)
    for w in warnings:
        log.warning(w)
    return OrganisationalSituation(structure, game, warnings)


def loads_situation(text: str) -> OrganisationalSituation:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    return situation_from_dict(doc)


def load_situation(source) -> OrganisationalSituation:
    """Read a situation from a path, or from JSON text when ``source`` starts with ``{``.

    A missing file raises ``FileNotFoundError``; everything else that is wrong
    with the document raises an ``AFForestError``.
    """
    if isinstance(source, str) and source.lstrip().startswith("{"):
        return loads_situation(source)
    try:
        text = Path(source).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"document is not UTF-8 text: {exc.reason}") from None
    return loads_situation(text)


def situation_to_dict(sit: OrganisationalSituation) -> dict:
    g, v = sit.structure, sit.game
    labels = g.labels
    doc = {"schema_version": "1", "nodes": list(labels), "arcs": [list(a) for a in g.arcs_by_label()]}
    if v.kind == "attachment":
        game = {"type": "attachment"}
    elif v.kind == "symmetric":
        game = {"type": "symmetric", "by_size": list(v.by_size)}
    elif v.kind == "additive":
        game = {"type": "additive", "weights": dict(zip(labels, v.weights))}
    else:
        values = {coalition_key(g.labels_of(m)): x for m, x in v.values.items()}
        game = {"type": "table", "values": dict(sorted(values.items())), "strict": v.strict}
    doc["game"] = game
    return doc


def dumps_situation(sit: OrganisationalSituation) -> str:
    return json.dumps(situation_to_dict(sit), indent=2)
