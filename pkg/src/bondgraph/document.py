"""JSON model documents: parse into a model tree and serialize back.

A document looks like::

    {"name": "RC",
     "components": [{"id": "C", "kind": "C", "value": 1},
                    {"id": "R", "kind": "R", "value": "1/2"},
                    {"id": "law", "kind": "1"}],
     "bonds": [["law", "C.0"], ["law", "R.0"]],
     "exposures": []}

Ids are the component names.  Bond endpoints are ``id`` (junctions, or
components with a single free port), ``id.port`` or ``id.label``.
Non-integer rationals are written as ``"p/q"`` strings.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .components import KIND_ALIASES, KINDS, Atomic
from .errors import DocumentError, ModelError
from .model import Composite, add, connect, expose

__all__ = ["parse_document", "serialize", "to_document", "from_document", "load", "dump"]

_COMPONENT_KEYS = {"id", "kind", "value", "name", "composite"}
_DOCUMENT_KEYS = {"name", "components", "bonds", "exposures"}


def _err(pointer, message):
    return DocumentError(message, pointer)


# -- parsing --------------------------------------------------------------

def parse_document(text):
    """Build a :class:`Composite` from document text."""
    try:
        data = json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as err:
        raise DocumentError(f"line {err.lineno} column {err.colno}: {err.msg}", "") from None
    return from_document(data)


def from_document(data, pointer=""):
    if not isinstance(data, dict):
        raise _err(pointer, "a model document must be a JSON object")
    extra = set(data) - _DOCUMENT_KEYS
    if extra:
        raise _err(pointer, f"unexpected key(s) {', '.join(sorted(extra))}")
    for key in ("name", "components"):
        if key not in data:
            raise _err(pointer, f"missing required key {key!r}")
    name = data["name"]
    if not isinstance(name, str):
        raise _err(f"{pointer}/name", "must be a string")
    try:
        model = Composite(name)
    except ModelError as err:
        raise _err(f"{pointer}/name", str(err)) from None
    _components(model, data["components"], f"{pointer}/components")
    _bonds(model, data.get("bonds", []), f"{pointer}/bonds")
    _exposures(model, data.get("exposures", []), f"{pointer}/exposures")
    return model


def _value(v, pointer):
    if isinstance(v, dict):
        return {k: _value(x, f"{pointer}/{k}") for k, x in v.items()}
    if v is None:
        return v
    if isinstance(v, bool) or not isinstance(v, (int, Fraction, str)):
        raise _err(pointer, f"unsupported value {v!r}")
    return v


def _components(model, items, pointer):
    if not isinstance(items, list):
        raise _err(pointer, "must be a list")
    seen = set()
    for i, item in enumerate(items):
        here = f"{pointer}/{i}"
        if not isinstance(item, dict):
            raise _err(here, "a component must be a JSON object")
        extra = set(item) - _COMPONENT_KEYS
        if extra:
            raise _err(here, f"unexpected key(s) {', '.join(sorted(extra))}")
        cid = item.get("id")
        if not isinstance(cid, str) or not cid:
            raise _err(f"{here}/id", "must be a non-empty string")
        if cid in seen:
            raise _err(f"{here}/id", f"duplicate id {cid!r}")
        seen.add(cid)
        if ("kind" in item) == ("composite" in item):
            raise _err(here, "give exactly one of 'kind' or 'composite'")
        try:
            if "composite" in item:
                if "value" in item:
                    raise _err(f"{here}/value", "composites take no value")
                child = from_document(item["composite"], f"{here}/composite")
                child.name = cid
            else:
                kind = item["kind"]
                if not isinstance(kind, str) or KIND_ALIASES.get(kind, kind) not in KINDS:
                    raise _err(f"{here}/kind", f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
                value = _value(item["value"], f"{here}/value") if "value" in item else None
                child = Atomic(kind, name=cid, value=value)
            if "name" in item and item["name"] != cid:
                raise _err(f"{here}/name", "must equal the id when given")
            add(model, child)
        except ModelError as err:
            if isinstance(err, DocumentError):
                raise
            raise _err(here, str(err)) from None


def _endpoint(model, text, pointer):
    if not isinstance(text, str) or not text:
        raise _err(pointer, "an endpoint must be a non-empty string")
    names = {c.name: c for c in model.components}
    if text in names:
        return names[text]
    cid, dot, port = text.rpartition(".")
    if not dot or cid not in names:
        raise _err(pointer, f"unknown component id {(cid or text)!r}")
    return (names[cid], port)


def _bonds(model, items, pointer):
    if not isinstance(items, list):
        raise _err(pointer, "must be a list")
    for i, item in enumerate(items):
        here = f"{pointer}/{i}"
        if not isinstance(item, list) or len(item) != 2:
            raise _err(here, "a bond is a [tail, head] pair")
        tail = _endpoint(model, item[0], f"{here}/0")
        head = _endpoint(model, item[1], f"{here}/1")
        try:
            connect(tail, head)
        except ModelError as err:
            raise _err(here, str(err)) from None


def _exposures(model, items, pointer):
    if not isinstance(items, list):
        raise _err(pointer, "must be a list")
    for i, item in enumerate(items):
        here = f"{pointer}/{i}"
        if not isinstance(item, dict) or set(item) - {"component", "label"} or "component" not in item:
            raise _err(here, "an exposure is {\"component\": id, \"label\": text}")
        cid = item["component"]
        try:
            ss = model.component(cid)
        except ModelError:
            raise _err(f"{here}/component", f"unknown component id {cid!r}") from None
        try:
            expose(ss, item.get("label"))
        except ModelError as err:
            raise _err(here, str(err)) from None


# -- serialization --------------------------------------------------------

def _number(v):
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return v


def _end(port):
    owner = port.owner
    if isinstance(owner, Atomic) and owner.is_junction:
        return owner.name
    return f"{owner.name}.{port.name}"


def to_document(model):
    components = []
    for c in model.components:
        if isinstance(c, Composite):
            components.append({"id": c.name, "composite": to_document(c)})
            continue
        entry = {"id": c.name, "kind": c.kind}
        if c.kind == "PH":
            entry["value"] = {"hamiltonian": c.hamiltonian}
            if c.ph_params:
                entry["value"]["params"] = {k: _number(v) for k, v in c.ph_params.items()}
        elif c.value is not None:
            entry["value"] = _number(c.value)
        components.append(entry)
    return {
        "name": model.name,
        "components": components,
        "bonds": [[_end(b.tail), _end(b.head)] for b in model.bonds],
        "exposures": [{"component": x.ss.name, "label": x.port.label} for x in model.exposures],
    }


def serialize(model):
    """Canonical text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(to_document(model), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        raise DocumentError(f"{path}: {err.strerror}", "") from None
    try:
        return parse_document(text)
    except DocumentError as err:
        err.args = (f"{path}: {err.args[0]}",)
        raise


def dump(model, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(model))
