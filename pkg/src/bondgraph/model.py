"""Composite models: the component tree, bonds, exposed ports and URIs."""

from __future__ import annotations

from dataclasses import dataclass

from .base import ModelBase, Port, check_name
from .components import Atomic
from .errors import ModelError
from .symexpr import control, state

__all__ = [
    "Bond", "Composite", "new", "add", "remove", "connect", "disconnect",
    "expose", "uri", "resolve", "walk", "state_vars", "control_vars",
    "params", "storages", "diagnose",
]


@dataclass(frozen=True, eq=False)
class Bond:
    """Energy connection; power flows from `tail` to `head`."""

    tail: Port
    head: Port

    def ports(self):
        return (self.tail, self.head)

    def __repr__(self):
        return (f"Bond(({self.tail.owner.name!r}, {self.tail.name!r}) -> "
                f"({self.head.owner.name!r}, {self.head.name!r}))")


@dataclass(frozen=True, eq=False)
class Exposure:
    port: Port
    ss: Atomic


class Composite(ModelBase):
    """A model assembled from child models and the bonds between them."""

    def __init__(self, name, components=()):
        super().__init__(name)
        self.components = []
        self.bonds = []
        self.exposures = []
        if components:
            add(self, *components)

    @property
    def constitutive_relations(self):
        from .reduce import constitutive_relations
        return constitutive_relations(self)

    @property
    def state_vars(self):
        return state_vars(self)

    @property
    def control_vars(self):
        return control_vars(self)

    @property
    def params(self):
        return params(self)

    def component(self, name):
        for c in self.components:
            if c.name == name:
                return c
        raise ModelError(f"{uri(self)} has no component {name!r}")


def new(kind=None, name=None, value=None, **kwargs):
    """Create a composite (no `kind`) or an atomic component."""
    if kind is None:
        if value is not None:
            raise ModelError("composites take no value")
        return Composite(name if name is not None else "Model", **kwargs)
    return Atomic(kind, name=name, value=value)


# -- structure ------------------------------------------------------------

def add(parent, *children):
    if not isinstance(parent, Composite):
        raise ModelError(f"cannot add components to {parent!r}")
    for child in children:
        if not isinstance(child, ModelBase):
            raise ModelError(f"{child!r} is not a model")
        if child is parent or child in parent.ancestors():
            raise ModelError(f"adding {child.name!r} to {parent.name!r} would create a cycle")
        if child.parent is not None:
            raise ModelError(f"{child.name!r} already belongs to {child.parent.name!r}")
        taken = {c.name for c in parent.components}
        if child.name in taken:
            base, k = child.name, 1
            while f"{base}#{k}" in taken:
                k += 1
            child.name = f"{base}#{k}"
        child.parent = parent
        parent.components.append(child)


def remove(parent, child):
    if not isinstance(parent, Composite) or child not in parent.components:
        raise ModelError(f"{getattr(child, 'name', child)!r} is not a component of "
                         f"{getattr(parent, 'name', parent)!r}")
    for bond in [b for b in parent.bonds if any(p.owner is child for p in b.ports())]:
        _drop_bond(parent, bond)
    for exp in [x for x in parent.exposures if x.ss is child]:
        _unexpose(parent, exp)
    parent.components.remove(child)
    child.parent = None


def _unexpose(parent, exp):
    grand = parent.parent
    if grand is not None:
        for bond in [b for b in grand.bonds if exp.port in b.ports()]:
            _drop_bond(grand, bond)
    parent.exposures.remove(exp)
    parent.ports.remove(exp.port)
    for i, p in enumerate(parent.ports):
        p.index = i


# -- energetic relationships ----------------------------------------------

def _split(target):
    if isinstance(target, tuple):
        if len(target) != 2:
            raise ModelError(f"port reference must be (component, port), got {target!r}")
        return target
    return target, None


def _bonded(port):
    parent = port.owner.parent
    return parent is not None and any(port in b.ports() for b in parent.bonds)


def _lookup_port(comp, key):
    if isinstance(comp, Composite) and isinstance(key, str):
        for p in comp.ports:
            if p.label == key:
                return p
    try:
        i = int(key)
    except (TypeError, ValueError):
        raise ModelError(f"{comp.name!r} has no port {key!r}") from None
    if not 0 <= i < len(comp.ports):
        raise ModelError(f"{comp.name!r} has no port {key!r}")
    return comp.ports[i]


def _free_port(comp, key):
    if key is not None:
        port = _lookup_port(comp, key)
        if _bonded(port):
            raise ModelError(f"port {key!r} of {comp.name!r} is already bonded")
        return port
    free = [p for p in comp.ports if not _bonded(p)]
    if len(free) != 1:
        what = "no free port" if not free else f"{len(free)} free ports; name one"
        raise ModelError(f"cannot connect {comp.name!r} directly: {what}")
    return free[0]


def _common_parent(a, b):
    for comp in (a, b):
        if not isinstance(comp, ModelBase):
            raise ModelError(f"{comp!r} is not a model")
    if a is b:
        raise ModelError(f"cannot bond {a.name!r} to itself")
    if a.parent is None or a.parent is not b.parent:
        raise ModelError(f"{a.name!r} and {b.name!r} do not share a parent")
    return a.parent


def _is_junction(comp):
    return isinstance(comp, Atomic) and comp.is_junction


def connect(source, target):
    """Bond `source` (tail) to `target` (head).

    Arguments are components or ``(component, port)`` pairs.  A junction
    grows a fresh port per connection, oriented outward when the junction is
    the tail and inward when it is the head.
    """
    (a, ka), (b, kb) = _split(source), _split(target)
    parent = _common_parent(a, b)
    ends = []
    for comp, key, orientation in ((a, ka, -1), (b, kb, 1)):
        if _is_junction(comp):
            if key is not None:
                try:
                    existing = int(key) < len(comp.ports)
                except (TypeError, ValueError):
                    raise ModelError(f"junction {comp.name!r} has no port {key!r}") from None
                if existing:
                    raise ModelError(f"port {key!r} of {comp.name!r} is already bonded")
            ends.append((comp, None, orientation))
        else:
            ends.append((comp, _free_port(comp, key), orientation))
    ports = []
    for comp, port, orientation in ends:
        if port is None:
            port = Port(comp, len(comp.ports), orientation)
            comp.ports.append(port)
        ports.append(port)
    bond = Bond(tail=ports[0], head=ports[1])
    parent.bonds.append(bond)
    return bond


def _candidates(comp, key):
    if key is None:
        return list(comp.ports)
    return [_lookup_port(comp, key)]


def _drop_bond(parent, bond):
    parent.bonds.remove(bond)
    for port in bond.ports():
        comp = port.owner
        if _is_junction(comp):
            comp.ports.remove(port)
            for i, p in enumerate(comp.ports):
                p.index = i


def disconnect(source, target):
    """Remove the bond between two ports; same argument forms as connect."""
    (a, ka), (b, kb) = _split(source), _split(target)
    parent = _common_parent(a, b)
    left, right = _candidates(a, ka), _candidates(b, kb)
    for bond in parent.bonds:
        t, h = bond.tail, bond.head
        if (t in left and h in right) or (t in right and h in left):
            _drop_bond(parent, bond)
            return
    raise ModelError(f"no bond between {a.name!r} and {b.name!r}")


def expose(ss, label=None):
    """Publish the port of an SS component as an outer port of its parent."""
    if not isinstance(ss, Atomic) or ss.kind != "SS":
        raise ModelError(f"only SS components can be exposed, not {getattr(ss, 'name', ss)!r}")
    parent = ss.parent
    if parent is None:
        raise ModelError(f"{ss.name!r} must be added to a composite before exposing it")
    if any(x.ss is ss for x in parent.exposures):
        raise ModelError(f"{ss.name!r} is already exposed")
    index = len(parent.ports)
    label = str(index) if label is None else label
    if not isinstance(label, str) or not label:
        raise ModelError("port labels must be non-empty strings")
    if any(p.label == label for p in parent.ports):
        raise ModelError(f"{parent.name!r} already has a port labelled {label!r}")
    port = Port(parent, index, label=label)
    parent.ports.append(port)
    parent.exposures.append(Exposure(port, ss))
    return port


# -- navigation -----------------------------------------------------------

def uri(node):
    parts = []
    while node.parent is not None:
        parts.append(node.name)
        node = node.parent
    return f"{node.name}:/" + "/".join(reversed(parts))


def resolve(root, path):
    name, sep, rest = path.partition(":/")
    if not sep or name != root.name:
        raise ModelError(f"{path!r} does not start at {root.name!r}")
    node = root
    for segment in filter(None, rest.split("/")):
        children = getattr(node, "components", [])
        for c in children:
            if c.name == segment:
                node = c
                break
        else:
            raise ModelError(f"cannot resolve {path!r}: no {segment!r} in {uri(node)}")
    return node


def walk(model):
    """Atomic components in depth-first insertion order."""
    if isinstance(model, Atomic):
        yield model
        return
    for c in model.components:
        yield from walk(c)


def storages(model):
    """``(atomic, local state index)`` for every state, in numbering order."""
    return [(a, j) for a in walk(model) for j in range(a.n_states)]


def state_vars(model):
    return [state(i) for i in range(len(storages(model)))]


def control_vars(model):
    n = sum(a.n_controls for a in walk(model))
    return [control(i) for i in range(n)]


def params(model):
    """``(component, parameter name, value)`` for every parameter."""
    return [(a, name, value) for a in walk(model) for name, value in a.params]


def diagnose(model):
    """Structural problems that would stop reduction, as messages."""
    problems = []
    if isinstance(model, Atomic):
        return problems
    exposed = {x.ss for x in model.exposures}
    for c in model.components:
        if isinstance(c, Atomic) and c.kind == "SS":
            if c not in exposed:
                problems.append(f"{uri(c)}: SS component is not exposed")
            continue
        for p in c.ports:
            if not _bonded(p):
                problems.append(f"{uri(c)}: port {p.name} is not bonded")
        if isinstance(c, Composite):
            problems.extend(diagnose(c))
    return problems
