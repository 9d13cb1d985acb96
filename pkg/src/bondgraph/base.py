"""Shared model-tree plumbing: the common base class and ports."""

from __future__ import annotations

from .errors import ModelError


class Port:
    """One (effort, flow) interface of a model.

    `orientation` is +1 for an inward port and -1 for an outward one; only
    1-junctions make use of it.
    """

    __slots__ = ("owner", "index", "orientation", "label")

    def __init__(self, owner, index, orientation=1, label=None):
        self.owner = owner
        self.index = index
        self.orientation = orientation
        self.label = label

    @property
    def name(self):
        return self.label if self.label is not None else str(self.index)

    def __repr__(self):
        return f"Port({self.owner.name!r}, {self.name!r})"


def check_name(name):
    if not isinstance(name, str) or not name:
        raise ModelError("model names must be non-empty strings")
    if "/" in name or ":" in name:
        raise ModelError(f"model name {name!r} may not contain '/' or ':'")
    return name


class ModelBase:
    """Behaviour shared by atomics and composites: naming and tree links."""

    def __init__(self, name):
        self.name = check_name(name)
        self.parent = None
        self.ports = []

    @property
    def root(self):
        node = self
        while node.parent is not None:
            node = node.parent
        return node

    @property
    def uri(self):
        from .model import uri
        return uri(self)

    def ancestors(self):
        node = self.parent
        while node is not None:
            yield node
            node = node.parent

    def __repr__(self):
        return f"{type(self).__name__}({self.name!r})"
