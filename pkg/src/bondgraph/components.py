"""Atomic components and their constitutive-relation templates.

Relations are produced in local coordinates: ``e_k``/``f_k`` for port
``k``, ``x_j``/``dx_j`` for state ``j`` and ``u_0`` for a source input.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .base import ModelBase, Port
from .errors import ExprError, ModelError
from .symexpr import (
    IDENTIFIER, SymbolTable, as_expr, const, control, differentiate, dstate,
    effort, flow, param, parse_expr, state,
)

__all__ = ["KINDS", "Atomic", "new_atomic", "relations", "ph_relations"]

KINDS = ("R", "C", "I", "TF", "GY", "Se", "Sf", "0", "1", "SS", "PH")
KIND_ALIASES = {"Zero": "0", "One": "1"}
JUNCTIONS = frozenset({"0", "1"})

PARAMETER_NAME = {"R": "r", "C": "C", "I": "L", "TF": "n", "GY": "r"}
_PORTS = {"R": 1, "C": 1, "I": 1, "Se": 1, "Sf": 1, "SS": 1, "TF": 2, "GY": 2}
_STATES = {"C": 1, "I": 1}

_STATE_NAME = re.compile(r"\bx_(\d+)\b")


def _param_value(value, where):
    """Normalize a scalar parameter: exact rational, symbol name or None."""
    if value is None:
        return None
    if isinstance(value, str):
        if IDENTIFIER.match(value):
            return value
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise ModelError(f"{where}: malformed value {value!r}") from None
    try:
        return const(value).constant_value
    except (ExprError, TypeError):
        raise ModelError(f"{where}: malformed value {value!r}") from None


class Atomic(ModelBase):
    """An indecomposable component of one of the :data:`KINDS`."""

    def __init__(self, kind, name=None, value=None):
        kind = KIND_ALIASES.get(kind, kind)
        if kind not in KINDS:
            raise ModelError(f"unknown component kind {kind!r}; expected one of {', '.join(KINDS)}")
        super().__init__(name if name is not None else kind)
        self.kind = kind
        self.hamiltonian = None
        self.ph_params = {}
        if kind == "PH":
            self._init_ph(value)
            self.value = None
            n_ports = self.n_states
        else:
            if kind in PARAMETER_NAME:
                self.value = _param_value(value, self.name)
            elif value is not None:
                raise ModelError(f"{kind} component {self.name!r} takes no value")
            else:
                self.value = None
            self.n_states = _STATES.get(kind, 0)
            n_ports = _PORTS.get(kind, 0)
        self.ports = [Port(self, i) for i in range(n_ports)]

    def _init_ph(self, value):
        if isinstance(value, str):
            value = {"hamiltonian": value}
        if not isinstance(value, dict) or "hamiltonian" not in value:
            raise ModelError(f"PH component {self.name!r} needs a {{'hamiltonian': ...}} value")
        extra = set(value) - {"hamiltonian", "params"}
        if extra:
            raise ModelError(f"PH component {self.name!r}: unexpected keys {sorted(extra)}")
        text = value["hamiltonian"]
        if not isinstance(text, str):
            raise ModelError(f"PH component {self.name!r}: hamiltonian must be a string")
        params = value.get("params") or {}
        if not isinstance(params, dict):
            raise ModelError(f"PH component {self.name!r}: params must be a mapping")
        self.hamiltonian = text
        self.ph_params = {}
        for k, v in params.items():
            if not IDENTIFIER.match(k) or _STATE_NAME.fullmatch(k) or k == "t":
                raise ModelError(f"PH component {self.name!r}: bad parameter name {k!r}")
            self.ph_params[k] = _param_value(v, f"{self.name}.{k}")
        indices = [int(i) for i in _STATE_NAME.findall(text)]
        self.n_states = max(indices) + 1 if indices else 0
        names = {f"x_{j}": state(j) for j in range(self.n_states)}
        for k in self.ph_params:
            names[k] = self._symbolic(k, self.ph_params[k])
        try:
            self.energy = parse_expr(text, SymbolTable(names, coordinates=False))
        except ExprError as err:
            raise ModelError(f"PH component {self.name!r}: {err}") from None

    # -- parameters -------------------------------------------------------
    def _symbolic(self, pname, value):
        if value is None:
            name = re.sub(r"\W", "_", f"{self.name}_{pname}")
            return as_expr(param(name if not name[0].isdigit() else "_" + name))
        if isinstance(value, str):
            return as_expr(param(value))
        return const(value)

    def parameter(self, pname=None):
        """Value of a parameter as an expression (constant or symbol)."""
        if self.kind == "PH":
            return self._symbolic(pname, self.ph_params[pname])
        if pname not in (None, PARAMETER_NAME.get(self.kind)):
            raise ModelError(f"{self.kind} has no parameter {pname!r}")
        return self._symbolic(PARAMETER_NAME[self.kind], self.value)

    @property
    def params(self):
        """Ordered ``(parameter name, value)`` pairs."""
        if self.kind == "PH":
            return list(self.ph_params.items())
        if self.kind in PARAMETER_NAME:
            return [(PARAMETER_NAME[self.kind], self.value)]
        return []

    @property
    def is_junction(self):
        return self.kind in JUNCTIONS

    @property
    def n_controls(self):
        return 1 if self.kind in ("Se", "Sf") else 0

    @property
    def constitutive_relations(self):
        return relations(self)


def new_atomic(kind, name=None, value=None):
    return Atomic(kind, name=name, value=value)


def ph_relations(energy, states):
    """Port-Hamiltonian relations ``e_k - dH/dx_k`` then ``f_k - dx_k``."""
    energy = as_expr(energy)
    efforts = [effort(k) - differentiate(energy, s) for k, s in enumerate(states)]
    flows = [flow(k) - dstate(k) for k in range(len(states))]
    return efforts + flows


def relations(a):
    """Constitutive relations of atomic `a` in its local coordinates."""
    kind = a.kind
    e = [as_expr(effort(k)) for k in range(len(a.ports))]
    f = [as_expr(flow(k)) for k in range(len(a.ports))]
    if kind == "R":
        return [e[0] - a.parameter() * f[0]]
    if kind == "C":
        return [a.parameter() * e[0] - state(0), f[0] - dstate(0)]
    if kind == "I":
        return [state(0) - a.parameter() * f[0], e[0] - dstate(0)]
    if kind == "TF":
        n = a.parameter()
        return [e[1] - n * e[0], n * f[1] + f[0]]
    if kind == "GY":
        r = a.parameter()
        return [e[0] - r * f[1], e[1] + r * f[0]]
    if kind == "Se":
        return [e[0] - control(0)]
    if kind == "Sf":
        return [f[0] - control(0)]
    if kind == "SS":
        return []
    if kind == "PH":
        return ph_relations(a.energy, [state(j) for j in range(a.n_states)])
    n = len(a.ports)
    if n == 0:
        return []
    if kind == "0":
        rows = [e[k] - e[0] for k in range(1, n)]
        return rows + [sum(f[1:], f[0])]
    sigma = [p.orientation for p in a.ports]
    rows = [sigma[k] * f[k] - sigma[0] * f[0] for k in range(1, n)]
    return rows + [sum((sigma[k] * e[k] for k in range(1, n)), sigma[0] * e[0])]
