"""Symbolic bond-graph modelling: build, reduce and simulate energy networks."""

from .components import KINDS, Atomic
from .document import load, parse_document, serialize
from .errors import (
    BondGraphError, DocumentError, EvaluationError, ExprError, ModelError,
    ParseError, ReductionError, SimulationError,
)
from .fixtures import LinearOsc, coupled_cavity
from .model import (
    Composite, add, connect, control_vars, diagnose, disconnect, expose, new,
    params, remove, resolve, state_vars, uri,
)
from .reduce import constitutive_relations, reduce_model
from .sim import simulate, stored_energy
from .symexpr import Expr, equal_mod_scale, parse_expr

__all__ = [
    "KINDS", "Atomic", "Composite", "LinearOsc", "coupled_cavity",
    "new", "add", "remove", "connect", "disconnect", "expose", "uri", "resolve",
    "state_vars", "control_vars", "params", "diagnose",
    "constitutive_relations", "reduce_model", "simulate", "stored_energy",
    "Expr", "parse_expr", "equal_mod_scale",
    "load", "parse_document", "serialize",
    "BondGraphError", "ExprError", "ParseError", "EvaluationError", "ModelError",
    "DocumentError", "ReductionError", "SimulationError",
]
