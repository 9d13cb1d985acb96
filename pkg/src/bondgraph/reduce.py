"""Symbolic composition and reduction of bond-graph models.

A model is lowered to an implicit system ``0 = L X + V(X)`` over an
ordered coordinate space, ``L`` is brought to reduced echelon form with
exact arithmetic, nonlinear terms are rewritten with the solved rows, and
the rows that do not merely define internal port variables are emitted as
the model's constitutive relations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .components import Atomic, relations as atomic_relations
from .errors import ExprError, ReductionError
from .model import Composite, uri
from .symexpr import (
    Kind, ZERO, as_expr, const, control, dstate, effort, flow, linear_split,
    state, substitute,
)

__all__ = [
    "CoordinateSpace", "ImplicitSystem", "ReductionResult", "coordinates",
    "assemble", "triangularize", "substitute_nonlinear", "reduce_model",
    "constitutive_relations", "nullspace_oracle", "numeric_matrix",
]


@dataclass(frozen=True)
class CoordinateSpace:
    """Ordered coordinates of an implicit system.

    Columns run: internal port variables (to be eliminated), state
    derivatives, retained internal variables, outer port variables,
    states, controls.
    """

    internal: tuple = ()
    dstates: tuple = ()
    retained: tuple = ()
    outer: tuple = ()
    states: tuple = ()
    controls: tuple = ()

    @property
    def symbols(self):
        return (self.internal + self.dstates + self.retained + self.outer
                + self.states + self.controls)

    @property
    def N(self):
        return len(self.symbols)

    @property
    def n(self):
        return len(self.states)

    @property
    def m(self):
        return len(self.outer) // 2

    @property
    def k(self):
        return len(self.controls)

    def index(self, sym):
        return self.symbols.index(sym)

    def kept(self):
        """Coordinates that survive elimination of internal variables."""
        return self.dstates + self.retained + self.outer + self.states + self.controls


@dataclass
class ImplicitSystem:
    """Rows ``0 = sum_j L[r][j] * X[j] + V[r]``.

    After :func:`triangularize`, `pivots[r]` holds the pivot column of row
    `r` (``None`` for rows whose linear part vanished) and `guards` the
    symbolic pivots that were assumed nonzero.
    """

    space: CoordinateSpace
    L: list
    V: list
    pivots: list | None = None
    guards: list = field(default_factory=list)

    @property
    def coords(self):
        return self.space.symbols

    def relation(self, r):
        coords = self.coords
        e = self.V[r]
        for j, a in self.L[r].items():
            e = e + a * coords[j]
        return e

    def relations(self):
        return [self.relation(r) for r in range(len(self.L))]

    def diagonal(self):
        """Square layout with each pivot row placed at its column's index."""
        N = self.space.N
        out = [dict() for _ in range(N)]
        for r, c in enumerate(self.pivots or []):
            if c is not None:
                out[c] = self.L[r]
        return out


@dataclass
class ReductionResult:
    relations: list
    residual_constraints: list
    substitutions: dict
    space: CoordinateSpace
    guards: list = field(default_factory=list)
    algebraic: list = field(default_factory=list)


# -- assembly -------------------------------------------------------------

class _Assembler:
    def __init__(self, root, recursive, retained=()):
        self.recursive = recursive
        self.port_syms = {}
        self.internal = []
        self.rows = []
        self.n_states = 0
        self.n_controls = 0
        self.retained = set(retained)
        self.outer = []
        for i, p in enumerate(root.ports):
            self.port_syms[p] = (effort(i), flow(i))
            self.outer.extend((effort(i), flow(i)))
        self._next = len(root.ports)
        self._composite(root)

    def fresh(self):
        pair = (effort(self._next), flow(self._next))
        self._next += 1
        self.internal.extend(pair)
        return pair

    def fresh_single(self, kind):
        sym = effort(self._next) if kind == Kind.EFFORT else flow(self._next)
        self._next += 1
        self.internal.append(sym)
        return sym

    def port(self, p):
        if p not in self.port_syms:
            self.port_syms[p] = self.fresh()
        return self.port_syms[p]

    def _atomic(self, a):
        mapping = {}
        for k, p in enumerate(a.ports):
            e, f = self.port(p)
            mapping[effort(k)] = e
            mapping[flow(k)] = f
        for j in range(a.n_states):
            mapping[state(j)] = state(self.n_states + j)
            mapping[dstate(j)] = dstate(self.n_states + j)
        if a.n_controls:
            mapping[control(0)] = control(self.n_controls)
        self.n_states += a.n_states
        self.n_controls += a.n_controls
        for rel in atomic_relations(a):
            self.rows.append(substitute(rel, mapping, check=False))

    def _reduced(self, c):
        res = reduce_model(c, recursive=True)
        space = res.space
        if len(res.relations) > space.n + space.m + space.k + len(space.retained):
            raise ReductionError(f"{uri(c)} is over-determined")
        mapping = {}
        for i, p in enumerate(c.ports):
            e, f = self.port(p)
            mapping[effort(i)] = e
            mapping[flow(i)] = f
        for j in range(space.n):
            mapping[state(j)] = state(self.n_states + j)
            mapping[dstate(j)] = dstate(self.n_states + j)
        for j in range(space.k):
            mapping[control(j)] = control(self.n_controls + j)
        for s in space.retained:
            mapping[s] = self.fresh_single(s.kind)
        self.n_states += space.n
        self.n_controls += space.k
        for rel in res.relations:
            self.rows.append(substitute(rel, mapping, check=False))

    def _composite(self, comp):
        exposed = {x.ss for x in comp.exposures}
        bonded = {p for b in comp.bonds for p in b.ports()}
        for child in comp.components:
            if isinstance(child, Atomic) and child.kind == "SS" and child not in exposed:
                raise ReductionError(f"{uri(child)}: SS component is not exposed")
            loose = [p for p in child.ports if p not in bonded and child not in exposed]
            if loose:
                names = ", ".join(p.name for p in loose)
                raise ReductionError(f"{uri(child)}: unbonded port(s) {names}")
        for child in comp.components:
            if isinstance(child, Atomic):
                self._atomic(child)
            elif self.recursive:
                self._reduced(child)
            else:
                for p in child.ports:
                    self.port(p)
                self._composite(child)
        for bond in comp.bonds:
            eh, fh = self.port(bond.head)
            et, ft = self.port(bond.tail)
            self.rows.append(as_expr(eh) - et)
            self.rows.append(as_expr(fh) + ft)
        for x in comp.exposures:
            eo, fo = self.port(x.port)
            es, fs = self.port(x.ss.ports[0])
            self.rows.append(as_expr(eo) - es)
            self.rows.append(as_expr(fo) + fs)

    def space(self):
        retained = tuple(s for s in self.internal if s in self.retained)
        internal = tuple(s for s in self.internal if s not in self.retained)
        return CoordinateSpace(
            internal=internal,
            dstates=tuple(dstate(i) for i in range(self.n_states)),
            retained=retained,
            outer=tuple(self.outer),
            states=tuple(state(i) for i in range(self.n_states)),
            controls=tuple(control(i) for i in range(self.n_controls)),
        )


def _system(asm):
    space = asm.space()
    L, V = [], []
    for rel in asm.rows:
        row, rest = linear_split(rel, space.symbols)
        if row or not rest.is_zero:
            L.append(row)
            V.append(rest)
    return ImplicitSystem(space, L, V)


def _as_composite(model):
    if isinstance(model, Composite):
        return model
    raise ReductionError(f"{model!r} is not a composite model")


def coordinates(model, recursive=True):
    return _Assembler(_as_composite(model), recursive).space()


def assemble(model, recursive=True, retained=()):
    """Block implicit system of `model` plus two rows per bond and exposure.

    With ``recursive=False`` the whole tree is flattened into one system.
    """
    return _system(_Assembler(_as_composite(model), recursive, retained))


# -- exact elimination ----------------------------------------------------

def _axpy(row, a, other):
    """row - a * other, dropping zero entries."""
    out = dict(row)
    for j, v in other.items():
        w = out.get(j, ZERO) - a * v
        if w.is_zero:
            out.pop(j, None)
        else:
            out[j] = w
    return out


def _scale(row, s):
    return {j: v * s for j, v in row.items()}


def triangularize(sys):
    """Reduced echelon form of ``L`` with pivots on the diagonal.

    Numeric pivots are preferred; a parameter-valued pivot is only used when
    the column has no numeric candidate, and then rows are combined
    fraction-free so nothing is divided by it.
    """
    L = [dict(r) for r in sys.L]
    V = list(sys.V)
    guards = list(sys.guards)
    N = sys.space.N
    pivots = []
    r = 0
    for col in range(N):
        cand = [i for i in range(r, len(L)) if col in L[i]]
        if not cand:
            continue
        numeric = [i for i in cand if L[i][col].is_constant]
        p = numeric[0] if numeric else cand[0]
        L[r], L[p] = L[p], L[r]
        V[r], V[p] = V[p], V[r]
        piv = L[r][col]
        symbolic = not piv.is_constant
        if symbolic:
            guards.append(piv)
        else:
            inv = 1 / piv.constant_value
            if inv != 1:
                L[r] = _scale(L[r], const(inv))
                V[r] = V[r] * inv
        for i in range(len(L)):
            if i == r or col not in L[i]:
                continue
            a = L[i][col]
            if symbolic:
                L[i] = _axpy(_scale(L[i], piv), a, L[r])
                V[i] = V[i] * piv - a * V[r]
            else:
                L[i] = _axpy(L[i], a, L[r])
                V[i] = V[i] - a * V[r]
        pivots.append(col)
        r += 1
    # rows without a linear part become constraints; all-zero rows vanish
    rest = [(L[i], V[i]) for i in range(r, len(L)) if L[i] or not V[i].is_zero]
    out_L = L[:r] + [row for row, _ in rest]
    out_V = V[:r] + [v for _, v in rest]
    pivots = pivots + [None] * len(rest)
    return ImplicitSystem(sys.space, out_L, out_V, pivots, guards)


_SOLVABLE = (Kind.DSTATE, Kind.EFFORT, Kind.FLOW)


def substitute_nonlinear(sys, max_passes=None):
    """Rewrite nonlinear terms using rows solved for their pivot variable.

    Returns the triangular system reached and the substitution map used.
    Rows whose nonlinear part still mentions their own pivot are left as
    implicit constraints.
    """
    coords = sys.coords
    max_passes = sys.space.N if max_passes is None else max_passes
    applied = {}
    for _ in range(max_passes):
        rules = {}
        for r, col in enumerate(sys.pivots):
            if col is None or coords[col].kind not in _SOLVABLE:
                continue
            sym = coords[col]
            coef = sys.L[r][col]
            rest = sys.relation(r) - coef * sym
            rhs = -rest * coef ** -1
            if not rhs.has(sym):
                rules[sym] = rhs
        L, V = [dict(row) for row in sys.L], list(sys.V)
        changed = False
        for r in range(len(L)):
            col = sys.pivots[r]
            own = coords[col] if col is not None else None
            use = {s: rules[s] for s in V[r].symbols() if s in rules and s != own}
            if not use:
                continue
            new_v = substitute(V[r], use, check=False)
            row, residual = linear_split(new_v, coords)
            for j, a in row.items():
                w = L[r].get(j, ZERO) + a
                if w.is_zero:
                    L[r].pop(j, None)
                else:
                    L[r][j] = w
            V[r] = residual
            applied.update(use)
            changed = True
        if not changed:
            break
        sys = triangularize(ImplicitSystem(sys.space, L, V, None, sys.guards))
    return sys, applied


def _monic(e, lead=None):
    """Scale so the leading (or given) coefficient is 1 when it is numeric."""
    if e.is_zero:
        return e
    if lead is None:
        lead = as_expr(Fraction(1)) * e.terms[0][1]
    if lead.is_constant and lead.constant_value != 1:
        return e * (1 / lead.constant_value)
    return e


def _reduce_once(model, recursive, retained):
    sys = assemble(model, recursive, retained)
    tri, applied = substitute_nonlinear(triangularize(sys))
    return sys, tri, applied


def reduce_model(model, recursive=True):
    """Full pipeline: assemble, triangularize, substitute, emit."""
    model = _as_composite(model)
    retained = set()
    while True:
        sys, tri, applied = _reduce_once(model, recursive, retained)
        space = tri.space
        pivot_cols = {c for c in tri.pivots if c is not None}
        free = {space.internal[i] for i in range(len(space.internal)) if i not in pivot_cols}
        if not free:
            break
        # undetermined internal variables stay as explicit unknowns
        retained |= free
    coords = tri.coords
    n_int = len(space.internal)
    keep = [r for r, c in enumerate(tri.pivots) if c is None or c >= n_int]
    internal = set(space.internal)
    algebraic = []
    pending = True
    while pending:
        pending = False
        mentioned = set()
        for r in keep:
            mentioned |= tri.V[r].symbols() & internal
        for r, c in enumerate(tri.pivots):
            if r not in keep and c is not None and coords[c] in mentioned:
                keep.append(r)
                algebraic.append(coords[c])
                pending = True
    keep.sort(key=lambda r: (tri.pivots[r] is None, tri.pivots[r] or 0, r))
    out, constraints = [], []
    for r in keep:
        c = tri.pivots[r]
        rel = tri.relation(r)
        if rel.is_zero:
            continue
        rel = _monic(rel, tri.L[r][c] if c is not None else None)
        out.append(rel)
        if c is None or c < n_int or coords[c].kind in (Kind.STATE, Kind.CONTROL):
            constraints.append(rel)
    algebraic = list(space.retained) + algebraic
    return ReductionResult(out, constraints, applied, space, tri.guards, algebraic)


def constitutive_relations(model):
    """Reduced implicit relations of `model` in its own coordinates."""
    if isinstance(model, Atomic):
        return atomic_relations(model)
    return reduce_model(model).relations


# -- independent exact oracle ----------------------------------------------

def numeric_matrix(sys, values=None):
    """Dense Fraction matrix of ``L`` with parameters replaced by `values`."""
    values = values or {}
    out = []
    for row in sys.L:
        dense = [Fraction(0)] * sys.space.N
        for j, a in row.items():
            if not a.is_constant:
                a = substitute(a, {s: values[s] for s in a.symbols()})
                if not a.is_constant:
                    raise ExprError(f"entry {a} is not numeric")
            dense[j] = a.constant_value
        out.append(dense)
    return out


def nullspace_oracle(matrix):
    """Exact basis of ``{X : matrix X = 0}`` by plain Gauss-Jordan."""
    a = [[Fraction(v) for v in row] for row in matrix]
    if not a:
        return []
    rows, cols = len(a), len(a[0])
    pivot_cols = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        lead = a[r][c]
        a[r] = [v / lead for v in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                factor = a[i][c]
                a[i] = [x - factor * y for x, y in zip(a[i], a[r])]
        pivot_cols.append(c)
        r += 1
        if r == rows:
            break
    basis = []
    for free in (c for c in range(cols) if c not in pivot_cols):
        v = [Fraction(0)] * cols
        v[free] = Fraction(1)
        for i, pc in enumerate(pivot_cols):
            v[pc] = -a[i][free]
        basis.append(v)
    return basis
