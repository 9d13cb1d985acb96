"""Numerical simulation of reduced models.

The reduced relations are treated as a fully implicit system
``F(t, x, dx, z) = 0`` and stepped with the implicit midpoint rule; each
step is a damped Newton solve using a symbolically derived Jacobian.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .components import Atomic
from .errors import ExprError, SimulationError
from .model import storages, walk
from .reduce import reduce_model
from .symexpr import (
    TIME, Kind, SymbolTable, as_expr, const, differentiate, dstate, effort,
    evaluate, flow, lambdify, linear_split, parse_expr, state, substitute,
)

__all__ = [
    "ReducedSystem", "Trajectory", "classify", "bind_controls", "residual",
    "simulate", "consistent_ic", "stored_energy",
    "NEWTON_TOL", "MAX_NEWTON", "TOL_CONSISTENCY",
]

NEWTON_TOL = 1e-10
MAX_NEWTON = 25
TOL_CONSISTENCY = 1e-8


@dataclass
class ReducedSystem:
    """Reduced relations sorted by role, ready for numerical evaluation."""

    relations: list
    n_states: int
    ode_rows: dict = field(default_factory=dict)
    algebraic_rows: list = field(default_factory=list)
    input_rows: dict = field(default_factory=dict)
    output_rows: dict = field(default_factory=dict)
    controls: list = field(default_factory=list)
    bound: dict = field(default_factory=dict)
    algebraic_vars: list = field(default_factory=list)
    outer: list = field(default_factory=list)

    @property
    def states(self):
        return [state(i) for i in range(self.n_states)]

    @property
    def implicit(self):
        return len(self.ode_rows) < self.n_states

    def dynamic_rows(self):
        """Rows the integrator solves: everything except output definitions."""
        outputs = {id(r) for r in self.output_rows.values()}
        return [r for r in self.relations if id(r) not in outputs]


def _solve_for(rel, sym):
    """``rhs`` with ``rel = c*(sym - rhs)`` for constant c, or None."""
    row, rest = linear_split(rel, [sym])
    c = row.get(0)
    if c is None or not c.is_constant or rest.has(sym):
        return None
    return -rest * (1 / c.constant_value)


def classify(relations, n_states, n_outer=None):
    """Sort reduced relations into state equations, outputs and constraints.

    Outer port symbols that no relation defines are treated as external
    inputs, alongside the ``u_j`` of sources.
    """
    relations = [as_expr(r) for r in relations]
    mentioned = set()
    for r in relations:
        mentioned |= r.symbols()
    sys = ReducedSystem(relations, n_states)
    outputs = sys.output_rows
    for rel in relations:
        lead = rel.terms[0][0][0][0] if rel.terms and rel.terms[0][0] else None
        if lead is None or not hasattr(lead, "kind"):
            sys.algebraic_rows.append(rel)
            continue
        rhs = _solve_for(rel, lead)
        if lead.kind == Kind.DSTATE and rhs is not None and lead.index < n_states \
                and lead.index not in sys.ode_rows:
            sys.ode_rows[lead.index] = rhs
        elif lead.is_port and rhs is not None and lead not in outputs \
                and not any(s.kind == Kind.DSTATE for s in rhs.symbols()):
            outputs[lead] = rel
            sys.input_rows[lead] = rhs
        else:
            sys.algebraic_rows.append(rel)
    # an output that other rows depend on must be solved for, not just read off
    for sym, rel in list(outputs.items()):
        if any(r is not rel and r.has(sym) for r in relations):
            del outputs[sym], sys.input_rows[sym]
            sys.algebraic_rows.append(rel)
    for i in range(n_states):
        if dstate(i) not in mentioned:
            raise SimulationError(f"state x_{i} has no defining relation")
    ports = sorted((s for s in mentioned if s.is_port), key=lambda s: s.key)
    if n_outer is None:
        n_outer = len({s.index for s in ports})
    sys.outer = [s for i in range(n_outer) for s in (effort(i), flow(i))]
    defined = set(sys.input_rows)
    for rel in sys.algebraic_rows:
        lead = rel.terms[0][0][0][0] if rel.terms and rel.terms[0][0] else None
        if getattr(lead, "is_port", False):
            defined.add(lead)
    free = [s for s in ports if s.index < n_outer and s not in defined]
    controls = sorted((s for s in mentioned if s.kind == Kind.CONTROL), key=lambda s: s.key)
    sys.controls = controls + free
    sys.algebraic_vars = [s for s in ports if s not in sys.input_rows and s not in free]
    return sys


def bind_controls(sys, control_texts):
    """Bind each control symbol to an expression of time given as text."""
    texts = list(control_texts or [])
    if len(texts) != len(sys.controls):
        names = ", ".join(map(str, sys.controls)) or "none"
        raise SimulationError(f"expected {len(sys.controls)} control(s) ({names}), got {len(texts)}")
    table = SymbolTable({"t": TIME}, coordinates=False)
    bound = {}
    for sym, text in zip(sys.controls, texts):
        try:
            bound[sym] = parse_expr(str(text), table)
        except ExprError as err:
            raise SimulationError(f"control {sym}: {err}") from None
    out = ReducedSystem(**{**sys.__dict__, "bound": bound})
    return out


def _parameter_values(exprs, parameters):
    params = {}
    for e in exprs:
        for s in e.symbols():
            if s.kind == Kind.PARAMETER:
                if parameters is None or s.label not in parameters:
                    raise SimulationError(f"parameter {s} has no numeric value")
                params[s] = const(parameters[s.label])
    return params


class _Compiled:
    """Residual and Jacobian of the dynamic rows as fast numeric functions."""

    def __init__(self, sys, parameters=None):
        n = sys.n_states
        self.n = n
        rows = sys.dynamic_rows()
        self.z = list(sys.algebraic_vars)
        if len(rows) != n + len(self.z):
            raise SimulationError(
                f"{len(rows)} relation(s) for {n} state(s) and {len(self.z)} algebraic "
                "unknown(s); the system is not square")
        pvals = _parameter_values(rows + list(sys.input_rows.values()), parameters)
        rows = [substitute(r, pvals) for r in rows] if pvals else rows
        names = {TIME: "t"}
        for i in range(n):
            names[state(i)] = f"x[{i}]"
            names[dstate(i)] = f"dx[{i}]"
        for j, s in enumerate(self.z):
            names[s] = f"z[{j}]"
        for j, s in enumerate(sys.controls):
            names[s] = f"u[{j}]"
        args = ("t", "x", "dx", "z", "u")
        unknown = [state(i) for i in range(n)]
        self.F = lambdify(rows, names, args)
        jx = [differentiate(r, s) for r in rows for s in unknown]
        jd = [differentiate(r, dstate(i)) for r in rows for i in range(n)]
        jz = [differentiate(r, s) for r in rows for s in self.z]
        self.Jx = lambdify(jx, names, args)
        self.Jd = lambdify(jd, names, args)
        self.Jz = lambdify(jz, names, args)
        missing = [s for s in sys.controls if s not in sys.bound]
        if missing:
            raise SimulationError(f"unbound control(s): {', '.join(map(str, missing))}")
        self.U = lambdify([sys.bound[s] for s in sys.controls], {TIME: "t"}, ("t",))
        outs, self.labels = [], []
        for s in sys.outer:
            if s in sys.input_rows:
                outs.append(substitute(sys.input_rows[s], pvals) if pvals else sys.input_rows[s])
            elif s in names:
                outs.append(as_expr(s))
            else:
                continue
            self.labels.append(str(s))
        self.Y = lambdify(outs, names, args)
        self.m = len(rows)

    def call(self, fn, *args):
        try:
            return np.asarray(fn(*args), dtype=float)
        except (ZeroDivisionError, ValueError, OverflowError) as err:
            raise SimulationError(f"evaluation failed at t={args[0]:.6g}: {err}") from None

    def residual(self, t, x, dx, z, u):
        return self.call(self.F, t, x, dx, z, u)

    def jacobians(self, t, x, dx, z, u):
        m, n, nz = self.m, self.n, len(self.z)
        jx = self.call(self.Jx, t, x, dx, z, u).reshape(m, n)
        jd = self.call(self.Jd, t, x, dx, z, u).reshape(m, n)
        jz = self.call(self.Jz, t, x, dx, z, u).reshape(m, nz)
        return jx, jd, jz

    def controls(self, t):
        return self.call(self.U, t)


def residual(sys, t, x, xdot, z=(), parameters=None):
    """Per-row residuals of the dynamic relations at one point."""
    comp = _Compiled(sys, parameters)
    x = np.asarray(x, dtype=float)
    xdot = np.asarray(xdot, dtype=float)
    if x.shape != (comp.n,) or xdot.shape != (comp.n,):
        raise SimulationError(f"expected vectors of length {comp.n}")
    return comp.residual(t, x, xdot, np.asarray(z, dtype=float), comp.controls(t))


def consistent_ic(sys, t0, x0, z0=None, parameters=None):
    """Largest violation of the purely algebraic relations at (t0, x0)."""
    rows = [r for r in sys.algebraic_rows
            if not any(s.kind == Kind.DSTATE for s in r.symbols())
            and not any(s in sys.algebraic_vars for s in r.symbols())]
    if not rows:
        return 0.0
    pvals = _parameter_values(rows, parameters)
    values = {state(i): float(v) for i, v in enumerate(x0)}
    for s, e in sys.bound.items():
        values[s] = evaluate(e, {TIME: t0})
    values[TIME] = t0
    worst = 0.0
    for r in rows:
        r = substitute(r, pvals) if pvals else r
        worst = max(worst, abs(evaluate(r, values)))
    return worst


@dataclass
class Trajectory:
    t: np.ndarray
    x: np.ndarray
    outputs: np.ndarray | None = None
    labels: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    def header(self):
        return ["t"] + [f"x_{i}" for i in range(self.x.shape[1])] + list(self.labels)

    def to_csv(self, target=None):
        """Write samples as CSV; returns the text when `target` is None."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header())
        for k in range(len(self.t)):
            row = [self.t[k], *self.x[k]]
            if self.outputs is not None:
                row.extend(self.outputs[k])
            w.writerow(["%.17g" % v for v in row])
        text = buf.getvalue()
        if target is None:
            return text
        if hasattr(target, "write"):
            target.write(text)
        else:
            with open(target, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        return text


def _newton(comp, t, h, x0, z0, u, guess=None):
    """Solve one implicit-midpoint step for (x1, z)."""
    n, nz = comp.n, len(comp.z)
    y = np.concatenate([x0 if guess is None else guess, z0])

    def F(y):
        x1, z = y[:n], y[n:]
        return comp.residual(t, (x0 + x1) / 2, (x1 - x0) / h, z, u)

    r = F(y)
    norm = np.max(np.abs(r)) if r.size else 0.0
    for it in range(MAX_NEWTON + 1):
        # relative to the size of the quantities the rows combine
        scale = max(1.0, np.max(np.abs(y), initial=0.0), np.max(np.abs(y[:n] - x0), initial=0.0) / h)
        if norm <= NEWTON_TOL * scale:
            return y[:n], y[n:], it
        if it == MAX_NEWTON:
            break
        x1, z = y[:n], y[n:]
        jx, jd, jz = comp.jacobians(t, (x0 + x1) / 2, (x1 - x0) / h, z, u)
        J = np.hstack([jx / 2 + jd / h, jz]) if nz else jx / 2 + jd / h
        try:
            step = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError:
            raise SimulationError(f"singular Jacobian at t={t:.6g}") from None
        lam = 1.0
        while True:
            trial = y + lam * step
            rt = F(trial)
            nt = np.max(np.abs(rt))
            if nt < norm or lam < 1e-4:
                break
            lam /= 2
        if not np.all(np.isfinite(trial)):
            break
        y, r, norm = trial, rt, nt
    raise SimulationError(
        f"Newton iteration did not converge at t={t:.6g} after {MAX_NEWTON} iterations "
        f"(residual {norm:.3g})")


def _system_for(model, control_vars):
    res = reduce_model(model)
    sys = classify(res.relations, res.space.n, res.space.m)
    return bind_controls(sys, control_vars)


def simulate(model, x0, timespan, dt, control_vars=(), parameters=None):
    """Integrate `model` from `x0` over `timespan` with fixed step `dt`.

    `control_vars` lists one expression of ``t`` per control symbol: first
    the source inputs ``u_j``, then any outer port variables left free.
    """
    try:
        t0, t1 = (float(v) for v in timespan)
        dt = float(dt)
    except (TypeError, ValueError):
        raise SimulationError("timespan must be [t0, t1] and dt a number") from None
    if not dt > 0 or not math.isfinite(dt):
        raise SimulationError(f"dt must be positive, got {dt}")
    if not t1 > t0:
        raise SimulationError(f"timespan end {t1} must exceed start {t0}")
    sys = model if isinstance(model, ReducedSystem) else _system_for(model, control_vars)
    x = np.asarray([float(v) for v in x0], dtype=float)
    if x.shape != (sys.n_states,):
        raise SimulationError(f"x0 has {x.size} entries; the model has {sys.n_states} states")
    comp = _Compiled(sys, parameters)
    gap = consistent_ic(sys, t0, x, parameters=parameters)
    if gap > TOL_CONSISTENCY:
        raise SimulationError(f"inconsistent initial condition: algebraic residual {gap:.3g}")
    z = np.zeros(len(comp.z))
    n_steps = max(1, math.ceil((t1 - t0) / dt - 1e-9))
    ts = [t0]
    xs = [x.copy()]
    ys = [comp.call(comp.Y, t0, x, np.zeros_like(x), z, comp.controls(t0))]
    iterations = 0
    t = t0
    for k in range(n_steps):
        t_next = t1 if k == n_steps - 1 else t0 + (k + 1) * dt
        h = t_next - t
        tm = t + h / 2
        u = comp.controls(tm)
        guess = x + h * dx if k else None
        x_next, z, its = _newton(comp, tm, h, x, z, u, guess)
        if not np.all(np.isfinite(x_next)):
            raise SimulationError(f"state left the floating-point range at t={t_next:.6g}")
        iterations += its
        dx = (x_next - x) / h
        x, t = x_next, t_next
        ts.append(t)
        xs.append(x.copy())
        ys.append(comp.call(comp.Y, t, x, dx, z, comp.controls(t)))
    labels = comp.labels
    outputs = np.array(ys) if labels else None
    stats = {"steps": n_steps, "newton_iterations": iterations}
    return Trajectory(np.array(ts), np.array(xs), outputs, labels, stats)


def stored_energy(model, x):
    """Energy held in the storage components of `model` at state `x`."""
    x = [float(v) for v in x]
    n = len(storages(model))
    if len(x) != n:
        raise SimulationError(f"expected {n} state values, got {len(x)}")
    total, k = 0.0, 0
    for a in walk(model):
        if a.n_states:
            total += _component_energy(a, x[k:k + a.n_states])
            k += a.n_states
    return total


def _component_energy(a: Atomic, xs):
    if a.kind == "PH":
        e = a.energy
        values = {state(j): v for j, v in enumerate(xs)}
    else:
        p = a.parameter()
        if not p.is_constant:
            raise SimulationError(f"{a.uri}: parameter {p} is symbolic")
        e = as_expr(state(0)) ** 2 / (2 * p)
        values = {state(0): xs[0]}
    if any(s.kind == Kind.PARAMETER for s in e.symbols()):
        raise SimulationError(f"{a.uri}: energy depends on a symbolic parameter")
    return evaluate(e, values)
