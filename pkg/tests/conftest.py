import random
from fractions import Fraction

import pytest

from bondgraph import add, connect, new
from bondgraph.symexpr import Kind, dstate, parse_expr, state, substitute

# reduced relations of the coupled cavity, as printed by the original library
CAVITY_LISTING = """\
dx_0 + 23*x_11/10 + 17*x_3/10 + 19*x_5/10 + 2*x_7 + 21*x_9/10
dx_1 - x_0*x_2 - 6*x_2
dx_2 - e_0 + x_0*x_1 + x_0*x_2 + 6*x_1 + 6*x_2
dx_3 - x_1**2/2 - x_2**2/2 + 17*x_3/100 + 17*x_4/10
dx_4 - 17*x_3/10
dx_5 - x_1**2/2 - x_2**2/2 + 19*x_5/100 + 19*x_6/10
dx_6 - 19*x_5/10
dx_7 - x_1**2/2 - x_2**2/2 + x_7/5 + 2*x_8
dx_8 - 2*x_7
dx_9 - x_1**2/2 + 21*x_10/10 - x_2**2/2 + 21*x_9/100
dx_10 - 21*x_9/10
dx_11 - x_1**2/2 + 23*x_11/100 + 23*x_12/10 - x_2**2/2
dx_12 - 23*x_11/10
f_0 - x_0*x_2 - 6*x_2"""


def cavity_listing():
    return [parse_expr(line) for line in CAVITY_LISTING.splitlines()]


def _lead_state(rel):
    for s in sorted(rel.symbols(), key=lambda s: s.key):
        if s.kind == Kind.DSTATE:
            return s.index
    return None


def _signature(rel):
    """Relabeling- and scale-invariant summary of a relation."""
    i = _lead_state(rel)
    lead = next((c for mono, c in rel.terms if mono == ((dstate(i), 1),)), 1) if i is not None else 1
    return tuple(sorted(
        (c / lead, tuple(sorted((f.kind, k) for f, k in mono))) for mono, c in rel.terms))


def match_relabeled(ours, theirs, n_states):
    """Pair relations one-to-one up to scale under a single state relabeling.

    Returns the permutation (ours -> theirs) or None.  The identity is tried
    first; otherwise a backtracking search keyed on each row's dx symbol.
    """
    from bondgraph.symexpr import equal_mod_scale

    if len(ours) != len(theirs):
        return None

    def check(perm):
        rules = {}
        for i, j in perm.items():
            rules[state(i)] = state(j)
            rules[dstate(i)] = dstate(j)
        mapped = [substitute(r, rules, check=False) for r in ours]
        left = list(theirs)
        for r in mapped:
            hit = next((k for k, t in enumerate(left) if equal_mod_scale(r, t)), None)
            if hit is None:
                return False
            left.pop(hit)
        return True

    identity = {i: i for i in range(n_states)}
    if check(identity):
        return identity
    rows = [(r, _lead_state(r)) for r in ours]
    shape = {}
    for t in theirs:
        shape.setdefault(_signature(t), []).append(_lead_state(t))

    def search(k, perm, used):
        if k == len(rows):
            return dict(perm) if len(perm) == n_states and check(perm) else None
        rel, i = rows[k]
        if i is None:
            return search(k + 1, perm, used)
        for j in sorted(set(shape.get(_signature(rel), [])) - used - {None},
                        key=lambda j: (j != i, j)):
            perm[i] = j
            found = search(k + 1, perm, used | {j})
            if found:
                return found
            del perm[i]
        return None

    return search(0, {}, set())


LINEAR_KINDS = ("R", "C", "I", "TF", "GY", "Se")


def random_linear_model(rng, max_components=6):
    """A fully bonded model of up to `max_components` linear components."""
    model = new(name="Random")
    n_junctions = rng.randint(1, 2)
    n_other = rng.randint(1, max_components - n_junctions)
    junctions = [new(rng.choice(("0", "1")), name=f"J{k}") for k in range(n_junctions)]
    others = []
    for k in range(n_other):
        kind = rng.choice(LINEAR_KINDS)
        value = None if kind == "Se" else Fraction(rng.randint(1, 16), rng.randint(1, 4))
        value = None if value is None else min(max(value, Fraction(1, 4)), Fraction(4))
        others.append(new(kind, name=f"{kind}{k}", value=value))
    add(model, *junctions, *others)
    if n_junctions == 2:
        _bond(rng, junctions[0], junctions[1])
    for comp in others:
        for port in range(len(comp.ports)):
            _bond(rng, (comp, port), rng.choice(junctions))
    return model


def _bond(rng, a, b):
    if rng.random() < 0.5:
        a, b = b, a
    connect(a, b)


@pytest.fixture
def rng():
    return random.Random(20240611)
