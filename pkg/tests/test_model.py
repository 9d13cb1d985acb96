import pytest

from bondgraph import (
    LinearOsc, add, connect, control_vars, coupled_cavity, diagnose, disconnect,
    expose, new, params, remove, resolve, state_vars, uri,
)
from bondgraph.errors import ModelError
from bondgraph.symexpr import state


def small_model():
    model = new(name="M")
    c, r, law = new("C", value=1), new("R", value=1), new("1")
    add(model, c, r, law)
    return model, c, r, law


def test_add_is_variadic_and_ordered():
    model, c, r, law = small_model()
    assert model.components == [c, r, law]
    assert all(x.parent is model for x in (c, r, law))


def test_add_renames_duplicates():
    model = new(name="M")
    a, b = new("R"), new("R")
    add(model, a, b)
    assert [x.name for x in model.components] == ["R", "R#1"]


def test_add_rejects_second_parent_and_cycles():
    model, c, _, _ = small_model()
    other = new(name="Other")
    with pytest.raises(ModelError):
        add(other, c)
    inner = new(name="Inner")
    add(model, inner)
    with pytest.raises(ModelError):
        add(inner, model)
    with pytest.raises(ModelError):
        add(model, model)


def test_connect_grows_junction_ports():
    model, c, r, law = small_model()
    connect(law, c)
    connect(r, law)
    assert len(law.ports) == 2
    # junction as tail is outward, as head inward
    assert [p.orientation for p in law.ports] == [-1, 1]
    assert model.bonds[0].tail.owner is law and model.bonds[0].head.owner is c


def test_connect_errors():
    model, c, r, law = small_model()
    connect(law, c)
    with pytest.raises(ModelError):
        connect(law, c)  # C's only port is taken
    with pytest.raises(ModelError):
        connect(r, (c, 3))
    with pytest.raises(ModelError):
        connect(r, r)
    stranger = new("R")
    with pytest.raises(ModelError):
        connect(r, stranger)
    gy = new("GY", value=1)
    add(model, gy)
    with pytest.raises(ModelError):
        connect(law, gy)  # two free ports: must name one


def test_disconnect_either_direction():
    model, c, r, law = small_model()
    connect(law, c)
    connect(law, r)
    disconnect(c, law)
    assert len(model.bonds) == 1
    assert len(law.ports) == 1 and law.ports[0].index == 0
    with pytest.raises(ModelError):
        disconnect(c, law)


def test_remove_drops_bonds():
    model, c, r, law = small_model()
    connect(law, c)
    connect(law, r)
    remove(model, c)
    assert c.parent is None and c not in model.components
    assert len(model.bonds) == 1
    with pytest.raises(ModelError):
        remove(model, c)


def test_expose_labels():
    model = new(name="M")
    a, b = new("SS"), new("SS")
    add(model, a, b)
    p0 = expose(a)
    p1 = expose(b, "in")
    assert (p0.label, p1.label) == ("0", "in")
    assert model.ports == [p0, p1]
    with pytest.raises(ModelError):
        expose(a)
    with pytest.raises(ModelError):
        expose(new("R"))


def test_expose_duplicate_label():
    model = new(name="M")
    a, b = new("SS"), new("SS")
    add(model, a, b)
    expose(a, "p")
    with pytest.raises(ModelError):
        expose(b, "p")


def test_connect_to_exposed_label():
    osc = LinearOsc(2, 0)
    model = new(name="M")
    mean = new("0")
    add(model, mean, osc)
    bond = connect(mean, (osc, "P_in"))
    assert bond.head is osc.ports[0]


def test_removing_an_exposed_ss_unbonds_the_outer_port():
    osc = LinearOsc(2, 0)
    model = new(name="M")
    mean = new("0")
    add(model, mean, osc)
    connect(mean, (osc, "P_in"))
    remove(osc, osc.component("SS"))
    assert osc.ports == [] and model.bonds == []


def test_uri_and_resolve():
    cavity = coupled_cavity()
    assert uri(cavity) == "Cavity Model:/"
    r = resolve(cavity, "Cavity Model:/Osc_0/R")
    assert uri(r) == "Cavity Model:/Osc_0/R"
    assert r.value == pytest.approx(0.1)
    for node in cavity.components:
        assert resolve(cavity, uri(node)) is node
    with pytest.raises(ModelError):
        resolve(cavity, "Cavity Model:/nope")
    with pytest.raises(ModelError):
        resolve(cavity, "Other:/Osc_0")


def test_cavity_enumeration():
    cavity = coupled_cavity()
    assert state_vars(cavity) == [state(i) for i in range(13)]
    assert control_vars(cavity) == []
    names = [name for _, name, _ in params(cavity)]
    assert names[:2] == ["G", "w"]


def test_controls_follow_traversal():
    model = new(name="M")
    add(model, new("Se"), new("Sf"))
    assert [str(u) for u in control_vars(model)] == ["u_0", "u_1"]


def test_diagnose():
    model, c, r, law = small_model()
    connect(law, c)
    ss = new("SS")
    add(model, ss)
    problems = diagnose(model)
    assert any("M:/R" in p for p in problems)
    assert any("SS" in p and "not exposed" in p for p in problems)
    connect(law, r)
    expose(ss)
    connect(ss, law)
    assert diagnose(model) == []


def test_fixtures_are_clean():
    assert diagnose(coupled_cavity()) == []
