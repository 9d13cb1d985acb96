"""Ready-made example models, including the coupled optomechanical cavity."""

from __future__ import annotations

from fractions import Fraction

from .errors import ModelError
from .model import Composite, add, connect, expose, new

__all__ = ["LinearOsc", "coupled_cavity", "FIXTURES", "build", "CAVITY_FREQUENCIES"]

CAVITY_FREQUENCIES = tuple(2 + Fraction(f) for f in ("-0.3", "-0.1", "0", "0.1", "0.3"))


class LinearOsc(Composite):
    """Damped linear oscillator driven through one exposed port ``P_in``."""

    damping_rate = Fraction(1, 10)

    def __init__(self, freq, index):
        freq = Fraction(freq)
        r = new("R", name="R", value=self.damping_rate)
        l = new("I", name="L", value=1 / freq)
        c = new("C", name="C", value=1 / freq)
        port = new("SS")
        law = new("1")
        super().__init__(f"Osc_{index}", components=(r, l, c, port, law))
        for component in (r, l, c):
            connect(law, component)
        connect(port, law)
        expose(port, label="P_in")


def coupled_cavity():
    model = new(name="Cavity Model")
    coupling = {
        "hamiltonian": "(w + G*x_0)*(x_1^2 + x_2^2)/2",
        "params": {"G": 1, "w": 6},
    }
    ph = new("PH", value=coupling)
    gyrator = new("GY", value=1)
    em_field = new("1")
    add(model, ph, gyrator, em_field)
    connect(em_field, (ph, 1))
    connect(em_field, (gyrator, 1))
    connect((ph, 2), (gyrator, 0))

    dissipation = new("R", value=1)
    source = new("SS")
    add(model, dissipation, source)
    connect(em_field, dissipation)
    connect(source, em_field)
    expose(source)

    mean_field = new("0")
    add(model, mean_field)
    connect(mean_field, (ph, 0))
    for index, freq in enumerate(CAVITY_FREQUENCIES):
        osc = LinearOsc(freq, index)
        add(model, osc)
        connect(mean_field, (osc, "P_in"))
    return model


def rlc():
    model = new(name="RLC")
    r, l, c = new("R", value=1), new("I", value=1), new("C", value=1)
    law = new("0")
    add(model, r, l, c, law)
    for component in (r, l, c):
        connect(law, component)
    return model


def decay():
    """RC circuit whose capacitor charge obeys dx/dt = -x."""
    model = new(name="Decay")
    c, r, law = new("C", value=1), new("R", value=1), new("1")
    add(model, c, r, law)
    connect(law, c)
    connect(law, r)
    return model


def lc():
    """Undamped LC loop: a unit-frequency harmonic oscillator."""
    model = new(name="LC")
    c, l, law = new("C", value=1), new("I", value=1), new("0")
    add(model, c, l, law)
    connect(law, c)
    connect(law, l)
    return model


def hamiltonian():
    """Port-Hamiltonian closed by a symplectic gyrator and a 1-junction."""
    model = new(name="Hamiltonian")
    ph = new("PH", value={"hamiltonian": "(x_0^2 + x_1^2)/2"})
    gyrator = new("GY", value=1)
    law = new("1")
    add(model, ph, gyrator, law)
    connect(law, (ph, 0))
    connect(law, (gyrator, 1))
    connect((ph, 1), (gyrator, 0))
    return model


def oscillator():
    return LinearOsc(1, 0)


FIXTURES = {
    "rlc": rlc,
    "decay": decay,
    "lc": lc,
    "hamiltonian": hamiltonian,
    "oscillator": oscillator,
    "cavity": coupled_cavity,
}


def build(name):
    try:
        return FIXTURES[name]()
    except KeyError:
        raise ModelError(f"unknown example {name!r}; choose from {', '.join(FIXTURES)}") from None
