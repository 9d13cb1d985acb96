"""Build a port-Hamiltonian storage element by hand and recover Hamilton's equations."""

import math

from bondgraph import add, connect, new, reduce_model, simulate


def main():
    model = new(name="Hamiltonian")
    ph = new("PH", value={"hamiltonian": "x_0**2/2 + x_1**2/2"})
    gy, law = new("GY", value=1), new("1")
    add(model, ph, gy, law)
    # close both storage ports through a unit gyrator
    connect((ph, 0), (gy, 0))
    connect((gy, 1), law)
    connect(law, (ph, 1))
    for rel in reduce_model(model).relations:
        print(rel, "= 0")
    traj = simulate(model, [1.0, 0.0], [0, math.pi / 2], 1e-3)
    print("quarter turn:", traj.x[-1].round(5).tolist())


if __name__ == "__main__":
    main()
