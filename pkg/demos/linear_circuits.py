"""Simulate a decaying RC pair and a lossless LC tank.

Shows the midpoint integrator's accuracy and its energy behaviour.
"""

import math

import numpy as np

from bondgraph import simulate, stored_energy
from bondgraph.fixtures import decay, lc


def main():
    rc = decay()
    traj = simulate(rc, [1.0], [0, 1], 1e-3)
    print(f"RC: x(1) = {traj.x[-1, 0]:.9f}, exact {math.exp(-1):.9f}")
    energy = [stored_energy(rc, x) for x in traj.x]
    print(f"RC energy falls from {energy[0]:.3f} to {energy[-1]:.3f}")

    tank = lc()
    traj = simulate(tank, [1.0, 0.0], [0, 2 * math.pi], 1e-3)
    energy = np.array([stored_energy(tank, x) for x in traj.x])
    print(f"LC after one period: x = {traj.x[-1].round(6).tolist()}")
    print(f"LC relative energy drift: {np.ptp(energy) / energy[0]:.1e}")


if __name__ == "__main__":
    main()
