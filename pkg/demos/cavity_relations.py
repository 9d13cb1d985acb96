"""Reduce the coupled optical cavity and print its equations of motion.

The cavity couples a driven main mode to five detuned mechanical
oscillators. Each oscillator is a reusable composite exposing one port.
"""

from bondgraph import coupled_cavity, reduce_model


def main():
    model = coupled_cavity()
    result = reduce_model(model)
    print(f"{model.name}: {len(result.relations)} relations")
    for rel in result.relations:
        print("   ", rel)
    if result.residual_constraints:
        print("unresolved constraints:", [str(r) for r in result.residual_constraints])


if __name__ == "__main__":
    main()
