"""Save a model as a JSON document, then drive the command line on it."""

import tempfile
from pathlib import Path

from bondgraph.document import dump
from bondgraph.cli import main
from bondgraph.fixtures import build


def main_demo():
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "rlc.json"
        dump(build("rlc"), path)
        print(path.read_text())
        for argv in (["validate", str(path)],
                     ["relations", str(path)],
                     ["simulate", str(path), "--x0", "1,0", "--t1", "0.5", "--dt", "0.1"]):
            print("$ bondgraph", " ".join(argv))
            code = main(argv)
            print(f"(exit {code})\n")


if __name__ == "__main__":
    main_demo()
