"""Regenerate goldens/<shape>_m<m>.pgm for every shape at m = 25 and 50.

Only rerun after a deliberate change to a shape definition; the test suite
compares generators against these files byte for byte.
"""
from pathlib import Path

from morphonca.shapes import SHAPE_NAMES, make_shape

OUT = Path(__file__).resolve().parents[1] / "goldens"

if __name__ == "__main__":
    OUT.mkdir(exist_ok=True)
    for name in SHAPE_NAMES:
        for m in (25, 50):
            path = make_shape(name, m).to_pgm(OUT / f"{name}_m{m}.pgm")
            print(path)
