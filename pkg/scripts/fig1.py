"""Write the depolarizing exponent curves (bits) to results/fig1.csv."""

import sys
from pathlib import Path

from qwiretap.cli import main

out = Path(__file__).resolve().parent.parent / "results" / "fig1.csv"
out.parent.mkdir(exist_ok=True)
code = main(["fig1", "--out", str(out), *sys.argv[1:]])
print(f"wrote {out} (exit {code})")
sys.exit(code)
