"""
Seeded runs from the command line
=================================

The ``ctt-aco`` entry point drives the same code. Here it is called in
process: generate an instance, solve it three times and validate the best.
"""

# %%
import tempfile
from pathlib import Path

from ctt_aco.cli import main

work = Path(tempfile.mkdtemp())
main(["generate", "--courses", "10", "--rooms", "3", "--seed", "5", "--out", str(work / "inst.ctt")])

# %%
# One report row per seed on stdout, one CSV trace per seed.
main(["solve", "--instance", str(work / "inst.ctt"), "--seed", "1", "--repeat", "3", "--max-cycles", "200",
      "--csv", str(work / "trace.csv"), "--out", str(work / "best.sol")])
print(sorted(p.name for p in work.iterdir()))

# %%
main(["validate", "--instance", str(work / "inst.ctt"), "--solution", str(work / "best.sol")])
