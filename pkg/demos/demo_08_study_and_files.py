"""
A small seeded Monte-Carlo study and the file formats
=====================================================

The study driver simulates, fits, selects and scores each replicate. The
same pipeline is available from the ``ssir`` command line.
"""

import tempfile
from pathlib import Path

from ssir import GridShape
from ssir.cli import main
from ssir.study import StudyConfig, run_study

config = StudyConfig(models=("A", "B"), lagsets=("first", "first2"), reps=5,
                     shape=GridShape(50, 50, 0.25))
summary = run_study(config)
for key, cell in summary.cells.items():
    print(f"{key:<22} median D2 {cell['D2_inverse']['median']:.4f}  d_hat {cell['d_hat_freq']}")

# %%
# The command line writes a text field file, a JSON fit report and a
# printed lambda table.
with tempfile.TemporaryDirectory() as tmp:
    field = Path(tmp) / "a.field"
    main(["simulate", "--model", "A", "--rows", "60", "--cols", "60", "--seed", "1",
          "--out", str(field)])
    print(field.read_text().splitlines()[1])
    main(["fit", "--input", str(field), "--lags", "first", "--out", str(Path(tmp) / "fit.json")])
    main(["eval", "--fit", str(Path(tmp) / "fit.json"), "--truth", f"{field}.truth.json",
          "--d", "1"])
