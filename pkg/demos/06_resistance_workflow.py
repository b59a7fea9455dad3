"""
From raw readings to explanations
=================================

The end-to-end command-line workflow on the simulated sheet-resistance
table written by ``make_example_data.py``:

1. ``prep`` splits the readings at the largest gap in log10 space, treats
   "inf" readings as the high class and clips them for summaries;
2. ``eval`` runs repeated random splits and concentration folds;
3. ``train``, ``explain`` and ``mas`` produce one trained model and its
   attribution and alignment reports.

Every command writes a ``manifest.json`` that ``replay`` can re-run.
Budgets are cut down here (D=1000, 60 epochs) so the script finishes in a
minute or so; drop the overrides for the default settings.
"""
import csv
import json
import math
import subprocess
import sys
from pathlib import Path

from graphhdc.data import aed, gap_threshold

HERE = Path(__file__).parent
OUT = HERE / "output"
CONFIG = HERE / "configs" / "resistance.yaml"
FAST = ["--D", "1000", "--epochs", "60"]

sys.stdout.reconfigure(line_buffering=True)  # keep our lines in order with the child output

if not (HERE / "data" / "resistance_raw.csv").exists():
    subprocess.run([sys.executable, str(HERE / "make_example_data.py")], check=True)


def graphhdc(*args):
    subprocess.run([sys.executable, "-m", "graphhdc.cli", *map(str, args)], check=True)


def read(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


# %%
# The gap rule on two readings is their geometric mean.
g = gap_threshold([123.8, 552.7])
print(f"gap threshold for (123.8, 552.7): {g.threshold:.4f} = sqrt(123.8 * 552.7) "
      f"= {math.sqrt(123.8 * 552.7):.4f}")
# areal energy density is reported for reference only; it is not a feature
print(f"AED for P=50 mW, v=50 um/s, h=5 um: {aed(50, 50, 5)} mJ/um^2")

# %%
# Label preparation report.
graphhdc("prep", HERE / "data" / "resistance_raw.csv", "--target", "Rs",
         "--group-column", "concentration", "--exclude-columns", "sample",
         "--out", OUT / "prep")
report = json.loads((OUT / "prep" / "threshold.json").read_text())
print(f"threshold {report['threshold']:.1f}, classes {report['class_counts']}, "
      f"censored {report['n_censored']}, clip levels {report['clip_levels']}")

# %%
# Random splits and concentration folds.
graphhdc("eval", CONFIG, *FAST, "--repeats", "10", "--out", OUT / "eval")
summary = json.loads((OUT / "eval" / "summary.json").read_text())
print(f"random splits: accuracy {summary['accuracy']['mean']:.3f} "
      f"+/- {summary['accuracy']['std']:.3f}")
graphhdc("eval", CONFIG, *FAST, "--protocol", "fold", "--fold-column", "concentration",
         "--out", OUT / "folds")
for row in read(OUT / "folds" / "folds.csv"):
    print("  fold", row)

# %%
# One trained model, its group attribution and its alignment summary.
graphhdc("train", CONFIG, *FAST, "--out", OUT / "train")
graphhdc("explain", CONFIG, "--checkpoint", OUT / "train" / "checkpoint.json",
         "--level", "group", "--out", OUT / "explain")
for row in read(OUT / "explain" / "attribution.csv"):
    print(f"  {row['class']:>5} {row['component']:<13} {float(row['weight']):.3f}")
graphhdc("mas", CONFIG, "--checkpoint", OUT / "train" / "checkpoint_epoch0.json",
         OUT / "train" / "checkpoint.json", "--out", OUT / "mas")
for row in read(OUT / "mas" / "mas_summary.csv"):
    print("  ", row)

# %%
# Replaying a manifest reproduces the outputs byte for byte.
graphhdc("replay", OUT / "train" / "manifest.json", "--out", OUT / "train_replay")
same = all((OUT / "train" / p.name).read_bytes() == p.read_bytes()
           for p in (OUT / "train_replay").glob("*.csv"))
print("replayed CSV outputs identical:", same)
