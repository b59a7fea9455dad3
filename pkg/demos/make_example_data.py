"""
Example data for the demos
==========================

Writes a synthetic stand-in for a small process/structure/property table:
a full-factorial process design (3 concentrations x 2 powers x 2 hatch
spacings x 5 scan speeds), structure descriptors that respond to the
process settings, and a sheet-resistance reading that is right-censored
("inf") above the instrument range. Two rows are dropped, as a
quality-control step would, leaving 58.

Everything here is simulated; the numbers carry no physical meaning beyond
having plausible shapes (log-normal resistances, censoring concentrated in
the low-concentration group).

Run from the repository root::

    python demos/make_example_data.py
"""
import csv
import itertools
from pathlib import Path

import numpy as np
import yaml

from graphhdc.data import write_csv
from graphhdc.graph import dump_graph_spec
from graphhdc.synthetic import make_regime_shift, make_separable

HERE = Path(__file__).parent
DATA = HERE / "data"
DATA.mkdir(exist_ok=True)

rng = np.random.default_rng(20240611)

# %%
# Process design and a latent "conductivity" score
conc, power, hatch, speed = (5, 10, 15), (50, 75), (5, 10), (50, 100, 200, 300, 500)
design = np.array(list(itertools.product(conc, power, hatch, speed)), dtype=float)
c, p, h, v = design.T
latent = (0.25 * (c - 10) - 1.2 * np.log(v / 150) + 0.01 * (p - 62.5)
          - 0.05 * (h - 7.5) * (c - 10) / 5 + rng.normal(0, 0.8, len(design)))

# %%
# Structure descriptors: composition weights and pore morphology
ag = 40 + 6 * latent + rng.normal(0, 3, len(design))
carbon = 30 - 3 * latent + rng.normal(0, 3, len(design))
nitrogen = 8 - 0.5 * latent + rng.normal(0, 1, len(design))
oxygen = 100 - ag - carbon - nitrogen
porosity = np.clip(0.3 - 0.03 * latent + rng.normal(0, 0.04, len(design)), 0.02, 0.9)
n_pores = np.round(np.exp(5 + 0.2 * latent + rng.normal(0, 0.3, len(design))))
radius_mean = np.exp(1.5 - 0.1 * latent + rng.normal(0, 0.15, len(design)))
radius_std = radius_mean * np.exp(-0.8 - 0.15 * latent + rng.normal(0, 0.2, len(design)))
area_mean = np.pi * radius_mean ** 2 * (1 + (radius_std / radius_mean) ** 2)
area_std = area_mean * np.exp(-0.2 - 0.2 * latent + rng.normal(0, 0.2, len(design)))

# %%
# Sheet resistance: two regimes split by the sign of the latent score,
# with readings above the instrument range written as "inf"
conductive = latent > 0.0
log_rs = (np.where(conductive, 1.2, 3.2) - 0.3 * latent
          + np.clip(rng.normal(0, 0.15, len(design)), -0.35, 0.35))
rs = 10.0 ** log_rs
keep = np.setdiff1d(np.arange(len(design)), [14, 39])

columns = {
    "sample": np.arange(len(design)), "concentration": c, "power": p, "hatch": h,
    "speed": v, "ag_weight": ag, "c_weight": carbon, "n_weight": nitrogen,
    "o_weight": oxygen, "porosity": porosity, "n_pores": n_pores,
    "radius_mean": radius_mean, "radius_std": radius_std, "area_mean": area_mean,
    "area_std": area_std,
}
with open(DATA / "resistance_raw.csv", "w", newline="") as fh:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(list(columns) + ["Rs"])
    for i in keep:
        row = [f"{columns[k][i]:.6g}" for k in columns]
        writer.writerow(row + ["inf" if rs[i] > 4.0e3 else f"{rs[i]:.4g}"])

# %%
# Two graph files over the same columns: groups only, and groups with
# process -> structure binding edges
groups = [
    {"name": "process", "parameters": ["concentration", "power", "hatch", "speed"]},
    {"name": "composition", "parameters": ["ag_weight", "c_weight", "n_weight", "o_weight"]},
    {"name": "morphology_1", "parameters": ["porosity", "n_pores"]},
    {"name": "morphology_2", "parameters": ["radius_mean", "radius_std", "area_mean", "area_std"]},
]
(HERE / "configs" / "psp_groups.yaml").write_text(
    yaml.safe_dump({"groups": groups, "edges": []}, sort_keys=False))
(HERE / "configs" / "psp_process_structure.yaml").write_text(yaml.safe_dump(
    {"groups": groups, "edges": [["process", "composition"], ["process", "morphology_1"],
                                 ["process", "morphology_2"]]}, sort_keys=False))

# %%
# Labelled synthetic tables used by the library demos
table, spec = make_separable()
write_csv(table, DATA / "separable.csv")
dump_graph_spec(spec, HERE / "configs" / "separable_graph.json")
table, spec = make_regime_shift()
write_csv(table, DATA / "regimes.csv")
dump_graph_spec(spec, HERE / "configs" / "regimes_graph.json")

print(f"wrote {len(keep)} rows to {DATA / 'resistance_raw.csv'} "
      f"({int(np.sum(rs[keep] > 4.0e3))} censored)")
