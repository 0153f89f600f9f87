"""Coexistence-existence region in the (p2, c) plane.

Evaluates the Routh-condition indicator over a log-sampled p2 grid for
both scenarios and renders the admissible region (compare the two panels:
therapy carves away the large-p2 wedge where the constant coefficient of
the tumor quintic turns positive).
"""

import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from immunopattern import existence_region, preset

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

p2_grid = np.geomspace(1e-2, 10.0, 120)
c_grid = np.linspace(0.0, 1.0, 120)

fig, axes = plt.subplots(1, 2, figsize=(11, 4), sharey=True)
for ax, scenario in zip(axes, ("untreated", "treated")):
    grid = existence_region(preset(scenario), p2_grid, c_grid, scenario)
    ax.pcolormesh(p2_grid, c_grid, grid.T, cmap="cividis", shading="nearest")
    ax.set_xscale("log")
    ax.set_xlabel("p2 (log scale)")
    ax.set_title(f"{scenario}: {grid.sum()} of {grid.size} points admissible")
axes[0].set_ylabel("antigenicity c")
fig.tight_layout()
fig.savefig(OUT / "04_existence_region.png", dpi=130)
print(f"wrote {OUT / '04_existence_region.png'}")
