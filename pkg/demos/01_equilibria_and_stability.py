"""Steady states of the homogeneous model and how therapy moves them.

Walks the two scenarios (untreated vs ACI-treated), printing the
cancer-free equilibrium, the coexistence equilibria and their eigenvalue
verdicts, then sweeps the tumor kill rate p2 to show where the coexistence
state is stable.
"""

import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from immunopattern import (cancer_free_equilibrium, coexistence_equilibria,
                           preset, stability_sweep)

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

for scenario in ("untreated", "treated"):
    p = preset(scenario)
    print(f"--- {scenario} (c={p.c}, p2={p.p2}, s1={p.s1}, s3={p.s3})")
    cfe = cancer_free_equilibrium(p)
    if cfe is None:
        print("  cancer-free equilibrium: none (existence constraint fails)")
    else:
        print(f"  cancer-free equilibrium: {np.round(cfe.state, 6)} "
              f"-> {cfe.stability}")
    for eq in coexistence_equilibria(p):
        lam = ", ".join(f"{z:.4g}" for z in eq.eigenvalues)
        print(f"  coexistence equilibrium: {np.round(eq.state, 6)} "
              f"-> {eq.stability}   eigenvalues [{lam}]")

# eigenvalue real parts along the coexistence branch
fig, axes = plt.subplots(1, 2, figsize=(11, 4), sharey=True)
p2_values = np.linspace(0.05, 0.58, 120)
for ax, scenario in zip(axes, ("untreated", "treated")):
    sweep = stability_sweep(preset(scenario), p2_values)
    p2s = [r.p2 for r in sweep.rows if r.found]
    res = np.array([np.sort(r.eigenvalues.real)[-2:] for r in sweep.rows
                    if r.found])
    ax.plot(p2s, res[:, 1], label="dominant Re(lambda)")
    ax.axhline(0.0, color="k", lw=0.5)
    ax.set_title(f"{scenario}: stable for p2 in {sweep.stable_interval}")
    ax.set_xlabel("p2")
    ax.legend()
axes[0].set_ylabel("Re(lambda)")
fig.tight_layout()
fig.savefig(OUT / "01_eigenvalue_sweep.png", dpi=130)
print(f"wrote {OUT / '01_eigenvalue_sweep.png'}")
