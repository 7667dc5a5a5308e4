"""Time series of ['energy_error'] from energy_sho_hem31.csv."""
import csv
import sys

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else '/root/pkg/results/energy_sho_hem31.csv'
with open(path) as fh:
    rows = list(csv.DictReader(fh))
t = [float(r["t"]) for r in rows]
fig, axes = plt.subplots(1, 1, sharex=True, squeeze=False)
for ax, col in zip(axes[:, 0], ['energy_error']):
    ax.plot(t, [float(r[col]) if r[col] else float("nan") for r in rows])
    ax.set_ylabel(col)
axes[-1, 0].set_xlabel("t")
fig.savefig('/root/pkg/results/energy_sho_hem31.png', dpi=150)
