"""CSV writing and plot-script emission."""
import csv
import io
import math
import sys
from pathlib import Path

import numpy as np


def format_value(x):
    """Shortest round-trip text for floats; empty field for missing values."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return "" if math.isnan(x) else repr(x)
    return str(x)


def write_csv(header, rows, path=None):
    """Write rows to ``path`` (or stdout when None); returns the text."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(x) for x in row])
    text = buf.getvalue()
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)
    return text


_LOGLOG = '''"""Log-log plot of {ycol} against {xcol} from {csv_name}."""
import csv
import sys

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else {csv_path!r}
with open(path) as fh:
    rows = [r for r in csv.DictReader(fh) if r[{ycol!r}]]
groups = {{}}
for r in rows:
    groups.setdefault(r.get({group!r}, {label!r}), []).append(r)
fig, ax = plt.subplots()
for name, rs in groups.items():
    x = [float(r[{xcol!r}]) for r in rs]
    y = [float(r[{ycol!r}]) for r in rs]
    ax.loglog(x, y, "o-", label=name)
order = {order!r}
if order is not None and rows:
    x = [float(r[{xcol!r}]) for r in rows]
    y0 = float(rows[0][{ycol!r}])
    x0 = x[0]
    ax.loglog(x, [y0 * (xi / x0) ** order for xi in x], "k:", label=f"order {{order}}")
ax.set_xlabel({xcol!r})
ax.set_ylabel({ycol!r})
ax.legend()
fig.savefig({png_path!r}, dpi=150)
'''

_SERIES = '''"""Time series of {ycols} from {csv_name}."""
import csv
import sys

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else {csv_path!r}
with open(path) as fh:
    rows = list(csv.DictReader(fh))
t = [float(r["t"]) for r in rows]
fig, axes = plt.subplots({ny}, 1, sharex=True, squeeze=False)
for ax, col in zip(axes[:, 0], {ycols!r}):
    ax.plot(t, [float(r[col]) if r[col] else float("nan") for r in rows])
    ax.set_ylabel(col)
axes[-1, 0].set_xlabel("t")
fig.savefig({png_path!r}, dpi=150)
'''


def _script_path(csv_path):
    p = Path(csv_path)
    return p.with_name(p.stem + "_plot.py"), p.with_name(p.stem + ".png")


def emit_loglog_script(csv_path, xcol, ycol, order=None, group=None, label="run"):
    """Write ``<stem>_plot.py`` next to the CSV; returns its path."""
    script, png = _script_path(csv_path)
    script.write_text(_LOGLOG.format(csv_name=Path(csv_path).name, csv_path=str(csv_path),
                                     png_path=str(png), xcol=xcol, ycol=ycol, order=order,
                                     group=group or "", label=label))
    return script


def emit_series_script(csv_path, ycols):
    script, png = _script_path(csv_path)
    script.write_text(_SERIES.format(csv_name=Path(csv_path).name, csv_path=str(csv_path),
                                     png_path=str(png), ycols=list(ycols), ny=len(ycols)))
    return script
