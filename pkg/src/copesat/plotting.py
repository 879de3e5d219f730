"""Figures for sweep and gain tables.

Rendering goes through matplotlib's object API on the Agg canvas, so no
display or global pyplot state is involved. :func:`plot_script` emits the
same figure as a standalone script for later tweaking.
"""

from __future__ import annotations

from collections import defaultdict

from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

STYLE = {
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.4,
    "legend.frameon": False,
}


def _group(rows, key):
    out = defaultdict(list)
    for row in rows:
        out[row.get("series", "")].append((float(row[key[0]]), float(row[key[1]])))
    return out


def _figure():
    fig = Figure(figsize=(5.0, 3.4), dpi=150)
    FigureCanvasAgg(fig)
    return fig, fig.add_subplot(1, 1, 1)


def _apply_style(ax):
    ax.grid(True, alpha=STYLE["grid.alpha"])
    for side in ("top", "right"):
        ax.spines[side].set_visible(False)


def render_curves(rows, path, title="", stars=None):
    """Throughput vs offered load, one line per ``series``.

    ``rows`` are dicts with P, mean_S, std_S (and optionally series).
    ``stars`` maps series name -> (p_star, s_max) drawn as markers.
    """
    fig, ax = _figure()
    for name, pts in sorted(_group(rows, ("P", "mean_S")).items()):
        xs, ys = zip(*pts)
        line, = ax.plot(xs, ys, label=name or None, lw=STYLE["lines.linewidth"])
        if stars and name in stars:
            px, py = stars[name]
            ax.plot([float(px)], [float(py)], marker="*", ms=9, color=line.get_color(), ls="none")
    ax.set_xlabel("total offered load P")
    ax.set_ylabel("throughput S (packets/slot)")
    if title:
        ax.set_title(title, fontsize=STYLE["font.size"] + 1)
    if any(r.get("series") for r in rows):
        ax.legend(fontsize=STYLE["font.size"] - 1, frameon=STYLE["legend.frameon"])
    _apply_style(ax)
    fig.tight_layout()
    fig.savefig(path)
    return path


def render_gain(rows, path, title="maximum throughput vs MPR order"):
    """Maxima vs m, one line per ``series``; rows carry m and decimal."""
    fig, ax = _figure()
    for name, pts in sorted(_group(rows, ("m", "decimal")).items()):
        xs, ys = zip(*sorted(pts))
        ax.plot(xs, ys, marker="o", ms=4, label=name,
                ls="--" if name == "additive_prediction" else "-")
    ax.set_xlabel("MPR order m")
    ax.set_ylabel("maximum throughput")
    ax.set_xticks(sorted({float(r["m"]) for r in rows}))
    ax.set_title(title, fontsize=STYLE["font.size"] + 1)
    ax.legend(fontsize=STYLE["font.size"] - 1, frameon=False)
    _apply_style(ax)
    fig.tight_layout()
    fig.savefig(path)
    return path


_SCRIPT = '''\
"""Plot {csv} (generated)."""
import csv
from collections import defaultdict

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

series = defaultdict(list)
with open({csv!r}, newline="") as fh:
    for row in csv.DictReader(fh):
        series[row.get("series", "")].append((float(row[{x!r}]), float(row[{y!r}])))

fig, ax = plt.subplots(figsize=(5.0, 3.4))
for name, pts in sorted(series.items()):
    xs, ys = zip(*sorted(pts))
    ax.plot(xs, ys, {style}label=name or None)
ax.set_xlabel({xlabel!r})
ax.set_ylabel({ylabel!r})
ax.grid(True, alpha=0.3)
if any(series):
    ax.legend(frameon=False)
fig.tight_layout()
fig.savefig({png!r}, dpi=150)
'''


def plot_script(csv_path, png_path, gain=False) -> str:
    """Source of a standalone script that plots ``csv_path`` into ``png_path``."""
    if gain:
        return _SCRIPT.format(csv=str(csv_path), x="m", y="decimal", style='marker="o", ',
                              xlabel="MPR order m", ylabel="maximum throughput", png=str(png_path))
    return _SCRIPT.format(csv=str(csv_path), x="P", y="mean_S", style="",
                          xlabel="total offered load P", ylabel="throughput S (packets/slot)",
                          png=str(png_path))
