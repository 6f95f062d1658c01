"""Figures for suite reports, written next to the CSV output."""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

RULE_COLORS = {"orbitopal": "#d08c2d", "negation": "#8c3d6e", "clausal": "#2d7d7d"}


def _label(row):
    return f"{row['family']}({row['params'].replace(' ', ',')})"


def plot_units(rows, path, setting="all-units"):
    """Stacked bars of units per rule for one setting."""
    sel = [r for r in rows if r["setting"] == setting and "error" not in r]
    fig, ax = plt.subplots(figsize=(max(4, 0.6 * len(sel) + 2), 3.5))
    bottom = [0] * len(sel)
    xs = range(len(sel))
    for rule, color in RULE_COLORS.items():
        vals = [r[f"units_{rule}"] for r in sel]
        ax.bar(xs, vals, bottom=bottom, color=color, label=rule)
        bottom = [b + v for b, v in zip(bottom, vals)]
    ax.set_xticks(list(xs))
    ax.set_xticklabels([_label(r) for r in sel], rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("units added")
    ax.set_title(f"fixed units ({setting})")
    ax.legend(fontsize=8, frameon=False)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_times(rows, path):
    """Preprocessing time per instance, one series per setting, log scale."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    labels = list(dict.fromkeys(_label(r) for r in rows))
    for setting in dict.fromkeys(r["setting"] for r in rows):
        pts = [(labels.index(_label(r)), r["time_ms"]) for r in rows
               if r["setting"] == setting and "error" not in r]
        if pts:
            ax.plot(*zip(*pts), marker="o", linestyle="none", label=setting)
    ax.set_yscale("log")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("time [ms]")
    ax.legend(fontsize=8, frameon=False)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def render_suite_figures(rows, outdir):
    os.makedirs(outdir, exist_ok=True)
    paths = []
    for setting in dict.fromkeys(r["setting"] for r in rows):
        paths.append(plot_units(rows, os.path.join(outdir, f"units_{setting}.png"), setting))
    paths.append(plot_times(rows, os.path.join(outdir, "times.png")))
    return paths
