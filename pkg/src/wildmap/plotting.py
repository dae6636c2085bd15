"""Sampled graph data and the rendered figure.

One deterministic sampler feeds both output formats: the CSV rows and the
curves drawn into the SVG come from the same grid, so anything asserted
about the delimited data holds for the figure as well.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .mapcore import FullBranchMap, branch_curve


@dataclass(frozen=True)
class BranchSamples:
    branch: int
    xs: np.ndarray
    values: np.ndarray
    in_left: np.ndarray


def sample_graph(m: FullBranchMap, branches: int = 6, per_branch: int = 200) -> list[BranchSamples]:
    """Per-branch grids on (lo, hi], left endpoint excluded, right included."""
    if branches < 1 or per_branch < 2:
        raise DomainError("need at least one branch and two samples per branch")
    out = []
    for n in range(1, branches + 1):
        br = m.branch(n)
        lo = float(br.lo)
        width = float(br.width)
        xs = lo + width * np.arange(1, per_branch + 1) / per_branch
        values, _, _ = branch_curve(br, m.profile, xs)
        out.append(
            BranchSamples(
                branch=n,
                xs=xs,
                values=values,
                in_left=xs <= float(br.junction),
            )
        )
    return out


def write_graph_csv(samples: list[BranchSamples], fh) -> None:
    fh.write("x,f(x),branch,in_L\n")
    for s in samples:
        for x, v, left in zip(s.xs, s.values, s.in_left):
            fh.write(f"{float(x)!r},{float(v)!r},{s.branch},{int(left)}\n")


def render_graph_svg(m: FullBranchMap, samples: list[BranchSamples], path) -> None:
    """Self-contained SVG: branch curves, breakpoint guides, junction dots."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 6.0))
    n_branches = len(samples)
    for s in samples:
        ax.plot(s.xs, s.values, lw=1.4, color="C0")
    for n in range(1, n_branches + 2):
        ax.axvline(float(m.breakpoint(n)), color="0.8", lw=0.6, zorder=0)
    junctions = [m.branch(s.branch) for s in samples]
    ax.plot(
        [float(b.junction) for b in junctions],
        [float(b.lo) for b in junctions],
        "o",
        ms=3.5,
        color="C3",
        label="left/right junction",
    )
    ax.set_xlim(float(m.breakpoint(n_branches + 1)), 1.0)
    ax.set_ylim(0.0, 1.0)
    ax.set_xlabel("x")
    ax.set_ylabel("f(x)")
    ax.set_title(
        f"full-branch map, c = {m.config.c}, {n_branches} branches shown"
    )
    ax.legend(loc="lower right", frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
