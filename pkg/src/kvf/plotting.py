"""Hasse-diagram rendering for dependency lattices."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import networkx as nx

from .closure import DependencyLattice


def _label(s: frozenset[str]) -> str:
    return "{" + ",".join(sorted(s)) + "}" if s else "{}"


def cover_edges(lattice: DependencyLattice) -> list[tuple[frozenset, frozenset]]:
    elems = lattice.sorted_elements()
    edges = []
    for a in elems:
        for b in elems:
            if a < b and not any(a < c < b for c in elems):
                edges.append((a, b))
    return edges


def render_lattice(lattice: DependencyLattice, path: str) -> None:
    """Draw the closed-set lattice with one layer per set size and write
    the figure to `path` (format follows the extension)."""
    g = nx.DiGraph()
    for e in lattice.sorted_elements():
        g.add_node(_label(e), size=len(e))
    for a, b in cover_edges(lattice):
        g.add_edge(_label(a), _label(b))
    layers: dict[int, list[str]] = {}
    for e in lattice.sorted_elements():
        layers.setdefault(len(e), []).append(_label(e))
    pos = {}
    for depth, (size, nodes) in enumerate(sorted(layers.items())):
        for k, node in enumerate(nodes):
            pos[node] = (k - (len(nodes) - 1) / 2, depth)
    fig, ax = plt.subplots(figsize=(max(4, 2 * max(len(v) for v in layers.values())),
                                    max(3, 1.2 * len(layers))))
    nx.draw_networkx(g, pos=pos, ax=ax, arrows=False, node_color="#cfe2f3",
                     node_size=1600, font_size=8)
    ax.set_axis_off()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
