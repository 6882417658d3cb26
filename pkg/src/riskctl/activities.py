"""Labelled transition system of activities reachable from a start activity."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .diagnostics import ModelError
from .model import Model, resolve_includes


@dataclass(frozen=True)
class ActivityLts:
    nodes: frozenset[str]
    edges: frozenset[tuple[str, str]]
    start: str


def reachable_activities(model: Model, start: str) -> ActivityLts:
    """Transitive closure of the resolved successor relation from `start`.

    Resolves includes first if the model still carries raw include lists.
    """

    if start not in model.activities:
        raise ModelError(f"unknown start activity {start}")
    if not model.includes_resolved:
        model = resolve_includes(model)

    nodes: set[str] = {start}
    edges: set[tuple[str, str]] = set()
    queue = deque([start])
    while queue:
        name = queue.popleft()
        for succ in model.activities[name].successors:
            if succ not in model.activities:
                continue
            edges.add((name, succ))
            if succ not in nodes:
                nodes.add(succ)
                queue.append(succ)
    return ActivityLts(frozenset(nodes), frozenset(edges), start)


def export_activity_dot(lts: ActivityLts) -> str:
    """DOT digraph of the LTS; the start node gets a doubled border.

    Output is byte-identical across runs for equal input: nodes and edges
    are emitted in lexicographic order.
    """

    lines = ["digraph activities {", "  rankdir=LR;"]
    for node in sorted(lts.nodes):
        attrs = " [peripheries=2]" if node == lts.start else ""
        lines.append(f'  "{node}"{attrs};')
    for src, dst in sorted(lts.edges):
        lines.append(f'  "{src}" -> "{dst}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
