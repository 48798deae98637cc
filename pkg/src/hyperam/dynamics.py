"""Exhaustive state-space analysis for small networks.

States are enumerated lexicographically over the activation codomain with
neuron 1 most significant, so state ``k`` (1-based, as in reports and DOT
output) has neuron codes equal to the base-``|S|`` digits of ``k - 1``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path

import networkx as nx
import numpy as np

from .activations import StateAlphabet
from .rcnn import MemorySet, Network, NetworkConfig

__all__ = [
    "MAX_STATES",
    "StateGraph",
    "Classification",
    "enumerate_states",
    "build_graph",
    "classify",
    "export_dot",
    "write_attractor_csv",
    "format_number",
]

MAX_STATES = 2**20


def enumerate_states(alphabet: StateAlphabet, n_neurons: int) -> np.ndarray:
    """All ``|S|**N`` states as an array of shape ``(|S|**N, N, dim)``."""
    if not alphabet.is_finite:
        raise ValueError("cannot enumerate an infinite codomain")
    size = len(alphabet) ** n_neurons
    if size > MAX_STATES:
        raise ValueError(f"state space of {size} states exceeds the limit of {MAX_STATES}")
    codes = np.array(list(itertools.product(range(len(alphabet)), repeat=n_neurons)), dtype=np.int64)
    return alphabet.elements[codes.reshape(size, n_neurons)]


@dataclass
class StateGraph:
    """Transition structure of a network over its whole state space.

    Indices here are 0-based; add 1 for the labels used in reports.
    ``async_edges[k]`` lists the distinct successors of state ``k`` under a
    single-neuron update, or ``[k]`` when no neuron changes.
    """

    states: np.ndarray
    alphabet: StateAlphabet
    sync_edges: np.ndarray
    async_edges: list[list[int]]
    memory_indices: list[int]

    def __len__(self):
        return len(self.states)

    def index_of(self, x) -> int:
        codes = self.alphabet.index_of(np.asarray(x, dtype=np.float64))
        base = len(self.alphabet)
        return int(np.ravel_multi_index(tuple(codes), (base,) * len(codes)))


def build_graph(cfg: NetworkConfig, memories, alphabet: StateAlphabet | None = None) -> StateGraph:
    """Synchronous and per-neuron asynchronous successors of every state.

    ``alphabet`` may reorder the codomain (it must hold the same elements);
    by default the activation's canonical order is used.
    """
    if not isinstance(memories, MemorySet):
        memories = MemorySet(memories)
    net = Network(cfg, memories)
    alphabet = alphabet or cfg.alphabet
    states = enumerate_states(alphabet, memories.N)
    graph = StateGraph(states, alphabet, np.empty(len(states), dtype=np.int64), [], [])
    graph.memory_indices = [graph.index_of(u) for u in memories.memories]
    if len(set(graph.memory_indices)) != memories.P:
        raise ValueError("fundamental memories must be distinct")

    for k, x in enumerate(states):
        graph.sync_edges[k] = graph.index_of(net.step_sync(x)[0])
        succ = []
        for i in range(memories.N):
            j = graph.index_of(net.step_async(x, i)[0])
            if j != k and j not in succ:
                succ.append(j)
        graph.async_edges.append(succ or [k])
    return graph


@dataclass
class Classification:
    """Attractors of the synchronous map plus the asynchronous fixed points and cycles.

    ``attractors`` lists each attractor as a tuple of state indices (a single
    fixed point or a periodic orbit in visiting order); ``attractor_of[k]``
    is the attractor reached from state ``k``.
    """

    fixed_points: list[int]
    spurious: list[int]
    cycles: list[tuple[int, ...]]
    attractors: list[tuple[int, ...]]
    attractor_of: np.ndarray
    basin_sizes: list[int]
    async_fixed_points: list[int] = field(default_factory=list)
    async_cycles: list[tuple[int, ...]] = field(default_factory=list)


def classify(graph: StateGraph) -> Classification:
    succ = graph.sync_edges
    n = len(succ)
    attractor_of = np.full(n, -1, dtype=np.int64)
    attractors: list[tuple[int, ...]] = []
    for start in range(n):
        if attractor_of[start] >= 0:
            continue
        path, pos = [], {}
        k = start
        while attractor_of[k] < 0 and k not in pos:
            pos[k] = len(path)
            path.append(k)
            k = int(succ[k])
        if attractor_of[k] >= 0:
            target = attractor_of[k]
        else:
            attractors.append(tuple(path[pos[k]:]))
            target = len(attractors) - 1
        attractor_of[path] = target

    fixed = sorted(a[0] for a in attractors if len(a) == 1)
    memories = set(graph.memory_indices)
    cycles = [a for a in attractors if len(a) > 1]
    basin = np.bincount(attractor_of, minlength=len(attractors)).tolist()

    async_fixed = sorted(k for k, s in enumerate(graph.async_edges) if s == [k])
    g = nx.DiGraph()
    g.add_nodes_from(range(n))
    g.add_edges_from((k, j) for k, s in enumerate(graph.async_edges) for j in s if j != k)
    async_cycles = [tuple(sorted(c)) for c in nx.strongly_connected_components(g) if len(c) > 1]

    return Classification(
        fixed_points=fixed,
        spurious=[k for k in fixed if k not in memories],
        cycles=cycles,
        attractors=attractors,
        attractor_of=attractor_of,
        basin_sizes=basin,
        async_fixed_points=async_fixed,
        async_cycles=sorted(async_cycles),
    )


_UNIT_NAMES = {
    1: [""],
    2: ["", "i"],
    4: ["", "i", "j", "k"],
}


def format_number(p, units: list[str] | None = None) -> str:
    """Compact text for a hypercomplex number, e.g. ``1-k`` or ``-i+j``."""
    p = np.asarray(p, dtype=np.float64)
    if units is None:
        units = _UNIT_NAMES.get(len(p)) or [""] + [f"i{m}" for m in range(1, len(p))]
    terms = []
    for coef, unit in zip(p, units):
        if coef == 0:
            continue
        mag = abs(coef)
        body = f"{mag:g}" if (mag != 1 or not unit) else ""
        terms.append(("-" if coef < 0 else "+") + body + unit)
    if not terms:
        return "0"
    text = "".join(terms)
    return text[1:] if text.startswith("+") else text


def _state_label(x: np.ndarray) -> str:
    return "[" + ",".join(format_number(c) for c in x) + "]"


def export_dot(graph: StateGraph, mode: str = "sync", labels: list[str] | None = None, comment: str | None = None) -> str:
    """DOT digraph of the synchronous (``"sync"``) or asynchronous transitions.

    Fundamental memories are drawn as gray filled nodes.
    """
    if mode not in ("sync", "async"):
        raise ValueError(f"mode must be 'sync' or 'async', got {mode!r}")
    if labels is None:
        labels = [f"{k + 1}\\n{_state_label(x)}" for k, x in enumerate(graph.states)]
    memories = set(graph.memory_indices)
    lines = []
    if comment:
        lines += [f"// {line}" for line in comment.splitlines()]
    lines.append(f'digraph "{mode}" {{')
    for k, label in enumerate(labels):
        style = ', style=filled, fillcolor="gray"' if k in memories else ""
        lines.append(f'  s{k + 1} [label="{label}"{style}];')
    if mode == "sync":
        edges = [(k, int(j)) for k, j in enumerate(graph.sync_edges)]
    else:
        edges = [(k, j) for k, succ in enumerate(graph.async_edges) for j in succ]
    for k, j in edges:
        lines.append(f"  s{k + 1} -> s{j + 1};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_attractor_csv(path, graph: StateGraph, result: Classification) -> Path:
    """Rows ``state_index,kind,attractor_id,basin_size`` (1-based indices and ids)."""
    path = Path(path)
    on_cycle = {k for a in result.attractors if len(a) > 1 for k in a}
    fixed = set(result.fixed_points)
    with path.open("w") as fh:
        fh.write("state_index,kind,attractor_id,basin_size\n")
        for k in range(len(graph)):
            kind = "fixed" if k in fixed else "cycle" if k in on_cycle else "transient"
            a = int(result.attractor_of[k])
            fh.write(f"{k + 1},{kind},{a + 1},{result.basin_sizes[a]}\n")
    return path
