"""
Every state of a small network
==============================

With two neurons and four states per neuron there are only 16 network
states, so the full transition graph can be built and searched for fixed
points and cycles.
"""

from hyperam import build_graph, classify, export_dot
from hyperam.config import load_config


def analyse(preset):
    cfg = load_config(preset)
    alg, tau, act = cfg.algebra(), cfg.involution(), cfg.activation()
    memories = cfg.memories(alg.dim)
    net = cfg.network(cfg.excitation(memories.N, act.codomain(alg.dim).max_self_form(alg, tau)))
    graph = build_graph(net, memories)
    return graph, classify(graph)


# Complex numbers with csgn (a B-function): everything settles, but one
# state that is not a stored memory is also stable.
graph, res = analyse("example2")
print("complex  memories", [k + 1 for k in graph.memory_indices],
      "fixed", [k + 1 for k in res.fixed_points], "spurious", [k + 1 for k in res.spurious])

# Hyperbolic numbers with the same csgn: not a B-function, and the network
# can oscillate between two stored memories.
graph, res = analyse("example3")
print("hyperbolic cycles (sync):", [[k + 1 for k in c] for c in res.cycles])

# Conjugating the argument of csgn repairs it; no cycles remain, though the
# first memory is no longer stable.
graph, res = analyse("example4")
print("conjugated csgn fixed", [k + 1 for k in res.fixed_points], "cycles", res.cycles)

# The graph exports to DOT for Graphviz; stored memories are filled gray.
print(export_dot(graph, "sync").splitlines()[1])
