"""
Energy descent in a large network
=================================

A network of 100 neurons stores 160 random bipolar patterns, more than a
Hopfield network could hold.  With an exponential excitation the energy drops
at every update until the state stops changing.
"""

import numpy as np

from hyperam import ActivationFn, ExcitationFn, MemorySet, Network, NetworkConfig, get_algebra

N, P = 100, 160
rng = np.random.default_rng(3)
memories = MemorySet(rng.choice([-1.0, 1.0], size=(P, N, 1)))
x0 = rng.choice([-1.0, 1.0], size=(N, 1))

# alpha = a / (N m) with a = 10 and m = B(s, s) = 1 for bipolar states.
excitation = ExcitationFn.exponential_scaled(10, N, 1.0)

for mode in ("synchronous", "asynchronous"):
    cfg = NetworkConfig(get_algebra("reals"), "trivial", ActivationFn("bipolar_sign"), excitation, mode)
    result = Network(cfg, memories).run(x0)
    energies = result.energies
    print(f"{mode:12s} {result.status.value} after {result.sweeps_used} sweeps, settled at t = {result.settle_time:.2f}")
    print("    energy:", " -> ".join(f"{e:.4g}" for e in energies))
    print("    never increased:", bool(np.all(np.diff(energies) <= 1e-10)))

# The final state is usually one of the stored patterns.
final = Network(cfg, memories).run(x0).final_state
print("recalled a stored memory:", any(np.array_equal(final, u) for u in memories.memories))
