"""
Activation functions and the B-function test
=============================================

An activation is a B-function when its output is the codomain element most
correlated with the input.  That property is what makes the energy of a
recurrent correlation network decrease.
"""

import numpy as np

from hyperam import ActivationFn, check_b_function, get_algebra

C = get_algebra("complex")
csgn = ActivationFn("csgn", 4)

# csgn with K = 4 snaps the phase to the nearest of 1, i, -1, -i.
for z in ([2.0, 0.5], [-0.3, -1.0], [1.0, 1.0]):
    value, ok = csgn.evaluate(np.array(z))
    print(f"csgn({z}) = {value if ok else 'undefined (on a sector boundary)'}")

# The checker samples random inputs and looks for a codomain element that
# correlates better with the input than the activation's own output.
cases = [
    ("bipolar_sign", None, "reals", "trivial"),
    ("csgn", 8, "complex", "natural"),
    ("twin_multistate", 4, "quaternion", "natural"),
    ("split_sign", None, "octonion", "natural"),
    ("csgn_conjugated", 4, "hyperbolic", "natural"),
    ("csgn", 4, "hyperbolic", "natural"),
]
for kind, K, name, tau in cases:
    rep = check_b_function(ActivationFn(kind, K), get_algebra(name), tau, 1000, seed=0)
    verdict = "B-function" if rep.passed else "NOT a B-function"
    print(f"{kind:16s} on {name:10s}: {verdict} (worst margin {rep.worst_margin:+.3g})")
    if rep.counterexample is not None:
        q, phi, s = rep.counterexample
        print(f"    q = {np.round(q, 3)}: phi(q) = {phi}, but s = {s} correlates more")
