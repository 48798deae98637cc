"""
Hypercomplex arithmetic from a multiplication table
===================================================

A number with ``dim`` coefficients multiplies through a table of unit
products.  The same code handles complex numbers, quaternions, octonions and
anything the Cayley-Dickson doubling produces.
"""

import numpy as np

from hyperam import algebra as alg

# Quaternions: i j = k, but j i = -k.
H = alg.quaternion()
i, j = np.array([0, 1, 0, 0.0]), np.array([0, 0, 1, 0.0])
print("i j =", alg.mul(H, i, j), "  j i =", alg.mul(H, j, i))

# Doubling the quaternions gives the octonions, whose table matches the
# hard-coded reference exactly.
O = alg.cayley_dickson(3)
print("octonion table matches reference:", np.array_equal(O.table, alg.octonion().table))

# Octonions lose associativity, but keep the weaker alternative law.
rng = np.random.default_rng(0)
p, q, r = rng.standard_normal((3, 8))
assoc = alg.mul(O, alg.mul(O, p, q), r) - alg.mul(O, p, alg.mul(O, q, r))
alt = alg.mul(O, alg.mul(O, p, p), q) - alg.mul(O, p, alg.mul(O, p, q))
print(f"|(pq)r - p(qr)| = {np.linalg.norm(assoc):.3f}   |(pp)q - p(pq)| = {np.linalg.norm(alt):.1e}")

# The network only needs the symmetric bilinear form B(p, q) = Re(conj(p) q).
# For these algebras it is the ordinary dot product of the coefficients.
print("B(p, q) =", float(alg.bilinear(O, "natural", p, q)), " p . q =", float(p @ q))

# Real parts of products do not depend on the bracketing: Re((pq)r) = Re(p(qr)).
for spec in (alg.complex_numbers(), H, O):
    rep = alg.check_re_ahn(spec, "natural", 1000, seed=1)
    print(f"{spec.name:11s} Re-AHN max violation {rep.max_violation:.1e}")

# Hyperbolic numbers (i^2 = +1) under the natural conjugation have an
# indefinite self-form, which is what breaks the sign function there.
Hy = alg.get_algebra("hyperbolic")
print("hyperbolic B(i, i) =", float(alg.bilinear(Hy, "natural", [0, 1.0], [0, 1.0])))
