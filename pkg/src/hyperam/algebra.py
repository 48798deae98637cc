"""Hypercomplex number systems defined by a multiplication table.

A hypercomplex number ``p = p0 + p1 i1 + ... + pn in`` is stored as a float
array of length ``dim = n + 1``; an N-component state is an ``(N, dim)``
array.  All products go through the structure tensor of an
:class:`AlgebraSpec`, so any table (associative or not) works the same way.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "AlgebraSpec",
    "Involution",
    "InvolutionReport",
    "ReAHNReport",
    "add",
    "mul",
    "involute",
    "bilinear",
    "gram_matrix",
    "cayley_dickson_double",
    "cayley_dickson",
    "check_reverse_involution",
    "check_re_ahn",
    "reals",
    "complex_numbers",
    "hyperbolic",
    "quaternion",
    "tessarine",
    "octonion",
    "get_algebra",
    "ALGEBRAS",
]


class Involution(str, enum.Enum):
    """Reverse-involution used to build the bilinear form."""

    NATURAL = "natural"
    TRIVIAL = "trivial"


@dataclass(frozen=True, eq=False)
class AlgebraSpec:
    """A hypercomplex number system.

    Attributes:
        name: Label used in configs and reports.
        table: Array ``a`` of shape ``(n, n, n + 1)`` with
            ``i_mu i_nu = sum_k a[mu-1, nu-1, k] i_k`` (``i_0 = 1``).
    """

    name: str
    table: np.ndarray
    structure: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        table = np.array(self.table, dtype=np.float64)
        if table.ndim != 3:
            raise ValueError(f"table must be 3-dimensional, got shape {table.shape}")
        n = table.shape[0]
        if table.shape != (n, n, n + 1):
            raise ValueError(f"table must have shape (n, n, n+1), got {table.shape}")
        if not np.all(np.isfinite(table)):
            raise ValueError("table entries must be finite")
        table.flags.writeable = False

        dim = n + 1
        m = np.zeros((dim, dim, dim))
        m[0, :, :] = np.eye(dim)
        m[:, 0, :] = np.eye(dim)
        m[1:, 1:, :] = table
        m.flags.writeable = False
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "structure", m)

    @property
    def dim(self) -> int:
        return self.table.shape[2]

    def __eq__(self, other):
        if not isinstance(other, AlgebraSpec):
            return NotImplemented
        return self.dim == other.dim and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.dim, self.table.tobytes()))

    def unit(self, index: int) -> np.ndarray:
        """Return the basis element ``i_index`` (``i_0`` is the real unit)."""
        e = np.zeros(self.dim)
        e[index] = 1.0
        return e

    def number(self, *coeffs: float) -> np.ndarray:
        """Build a hypercomplex number from its coefficients (missing ones are 0)."""
        if len(coeffs) > self.dim:
            raise ValueError(f"{self.name} has dim {self.dim}, got {len(coeffs)} coefficients")
        p = np.zeros(self.dim)
        p[: len(coeffs)] = coeffs
        return p

    def to_text(self) -> str:
        """Serialize as a ``name``/``dim``/``table`` block of nonzero quadruples."""
        n = self.dim - 1
        quads = []
        for mu in range(n):
            for nu in range(n):
                for k in range(n + 1):
                    v = self.table[mu, nu, k]
                    if v != 0:
                        quads.append(f"{mu + 1} {nu + 1} {k} {_fmt(v)}")
        lines = [f"name = {self.name}", f"dim = {self.dim}", "table = " + "  ".join(quads)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> AlgebraSpec:
        """Parse the block written by :meth:`to_text`."""
        fields = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            fields[key] = value
        missing = {"name", "dim", "table"} - fields.keys()
        if missing:
            raise ValueError(f"algebra block missing keys: {sorted(missing)}")
        dim = int(fields["dim"])
        if dim < 1:
            raise ValueError(f"dim must be positive, got {dim}")
        tokens = fields["table"].split()
        if len(tokens) % 4:
            raise ValueError("table must be a list of (mu, nu, k, value) quadruples")
        n = dim - 1
        table = np.zeros((n, n, dim))
        for j in range(0, len(tokens), 4):
            mu, nu, k = (int(t) for t in tokens[j : j + 3])
            if not (1 <= mu <= n and 1 <= nu <= n and 0 <= k <= n):
                raise ValueError(f"table index ({mu}, {nu}, {k}) out of range for dim {dim}")
            table[mu - 1, nu - 1, k] = float(tokens[j + 3])
        return cls(fields["name"], table)


def _fmt(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def _check_pair(p: np.ndarray, q: np.ndarray, spec: AlgebraSpec | None = None) -> None:
    if p.shape[-1] != q.shape[-1]:
        raise ValueError(f"dimension mismatch: {p.shape[-1]} vs {q.shape[-1]}")
    if spec is not None and p.shape[-1] != spec.dim:
        raise ValueError(f"{spec.name} numbers have dim {spec.dim}, got {p.shape[-1]}")


def add(p, q) -> np.ndarray:
    p, q = np.asarray(p, dtype=np.float64), np.asarray(q, dtype=np.float64)
    _check_pair(p, q)
    return p + q


def mul(spec: AlgebraSpec, p, q) -> np.ndarray:
    """Product ``pq`` by the distributive law; broadcasts over leading axes."""
    p, q = np.asarray(p, dtype=np.float64), np.asarray(q, dtype=np.float64)
    _check_pair(p, q, spec)
    return np.einsum("...a,...b,abk->...k", p, q, spec.structure)


def involute(tau: Involution | str, p) -> np.ndarray:
    p = np.array(p, dtype=np.float64)
    if Involution(tau) is Involution.NATURAL:
        p[..., 1:] *= -1.0
    return p


def bilinear(spec: AlgebraSpec, tau: Involution | str, p, q):
    """Symmetric bilinear form ``B(p, q) = Re(tau(p) q)``."""
    return mul(spec, involute(tau, p), q)[..., 0]


def gram_matrix(spec: AlgebraSpec, tau: Involution | str) -> np.ndarray:
    """Matrix ``G`` with ``B(p, q) = p @ G @ q``."""
    tau = Involution(tau)
    signs = np.ones(spec.dim)
    if tau is Involution.NATURAL:
        signs[1:] = -1.0
    return signs[:, None] * spec.structure[:, :, 0]


# ---------------------------------------------------------------------------
# Cayley-Dickson construction


def cayley_dickson_double(spec: AlgebraSpec, name: str | None = None) -> AlgebraSpec:
    """Table of the doubled algebra ``A x A`` under the Cayley-Dickson product.

    Pairs multiply as ``(x1, y1)(x2, y2) = (x1 x2 - y2 conj(y1), conj(x1) y2 + x2 y1)``.
    The new units are ``i_a = (i_a, 0)`` for ``a < d``, ``i_d = (0, 1)`` and
    ``i_{d+a} = i_a i_d``, so that doubling the complex numbers gives
    ``i j = k``.
    """
    d = spec.dim

    def pair_mul(u, v):
        x1, y1, x2, y2 = u[:d], u[d:], v[:d], v[d:]
        first = mul(spec, x1, x2) - mul(spec, y2, involute("natural", y1))
        second = mul(spec, involute("natural", x1), y2) + mul(spec, x2, y1)
        return np.concatenate([first, second])

    basis = np.zeros((2 * d, 2 * d))
    basis[:d, :d] = np.eye(d)
    basis[d, d] = 1.0
    for a in range(1, d):
        basis[d + a] = pair_mul(basis[a], basis[d])

    # basis is a signed permutation, so its inverse is its transpose
    n = 2 * d - 1
    table = np.zeros((n, n, n + 1))
    for a in range(1, 2 * d):
        for b in range(1, 2 * d):
            table[a - 1, b - 1] = basis @ pair_mul(basis[a], basis[b])
    return AlgebraSpec(name or f"cd{2 * d}", table)


def cayley_dickson(k: int) -> AlgebraSpec:
    """The algebra ``A_k`` of dimension ``2**k`` obtained by doubling the reals."""
    names = {0: "reals", 1: "complex", 2: "quaternion", 3: "octonion", 4: "sedenion"}
    spec = reals()
    for level in range(1, k + 1):
        spec = cayley_dickson_double(spec, names.get(level, f"cd{2**level}"))
    return spec


# ---------------------------------------------------------------------------
# Built-in tables


def _table_from_units(n: int, products: dict[tuple[int, int], tuple[int, int]]) -> np.ndarray:
    """``products[(mu, nu)] = (k, sign)`` means ``i_mu i_nu = sign * i_k``."""
    table = np.zeros((n, n, n + 1))
    for (mu, nu), (k, sign) in products.items():
        table[mu - 1, nu - 1, k] = sign
    return table


def reals() -> AlgebraSpec:
    return AlgebraSpec("reals", np.zeros((0, 0, 1)))


def complex_numbers() -> AlgebraSpec:
    return AlgebraSpec("complex", _table_from_units(1, {(1, 1): (0, -1)}))


def hyperbolic() -> AlgebraSpec:
    return AlgebraSpec("hyperbolic", _table_from_units(1, {(1, 1): (0, 1)}))


def quaternion() -> AlgebraSpec:
    # i=1, j=2, k=3
    products = {
        (1, 1): (0, -1), (2, 2): (0, -1), (3, 3): (0, -1),
        (1, 2): (3, 1), (2, 1): (3, -1),
        (2, 3): (1, 1), (3, 2): (1, -1),
        (3, 1): (2, 1), (1, 3): (2, -1),
    }
    return AlgebraSpec("quaternion", _table_from_units(3, products))


def tessarine() -> AlgebraSpec:
    # commutative quaternions: i^2 = -1, j^2 = 1, k = ij
    products = {
        (1, 1): (0, -1), (2, 2): (0, 1), (3, 3): (0, -1),
        (1, 2): (3, 1), (2, 1): (3, 1),
        (1, 3): (2, -1), (3, 1): (2, -1),
        (2, 3): (1, 1), (3, 2): (1, 1),
    }
    return AlgebraSpec("tessarine", _table_from_units(3, products))


# Row mu lists i_mu i_nu for nu = 1..7 as signed unit indices; the diagonal
# (None) is i_mu^2 = -1.
_OCTONION_ROWS = (
    (None, +3, -2, +5, -4, -7, +6),
    (-3, None, +1, +6, +7, -4, -5),
    (+2, -1, None, +7, -6, +5, -4),
    (-5, -6, -7, None, +1, +2, +3),
    (+4, -7, +6, -1, None, -3, +2),
    (+7, +4, -5, -2, +3, None, -1),
    (-6, +5, +4, -3, -2, +1, None),
)


def octonion() -> AlgebraSpec:
    products = {}
    for mu, row in enumerate(_OCTONION_ROWS, start=1):
        for nu, entry in enumerate(row, start=1):
            products[(mu, nu)] = (0, -1) if entry is None else (abs(entry), 1 if entry > 0 else -1)
    return AlgebraSpec("octonion", _table_from_units(7, products))


ALGEBRAS = {
    "reals": reals,
    "complex": complex_numbers,
    "hyperbolic": hyperbolic,
    "quaternion": quaternion,
    "tessarine": tessarine,
    "octonion": octonion,
}


def get_algebra(name: str) -> AlgebraSpec:
    try:
        return ALGEBRAS[name]()
    except KeyError:
        raise ValueError(f"unknown algebra {name!r}; choose from {sorted(ALGEBRAS)}") from None


# ---------------------------------------------------------------------------
# Sampled property checks


@dataclass(frozen=True)
class InvolutionReport:
    """Largest violation seen for each reverse-involution identity."""

    involution: float
    antihomomorphism: float
    linearity: float
    witness: tuple[np.ndarray, np.ndarray] | None = None

    def passed(self, tol: float = 1e-12) -> bool:
        return max(self.involution, self.antihomomorphism, self.linearity) <= tol


@dataclass(frozen=True)
class ReAHNReport:
    max_violation: float
    min_self_form: float

    def passed(self, tol: float = 1e-10) -> bool:
        return self.max_violation <= tol


def _samples(spec: AlgebraSpec, count: int, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal((count, spec.dim))


def check_reverse_involution(
    spec: AlgebraSpec, tau: Involution | str, sample_count: int, seed: int = 0
) -> InvolutionReport:
    """Spot-check the three reverse-involution identities.

    All unit pairs are checked before the random samples, so a failure of the
    anti-homomorphism on basis elements is reported with a unit-pair witness.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    rng = np.random.default_rng(seed)
    eye = np.eye(spec.dim)
    units_p = np.repeat(eye, spec.dim, axis=0)
    units_q = np.tile(eye, (spec.dim, 1))
    p = np.concatenate([units_p, _samples(spec, sample_count, rng)])
    q = np.concatenate([units_q, _samples(spec, sample_count, rng)])
    alpha = np.concatenate([np.ones(len(units_p)), rng.standard_normal(sample_count)])

    inv = np.abs(involute(tau, involute(tau, p)) - p).max()
    anti = np.abs(involute(tau, mul(spec, p, q)) - mul(spec, involute(tau, q), involute(tau, p))).max(axis=1)
    lin = np.abs(
        involute(tau, alpha[:, None] * p + q) - (alpha[:, None] * involute(tau, p) + involute(tau, q))
    ).max()
    worst = int(np.argmax(anti))
    witness = (p[worst], q[worst]) if anti[worst] > 1e-12 else None
    return InvolutionReport(float(inv), float(anti[worst]), float(lin), witness)


def check_re_ahn(spec: AlgebraSpec, tau: Involution | str, sample_count: int, seed: int = 0) -> ReAHNReport:
    """Largest ``|Re((pq)r - p(qr))|`` and smallest ``B(p, p)`` over random samples."""
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    rng = np.random.default_rng(seed)
    p, q, r = (_samples(spec, sample_count, rng) for _ in range(3))
    left = mul(spec, mul(spec, p, q), r)
    right = mul(spec, p, mul(spec, q, r))
    violation = np.abs(left[:, 0] - right[:, 0]).max()
    self_form = bilinear(spec, tau, p, p).min()
    return ReAHNReport(float(violation), float(self_form))
