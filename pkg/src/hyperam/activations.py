"""Activation functions with explicit domains and codomains.

Every activation works on arrays of shape ``(..., dim)`` and reports, next
to the value, whether each input lies in its domain.  Outside the domain the
network keeps the previous neuron state, so :meth:`ActivationFn.evaluate`
never raises for boundary inputs.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from scipy.spatial import cKDTree

from .algebra import AlgebraSpec, Involution, gram_matrix, involute

__all__ = [
    "ActivationKind",
    "ActivationFn",
    "StateAlphabet",
    "BFunctionReport",
    "OUT_OF_DOMAIN",
    "apply",
    "in_domain",
    "check_b_function",
]

OUT_OF_DOMAIN = None


class ActivationKind(str, enum.Enum):
    BIPOLAR_SIGN = "bipolar_sign"
    CSGN = "csgn"
    CSGN_CONJUGATED = "csgn_conjugated"
    TWIN_MULTISTATE = "twin_multistate"
    CONTINUOUS_SIGMA = "continuous_sigma"
    SPLIT_SIGN = "split_sign"


_NEEDS_K = {ActivationKind.CSGN, ActivationKind.CSGN_CONJUGATED, ActivationKind.TWIN_MULTISTATE}
_FIXED_DIM = {
    ActivationKind.BIPOLAR_SIGN: 1,
    ActivationKind.CSGN: 2,
    ActivationKind.CSGN_CONJUGATED: 2,
    ActivationKind.TWIN_MULTISTATE: 4,
}


@lru_cache(maxsize=None)
def _csgn_tables(K: int) -> tuple[np.ndarray, np.ndarray]:
    """Codomain points ``exp(2 k i pi / K)`` and the sector boundary angles."""
    angles = 2.0 * np.pi * np.arange(K) / K
    points = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
    # exact zeros so that e.g. K=4 gives {1, i, -1, -i} bit-for-bit
    points[np.abs(points) < 1e-15] = 0.0
    points.flags.writeable = False
    boundaries = (2 * np.arange(1, K + 1) - 1) * np.pi / K
    boundaries.flags.writeable = False
    return points, boundaries


def _csgn_index(z: np.ndarray, K: int) -> tuple[np.ndarray, np.ndarray]:
    _, boundaries = _csgn_tables(K)
    theta = np.arctan2(z[..., 1], z[..., 0])
    theta = np.where(theta < 0, theta + 2.0 * np.pi, theta)
    half = np.pi / K
    k = np.floor((theta + half) / (2.0 * half)).astype(np.int64) % K
    # the only boundary ray theta can coincide with is (2j + 1) * half
    j = np.minimum(np.floor(theta / (2.0 * half)).astype(np.int64), K - 1)
    ok = np.any(z != 0, axis=-1) & (theta != boundaries[j])
    return k, ok


@dataclass(frozen=True)
class StateAlphabet:
    """Codomain ``S`` of an activation: a finite point list or the unit sphere.

    Attributes:
        dim: Coefficient count of each element.
        elements: ``(|S|, dim)`` array in canonical order, or ``None`` for the
            unit sphere.
    """

    dim: int
    elements: np.ndarray | None = None

    @property
    def is_finite(self) -> bool:
        return self.elements is not None

    def __len__(self) -> int:
        if self.elements is None:
            raise TypeError("the unit sphere has no finite size")
        return len(self.elements)

    @cached_property
    def _tree(self) -> cKDTree:
        return cKDTree(self.elements)

    def _nearest(self, values) -> tuple[np.ndarray, np.ndarray]:
        values = np.asarray(values, dtype=np.float64)
        dist, idx = self._tree.query(values.reshape(-1, self.dim))
        return dist.reshape(values.shape[:-1]), idx.reshape(values.shape[:-1])

    def index_of(self, values) -> np.ndarray:
        """Index of the nearest alphabet element for each row of ``values``."""
        if self.elements is None:
            raise TypeError("the unit sphere is not indexable")
        return self._nearest(values)[1]

    def distance(self, values) -> np.ndarray:
        """Euclidean distance from each row of ``values`` to the alphabet."""
        if self.elements is None:
            values = np.asarray(values, dtype=np.float64)
            return np.abs(np.linalg.norm(values, axis=-1) - 1.0)
        return self._nearest(values)[0]

    def contains(self, values, atol: float = 0.0) -> np.ndarray:
        return self.distance(values) <= atol

    def sample(self, rng: np.random.Generator, shape) -> np.ndarray:
        """Uniform random elements, returned with shape ``(*shape, dim)``."""
        shape = tuple(np.atleast_1d(shape))
        if self.elements is None:
            v = rng.standard_normal((*shape, self.dim))
            return v / np.linalg.norm(v, axis=-1, keepdims=True)
        return self.elements[rng.integers(len(self.elements), size=shape)]

    def max_self_form(self, spec: AlgebraSpec, tau: Involution | str) -> float:
        """``max_{s in S} B(s, s)``, the per-neuron correlation bound."""
        g = gram_matrix(spec, tau)
        if self.elements is None:
            return float(np.linalg.eigvalsh((g + g.T) / 2).max())
        return float(np.einsum("sa,ab,sb->s", self.elements, g, self.elements).max())


@dataclass(frozen=True)
class ActivationFn:
    """One of the supported activation functions.

    ``K`` is the resolution factor of the multistate kinds and must be
    ``None`` for the others.
    """

    kind: ActivationKind
    K: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ActivationKind(self.kind))
        if self.kind in _NEEDS_K:
            if self.K is None or int(self.K) != self.K or self.K <= 1:
                raise ValueError(f"{self.kind.value} needs an integer resolution factor K > 1, got {self.K}")
            object.__setattr__(self, "K", int(self.K))
        elif self.K is not None:
            raise ValueError(f"{self.kind.value} takes no resolution factor")

    @property
    def dim(self) -> int | None:
        """Required coefficient count, or ``None`` if any dimension works."""
        return _FIXED_DIM.get(self.kind)

    @property
    def is_finite(self) -> bool:
        return self.kind is not ActivationKind.CONTINUOUS_SIGMA

    def _check(self, h) -> np.ndarray:
        h = np.asarray(h, dtype=np.float64)
        if self.dim is not None and h.shape[-1] != self.dim:
            raise ValueError(f"{self.kind.value} acts on {self.dim}-dimensional numbers, got {h.shape[-1]}")
        return h

    def codomain(self, dim: int | None = None) -> StateAlphabet:
        """The codomain ``S``; ``dim`` is needed for the dimension-free kinds."""
        kind = self.kind
        if self.dim is None:
            if dim is None:
                raise ValueError(f"{kind.value} needs the algebra dimension")
        elif dim is not None and dim != self.dim:
            raise ValueError(f"{kind.value} acts on {self.dim}-dimensional numbers, got {dim}")
        return _codomain(kind, self.K, dim if self.dim is None else self.dim)

    def evaluate(self, h) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(phi(h), in_domain)``; out-of-domain rows hold zeros."""
        h = self._check(h)
        kind = self.kind
        if kind is ActivationKind.BIPOLAR_SIGN:
            return np.sign(h), h[..., 0] != 0
        if kind is ActivationKind.SPLIT_SIGN:
            return np.sign(h), np.all(h != 0, axis=-1)
        if kind is ActivationKind.CONTINUOUS_SIGMA:
            # rescale by the largest coefficient first so tiny inputs do not underflow
            peak = np.abs(h).max(axis=-1, keepdims=True)
            ok = peak[..., 0] > 0
            h = np.divide(h, peak, out=np.zeros_like(h), where=peak > 0)
            norm = np.linalg.norm(h, axis=-1, keepdims=True)
            return np.divide(h, norm, out=np.zeros_like(h), where=norm > 0), ok
        points, _ = _csgn_tables(self.K)
        if kind is ActivationKind.CSGN:
            k, ok = _csgn_index(h, self.K)
            return points[k], ok
        if kind is ActivationKind.CSGN_CONJUGATED:
            k, ok = _csgn_index(involute(Involution.NATURAL, h), self.K)
            return points[k], ok
        k0, ok0 = _csgn_index(h[..., :2], self.K)
        k1, ok1 = _csgn_index(h[..., 2:], self.K)
        return np.concatenate([points[k0], points[k1]], axis=-1), ok0 & ok1

    def in_domain(self, h) -> np.ndarray:
        return self.evaluate(h)[1]

    def __call__(self, h) -> np.ndarray:
        """Vectorized evaluation; out-of-domain rows are zero (see :meth:`evaluate`)."""
        return self.evaluate(h)[0]

    def to_config(self) -> dict[str, str]:
        out = {"kind": self.kind.value}
        if self.K is not None:
            out["K"] = str(self.K)
        return out


@lru_cache(maxsize=None)
def _codomain(kind: ActivationKind, K: int | None, dim: int) -> StateAlphabet:
    if kind is ActivationKind.CONTINUOUS_SIGMA:
        return StateAlphabet(dim)
    if kind is ActivationKind.BIPOLAR_SIGN:
        elements = np.array([[-1.0], [1.0]])
    elif kind is ActivationKind.SPLIT_SIGN:
        elements = np.array(list(itertools.product((-1.0, 1.0), repeat=dim)))
    elif kind is ActivationKind.TWIN_MULTISTATE:
        points, _ = _csgn_tables(K)
        elements = np.array([np.concatenate([a, b]) for a in points for b in points])
    else:
        elements = _csgn_tables(K)[0].copy()
    elements.flags.writeable = False
    return StateAlphabet(dim, elements)


def apply(fn: ActivationFn, h):
    """Activation of a single hypercomplex number, or ``OUT_OF_DOMAIN``."""
    value, ok = fn.evaluate(np.asarray(h, dtype=np.float64))
    return value if bool(ok) else OUT_OF_DOMAIN


def in_domain(fn: ActivationFn, h) -> bool:
    return bool(fn.in_domain(h))


@dataclass(frozen=True)
class BFunctionReport:
    """Outcome of :func:`check_b_function`.

    ``worst_margin`` is the smallest observed ``B(phi(q), q) - B(s, q)`` over
    ``s != phi(q)``.  ``counterexample`` holds ``(q, phi(q), s)`` for the worst
    sample when the check fails.
    """

    passed: bool
    worst_margin: float
    samples: int
    counterexample: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None
    identity_error: float = 0.0


def check_b_function(
    fn: ActivationFn,
    spec: AlgebraSpec,
    tau: Involution | str,
    sample_count: int,
    seed: int = 0,
    margin: float = 1e-12,
) -> BFunctionReport:
    """Test ``B(phi(q), q) > B(s, q)`` for all ``s in S \\ {phi(q)}`` on random ``q``.

    For the continuous activation the codomain is the unit sphere, so the
    check instead verifies ``B(sigma(q), q) == |q|`` and ``B(s, q) <= |q|``
    for random unit ``s``.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    rng = np.random.default_rng(seed)
    g = gram_matrix(spec, tau)
    q = rng.standard_normal((sample_count, spec.dim))
    values, ok = fn.evaluate(q)
    q, values = q[ok], values[ok]
    own = np.einsum("na,ab,nb->n", values, g, q)

    if not fn.is_finite:
        s = fn.codomain(spec.dim).sample(rng, len(q))
        other = np.einsum("na,ab,nb->n", s, g, q)
        norm = np.linalg.norm(q, axis=-1)
        identity_error = float(np.abs(own - norm).max())
        gaps = own - other
        worst = int(np.argmin(gaps))
        passed = identity_error <= 1e-10 and bool(np.all(other <= norm + margin))
        cex = None if passed else (q[worst], values[worst], s[worst])
        return BFunctionReport(passed, float(gaps[worst]), len(q), cex, identity_error)

    alphabet = fn.codomain(spec.dim)
    scores = np.einsum("sa,ab,nb->ns", alphabet.elements, g, q)
    chosen = alphabet.index_of(values)
    scores[np.arange(len(q)), chosen] = -np.inf
    rival = scores.argmax(axis=1)
    gaps = own - scores[np.arange(len(q)), rival]
    worst = int(np.argmin(gaps))
    passed = bool(gaps[worst] > margin)
    cex = None if passed else (q[worst], values[worst], alphabet.elements[rival[worst]])
    return BFunctionReport(passed, float(gaps[worst]), len(q), cex)
