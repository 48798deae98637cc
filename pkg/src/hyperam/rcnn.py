"""Recurrent correlation networks over a hypercomplex algebra.

Arrays follow one layout throughout: a state ``x`` is ``(N, dim)`` and the
memory set is ``(P, N, dim)``.  The network alternates two layers:

* correlations ``c[xi] = sum_i B(u[xi, i], x[i])`` pass through an excitation
  function to give weights ``w``;
* potentials ``h[i] = sum_xi w[xi] u[xi, i]`` go through the activation.

The module-level functions take ``(cfg, memories, x)`` and rebuild the small
amount of cached data on each call.  :class:`Network` keeps that data for
loops such as :func:`run`.
"""
from __future__ import annotations

import enum
import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .activations import ActivationFn, StateAlphabet
from .algebra import AlgebraSpec, Involution, gram_matrix

__all__ = [
    "ExcitationKind",
    "ExcitationFn",
    "ExactMatch",
    "ExcitationOverflow",
    "MemorySet",
    "UpdateMode",
    "RunStatus",
    "NetworkConfig",
    "RunResult",
    "Network",
    "excite",
    "primitive",
    "correlations",
    "potentials",
    "step_sync",
    "step_async",
    "energy",
    "run",
    "write_energy_csv",
    "write_run_metadata",
]

# potential-kind correlations this close to the bound count as an exact match
EXACT_MATCH_TOL = 1e-12
VISITED_CAP = 2**20


class ExcitationKind(str, enum.Enum):
    IDENTITY = "identity"
    HIGH_ORDER = "high_order"
    POTENTIAL = "potential"
    EXPONENTIAL = "exponential"


class ExactMatch(Exception):
    """A potential-kind correlation reached its singularity at memory ``xi``."""

    def __init__(self, xi: int):
        super().__init__(f"state matches fundamental memory {xi} exactly")
        self.xi = xi


class ExcitationOverflow(OverflowError):
    def __init__(self, xi: int):
        super().__init__(f"excitation weight for memory {xi} is not finite")
        self.xi = xi


@dataclass(frozen=True)
class ExcitationFn:
    """Excitation ``f`` applied to the correlations.

    Use the classmethod constructors; ``order`` is the exponent of the
    high-order kind, ``L`` the exponent of the potential kind.  With
    ``normalize`` the exponential kind subtracts the largest correlation
    before exponentiating, which rescales all weights by a common factor.
    """

    kind: ExcitationKind
    order: float | None = None
    L: float | None = None
    alpha: float | None = None
    beta: float | None = None
    normalize: bool = False

    def __post_init__(self):
        kind = ExcitationKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is ExcitationKind.HIGH_ORDER and not (self.order is not None and self.order > 1):
            raise ValueError(f"high_order excitation needs order > 1, got {self.order}")
        if kind is ExcitationKind.POTENTIAL and not (self.L is not None and self.L >= 1):
            raise ValueError(f"potential excitation needs L >= 1, got {self.L}")
        if kind is ExcitationKind.EXPONENTIAL:
            if not (self.alpha is not None and self.alpha > 0 and self.beta is not None and self.beta > 0):
                raise ValueError(f"exponential excitation needs alpha > 0 and beta > 0, got {self.alpha}, {self.beta}")
        if self.normalize and kind is not ExcitationKind.EXPONENTIAL:
            raise ValueError("normalization only applies to the exponential excitation")

    @classmethod
    def identity(cls) -> ExcitationFn:
        return cls(ExcitationKind.IDENTITY)

    @classmethod
    def high_order(cls, order: float) -> ExcitationFn:
        return cls(ExcitationKind.HIGH_ORDER, order=order)

    @classmethod
    def potential(cls, L: float) -> ExcitationFn:
        return cls(ExcitationKind.POTENTIAL, L=L)

    @classmethod
    def exponential(cls, alpha: float, beta: float = 1.0, normalize: bool = False) -> ExcitationFn:
        return cls(ExcitationKind.EXPONENTIAL, alpha=alpha, beta=beta, normalize=normalize)

    @classmethod
    def exponential_scaled(cls, a: float, n_neurons: int, self_form: float, normalize: bool = False) -> ExcitationFn:
        """``alpha = a / (N m)`` and ``beta = exp(-a)``, the usual experiment setting."""
        return cls.exponential(a / (n_neurons * self_form), math.exp(-a), normalize)

    def to_config(self) -> dict[str, str]:
        out = {"kind": self.kind.value}
        for key in ("order", "L", "alpha", "beta"):
            value = getattr(self, key)
            if value is not None:
                out[key] = repr(float(value))
        if self.kind is ExcitationKind.EXPONENTIAL:
            out["normalize"] = str(self.normalize).lower()
        return out


def excite(f: ExcitationFn, c, scale: float) -> np.ndarray:
    """Weights ``w = f(c)``.

    ``scale`` normalizes the argument of the high-order and potential kinds
    (``N * max B(s, s)``).  Raises :class:`ExactMatch` when a potential-kind
    argument reaches 1 and :class:`ExcitationOverflow` on non-finite weights.
    """
    c = np.asarray(c, dtype=np.float64)
    kind = f.kind
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        if kind is ExcitationKind.IDENTITY:
            w = c.copy()
        elif kind is ExcitationKind.HIGH_ORDER:
            w = (1.0 + c / scale) ** f.order
        elif kind is ExcitationKind.POTENTIAL:
            x = c / scale
            hits = np.flatnonzero(x >= 1.0 - EXACT_MATCH_TOL)
            if hits.size:
                raise ExactMatch(int(hits[0]))
            w = 1.0 / (1.0 - x) ** f.L
        else:
            shift = c.max() if f.normalize and c.size else 0.0
            w = f.beta * np.exp(f.alpha * (c - shift))
    bad = np.flatnonzero(~np.isfinite(w))
    if bad.size:
        raise ExcitationOverflow(int(bad[0]))
    return w


def primitive(f: ExcitationFn, c, scale: float) -> np.ndarray:
    """A primitive ``F`` of the excitation (``F' = f``), evaluated at ``c``."""
    c = np.asarray(c, dtype=np.float64)
    kind = f.kind
    if kind is ExcitationKind.IDENTITY:
        return c**2 / 2.0
    if kind is ExcitationKind.HIGH_ORDER:
        return scale * (1.0 + c / scale) ** (f.order + 1) / (f.order + 1)
    if kind is ExcitationKind.POTENTIAL:
        x = c / scale
        hits = np.flatnonzero(x >= 1.0 - EXACT_MATCH_TOL)
        if hits.size:
            raise ExactMatch(int(hits[0]))
        if f.L == 1:
            return scale * np.log(1.0 / (1.0 - x))
        return scale * (1.0 - x) ** (1.0 - f.L) / (f.L - 1.0)
    with np.errstate(over="ignore"):
        out = (f.beta / f.alpha) * np.exp(f.alpha * c)
    bad = np.flatnonzero(~np.isfinite(out))
    if bad.size:
        raise ExcitationOverflow(int(bad[0]))
    return out


@dataclass(frozen=True, eq=False)
class MemorySet:
    """Fundamental memories stored as a ``(P, N, dim)`` array."""

    memories: np.ndarray

    def __post_init__(self):
        u = np.array(self.memories, dtype=np.float64)
        if u.ndim == 2:
            u = u[:, :, None]
        if u.ndim != 3 or u.shape[0] == 0:
            raise ValueError(f"memories must have shape (P, N, dim) with P >= 1, got {u.shape}")
        u.flags.writeable = False
        object.__setattr__(self, "memories", u)

    @property
    def P(self) -> int:
        return self.memories.shape[0]

    @property
    def N(self) -> int:
        return self.memories.shape[1]

    @property
    def dim(self) -> int:
        return self.memories.shape[2]

    def __len__(self):
        return self.P

    def __getitem__(self, xi):
        return self.memories[xi]


class UpdateMode(str, enum.Enum):
    SYNCHRONOUS = "synchronous"
    ASYNCHRONOUS = "asynchronous"


class RunStatus(str, enum.Enum):
    CONVERGED = "converged"
    CYCLED = "cycled"
    MAX_SWEEPS_REACHED = "max_sweeps_reached"


@dataclass(frozen=True)
class NetworkConfig:
    """Everything that defines a network apart from its memories.

    ``async_order`` is ``"cyclic"`` (neurons 1..N every sweep) or
    ``"random"`` (a fresh permutation per sweep drawn from ``seed``).
    ``state_tol`` is the coefficient change below which a neuron counts as
    unchanged; ``None`` means 0 for finite codomains and 1e-9 for the unit
    sphere.
    """

    algebra: AlgebraSpec
    involution: Involution
    activation: ActivationFn
    excitation: ExcitationFn
    update_mode: UpdateMode = UpdateMode.SYNCHRONOUS
    async_order: str = "cyclic"
    seed: int | None = None
    max_sweeps: int = 1000
    state_tol: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "involution", Involution(self.involution))
        object.__setattr__(self, "update_mode", UpdateMode(self.update_mode))
        if self.async_order not in ("cyclic", "random"):
            raise ValueError(f"async_order must be 'cyclic' or 'random', got {self.async_order!r}")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be positive")
        if self.activation.dim is not None and self.activation.dim != self.algebra.dim:
            raise ValueError(
                f"{self.activation.kind.value} needs a {self.activation.dim}-dimensional algebra, "
                f"{self.algebra.name} has dim {self.algebra.dim}"
            )
        if self.state_tol is None:
            object.__setattr__(self, "state_tol", 0.0 if self.activation.is_finite else 1e-9)

    @property
    def alphabet(self) -> StateAlphabet:
        return self.activation.codomain(self.algebra.dim)

    @property
    def self_form(self) -> float:
        """``m = max_{s in S} B(s, s)``."""
        return self.alphabet.max_self_form(self.algebra, self.involution)

    def with_mode(self, mode: UpdateMode | str) -> NetworkConfig:
        from dataclasses import replace

        return replace(self, update_mode=UpdateMode(mode))

    def describe(self) -> dict[str, str]:
        out = {
            "algebra": self.algebra.name,
            "involution": self.involution.value,
            "update_mode": self.update_mode.value,
            "async_order": self.async_order,
            "max_sweeps": str(self.max_sweeps),
            "state_tol": repr(self.state_tol),
        }
        if self.seed is not None:
            out["order_seed"] = str(self.seed)
        out.update({f"activation.{k}": v for k, v in self.activation.to_config().items()})
        out.update({f"excitation.{k}": v for k, v in self.excitation.to_config().items()})
        return out


@dataclass
class RunResult:
    """Outcome of :func:`run`.

    ``energy_trace`` holds ``(time, energy)`` pairs in sweep units, starting
    with the initial state; ``changes[k]`` is the number of neurons that
    changed between trace entries ``k`` and ``k + 1``.  ``settle_time`` is
    the time of the last state change (``1/N`` resolution in asynchronous
    mode).
    """

    final_state: np.ndarray
    energy_trace: list[tuple[float, float]]
    sweeps_used: int
    status: RunStatus
    period: int | None = None
    settle_time: float = 0.0
    mode: UpdateMode = UpdateMode.SYNCHRONOUS
    changes: list[int] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.status is RunStatus.CONVERGED

    @property
    def energies(self) -> np.ndarray:
        return np.array([e for _, e in self.energy_trace])


class Network:
    """A network configuration bound to a memory set, with cached products."""

    def __init__(self, cfg: NetworkConfig, memories: MemorySet | np.ndarray):
        if not isinstance(memories, MemorySet):
            memories = MemorySet(memories)
        if memories.dim != cfg.algebra.dim:
            raise ValueError(f"memories have dim {memories.dim}, algebra {cfg.algebra.name} has dim {cfg.algebra.dim}")
        self.cfg = cfg
        self.memories = memories
        self.U = memories.memories
        self.N = memories.N
        g = gram_matrix(cfg.algebra, cfg.involution)
        # B(u, x) = u @ g @ x, so c = V . x with V = U @ g
        self._V = self.U @ g
        self._Vflat = self._V.reshape(memories.P, -1)
        self._Uflat = self.U.reshape(memories.P, -1)
        self.scale = self.N * cfg.self_form

    def _check_state(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 1 and self.U.shape[2] == 1:
            x = x[:, None]
        if x.shape != self.U.shape[1:]:
            raise ValueError(f"state must have shape {self.U.shape[1:]}, got {x.shape}")
        return x

    def correlations(self, x) -> np.ndarray:
        x = self._check_state(x)
        return self._Vflat @ x.ravel()

    def weights(self, x) -> np.ndarray:
        return excite(self.cfg.excitation, self.correlations(x), self.scale)

    def potentials(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=np.float64)
        if w.shape != (self.memories.P,):
            raise ValueError(f"weights must have length {self.memories.P}, got {w.shape}")
        return (w @ self._Uflat).reshape(self.U.shape[1:])

    def energy(self, x) -> float:
        c = self.correlations(x)
        return float(-primitive(self.cfg.excitation, c, self.scale).sum())

    def energy_from_correlations(self, c) -> float:
        return float(-primitive(self.cfg.excitation, c, self.scale).sum())

    def _trace_energy(self, c) -> float:
        # at an exact potential-kind match F is unbounded, so E is -inf
        try:
            return self.energy_from_correlations(c)
        except ExactMatch:
            return -math.inf

    def validate_state(self, x, atol: float = 1e-9) -> np.ndarray:
        x = self._check_state(x)
        if not np.all(self.cfg.alphabet.contains(x, atol)):
            raise ValueError("state components must lie in the activation codomain")
        return x

    def _accept(self, old: np.ndarray, new: np.ndarray, ok: np.ndarray) -> np.ndarray:
        """Rows of ``new`` that replace ``old``: in the domain and actually different."""
        if self.cfg.state_tol == 0:
            moved = np.any(new != old, axis=-1)
        else:
            moved = np.abs(new - old).max(axis=-1) > self.cfg.state_tol
        return ok & moved

    def step_sync(self, x) -> tuple[np.ndarray, int]:
        x = self._check_state(x)
        try:
            w = self.weights(x)
        except ExactMatch as hit:
            target = self.U[hit.xi]
            changed = np.any(target != x, axis=-1)
            return target.copy(), int(changed.sum())
        values, ok = self.cfg.activation.evaluate(self.potentials(w))
        accept = self._accept(x, values, ok)
        out = x.copy()
        out[accept] = values[accept]
        return out, int(accept.sum())

    def _is_exponential(self) -> bool:
        return self.cfg.excitation.kind is ExcitationKind.EXPONENTIAL

    def step_async(self, x, i: int, w_cache=None) -> tuple[np.ndarray, np.ndarray | None]:
        x = self._check_state(x)
        if not 0 <= i < self.N:
            raise IndexError(f"neuron index {i} out of range for N={self.N}")
        exponential = self._is_exponential()
        w = self.weights(x) if (w_cache is None or not exponential) else np.asarray(w_cache, dtype=np.float64)
        new_i, dc = self._update_neuron(x, i, w)
        out = x.copy()
        if new_i is not None:
            out[i] = new_i
        if not exponential:
            return out, None
        if dc is not None:
            w = self._reweight(w, dc)
        return out, w

    def _update_neuron(self, x, i, w):
        """New value for neuron ``i`` (or ``None``) and the correlation change."""
        h = w @ self.U[:, i, :]
        value, ok = self.cfg.activation.evaluate(h)
        if not self._accept(x[i], value, ok):
            return None, None
        return value, self._V[:, i, :] @ (value - x[i])

    def _reweight(self, w, dc):
        f = self.cfg.excitation
        with np.errstate(over="ignore"):
            w = w * np.exp(f.alpha * dc)
        if f.normalize:
            w *= f.beta / w.max()
        bad = np.flatnonzero(~np.isfinite(w))
        if bad.size:
            raise ExcitationOverflow(int(bad[0]))
        return w

    def run(self, x0, record: str = "sweep") -> RunResult:
        """Iterate until a sweep changes nothing, a state repeats, or the sweep budget runs out.

        ``record="update"`` adds an energy entry after every asynchronous
        neuron change instead of once per sweep.
        """
        if record not in ("sweep", "update"):
            raise ValueError(f"record must be 'sweep' or 'update', got {record!r}")
        x = self.validate_state(x0).copy()
        if self.cfg.update_mode is UpdateMode.SYNCHRONOUS:
            return self._run_sync(x)
        return self._run_async(x, record)

    def _run_sync(self, x) -> RunResult:
        cfg = self.cfg
        trace = [(0.0, self._trace_energy(self.correlations(x)))]
        changes = []
        visited = {_digest(x): 0}
        status, period, used = RunStatus.MAX_SWEEPS_REACHED, None, cfg.max_sweeps
        for sweep in range(1, cfg.max_sweeps + 1):
            x_new, changed = self.step_sync(x)
            if changed == 0:
                status, used = RunStatus.CONVERGED, sweep - 1
                break
            x = x_new
            trace.append((float(sweep), self._trace_energy(self.correlations(x))))
            changes.append(changed)
            key = _digest(x)
            if key in visited:
                status, period, used = RunStatus.CYCLED, sweep - visited[key], sweep
                break
            if len(visited) < VISITED_CAP:
                visited[key] = sweep
        settle = trace[-1][0]
        return RunResult(x, trace, used, status, period, settle, UpdateMode.SYNCHRONOUS, changes)

    def _run_async(self, x, record: str) -> RunResult:
        cfg = self.cfg
        n = self.N
        rng = np.random.default_rng(cfg.seed) if cfg.async_order == "random" else None
        exponential = self._is_exponential()
        c = self.correlations(x)
        trace = [(0.0, self._trace_energy(c))]
        changes = []
        visited = {_digest(x): 0}
        last_change = 0.0
        status, period, used = RunStatus.MAX_SWEEPS_REACHED, None, cfg.max_sweeps
        for sweep in range(1, cfg.max_sweeps + 1):
            order = np.arange(n) if rng is None else rng.permutation(n)
            U = self.U if rng is None else self.U[:, order, :]
            # refreshed every sweep so multiplicative updates cannot drift
            c = self.correlations(x)
            w = None
            count, pos, chunk = 0, 0, 16
            while pos < n:
                try:
                    if w is None or not exponential:
                        w = excite(cfg.excitation, c, self.scale)
                except ExactMatch as hit:
                    i = order[pos]
                    target = self.U[hit.xi, i]
                    pos += 1
                    if not np.any(target != x[i]):
                        continue
                    offset, new_i = 0, target
                else:
                    # neurons before the first change all see the current weights,
                    # so a block can be evaluated at once
                    stop = min(pos + chunk, n)
                    h = np.einsum("p,pbd->bd", w, U[:, pos:stop, :])
                    values, ok = cfg.activation.evaluate(h)
                    accept = np.flatnonzero(self._accept(x[order[pos:stop]], values, ok))
                    if accept.size == 0:
                        pos, chunk = stop, min(2 * chunk, 1024)
                        continue
                    offset = int(accept[0])
                    i, new_i = order[pos + offset], values[offset]
                    pos += offset + 1
                    chunk = max(8, 2 * (offset + 1))
                dc = self._V[:, i, :] @ (new_i - x[i])
                x[i] = new_i
                c = c + dc
                if exponential:
                    w = self._reweight(w, dc)
                count += 1
                last_change = (sweep - 1) + pos / n
                if record == "update":
                    trace.append((last_change, self._trace_energy(c)))
                    changes.append(1)
            if count == 0:
                status, used = RunStatus.CONVERGED, sweep - 1
                break
            if record == "sweep":
                trace.append((float(sweep), self._trace_energy(c)))
                changes.append(count)
            if rng is None:
                key = _digest(x)
                if key in visited:
                    status, period, used = RunStatus.CYCLED, sweep - visited[key], sweep
                    break
                if len(visited) < VISITED_CAP:
                    visited[key] = sweep
        return RunResult(x, trace, used, status, period, last_change, UpdateMode.ASYNCHRONOUS, changes)


def _digest(x: np.ndarray) -> bytes:
    return hashlib.blake2b(np.ascontiguousarray(x).tobytes(), digest_size=16).digest()


# ---------------------------------------------------------------------------
# Function-style API


def correlations(memories: MemorySet, x, algebra: AlgebraSpec | None = None, involution="natural") -> np.ndarray:
    """``c[xi] = sum_i B(u[xi, i], x[i])``.

    The bilinear form defaults to the natural involution; pass ``algebra``
    unless the memories are real (``dim == 1``).
    """
    if not isinstance(memories, MemorySet):
        memories = MemorySet(memories)
    if algebra is None:
        if memories.dim != 1:
            raise ValueError("algebra is required for non-real memories")
        from .algebra import reals

        algebra, involution = reals(), "trivial"
    g = gram_matrix(algebra, involution)
    x = np.asarray(x, dtype=np.float64).reshape(memories.N, memories.dim)
    if memories.dim != algebra.dim:
        raise ValueError(f"memories have dim {memories.dim}, algebra {algebra.name} has dim {algebra.dim}")
    return np.einsum("pna,ab,nb->p", memories.memories, g, x)


def potentials(memories: MemorySet, w) -> np.ndarray:
    """``h[i] = sum_xi w[xi] u[xi, i]``."""
    if not isinstance(memories, MemorySet):
        memories = MemorySet(memories)
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (memories.P,):
        raise ValueError(f"weights must have length {memories.P}, got {w.shape}")
    return np.einsum("p,pnd->nd", w, memories.memories)


def step_sync(cfg: NetworkConfig, memories, x) -> tuple[np.ndarray, int]:
    return Network(cfg, memories).step_sync(x)


def step_async(cfg: NetworkConfig, memories, x, neuron_index: int, w_cache=None):
    """Update neuron ``neuron_index`` only.

    For the exponential excitation the returned weights come from the cached
    ones by a single multiplicative factor per memory; other kinds return
    ``None`` and recompute from scratch on the next call.
    """
    return Network(cfg, memories).step_async(x, neuron_index, w_cache)


def energy(cfg: NetworkConfig, memories, x) -> float:
    """``E(x) = -sum_xi F(c[xi])`` with ``F`` a primitive of the excitation."""
    return Network(cfg, memories).energy(x)


def run(cfg: NetworkConfig, memories, x0, record: str = "sweep") -> RunResult:
    return Network(cfg, memories).run(x0, record)


# ---------------------------------------------------------------------------
# Output


def write_energy_csv(path, runs) -> Path:
    """Write ``time,energy,mode`` rows for each ``RunResult`` in ``runs``."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write("time,energy,mode\n")
        for result in runs:
            for t, e in result.energy_trace:
                fh.write(f"{t!r},{e!r},{result.mode.value}\n")
    return path


def write_run_metadata(path, cfg: NetworkConfig | None, results, extra: dict | None = None) -> Path:
    """Sidecar text block: config echo followed by status lines per run."""
    path = Path(path)
    lines = []
    if extra:
        lines += [f"{k} = {v}" for k, v in extra.items()]
    if cfg is not None:
        lines += [f"{k} = {v}" for k, v in cfg.describe().items()]
    for k, r in enumerate(results):
        period = "" if r.period is None else f" period={r.period}"
        lines.append(
            f"run {k}: mode={r.mode.value} status={r.status.value}{period} "
            f"sweeps={r.sweeps_used} settle_time={r.settle_time!r}"
        )
    path.write_text("\n".join(lines) + "\n")
    return path
