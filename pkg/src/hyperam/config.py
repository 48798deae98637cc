"""Experiment config files: INI-style sections of ``key = value`` lines.

Values that fail validation are reported with the line they came from.
"""
from __future__ import annotations

import configparser
import re
from importlib import resources
from pathlib import Path

import numpy as np

from .activations import ActivationFn
from .algebra import AlgebraSpec, Involution, get_algebra
from .rcnn import ExcitationFn, MemorySet, NetworkConfig

__all__ = ["ConfigError", "Config", "parse_number", "parse_vector", "preset_names", "load_config"]


class ConfigError(ValueError):
    def __init__(self, message: str, source: str = "<config>", line: int | None = None):
        where = f"{source}:{line}" if line else source
        super().__init__(f"{where}: {message}")
        self.line = line


_SECTION = re.compile(r"^\s*\[([^\]]+)\]")
_KEY = re.compile(r"^\s*([^=:#;\s][^=:]*?)\s*[=:]")


class Config:
    """Parsed config with line numbers kept for error messages."""

    def __init__(self, text: str, source: str = "<config>"):
        self.source = source
        self.text = text
        self._parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
        self._parser.optionxform = str
        try:
            self._parser.read_string(text, source=source)
        except configparser.Error as exc:
            line = getattr(exc, "lineno", None)
            message = str(exc).splitlines()[0]
            if isinstance(exc, configparser.ParsingError) and exc.errors:
                line, bad = exc.errors[0]
                message = f"expected 'key = value', got {bad.strip()!r}"
            raise ConfigError(message, source, line) from None
        self._lines: dict[tuple[str, str], int] = {}
        self._section_lines: dict[str, int] = {}
        section = None
        for lineno, raw in enumerate(text.splitlines(), start=1):
            m = _SECTION.match(raw)
            if m:
                section = m.group(1).strip()
                self._section_lines[section] = lineno
                continue
            m = _KEY.match(raw)
            if m and section is not None and not raw[:1].isspace():
                self._lines[(section, m.group(1).strip())] = lineno

    @classmethod
    def from_path(cls, path) -> Config:
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc.strerror}", str(path)) from None
        return cls(text, str(path))

    def error(self, message: str, section: str, key: str | None = None) -> ConfigError:
        line = self._lines.get((section, key)) if key else self._section_lines.get(section)
        return ConfigError(message, self.source, line)

    def has(self, section: str, key: str | None = None) -> bool:
        if key is None:
            return self._parser.has_section(section)
        return self._parser.has_option(section, key)

    def section(self, section: str) -> dict[str, str]:
        if not self._parser.has_section(section):
            return {}
        return dict(self._parser.items(section))

    def get(self, section: str, key: str, default=None, required: bool = False) -> str | None:
        if self._parser.has_option(section, key):
            return self._parser.get(section, key).strip()
        if required:
            raise self.error(f"missing required key '{key}' in [{section}]", section)
        return default

    def _convert(self, section, key, default, required, convert, what):
        raw = self.get(section, key, None, required)
        if raw is None:
            return default
        try:
            return convert(raw)
        except (ValueError, ZeroDivisionError):
            raise self.error(f"'{key}' must be {what}, got {raw!r}", section, key) from None

    def get_int(self, section, key, default=None, required=False) -> int | None:
        return self._convert(section, key, default, required, int, "an integer")

    def get_float(self, section, key, default=None, required=False) -> float | None:
        return self._convert(section, key, default, required, _parse_float, "a number")

    def get_bool(self, section, key, default=None, required=False) -> bool | None:
        def conv(raw):
            low = raw.lower()
            if low in ("true", "yes", "on", "1"):
                return True
            if low in ("false", "no", "off", "0"):
                return False
            raise ValueError(raw)

        return self._convert(section, key, default, required, conv, "true or false")

    def get_list(self, section, key, default=None, required=False) -> list[str] | None:
        raw = self.get(section, key, None, required)
        if raw is None:
            return default
        return [item.strip() for item in raw.split(",") if item.strip()]

    def get_float_list(self, section, key, default=None, required=False) -> list[float] | None:
        return self._convert(
            section, key, default, required, lambda raw: [_parse_float(v) for v in raw.split(",") if v.strip()], "a comma-separated list of numbers"
        )

    def echo(self) -> list[str]:
        """Resolved ``section.key = value`` lines for embedding in outputs."""
        out = []
        for section in self._parser.sections():
            for key, value in self._parser.items(section):
                out.append(f"{section}.{key} = {value}")
        return out

    # -- builders ---------------------------------------------------------

    def algebra(self) -> AlgebraSpec:
        sec = "algebra"
        if self.has(sec, "table"):
            block = "\n".join(
                f"{k} = {' '.join(self.get(sec, k).split())}" for k in ("name", "dim", "table") if self.has(sec, k)
            )
            try:
                return AlgebraSpec.from_text(block)
            except ValueError as exc:
                raise self.error(str(exc), sec, "table") from None
        name = self.get(sec, "name", required=True)
        try:
            return get_algebra(name)
        except ValueError as exc:
            raise self.error(str(exc), sec, "name") from None

    def involution(self) -> Involution:
        raw = self.get("algebra", "involution", "natural")
        try:
            return Involution(raw)
        except ValueError:
            raise self.error(f"involution must be 'natural' or 'trivial', got {raw!r}", "algebra", "involution") from None

    def activation(self) -> ActivationFn:
        sec = "activation"
        kind = self.get(sec, "kind", required=True)
        K = self.get_int(sec, "K")
        try:
            return ActivationFn(kind, K)
        except ValueError as exc:
            raise self.error(str(exc), sec, "kind") from None

    def excitation(self, n_neurons: int | None = None, self_form: float | None = None) -> ExcitationFn:
        """Excitation block.

        An exponential kind may give ``a`` instead of ``alpha``/``beta``, for
        ``alpha = a / (N m)`` and ``beta = exp(-a)``; ``m`` (the largest
        ``B(s, s)`` over the codomain) defaults to the computed value.
        """
        sec = "excitation"
        kind = self.get(sec, "kind", "exponential")
        try:
            if kind == "exponential":
                normalize = self.get_bool(sec, "normalize", False)
                a = self.get_float(sec, "a")
                self_form = self.get_float(sec, "m", self_form)
                if a is not None and not self.has(sec, "alpha"):
                    if n_neurons is None or self_form is None:
                        raise ValueError("'a' needs the network size")
                    return ExcitationFn.exponential_scaled(a, n_neurons, self_form, normalize)
                alpha = self.get_float(sec, "alpha", required=True)
                beta = self.get_float(sec, "beta", 1.0)
                return ExcitationFn.exponential(alpha, beta, normalize)
            if kind == "identity":
                return ExcitationFn.identity()
            if kind == "high_order":
                return ExcitationFn.high_order(self.get_float(sec, "order", required=True))
            if kind == "potential":
                return ExcitationFn.potential(self.get_float(sec, "L", required=True))
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise self.error(str(exc), sec, "kind") from None
        raise self.error(f"unknown excitation kind {kind!r}", sec, "kind")

    def update_modes(self) -> list[str]:
        modes = self.get_list("network", "update_modes", ["synchronous", "asynchronous"])
        for m in modes:
            if m not in ("synchronous", "asynchronous"):
                raise self.error(f"unknown update mode {m!r}", "network", "update_modes")
        return modes

    def network(self, excitation: ExcitationFn, mode: str = "synchronous") -> NetworkConfig:
        sec = "network"
        try:
            return NetworkConfig(
                self.algebra(),
                self.involution(),
                self.activation(),
                excitation,
                update_mode=mode,
                async_order=self.get(sec, "async_order", "cyclic"),
                seed=self.get_int(sec, "order_seed"),
                max_sweeps=self.get_int(sec, "max_sweeps", 1000),
                state_tol=self.get_float(sec, "state_tol"),
            )
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise self.error(str(exc), sec) from None

    def memories(self, dim: int) -> MemorySet:
        sec = "memories"
        items = self.section(sec)
        if not items:
            raise self.error("no fundamental memories given", sec)
        rows = []
        for key, raw in items.items():
            try:
                rows.append(parse_vector(raw, dim))
            except ValueError as exc:
                raise self.error(f"memory {key}: {exc}", sec, key) from None
        if len({r.shape for r in rows}) != 1:
            raise self.error("all memories must have the same length", sec)
        return MemorySet(np.stack(rows))


def _parse_float(raw: str) -> float:
    """Float with optional ``a/b`` fractions and ``exp(x)`` / ``e^x``."""
    raw = raw.strip()
    m = re.fullmatch(r"(?:exp\((.+)\)|e\^(.+))", raw)
    if m:
        return float(np.exp(_parse_float(m.group(1) or m.group(2))))
    if "/" in raw:
        num, den = raw.split("/", 1)
        return _parse_float(num) / _parse_float(den)
    return float(raw)


_UNIT_INDEX = {
    2: {"i": 1},
    4: {"i": 1, "j": 2, "k": 3},
}
_TERM = re.compile(r"([+-]?)\s*(\d*\.?\d*(?:[eE][+-]?\d+)?)\s*(i\d*|j|k)?")


def parse_number(text: str, dim: int) -> np.ndarray:
    """Parse ``1-k``, ``-i+j``, ``0.5-2i3`` ... into a coefficient array.

    Units are ``i`` (dim 2), ``i, j, k`` (dim 4) or ``i1 .. in`` for any
    dimension.  A parenthesized tuple ``(p0, p1, ...)`` is also accepted.
    """
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        coeffs = [float(v) for v in text[1:-1].split(",")]
        if len(coeffs) != dim:
            raise ValueError(f"expected {dim} coefficients, got {len(coeffs)}")
        return np.array(coeffs)
    p = np.zeros(dim)
    pos = 0
    compact = text.replace(" ", "")
    if not compact:
        raise ValueError("empty number")
    while pos < len(compact):
        m = _TERM.match(compact, pos)
        if not m or m.end() == pos or not (m.group(2) or m.group(3)):
            raise ValueError(f"cannot parse {text!r}")
        sign = -1.0 if m.group(1) == "-" else 1.0
        mag = float(m.group(2)) if m.group(2) else 1.0
        unit = m.group(3)
        if unit is None:
            k = 0
        elif unit in _UNIT_INDEX.get(dim, {}):
            k = _UNIT_INDEX[dim][unit]
        elif unit.startswith("i") and unit[1:].isdigit():
            k = int(unit[1:])
        else:
            raise ValueError(f"unit {unit!r} is not defined for dimension {dim}")
        if not 0 <= k < dim:
            raise ValueError(f"unit {unit!r} is out of range for dimension {dim}")
        p[k] += sign * mag
        pos = m.end()
    return p


def parse_vector(text: str, dim: int) -> np.ndarray:
    """Comma-separated hypercomplex numbers, as an ``(N, dim)`` array."""
    if "(" in text:
        parts = re.findall(r"\([^)]*\)", text)
    else:
        parts = [t for t in text.split(",") if t.strip()]
    if not parts:
        raise ValueError("empty vector")
    return np.stack([parse_number(t, dim) for t in parts])


def preset_names() -> list[str]:
    root = resources.files("hyperam") / "presets"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".ini"))


def load_config(spec: str) -> Config:
    """Load a config file, or a bundled preset given by name."""
    path = Path(spec)
    if path.exists():
        return Config.from_path(path)
    name = spec[len("preset:"):] if spec.startswith("preset:") else spec
    resource = resources.files("hyperam") / "presets" / f"{name}.ini"
    if resource.is_file():
        return Config(resource.read_text(), f"preset:{name}")
    raise ConfigError(f"no such config file or preset (presets: {', '.join(preset_names())})", spec)
