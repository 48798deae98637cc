"""Gray-scale image codecs and the noisy-recall experiment.

Bit ``b1`` is the least significant bit of a pixel byte throughout.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .activations import ActivationFn, StateAlphabet, _csgn_tables
from .algebra import AlgebraSpec, Involution, get_algebra
from .rcnn import ExcitationFn, MemorySet, Network, NetworkConfig, UpdateMode

__all__ = [
    "GrayImage",
    "Codec",
    "DecodeError",
    "RecallRow",
    "encode",
    "decode",
    "add_gaussian_noise",
    "recall_experiment",
    "codec_config",
    "read_pgm",
    "write_pgm",
    "load_images",
    "synthetic_images",
    "write_recall_csv",
]


class DecodeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GrayImage:
    """8-bit gray-scale image; ``pixels`` has shape ``(height, width)``."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2 or px.size == 0:
            raise ValueError(f"pixels must be a non-empty 2-d array, got shape {px.shape}")
        if np.any(px < 0) or np.any(px > 255) or np.any(px != np.round(px)):
            raise ValueError("pixels must be integers in [0, 255]")
        px = px.astype(np.uint8)
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and np.array_equal(self.pixels, other.pixels)

    def __hash__(self):
        return hash((self.pixels.shape, self.pixels.tobytes()))


class Codec(str, enum.Enum):
    BIPOLAR8 = "bipolar8"
    COMPLEX_PHASE = "complex_phase"
    QUATERNION_TWIN = "quaternion_twin"
    OCTONION_BITS = "octonion_bits"

    @property
    def algebra(self) -> AlgebraSpec:
        return get_algebra(_CODEC_ALGEBRA[self])

    @property
    def involution(self) -> Involution:
        return Involution.TRIVIAL if self is Codec.BIPOLAR8 else Involution.NATURAL

    @property
    def activation(self) -> ActivationFn:
        return {
            Codec.BIPOLAR8: ActivationFn("bipolar_sign"),
            Codec.COMPLEX_PHASE: ActivationFn("csgn", 256),
            Codec.QUATERNION_TWIN: ActivationFn("twin_multistate", 16),
            Codec.OCTONION_BITS: ActivationFn("split_sign"),
        }[self]

    @property
    def alphabet(self) -> StateAlphabet:
        return self.activation.codomain(self.algebra.dim)

    @property
    def self_form(self) -> float:
        """``max B(s, s)`` over the codomain (exact value)."""
        return {Codec.BIPOLAR8: 1.0, Codec.COMPLEX_PHASE: 1.0, Codec.QUATERNION_TWIN: 2.0, Codec.OCTONION_BITS: 8.0}[self]

    def length(self, image: GrayImage) -> int:
        """Number of neurons used for ``image``."""
        return image.pixels.size * (8 if self is Codec.BIPOLAR8 else 1)


_CODEC_ALGEBRA = {
    Codec.BIPOLAR8: "reals",
    Codec.COMPLEX_PHASE: "complex",
    Codec.QUATERNION_TWIN: "quaternion",
    Codec.OCTONION_BITS: "octonion",
}


def _bits(values: np.ndarray) -> np.ndarray:
    """``(..., 8)`` array of bits b1 (least significant) .. b8."""
    return (values[..., None].astype(np.int64) >> np.arange(8)) & 1


def _pixel_table(codec: Codec) -> np.ndarray:
    """Codeword for each byte value: ``(256, dim)``, or ``(256, 8, 1)`` for bipolar8."""
    x = np.arange(256)
    if codec is Codec.BIPOLAR8:
        return (2.0 * _bits(x) - 1.0)[..., None]
    if codec is Codec.OCTONION_BITS:
        return 2.0 * _bits(x) - 1.0
    if codec is Codec.COMPLEX_PHASE:
        return _csgn_tables(256)[0].copy()
    points = _csgn_tables(16)[0]
    return np.concatenate([points[x & 15], points[x >> 4]], axis=-1)


def encode(img: GrayImage, codec: Codec | str) -> np.ndarray:
    """Hypercomplex state vector for ``img`` (pixels in row-major order)."""
    codec = Codec(codec)
    table = _pixel_table(codec)
    out = table[img.pixels.ravel()]
    return out.reshape(-1, out.shape[-1])


def decode(v, codec: Codec | str, width: int, height: int) -> GrayImage:
    """Invert :func:`encode`, snapping each component to the nearest codeword.

    Raises :class:`DecodeError` if some component is farther than 0.5 from
    every element of the codec's codomain.
    """
    codec = Codec(codec)
    v = np.asarray(v, dtype=np.float64)
    n_pixels = width * height
    if v.shape[0] != codec.length(GrayImage(np.zeros((height, width)))):
        raise DecodeError(f"vector of length {v.shape[0]} does not fit a {width}x{height} image")
    alphabet = codec.alphabet
    dist = alphabet.distance(v)
    bad = np.flatnonzero(dist > 0.5)
    if bad.size:
        raise DecodeError(f"component {int(bad[0])} is {dist[bad[0]]:.3g} away from every codeword")
    if codec is Codec.BIPOLAR8:
        bits = (v[:, 0] > 0).reshape(n_pixels, 8).astype(np.int64)
        pixels = (bits << np.arange(8)).sum(axis=1)
    else:
        table = _pixel_table(codec)
        codes = alphabet.index_of(v)
        lookup = np.empty(len(alphabet), dtype=np.int64)
        lookup[alphabet.index_of(table)] = np.arange(256)
        pixels = lookup[codes]
    return GrayImage(pixels.reshape(height, width))


def add_gaussian_noise(img: GrayImage, stdev: float, seed: int | None = None) -> GrayImage:
    """Add N(0, stdev^2) noise per pixel, then round and clamp to [0, 255]."""
    if stdev < 0:
        raise ValueError("stdev must be non-negative")
    if stdev == 0:
        return img
    rng = np.random.default_rng(seed)
    noisy = img.pixels + rng.normal(0.0, stdev, img.pixels.shape)
    return GrayImage(np.clip(np.rint(noisy), 0, 255))


# ---------------------------------------------------------------------------
# PGM input/output


def read_pgm(path) -> GrayImage:
    """Read a binary (P5) 8-bit PGM file."""
    data = Path(path).read_bytes()
    tokens, pos = [], 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValueError(f"{path}: truncated PGM header")
        tokens.append(data[start:pos])
    if tokens[0] != b"P5":
        raise ValueError(f"{path}: only binary PGM (P5) is supported, got {tokens[0]!r}")
    width, height, maxval = (int(t) for t in tokens[1:])
    if not 0 < maxval < 256:
        raise ValueError(f"{path}: only 8-bit PGM is supported (maxval={maxval})")
    raster = data[pos + 1 : pos + 1 + width * height]
    if len(raster) != width * height:
        raise ValueError(f"{path}: expected {width * height} pixels, found {len(raster)}")
    pixels = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    if maxval != 255:
        pixels = np.rint(pixels.astype(np.float64) * 255 / maxval)
    return GrayImage(pixels)


def write_pgm(path, img: GrayImage) -> Path:
    path = Path(path)
    header = f"P5\n{img.width} {img.height}\n255\n".encode()
    path.write_bytes(header + img.pixels.tobytes())
    return path


def load_images(directory) -> list[GrayImage]:
    """All ``*.pgm`` images in ``directory``, sorted by file name."""
    paths = sorted(Path(directory).glob("*.pgm"))
    if not paths:
        raise FileNotFoundError(f"no .pgm files in {directory}")
    return [read_pgm(p) for p in paths]


def synthetic_images(count: int, width: int = 32, height: int = 32, seed: int = 0, kind: str = "uniform") -> list[GrayImage]:
    """Seeded stand-ins for a photo collection.

    ``"uniform"`` draws independent random bytes; ``"smooth"`` low-pass
    filters white noise and stretches it to the full gray range, which gives
    neighbouring pixels the strong correlation natural images have.
    """
    rng = np.random.default_rng(seed)
    if kind == "uniform":
        return [GrayImage(rng.integers(0, 256, (height, width))) for _ in range(count)]
    if kind == "smooth":
        from scipy.ndimage import gaussian_filter

        out = []
        for _ in range(count):
            field = gaussian_filter(rng.standard_normal((height, width)), sigma=2.0, mode="wrap")
            lo, hi = field.min(), field.max()
            out.append(GrayImage(np.rint(255 * (field - lo) / (hi - lo))))
        return out
    raise ValueError(f"unknown synthetic image kind {kind!r}")


# ---------------------------------------------------------------------------
# Recall experiment


@dataclass(frozen=True)
class RecallRow:
    codec: str
    mode: str
    noise_stdev: float
    trials: int
    successes: int

    @property
    def rate(self) -> float:
        return self.successes / self.trials if self.trials else float("nan")


def codec_config(
    codec: Codec | str,
    n_neurons: int,
    mode: UpdateMode | str = UpdateMode.SYNCHRONOUS,
    a: float = 20.0,
    max_sweeps: int = 100,
    excitation: ExcitationFn | None = None,
) -> NetworkConfig:
    """Network for a codec with ``alpha = a / (N m)`` and ``beta = exp(-a)`` unless overridden."""
    codec = Codec(codec)
    if excitation is None:
        excitation = ExcitationFn.exponential_scaled(a, n_neurons, codec.self_form)
    return NetworkConfig(
        codec.algebra, codec.involution, codec.activation, excitation, update_mode=mode, max_sweeps=max_sweeps
    )


def recall_experiment(
    codec: Codec | str,
    images: list[GrayImage],
    noise_levels,
    trials: int,
    seed: int = 0,
    *,
    modes=(UpdateMode.SYNCHRONOUS, UpdateMode.ASYNCHRONOUS),
    a: float = 20.0,
    max_sweeps: int = 100,
    excitation: ExcitationFn | None = None,
) -> list[RecallRow]:
    """Success counts for recalling a noisy stored image, per update mode and noise level.

    Trial ``t`` draws the stored image and the noise from seed ``seed + t``,
    so different codecs, modes and noise levels see the same image choice
    and the same underlying noise pattern.  Success means the final state
    decodes to the original image exactly.
    """
    codec = Codec(codec)
    if trials <= 0:
        return []
    if not images:
        raise ValueError("at least one image is required")
    shape = images[0].pixels.shape
    if any(img.pixels.shape != shape for img in images):
        raise ValueError("all images must have the same size")
    height, width = shape
    memories = MemorySet(np.stack([encode(img, codec) for img in images]))
    rows = []
    for mode in modes:
        cfg = codec_config(codec, memories.N, mode, a, max_sweeps, excitation)
        net = Network(cfg, memories)
        for stdev in noise_levels:
            successes = 0
            for t in range(trials):
                rng = np.random.default_rng(seed + t)
                target = int(rng.integers(len(images)))
                noisy = add_gaussian_noise(images[target], stdev, seed=int(rng.integers(2**63)))
                result = net.run(encode(noisy, codec))
                successes += decode(result.final_state, codec, width, height) == images[target]
            rows.append(RecallRow(codec.value, UpdateMode(mode).value, float(stdev), trials, successes))
    return rows


def write_recall_csv(path, rows: list[RecallRow]) -> Path:
    path = Path(path)
    with path.open("w") as fh:
        fh.write("codec,mode,noise_stdev,trials,successes,rate\n")
        for r in rows:
            fh.write(f"{r.codec},{r.mode},{r.noise_stdev:g},{r.trials},{r.successes},{r.rate!r}\n")
    return path

