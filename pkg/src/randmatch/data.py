"""Dataset handling: IDX image containers and synthetic 2-D Gaussian mixtures.

IDX files are the big-endian binary format used by the MNIST family:
magic 0x00000803 (2051), then count/rows/cols as 32-bit ints, then unsigned
pixel bytes row-wise.  Pixels are normalized into [0, 1]; labels are never
read (training is unsupervised).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import DataError

IDX_IMAGE_MAGIC = 2051


@dataclass(frozen=True)
class Dataset:
    samples: np.ndarray        # n_total x d, float64
    kind: str                  # "image" | "vector2d"
    image_hw: tuple | None = None
    value_range: tuple = (0.0, 1.0)

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.float64)
        if s.ndim != 2 or s.shape[0] == 0:
            raise ValueError("samples must be a nonempty n x d matrix")
        if self.kind not in ("image", "vector2d"):
            raise ValueError("kind must be 'image' or 'vector2d'")
        if self.kind == "image":
            if self.image_hw is None or s.shape[1] != self.image_hw[0] * self.image_hw[1]:
                raise ValueError("image datasets need image_hw with h*w == d")
            if s.min() < 0.0 or s.max() > 1.0:
                raise ValueError("image samples must lie in [0, 1]")
        s = s.copy()
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "value_range", (float(s.min()), float(s.max())))

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @property
    def dim(self) -> int:
        return self.samples.shape[1]


def load_idx_images(path) -> Dataset:
    """Parse an IDX image file into a normalized Dataset."""
    try:
        with open(path, "rb") as f:
            raw = f.read()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if len(raw) < 16:
        raise DataError(f"{path}: truncated IDX header ({len(raw)} bytes)")
    magic, count, rows, cols = struct.unpack(">iiii", raw[:16])
    if magic != IDX_IMAGE_MAGIC:
        raise DataError(f"{path}: bad IDX magic {magic} (expected {IDX_IMAGE_MAGIC})")
    if count < 0 or rows <= 0 or cols <= 0:
        raise DataError(f"{path}: nonsensical IDX dimensions ({count}, {rows}, {cols})")
    expected = count * rows * cols
    body = raw[16:]
    if len(body) != expected:
        raise DataError(f"{path}: expected {expected} pixel bytes, found {len(body)}")
    pixels = np.frombuffer(body, dtype=np.uint8).astype(np.float64) / 255.0
    return Dataset(samples=pixels.reshape(count, rows * cols), kind="image", image_hw=(rows, cols))


def save_idx_images(dataset: Dataset, path):
    """Write an image Dataset back to IDX; inverse of load_idx_images at byte level."""
    if dataset.kind != "image":
        raise ValueError("only image datasets can be written to IDX")
    h, w = dataset.image_hw
    n = dataset.n
    body = np.rint(dataset.samples * 255.0).astype(np.uint8)
    with open(path, "wb") as f:
        f.write(struct.pack(">iiii", IDX_IMAGE_MAGIC, n, h, w))
        f.write(body.tobytes())


@dataclass(frozen=True)
class MixtureSpec:
    """Isotropic Gaussian mixture in the plane."""

    means: tuple
    std: float
    weights: tuple | None = None

    def __post_init__(self):
        means = tuple((float(x), float(y)) for x, y in self.means)
        if not means:
            raise ValueError("mixture needs at least one component")
        if not self.std > 0:
            raise ValueError("std must be positive")
        if self.weights is None:
            weights = tuple(1.0 / len(means) for _ in means)
        else:
            weights = tuple(float(w) for w in self.weights)
            if len(weights) != len(means) or any(w < 0 for w in weights):
                raise ValueError("weights must be nonnegative, one per component")
            if abs(sum(weights) - 1.0) > 1e-12:
                raise ValueError("weights must sum to 1")
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "weights", weights)

    @property
    def k(self) -> int:
        return len(self.means)


def ring_mixture(k: int = 8, radius: float = 2.0, std: float = 0.05) -> MixtureSpec:
    angles = 2.0 * np.pi * np.arange(k) / k
    means = tuple((radius * np.cos(a), radius * np.sin(a)) for a in angles)
    return MixtureSpec(means=means, std=std)


def synth_gaussian_mixture(spec: MixtureSpec, n: int, rng: np.random.Generator) -> Dataset:
    """n i.i.d. draws: component by weight, then isotropic normal around its mean."""
    if n < 1:
        raise ValueError("need at least one sample")
    means = np.asarray(spec.means, dtype=np.float64)
    weights = np.asarray(spec.weights, dtype=np.float64)
    comp = np.searchsorted(np.cumsum(weights), rng.random(n), side="right")
    comp = np.minimum(comp, spec.k - 1)
    samples = means[comp] + rng.normal(0.0, spec.std, size=(n, 2))
    return Dataset(samples=samples, kind="vector2d")
