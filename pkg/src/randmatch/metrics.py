"""Generator evaluation and sample-grid export.

`empirical_ot_eval` is the classifier-free quality metric: the exact
assignment cost between equal-size generated and held-out batches, per
sample, in a fixed feature space.  The feature map (when not identity) is
sampled from a dedicated seed so metric curves are comparable across runs.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist

from . import rng as rng_mod
from .assign import hungarian
from .features import DiscriminatorSpec, disc_forward, sample_discriminator

EVAL_FEATURE_SEED = 408_612_017


def empirical_ot_eval(gen_samples, held_out, feature: DiscriminatorSpec | None = None) -> float:
    """Exact per-sample transport cost between two equal-size point clouds."""
    a = np.asarray(gen_samples, dtype=np.float64)
    b = np.asarray(held_out, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 2:
        raise ValueError("gen_samples and held_out must be matrices of identical shape")
    if feature is not None and feature.kind != "identity":
        fmap = sample_discriminator(feature, rng_mod.derive(EVAL_FEATURE_SEED, rng_mod.STREAM_EVAL_FEATURE))
        a, _ = disc_forward(fmap, a)
        b, _ = disc_forward(fmap, b)
    k = a.shape[0]
    return hungarian(cdist(a, b)).cost / k


def export_image_grid(samples, rows: int, cols: int, image_hw, path, gutter: int = 2):
    """Tile samples row-major into a binary PGM (P5) with black gutters."""
    s = np.asarray(samples, dtype=np.float64)
    h, w = int(image_hw[0]), int(image_hw[1])
    if s.ndim != 2 or s.shape[0] != rows * cols or s.shape[1] != h * w:
        raise ValueError("need rows*cols samples of dimension h*w")
    if s.min() < 0.0 or s.max() > 1.0:
        raise ValueError("sample values must lie in [0, 1]")
    height = rows * h + (rows + 1) * gutter
    width = cols * w + (cols + 1) * gutter
    canvas = np.zeros((height, width), dtype=np.uint8)
    tiles = np.rint(s * 255.0).astype(np.uint8).reshape(rows * cols, h, w)
    for r in range(rows):
        for c in range(cols):
            y = gutter + r * (h + gutter)
            x = gutter + c * (w + gutter)
            canvas[y : y + h, x : x + w] = tiles[r * cols + c]
    with open(path, "wb") as f:
        f.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        f.write(canvas.tobytes())
