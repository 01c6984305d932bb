"""Frozen random feature maps with exact reverse-mode derivatives.

A map is sampled once and never mutated; training samples a fresh map every
iteration.  Three kinds: `identity`, a single Gaussian linear projection
(`gaussian_linear`), and a leaky-ReLU MLP with random affine layers
(`random_mlp`, ending affine).  `disc_vjp` pulls an upstream cotangent back
through the map so generator gradients can flow through it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

KINDS = ("identity", "gaussian_linear", "random_mlp")


@dataclass(frozen=True)
class DiscriminatorSpec:
    kind: str
    input_dim: int
    output_dim: int
    hidden_dims: tuple = ()
    leaky_slope: float = 0.2
    weight_std: float | None = None  # per-layer 1/sqrt(fan_in) when None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown feature map kind {self.kind!r}")
        object.__setattr__(self, "hidden_dims", tuple(int(h) for h in self.hidden_dims))
        dims = (self.input_dim, self.output_dim, *self.hidden_dims)
        if any(d <= 0 for d in dims):
            raise ValueError("all dimensions must be positive")
        if not 0.0 < self.leaky_slope < 1.0:
            raise ValueError("leaky_slope must lie in (0, 1)")
        if self.kind == "identity" and self.input_dim != self.output_dim:
            raise ValueError("identity map requires input_dim == output_dim")
        if self.weight_std is not None and not self.weight_std > 0:
            raise ValueError("weight_std must be positive")

    def layer_dims(self) -> tuple:
        if self.kind == "identity":
            return (self.input_dim,)
        if self.kind == "gaussian_linear":
            return (self.input_dim, self.output_dim)
        return (self.input_dim, *self.hidden_dims, self.output_dim)


class RandomFeatureMap:
    """Immutable sampled feature map. Construct via `sample_discriminator`."""

    __slots__ = ("spec", "weights", "biases")

    def __init__(self, spec: DiscriminatorSpec, weights, biases):
        self.spec = spec
        for w in (*weights, *biases):
            w.setflags(write=False)
        self.weights = tuple(weights)
        self.biases = tuple(biases)


def sample_discriminator(spec: DiscriminatorSpec, rng: np.random.Generator) -> RandomFeatureMap:
    """Sample weights i.i.d. N(0, std^2) per layer, biases zero."""
    dims = spec.layer_dims()
    weights = []
    biases = []
    for d_in, d_out in zip(dims, dims[1:]):
        std = spec.weight_std if spec.weight_std is not None else 1.0 / np.sqrt(d_in)
        weights.append(rng.normal(0.0, std, size=(d_in, d_out)))
        biases.append(np.zeros(d_out))
    return RandomFeatureMap(spec, weights, biases)


def _as_batch(x, dim: int, name: str):
    a = np.asarray(x, dtype=np.float64)
    squeeze = a.ndim == 1
    if squeeze:
        a = a[None, :]
    if a.ndim != 2 or a.shape[1] != dim:
        raise ValueError(f"{name} must have feature dimension {dim}")
    return a, squeeze


def disc_forward(D: RandomFeatureMap, x):
    """Apply the map to a vector or a batch of rows. Returns (y, cache)."""
    a, squeeze = _as_batch(x, D.spec.input_dim, "x")
    if D.spec.kind == "identity":
        cache = (D, squeeze, ())
        return (a[0].copy() if squeeze else a.copy()), cache
    slope = D.spec.leaky_slope
    h = a
    preacts = []
    last = len(D.weights) - 1
    for k, (w, b) in enumerate(zip(D.weights, D.biases)):
        z = h @ w + b
        if k < last:
            preacts.append(z)
            h = np.where(z > 0, z, slope * z)
        else:
            h = z
    cache = (D, squeeze, (a, preacts))
    return (h[0] if squeeze else h), cache


def disc_vjp(D: RandomFeatureMap, cache, upstream):
    """Jacobian-transpose product at the cached input: returns d<upstream, D(x)>/dx."""
    owner, squeeze, saved = cache
    if owner is not D:
        raise ValueError("cache does not belong to this feature map")
    g, up_squeeze = _as_batch(upstream, D.spec.output_dim, "upstream")
    if up_squeeze != squeeze:
        raise ValueError("upstream batch shape does not match the cached forward")
    if D.spec.kind == "identity":
        return g[0] if squeeze else g.copy()
    slope = D.spec.leaky_slope
    _, preacts = saved
    grad = g
    last = len(D.weights) - 1
    for k in range(last, -1, -1):
        if k < last:
            z = preacts[k]
            grad = grad * np.where(z > 0, 1.0, slope)
        grad = grad @ D.weights[k].T
    return grad[0] if squeeze else grad
