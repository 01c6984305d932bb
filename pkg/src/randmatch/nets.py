"""Trainable generator MLP: manual reverse-mode gradients, Adam, checkpoints.

Hidden layers use leaky ReLU; the output layer is sigmoid for image data and
identity for low-dimensional synthetic data.  Weights are float64 and must
stay finite; `adam_step` raises on NaN gradients naming the offending tensor.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, NumericError

CHECKPOINT_FORMAT = "randmatch-checkpoint"
CHECKPOINT_VERSION = 1

OUTPUT_ACTIVATIONS = ("sigmoid", "identity")


@dataclass
class GeneratorNet:
    layer_dims: tuple
    weights: list
    biases: list
    output_activation: str = "sigmoid"
    leaky_slope: float = 0.2

    def __post_init__(self):
        self.layer_dims = tuple(int(d) for d in self.layer_dims)
        if len(self.layer_dims) < 2 or any(d <= 0 for d in self.layer_dims):
            raise ValueError("layer_dims needs at least (noise_dim, data_dim), all positive")
        if self.output_activation not in OUTPUT_ACTIVATIONS:
            raise ValueError(f"output_activation must be one of {OUTPUT_ACTIVATIONS}")

    @property
    def noise_dim(self) -> int:
        return self.layer_dims[0]

    @property
    def data_dim(self) -> int:
        return self.layer_dims[-1]

    def check_finite(self):
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise NumericError(f"non-finite generator weights in layer {k}")


def init_generator(
    layer_dims,
    output_activation: str,
    rng: np.random.Generator,
    weight_std: float | None = None,
) -> GeneratorNet:
    """Weights N(0, std^2) with std = 1/sqrt(fan_in) unless overridden; biases zero."""
    dims = tuple(int(d) for d in layer_dims)
    weights = []
    biases = []
    for d_in, d_out in zip(dims, dims[1:]):
        std = weight_std if weight_std is not None else 1.0 / np.sqrt(d_in)
        weights.append(rng.normal(0.0, std, size=(d_in, d_out)))
        biases.append(np.zeros(d_out))
    return GeneratorNet(layer_dims=dims, weights=weights, biases=biases, output_activation=output_activation)


def gen_forward(G: GeneratorNet, z):
    """Map a batch of noise rows to data space. Returns (output, cache)."""
    a = np.asarray(z, dtype=np.float64)
    squeeze = a.ndim == 1
    if squeeze:
        a = a[None, :]
    if a.ndim != 2 or a.shape[1] != G.noise_dim:
        raise ValueError(f"noise must have dimension {G.noise_dim}")
    slope = G.leaky_slope
    h = a
    acts = [a]
    preacts = []
    last = len(G.weights) - 1
    for k, (w, b) in enumerate(zip(G.weights, G.biases)):
        zk = h @ w + b
        preacts.append(zk)
        if k < last:
            h = np.where(zk > 0, zk, slope * zk)
        elif G.output_activation == "sigmoid":
            h = 1.0 / (1.0 + np.exp(-zk))
        else:
            h = zk
        acts.append(h)
    cache = (G, squeeze, acts, preacts)
    return (h[0] if squeeze else h), cache


def gen_backward(G: GeneratorNet, cache, grad_output):
    """Exact gradient of <grad_output, gen_forward(z)> w.r.t. every weight.

    Returns (weight_grads, bias_grads) as lists mirroring G.weights/G.biases.
    """
    owner, squeeze, acts, preacts = cache
    if owner is not G:
        raise ValueError("cache does not belong to this generator")
    g = np.asarray(grad_output, dtype=np.float64)
    if squeeze:
        g = g[None, :]
    if g.shape != (acts[0].shape[0], G.data_dim):
        raise ValueError("grad_output shape does not match the cached forward")
    slope = G.leaky_slope
    last = len(G.weights) - 1
    if G.output_activation == "sigmoid":
        out = acts[-1]
        grad = g * out * (1.0 - out)
    else:
        grad = g
    w_grads = [None] * len(G.weights)
    b_grads = [None] * len(G.biases)
    for k in range(last, -1, -1):
        w_grads[k] = acts[k].T @ grad
        b_grads[k] = grad.sum(axis=0)
        if k > 0:
            grad = grad @ G.weights[k].T
            zk = preacts[k - 1]
            grad = grad * np.where(zk > 0, 1.0, slope)
    return w_grads, b_grads


@dataclass
class AdamState:
    lr: float
    beta1: float
    beta2: float
    eps: float = 1e-8
    t: int = 0
    m_w: list = field(default_factory=list)
    v_w: list = field(default_factory=list)
    m_b: list = field(default_factory=list)
    v_b: list = field(default_factory=list)


def init_adam(G: GeneratorNet, lr: float, beta1: float, beta2: float, eps: float = 1e-8) -> AdamState:
    state = AdamState(lr=lr, beta1=beta1, beta2=beta2, eps=eps)
    for w, b in zip(G.weights, G.biases):
        state.m_w.append(np.zeros_like(w))
        state.v_w.append(np.zeros_like(w))
        state.m_b.append(np.zeros_like(b))
        state.v_b.append(np.zeros_like(b))
    return state


def _adam_update(m, v, g, p, state: AdamState, name: str):
    if np.any(np.isnan(g)):
        raise NumericError(f"NaN gradient for {name}")
    m *= state.beta1
    m += (1.0 - state.beta1) * g
    v *= state.beta2
    v += (1.0 - state.beta2) * np.square(g)
    m_hat = m / (1.0 - state.beta1**state.t)
    v_hat = v / (1.0 - state.beta2**state.t)
    p -= state.lr * m_hat / (np.sqrt(v_hat) + state.eps)


def adam_step(state: AdamState, grads, G: GeneratorNet):
    """One bias-corrected Adam step over all generator tensors (in place)."""
    w_grads, b_grads = grads
    state.t += 1
    for k, (gw, gb) in enumerate(zip(w_grads, b_grads)):
        _adam_update(state.m_w[k], state.v_w[k], gw, G.weights[k], state, f"weights[{k}]")
        _adam_update(state.m_b[k], state.v_b[k], gb, G.biases[k], state, f"biases[{k}]")
    G.check_finite()
    return G, state


def save_checkpoint(path, G: GeneratorNet, adam: AdamState, next_iter: int, seed: int, extra: dict | None = None):
    """Versioned npz container; contents are sufficient for bit-exact resume.

    Streams are derived from (seed, iteration), so the generator state is
    fully captured by the seed and the next iteration index.
    """
    meta = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "layer_dims": list(G.layer_dims),
        "output_activation": G.output_activation,
        "leaky_slope": G.leaky_slope,
        "lr": adam.lr,
        "beta1": adam.beta1,
        "beta2": adam.beta2,
        "eps": adam.eps,
        "t": adam.t,
        "next_iter": int(next_iter),
        "seed": int(seed),
        "extra": extra or {},
    }
    arrays = {"__meta__": np.frombuffer(json.dumps(meta).encode(), dtype=np.uint8)}
    for k in range(len(G.weights)):
        arrays[f"w{k}"] = G.weights[k]
        arrays[f"b{k}"] = G.biases[k]
        arrays[f"mw{k}"] = adam.m_w[k]
        arrays[f"vw{k}"] = adam.v_w[k]
        arrays[f"mb{k}"] = adam.m_b[k]
        arrays[f"vb{k}"] = adam.v_b[k]
    with open(path, "wb") as f:
        np.savez(f, **arrays)


def load_checkpoint(path):
    """Returns (G, adam, meta). Raises DataError on a foreign or wrong-version file."""
    try:
        with np.load(path) as z:
            arrays = {k: z[k] for k in z.files}
    except Exception as exc:
        raise DataError(f"unreadable checkpoint {path}: {exc}") from exc
    if "__meta__" not in arrays:
        raise DataError(f"{path} is not a {CHECKPOINT_FORMAT} file")
    try:
        meta = json.loads(bytes(arrays["__meta__"].tobytes()).decode())
    except Exception as exc:
        raise DataError(f"corrupt checkpoint metadata in {path}") from exc
    if meta.get("format") != CHECKPOINT_FORMAT:
        raise DataError(f"{path} is not a {CHECKPOINT_FORMAT} file")
    if meta.get("version") != CHECKPOINT_VERSION:
        raise DataError(
            f"checkpoint version {meta.get('version')} unsupported (expected {CHECKPOINT_VERSION})"
        )
    dims = tuple(meta["layer_dims"])
    n_layers = len(dims) - 1
    weights = [arrays[f"w{k}"] for k in range(n_layers)]
    biases = [arrays[f"b{k}"] for k in range(n_layers)]
    G = GeneratorNet(
        layer_dims=dims,
        weights=weights,
        biases=biases,
        output_activation=meta["output_activation"],
        leaky_slope=meta["leaky_slope"],
    )
    adam = AdamState(
        lr=meta["lr"], beta1=meta["beta1"], beta2=meta["beta2"], eps=meta["eps"], t=meta["t"],
        m_w=[arrays[f"mw{k}"] for k in range(n_layers)],
        v_w=[arrays[f"vw{k}"] for k in range(n_layers)],
        m_b=[arrays[f"mb{k}"] for k in range(n_layers)],
        v_b=[arrays[f"vb{k}"] for k in range(n_layers)],
    )
    return G, adam, meta
