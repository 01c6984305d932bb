"""Training loop: fresh random feature map each iteration, exact assignment
between projected batches, Adam step on the generator.

Per step, in order: draw noise, sample the discriminator(s), run the
generator, project both batches, build the pairwise-distance cost matrix,
solve the assignment, differentiate the fixed-matching loss, update.  The
assignment is held constant while differentiating; only the generator is
ever optimized.  Every stream is derived from (seed, stream, iteration), so
a run is a pure function of its config and dataset.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from . import rng as rng_mod
from .assign import Assignment, auction, greedy_assign, hungarian
from .data import Dataset
from .errors import ConfigError, NumericError
from .features import DiscriminatorSpec, RandomFeatureMap, disc_forward, disc_vjp, sample_discriminator
from .metrics import empirical_ot_eval
from .nets import AdamState, GeneratorNet, adam_step, gen_backward, gen_forward, init_adam, init_generator
from .ot import CostMatrix

ASSIGNMENT_METHODS = ("hungarian", "auction", "greedy")
DISC_SCHEDULES = ("cycle", "weighted")


@dataclass(frozen=True)
class TrainConfig:
    max_iters: int
    discriminators: tuple
    batch_size: int = 100
    lr: float = 0.001
    beta1: float = 0.5
    beta2: float = 0.9
    noise_dim: int = 100
    hidden_dims: tuple = (256, 256)
    output_activation: str = "sigmoid"
    assignment_method: str = "hungarian"
    auction_epsilon: float = 1e-6
    disc_weights: tuple | None = None
    disc_schedule: str = "cycle"
    seed: int = 0
    eval_every: int = 0
    eval_count: int = 512
    eval_feature: DiscriminatorSpec | None = None
    checkpoint_every: int = 0

    def __post_init__(self):
        if self.batch_size < 2:
            raise ConfigError("batch_size must be at least 2")
        if self.max_iters < 0:
            raise ConfigError("max_iters must be nonnegative")
        if self.assignment_method not in ASSIGNMENT_METHODS:
            raise ConfigError(f"assignment_method must be one of {ASSIGNMENT_METHODS}")
        if self.disc_schedule not in DISC_SCHEDULES:
            raise ConfigError(f"disc_schedule must be one of {DISC_SCHEDULES}")
        discs = tuple(self.discriminators)
        if not discs or not all(isinstance(d, DiscriminatorSpec) for d in discs):
            raise ConfigError("discriminators must be a nonempty tuple of DiscriminatorSpec")
        object.__setattr__(self, "discriminators", discs)
        object.__setattr__(self, "hidden_dims", tuple(int(h) for h in self.hidden_dims))
        if self.disc_weights is not None:
            w = tuple(float(x) for x in self.disc_weights)
            if len(w) != len(discs) or any(x < 0 for x in w) or abs(sum(w) - 1.0) > 1e-12:
                raise ConfigError("disc_weights must be nonnegative and sum to 1, one per discriminator")
            object.__setattr__(self, "disc_weights", w)

    def layer_dims(self, data_dim: int) -> tuple:
        return (self.noise_dim, *self.hidden_dims, data_dim)

    def weights_for(self, k: int) -> tuple:
        if self.disc_weights is not None:
            return self.disc_weights
        return tuple(1.0 / k for _ in range(k))


@dataclass
class StepRecord:
    iteration: int
    loss: float
    wall_ms: float
    method: str


@dataclass
class EvalRecord:
    iteration: int
    eval_ot_identity: float
    eval_ot_random_feature: float


@dataclass
class TrainHistory:
    steps: list = field(default_factory=list)
    evals: list = field(default_factory=list)

    def losses(self) -> np.ndarray:
        return np.array([s.loss for s in self.steps])

    def write_history_csv(self, path):
        # wall-clock lives in timings.csv so history files are run-invariant
        with open(path, "w") as f:
            f.write("iter,loss,method\n")
            for s in self.steps:
                f.write(f"{s.iteration},{float(s.loss)!r},{s.method}\n")

    def write_metrics_csv(self, path):
        with open(path, "w") as f:
            f.write("iter,eval_ot_identity,eval_ot_random_feature\n")
            for e in self.evals:
                f.write(f"{e.iteration},{float(e.eval_ot_identity)!r},{float(e.eval_ot_random_feature)!r}\n")

    def write_timings_csv(self, path):
        with open(path, "w") as f:
            f.write("iter,wall_ms\n")
            for s in self.steps:
                f.write(f"{s.iteration},{s.wall_ms:.3f}\n")


def build_cost_matrix(feat_gen, feat_real) -> CostMatrix:
    """Pairwise L2 distances between two equal-size feature batches."""
    a = np.asarray(feat_gen, dtype=np.float64)
    b = np.asarray(feat_real, dtype=np.float64)
    if a.ndim != 2 or a.shape != b.shape:
        raise ValueError("feature batches must be matrices of identical shape")
    return CostMatrix(cdist(a, b))


def _solve(method: str, c: np.ndarray, epsilon: float) -> Assignment:
    try:
        if method == "hungarian":
            return hungarian(c)
        if method == "auction":
            return auction(c, epsilon)
        return greedy_assign(c)
    except (ValueError, RuntimeError) as exc:
        raise NumericError(f"{method} assignment failed on a {c.shape[0]}x{c.shape[0]} instance: {exc}") from exc


def loss_and_grad(G: GeneratorNet, discs, real_batch, noise_batch, assignments, weights=None):
    """Fixed-matching loss and its exact generator gradient.

    discs/assignments may be a single feature map and Assignment or parallel
    sequences; weights defaults to uniform.  The loss is the weighted mean
    matched feature distance; pairs at distance zero contribute no gradient.
    """
    if isinstance(discs, RandomFeatureMap):
        discs = (discs,)
        assignments = (assignments,)
    discs = tuple(discs)
    assignments = tuple(assignments)
    if len(discs) != len(assignments):
        raise ValueError("need one assignment per feature map")
    if weights is None:
        weights = tuple(1.0 / len(discs) for _ in discs)
    real = np.asarray(real_batch, dtype=np.float64)
    noise = np.asarray(noise_batch, dtype=np.float64)
    n = noise.shape[0]
    if real.shape[0] != n:
        raise ValueError("real and noise batches must have equal size")
    out, gcache = gen_forward(G, noise)
    upstream = np.zeros_like(out)
    loss = 0.0
    for D, a, w in zip(discs, assignments, weights):
        fg, dcache = disc_forward(D, out)
        fr, _ = disc_forward(D, real)
        diff = fg - fr[a.perm]
        dists = np.sqrt(np.sum(diff * diff, axis=1))
        loss += w * float(dists.mean())
        nonzero = dists > 0
        unit = np.zeros_like(diff)
        unit[nonzero] = diff[nonzero] / dists[nonzero, None]
        upstream += disc_vjp(D, dcache, (w / n) * unit)
    grads = gen_backward(G, gcache, upstream)
    return loss, grads


def sample_step_maps(cfg: TrainConfig, step_index: int, disc_rng: np.random.Generator, data_dim: int):
    """The feature maps active at a given step, with their loss weights."""
    specs = cfg.discriminators
    if cfg.disc_schedule == "cycle" and len(specs) > 1:
        specs = (specs[step_index % len(specs)],)
        weights = (1.0,)
    else:
        weights = cfg.weights_for(len(specs))
    for spec in specs:
        if spec.input_dim != data_dim:
            raise ConfigError(f"discriminator input_dim {spec.input_dim} != data dim {data_dim}")
    return tuple(sample_discriminator(s, disc_rng) for s in specs), weights


def train_step(G: GeneratorNet, adam: AdamState, real_batch, cfg: TrainConfig,
               rng: np.random.Generator, step_index: int = 0):
    """One training iteration; mutates G and adam, returns the step loss."""
    real = np.asarray(real_batch, dtype=np.float64)
    n = real.shape[0]
    noise_rng, disc_rng = rng.spawn(2)
    noise = noise_rng.standard_normal((n, cfg.noise_dim))
    maps, weights = sample_step_maps(cfg, step_index, disc_rng, real.shape[1])
    out, _ = gen_forward(G, noise)
    assignments = []
    for D in maps:
        fg, _ = disc_forward(D, out)
        fr, _ = disc_forward(D, real)
        c = build_cost_matrix(fg, fr)
        assignments.append(_solve(cfg.assignment_method, c.c, cfg.auction_epsilon))
    loss, grads = loss_and_grad(G, maps, real, noise, assignments, weights)
    if not np.isfinite(loss):
        raise NumericError(f"non-finite loss {loss} at step {step_index}")
    adam_step(adam, grads, G)
    return loss


def _run_eval(G: GeneratorNet, cfg: TrainConfig, held_out, iteration: int) -> EvalRecord:
    eval_rng = rng_mod.derive(cfg.seed, rng_mod.STREAM_EVAL)
    noise = eval_rng.standard_normal((held_out.shape[0], cfg.noise_dim))
    samples, _ = gen_forward(G, noise)
    ident = empirical_ot_eval(samples, held_out)
    feature = cfg.eval_feature
    if feature is None:
        d = held_out.shape[1]
        feature = DiscriminatorSpec(kind="random_mlp", input_dim=d, output_dim=min(32, 2 * d), hidden_dims=(32,))
    rand = empirical_ot_eval(samples, held_out, feature)
    return EvalRecord(iteration=iteration, eval_ot_identity=ident, eval_ot_random_feature=rand)


def train(cfg: TrainConfig, dataset: Dataset, checkpoint_dir=None, resume_from=None):
    """Run cfg.max_iters steps over uniformly drawn batches. Returns (G, history).

    With eval_every > 0 the last eval_count samples are held out of training
    and scored at iteration 0, at the cadence, and at the end.
    """
    from .nets import load_checkpoint, save_checkpoint  # local import to avoid cycle in docs builds

    data = dataset.samples
    if cfg.eval_every > 0:
        if dataset.n < cfg.batch_size + cfg.eval_count:
            raise ConfigError(
                f"dataset has {dataset.n} samples; need batch_size + eval_count = "
                f"{cfg.batch_size + cfg.eval_count}"
            )
        held_out = data[dataset.n - cfg.eval_count :]
        pool = data[: dataset.n - cfg.eval_count]
    else:
        if dataset.n < cfg.batch_size:
            raise ConfigError(f"dataset has {dataset.n} samples, smaller than batch size {cfg.batch_size}")
        held_out = None
        pool = data

    start_iter = 0
    if resume_from is not None:
        G, adam, meta = load_checkpoint(resume_from)
        start_iter = int(meta["next_iter"])
        if tuple(meta["layer_dims"]) != cfg.layer_dims(dataset.dim):
            raise ConfigError("checkpoint architecture does not match the config")
    else:
        init_rng = rng_mod.derive(cfg.seed, rng_mod.STREAM_INIT)
        G = init_generator(cfg.layer_dims(dataset.dim), cfg.output_activation, init_rng)
        adam = init_adam(G, cfg.lr, cfg.beta1, cfg.beta2)

    history = TrainHistory()
    if held_out is not None and start_iter == 0:
        history.evals.append(_run_eval(G, cfg, held_out, 0))

    def maybe_checkpoint(next_iter):
        if checkpoint_dir is not None:
            save_checkpoint(
                f"{checkpoint_dir}/ckpt_{next_iter:06d}.npz", G, adam, next_iter, cfg.seed,
                extra={"kind": dataset.kind, "image_hw": list(dataset.image_hw) if dataset.image_hw else None},
            )

    if checkpoint_dir is not None and start_iter == 0:
        maybe_checkpoint(0)

    for t in range(start_iter, cfg.max_iters):
        t0 = time.perf_counter()
        data_rng = rng_mod.derive(cfg.seed, rng_mod.STREAM_TRAIN_DATA, t)
        idx = data_rng.integers(0, pool.shape[0], size=cfg.batch_size)
        step_rng = rng_mod.derive(cfg.seed, rng_mod.STREAM_TRAIN_NOISE, t)
        loss = train_step(G, adam, pool[idx], cfg, step_rng, step_index=t)
        wall_ms = (time.perf_counter() - t0) * 1000.0
        history.steps.append(StepRecord(iteration=t, loss=loss, wall_ms=wall_ms, method=cfg.assignment_method))
        done = t + 1
        if held_out is not None and (done % cfg.eval_every == 0 or done == cfg.max_iters):
            history.evals.append(_run_eval(G, cfg, held_out, done))
        if cfg.checkpoint_every > 0 and done % cfg.checkpoint_every == 0 and done != cfg.max_iters:
            maybe_checkpoint(done)
    if checkpoint_dir is not None:
        maybe_checkpoint(cfg.max_iters)
    return G, history
