"""Command-line interface.

Subcommands: `train` (full run from a JSON config), `assign` (solve a cost
matrix from CSV), `lemma1` (plug-in estimator distance study, written as
CSV), and `gen` (sample a grid from a checkpoint).  Exit codes: 0 success,
1 usage or config error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import rng as rng_mod
from .assign import assignment_to_ot_value, auction, brute_force_assign, greedy_assign, hungarian
from .data import Dataset, MixtureSpec, load_idx_images, synth_gaussian_mixture
from .errors import ConfigError, DataError, NumericError
from .estimators import plugin_distance_experiment
from .features import DiscriminatorSpec
from .metrics import export_image_grid
from .nets import gen_forward, load_checkpoint
from .ot import CostMatrix
from .train import TrainConfig, train


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _load_json(path) -> dict:
    try:
        with open(path) as f:
            return json.load(f)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc


def _require(cfg: dict, field: str):
    cur = cfg
    for part in field.split("."):
        if not isinstance(cur, dict) or part not in cur:
            raise ConfigError(f"config is missing required field '{field}'")
        cur = cur[part]
    return cur


def _apply_overrides(cfg: dict, overrides):
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override '{item}' is not of the form dotted.key=json_value")
        key, _, raw = item.partition("=")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        cur = cfg
        parts = key.split(".")
        for part in parts[:-1]:
            cur = cur.setdefault(part, {})
            if not isinstance(cur, dict):
                raise ConfigError(f"override '{key}' traverses a non-object field")
        cur[parts[-1]] = value


def _disc_spec(entry: dict, data_dim: int) -> DiscriminatorSpec:
    kind = entry.get("kind")
    if kind is None:
        raise ConfigError("each discriminator entry needs a 'kind'")
    if kind == "identity":
        return DiscriminatorSpec(kind="identity", input_dim=data_dim, output_dim=data_dim)
    return DiscriminatorSpec(
        kind=kind,
        input_dim=int(entry.get("input_dim", data_dim)),
        output_dim=int(_require(entry, "output_dim")),
        hidden_dims=tuple(entry.get("hidden_dims", ())),
        leaky_slope=float(entry.get("leaky_slope", 0.2)),
        weight_std=entry.get("weight_std"),
    )


def _build_dataset(cfg: dict, seed: int) -> Dataset:
    data_cfg = _require(cfg, "data")
    kind = _require(cfg, "data.kind")
    if kind == "idx":
        return load_idx_images(_require(cfg, "data.path"))
    if kind == "mixture":
        spec = MixtureSpec(
            means=_require(cfg, "data.means"),
            std=float(_require(cfg, "data.std")),
            weights=data_cfg.get("weights"),
        )
        n = int(_require(cfg, "data.n"))
        return synth_gaussian_mixture(spec, n, rng_mod.derive(seed, rng_mod.STREAM_SYNTH_DATA))
    raise ConfigError(f"unknown data.kind '{kind}' (expected 'idx' or 'mixture')")


def cmd_train(config_path, overrides=()) -> int:
    cfg = _load_json(config_path)
    _apply_overrides(cfg, overrides)
    seed = int(cfg.get("seed", 0))
    out_dir = Path(_require(cfg, "out_dir"))
    dataset = _build_dataset(cfg, seed)
    tcfg_raw = dict(_require(cfg, "train"))
    disc_entries = tcfg_raw.pop("discriminators", [{"kind": "identity"}])
    discs = tuple(_disc_spec(e, dataset.dim) for e in disc_entries)
    eval_feature = tcfg_raw.pop("eval_feature", None)
    known = {
        "batch_size", "max_iters", "lr", "beta1", "beta2", "noise_dim", "hidden_dims",
        "output_activation", "assignment_method", "auction_epsilon", "disc_weights",
        "disc_schedule", "eval_every", "eval_count", "checkpoint_every",
    }
    unknown = set(tcfg_raw) - known
    if unknown:
        raise ConfigError(f"unknown train fields: {sorted(unknown)}")
    if "hidden_dims" in tcfg_raw:
        tcfg_raw["hidden_dims"] = tuple(tcfg_raw["hidden_dims"])
    if "disc_weights" in tcfg_raw and tcfg_raw["disc_weights"] is not None:
        tcfg_raw["disc_weights"] = tuple(tcfg_raw["disc_weights"])
    tcfg = TrainConfig(
        discriminators=discs,
        seed=seed,
        eval_feature=_disc_spec(eval_feature, dataset.dim) if eval_feature else None,
        **tcfg_raw,
    )
    out_dir.mkdir(parents=True, exist_ok=True)
    G, history = train(tcfg, dataset, checkpoint_dir=str(out_dir))
    history.write_history_csv(out_dir / "history.csv")
    history.write_metrics_csv(out_dir / "metrics.csv")
    history.write_timings_csv(out_dir / "timings.csv")
    _export_samples(G, dataset, seed, out_dir)
    return 0


def _export_samples(G, dataset: Dataset, seed: int, out_dir: Path, count: int = 64):
    noise = rng_mod.derive(seed, rng_mod.STREAM_GEN_CLI).standard_normal((count, G.noise_dim))
    samples, _ = gen_forward(G, noise)
    if dataset.kind == "image":
        rows = int(np.sqrt(count))
        cols = count // rows
        np.clip(samples, 0.0, 1.0, out=samples)
        export_image_grid(samples[: rows * cols], rows, cols, dataset.image_hw, out_dir / "samples_final.pgm")
    else:
        np.savetxt(out_dir / "samples_final.csv", samples, delimiter=",")


def cmd_assign(cost_csv, method: str) -> int:
    try:
        c = np.loadtxt(cost_csv, delimiter=",", ndmin=2)
    except OSError as exc:
        raise DataError(f"cannot read {cost_csv}: {exc}") from exc
    except ValueError as exc:
        raise DataError(f"malformed cost CSV {cost_csv}: {exc}") from exc
    solvers = {"hungarian": hungarian, "auction": auction, "greedy": greedy_assign, "brute": brute_force_assign}
    if method not in solvers:
        raise ConfigError(f"method must be one of {sorted(solvers)}")
    try:
        a = solvers[method](c)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    print("perm:", ",".join(str(int(j)) for j in a.perm))
    print("cost:", f"{a.cost:g}")
    print("ot_value:", f"{assignment_to_ot_value(a, a.n):g}")
    return 0


def cmd_lemma1(config_path) -> int:
    cfg = _load_json(config_path)
    p = np.asarray(_require(cfg, "p"), dtype=np.float64)
    q = np.asarray(_require(cfg, "q"), dtype=np.float64)
    cost = cfg.get("cost", "abs_index")
    m = p.shape[0]
    if isinstance(cost, str):
        if cost != "abs_index":
            raise ConfigError("cost must be a matrix or the string 'abs_index'")
        idx = np.arange(m, dtype=np.float64)
        c = np.abs(idx[:, None] - idx[None, :])
    else:
        c = np.asarray(cost, dtype=np.float64)
    n_values = cfg.get("n_values", [1, 2, 4, 8, 16, 32, 64])
    trials = int(cfg.get("trials", 10_000))
    seed = int(cfg.get("seed", 0))
    out = Path(_require(cfg, "out"))
    try:
        report = plugin_distance_experiment(
            p, q, CostMatrix(c), n_values, trials, rng_mod.derive(seed, rng_mod.STREAM_ESTIMATOR)
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    out.parent.mkdir(parents=True, exist_ok=True)
    report.write_csv(out)
    return 0


def cmd_gen(checkpoint, count: int, out_path, seed: int = 0) -> int:
    if count < 1:
        raise ConfigError("count must be positive")
    G, _, meta = load_checkpoint(checkpoint)
    noise = rng_mod.derive(seed, rng_mod.STREAM_GEN_CLI).standard_normal((count, G.noise_dim))
    samples, _ = gen_forward(G, noise)
    extra = meta.get("extra") or {}
    image_hw = extra.get("image_hw")
    if extra.get("kind") == "image" and image_hw:
        rows = 1
        for r in range(int(np.sqrt(count)), 0, -1):
            if count % r == 0:
                rows = r
                break
        np.clip(samples, 0.0, 1.0, out=samples)
        export_image_grid(samples, rows, count // rows, tuple(image_hw), out_path)
    else:
        np.savetxt(out_path, samples, delimiter=",")
    return 0


def main(argv=None) -> int:
    parser = _Parser(prog="randmatch", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a generator from a JSON config")
    p_train.add_argument("config")
    p_train.add_argument("--set", dest="overrides", action="append", default=[],
                         metavar="KEY=JSON", help="override a config field, e.g. train.max_iters=10")

    p_assign = sub.add_parser("assign", help="solve an assignment problem from a cost CSV")
    p_assign.add_argument("cost_csv")
    p_assign.add_argument("--method", default="hungarian",
                          choices=["hungarian", "auction", "greedy", "brute"])

    p_lemma = sub.add_parser("lemma1", help="plug-in estimator distance study -> CSV report")
    p_lemma.add_argument("config")

    p_gen = sub.add_parser("gen", help="sample a grid of outputs from a checkpoint")
    p_gen.add_argument("checkpoint")
    p_gen.add_argument("--count", type=int, default=64)
    p_gen.add_argument("--out", required=True)
    p_gen.add_argument("--seed", type=int, default=0)

    try:
        args = parser.parse_args(argv)
        if args.command == "train":
            return cmd_train(args.config, args.overrides)
        if args.command == "assign":
            return cmd_assign(args.cost_csv, args.method)
        if args.command == "lemma1":
            return cmd_lemma1(args.config)
        return cmd_gen(args.checkpoint, args.count, args.out, args.seed)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
