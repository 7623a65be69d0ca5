"""Command-line driver: read a family, fit, write CSV / JSON / SVG."""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import sys
from dataclasses import dataclass

import numpy as np

from .familyfile import FamilyParseError, FamilySpec, fixture_names, load_family, load_fixture
from .gaussian import entropy
from .mc import MCConfig
from .optimizer import EmbeddingConfig, fit, prepare
from .plot import render_svg
from .sets import parse_augment_mode

__all__ = ["RunSpec", "run", "main", "embedding_csv", "report_json"]


@dataclass(frozen=True)
class RunSpec:
    """``input`` is a family file path, or ``fixture:<name>`` for a bundled family."""

    input: str
    config: EmbeddingConfig = EmbeddingConfig()
    out_csv: str | None = None
    out_json: str | None = None
    out_svg: str | None = None

    def load(self) -> FamilySpec:
        if self.input.startswith("fixture:"):
            return load_fixture(self.input.split(":", 1)[1])
        return load_family(self.input)


def _f(x) -> str:
    return format(float(x), ".17g")


def embedding_csv(names, embeddings, volumes) -> str:
    d = embeddings[0].dim if embeddings else 0
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["name", *(f"mean_{j}" for j in range(d)), *(f"sigma_{j}" for j in range(d)), "volume", "entropy"])
    for name, g, v in zip(names, embeddings, volumes):
        w.writerow([name, *map(_f, g.mean), *map(_f, g.sigma), _f(v), _f(entropy(g))])
    return buf.getvalue()


def _jsonable(obj):
    if dataclasses.is_dataclass(obj):
        return {k: _jsonable(v) for k, v in dataclasses.asdict(obj).items()}
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def report_json(family, report, config) -> str:
    """Deterministic JSON; wall-clock time is left out on purpose."""
    doc = {
        "sets": [{"name": s.name, "members": sorted(s.members), "provenance": p}
                 for s, p in zip(family.sets, family.provenance)],
        "config": _jsonable(config),
        "scale": report.scale,
        "initial_stress": report.initial_stress,
        "final_stress": report.final_stress,
        "stress_trace": [float(v) for v in report.stress],
        "input_divergence": report.d_in.tolist(),
        "output_divergence": report.d_out.tolist(),
    }
    return json.dumps(doc, indent=1) + "\n"


def run(spec: RunSpec, stderr=None) -> int:
    stderr = stderr or sys.stderr
    try:
        fspec = spec.load()
    except (OSError, KeyError) as exc:
        print(f"error: cannot read {spec.input}: {exc}", file=stderr)
        return 2
    except FamilyParseError as exc:
        print(f"error: {spec.input}: {exc}", file=stderr)
        return 2
    if spec.out_svg and spec.config.dim != 2:
        print(f"error: SVG output needs --dim 2 (got {spec.config.dim})", file=stderr)
        return 2

    family = fspec.to_family()
    problem = prepare(family, spec.config)
    try:
        embeddings, report = fit(family, spec.config, problem=problem)
    except (ValueError, FloatingPointError) as exc:
        print(f"error: {exc}", file=stderr)
        return 1
    fam = problem.family
    colors = fspec.colors + [None] * (len(fam) - len(fspec.sets))

    outputs = []
    if spec.out_csv:
        outputs.append((spec.out_csv, embedding_csv(fam.names, embeddings, fam.volumes())))
    if spec.out_json:
        outputs.append((spec.out_json, report_json(fam, report, spec.config)))
    if spec.out_svg:
        outputs.append((spec.out_svg, render_svg(embeddings, fam.names, colors)))
    for path, text in outputs:
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: cannot write {path}: {exc}", file=stderr)
            return 2
    print(
        f"{len(fam)} sets, stress {report.initial_stress:.4g} -> {report.final_stress:.4g}, "
        f"a={report.scale:.4g}, {report.wall_clock:.1f}s",
        file=stderr,
    )
    return 0


def _scale(text: str):
    if text == "learn":
        return None
    if text.startswith("fixed:"):
        return float(text.split(":", 1)[1])
    raise argparse.ArgumentTypeError("expected 'learn' or 'fixed:<value>'")


def _augment(text: str):
    try:
        parse_augment_mode(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return text


def _pairs(text: str):
    if text == "all":
        return None
    return int(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="setembed", description="Embed a family of sets into diagonal Gaussians.")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="family file")
    src.add_argument("--fixture", choices=fixture_names(), help="bundled family")
    p.add_argument("--divergence", choices=["kl", "js"], default="js")
    p.add_argument("--input-divergence", choices=["damped_kl", "js"], default=None,
                   help="override the input divergence coupled to --divergence")
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--mc-samples", type=int, default=128)
    p.add_argument("--eval-samples", type=int, default=16384)
    p.add_argument("--fixed-noise", action="store_true", help="reuse one noise draw for every step")
    p.add_argument("--lr", type=float, default=0.03)
    p.add_argument("--iters", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sigma-mode", choices=["reparam", "init-only"], default="reparam")
    p.add_argument("--scale", type=_scale, default=None, metavar="{learn,fixed:<f>}")
    p.add_argument("--augment", type=_augment, default="none", metavar="{none,full,sample:<n>}")
    p.add_argument("--pairs", type=_pairs, default=None, metavar="{all,<n>}",
                   help="ordered pairs sampled per step")
    p.add_argument("--out-csv")
    p.add_argument("--out-json")
    p.add_argument("--out-svg")
    return p


def spec_from_args(args) -> RunSpec:
    kind, n, _ = parse_augment_mode(args.augment)
    augment = kind if kind != "sample" else ("sample", n, args.seed)
    config = EmbeddingConfig(
        dim=args.dim,
        output_divergence="kl" if args.divergence == "kl" else "mc_js",
        input_divergence=args.input_divergence,
        epsilon=args.epsilon,
        learning_rate=args.lr,
        iterations=args.iters,
        sigma_mode=args.sigma_mode.replace("-", "_"),
        fixed_scale=args.scale,
        pair_samples=args.pairs,
        augment=augment,
        mc=MCConfig(
            sample_count=args.mc_samples,
            seed=args.seed,
            resample_each_step=not args.fixed_noise,
            eval_sample_count=args.eval_samples,
        ),
        seed=args.seed,
    )
    source = args.input if args.input is not None else f"fixture:{args.fixture}"
    return RunSpec(source, config, args.out_csv, args.out_json, args.out_svg)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        spec = spec_from_args(args)
    except ValueError as exc:
        parser.error(str(exc))
    return run(spec)


if __name__ == "__main__":
    sys.exit(main())
