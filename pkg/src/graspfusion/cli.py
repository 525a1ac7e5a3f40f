"""Command-line entry point.

Subcommands: build (records CSV -> affordance DB), fuse (score file + DB
-> fused predictions), eval (the three pipelines + metrics), sim (seeded
world sweep with identity and dominance checks).

Exit codes: 0 ok, 2 format/parameter error, 3 unknown object under
policy=error, 4 degenerate fusion, 5 missing truth labels, 6 simulator
property violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import affordance, evaluation, scores, simbench
from .errors import (
    BadParameterError,
    DegenerateFusionError,
    GraspFusionError,
    MissingTruthError,
    UnknownObjectError,
)
from .fileio import atomic_write_text
from .taxonomy import GraspTaxonomy

EXIT_OK = 0
EXIT_FORMAT = 2
EXIT_UNKNOWN_OBJECT = 3
EXIT_DEGENERATE = 4
EXIT_MISSING_TRUTH = 5
EXIT_PROPERTY = 6

IDENTITY_TOL = 1e-9
DOMINANCE_TOL = 1e-12


def _load_taxonomy(path: str | None) -> GraspTaxonomy:
    if path is None:
        return GraspTaxonomy.focus()
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(doc, list) or not all(isinstance(l, str) for l in doc):
        raise GraspFusionError(f"{path}: taxonomy file must be a JSON array of labels")
    return GraspTaxonomy(tuple(doc))


def cmd_build(args: argparse.Namespace) -> int:
    taxonomy = _load_taxonomy(args.taxonomy)
    records = affordance.read_records_csv(args.records, taxonomy)
    db = affordance.build(records, taxonomy, alpha=args.alpha)
    affordance.save(db, args.out)
    print(f"built affordance db: {len(db)} objects, {len(taxonomy)} grasp types -> {args.out}")
    return EXIT_OK


def cmd_fuse(args: argparse.Namespace) -> int:
    score_file = scores.parse_scores(args.scores, mode=args.strictness)
    db = affordance.load(args.db)
    predictions = evaluation.run_pipeline(
        score_file, db, mode="fused",
        prior_mode=args.prior, unknown_policy=args.unknown_policy,
    )
    lines = [json.dumps(
        {"format": "afford-fused/1", "taxonomy": list(score_file.taxonomy.labels)},
        separators=(",", ":"),
    )]
    for prediction in predictions:
        lines.append(json.dumps({
            "image_id": prediction.image_id,
            "fused": [float(p) for p in prediction.dist.probs],
            "predicted": prediction.predicted,
            "fallback": prediction.fallback,
        }, separators=(",", ":")))
    atomic_write_text(args.out, "\n".join(lines) + "\n")
    print(f"fused {len(predictions)} records -> {args.out}")
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    score_file = scores.parse_scores(args.scores, mode=args.strictness)
    db = affordance.load(args.db)
    predictions = evaluation.run_pipeline(
        score_file, db, mode=args.mode,
        prior_mode=args.prior, unknown_policy=args.unknown_policy,
    )
    report = evaluation.evaluate(predictions, score_file)
    if args.report:
        atomic_write_text(args.report, evaluation.render_report(report, "json"))
    if args.table or not args.report:
        sys.stdout.write(evaluation.render_report(report, "table"))
    return EXIT_OK


def cmd_sim(args: argparse.Namespace) -> int:
    if args.worlds < 1:
        print("error: --worlds must be >= 1", file=sys.stderr)
        return EXIT_FORMAT
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    failures = []
    for k in range(args.worlds):
        seed = args.seed + k
        world = simbench.generate_world(
            seed, args.gcount, args.icount, args.ocount, args.concentration,
        )
        identity_error = simbench.fusion_identity_error(world)
        acc = {rule: simbench.expected_accuracy(world, rule)
               for rule in ("cnn", "affordance", "fused")}
        rows.append({
            "seed": seed,
            "identity_error": identity_error,
            "accuracy_cnn": acc["cnn"],
            "accuracy_affordance": acc["affordance"],
            "accuracy_fused": acc["fused"],
        })
        if identity_error > IDENTITY_TOL:
            failures.append(f"seed {seed}: identity error {identity_error:.3e} > {IDENTITY_TOL}")
        if acc["fused"] < max(acc["cnn"], acc["affordance"]) - DOMINANCE_TOL:
            failures.append(f"seed {seed}: fused accuracy below a single-cue rule")
        atomic_write_text(
            out / f"world_{seed}.json",
            json.dumps(simbench.world_to_dict(world), indent=2) + "\n",
        )
        if args.samples > 0:
            dataset = simbench.sample_dataset(world, args.samples, seed)
            scores.write_scores(dataset.scores, out / f"scores_{seed}.jsonl")
            affordance.write_records_csv(
                dataset.affordance_records, out / f"affordance_{seed}.csv"
            )
    summary = {
        "format": "afford-sim-summary/1",
        "base_seed": args.seed,
        "worlds": args.worlds,
        "params": {
            "g_count": args.gcount,
            "i_count": args.icount,
            "o_count": args.ocount,
            "concentration": args.concentration,
        },
        "rows": rows,
    }
    atomic_write_text(out / "summary.json", json.dumps(summary, indent=2) + "\n")
    if failures:
        for failure in failures:
            print(f"property violation: {failure}", file=sys.stderr)
        return EXIT_PROPERTY
    print(f"{args.worlds} worlds ok (identity error <= {IDENTITY_TOL}, fused dominates) -> {out / 'summary.json'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graspfusion",
        description="Grasp-type recognition by fusing classifier posteriors "
                    "with object affordance priors.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser("build", help="build an affordance DB from a records CSV")
    p_build.add_argument("records", help="CSV with header 'object,grasp'")
    p_build.add_argument("--taxonomy", default=None,
                         help="JSON array of grasp labels (default: the 4 focus types)")
    p_build.add_argument("--alpha", type=float, default=0.0,
                         help="smoothing pseudo-count (default: 0)")
    p_build.add_argument("--out", required=True, help="output DB path (JSON)")
    p_build.set_defaults(func=cmd_build)

    def add_pipeline_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--scores", required=True, help="afford-scores/1 file")
        p.add_argument("--db", required=True, help="afford-db/1 file")
        p.add_argument("--prior", choices=evaluation.PRIOR_MODES, default="uniform",
                       help="grasp prior p(g) (default: uniform)")
        p.add_argument("--unknown-policy", choices=affordance.UNKNOWN_POLICIES,
                       default="uniform",
                       help="distribution for objects absent from the DB (default: uniform)")
        p.add_argument("--strictness", choices=("strict", "lenient"), default="strict",
                       help="score-file validation mode (default: strict)")

    p_fuse = sub.add_parser("fuse", help="write fused distributions and predictions")
    add_pipeline_flags(p_fuse)
    p_fuse.add_argument("--out", required=True, help="output JSONL path")
    p_fuse.set_defaults(func=cmd_fuse)

    p_eval = sub.add_parser("eval", help="run a pipeline and report precision/recall")
    add_pipeline_flags(p_eval)
    p_eval.add_argument("--mode", choices=evaluation.MODES, required=True)
    p_eval.add_argument("--report", default=None, help="write the JSON report here")
    p_eval.add_argument("--table", action="store_true", help="print the 2-decimal table")
    p_eval.set_defaults(func=cmd_eval)

    p_sim = sub.add_parser("sim", help="seeded world sweep with identity/dominance checks")
    p_sim.add_argument("--seed", type=int, default=0, help="base seed (default: 0)")
    p_sim.add_argument("--worlds", type=int, default=100, help="number of worlds (default: 100)")
    p_sim.add_argument("--gcount", type=int, default=4, help="grasp types, 2..4 (default: 4)")
    p_sim.add_argument("--icount", type=int, default=5, help="image symbols, 2..5 (default: 5)")
    p_sim.add_argument("--ocount", type=int, default=5, help="object symbols, 2..5 (default: 5)")
    p_sim.add_argument("--concentration", type=float, default=1.0,
                       help="Dirichlet concentration (default: 1.0)")
    p_sim.add_argument("--samples", type=int, default=0,
                       help="also emit a sampled score file + affordance CSV per world")
    p_sim.add_argument("--out", required=True, help="output directory")
    p_sim.set_defaults(func=cmd_sim)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UnknownObjectError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN_OBJECT
    except DegenerateFusionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except MissingTruthError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING_TRUTH
    except BadParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except (GraspFusionError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT


if __name__ == "__main__":
    sys.exit(main())
