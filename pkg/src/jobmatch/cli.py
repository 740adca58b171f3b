"""Command-line entry points: generate, train, batch, audit, serve."""

from __future__ import annotations

import argparse
import os
import sys

from .batch import batch_match, read_batch_csv, write_batch_csv
from .fairness import check_alert, parity_report
from .ingest import parse_candidates_csv, parse_companies_csv, write_candidates_csv, write_companies_csv
from .learning import (
    ForestParams,
    apply_calibrator_batch,
    fit_isotonic,
    pairs_to_arrays,
    predict_proba_batch,
    random_search,
    save_model,
    train_forest,
)
from .scoring import ScoringConfig, load_config
from .text_it import fit_tfidf


def _load_cfg(path: str | None) -> ScoringConfig:
    return load_config(path) if path else ScoringConfig()


def _fit_corpus(candidates, companies):
    return fit_tfidf([c.tasks_text for c in companies] + [c.skills_text for c in candidates])


def cmd_generate(args) -> int:
    from .synthetic import GenParams, gen_candidates, gen_companies, gen_labeled_pairs, write_pairs_csv

    params = GenParams(n_candidates=args.candidates, n_companies=args.companies, seed=args.seed, noise=args.noise)
    cands = gen_candidates(params)
    comps = gen_companies(params)
    os.makedirs(args.outdir, exist_ok=True)
    write_candidates_csv(cands, os.path.join(args.outdir, "candidates.csv"))
    write_companies_csv(comps, os.path.join(args.outdir, "companies.csv"))
    print(f"wrote {len(cands)} candidates, {len(comps)} companies to {args.outdir}")
    if args.pairs:
        cfg = _load_cfg(args.config)
        tfidf = _fit_corpus(cands, comps)
        pairs = gen_labeled_pairs(cands, comps, params, tfidf, cfg)
        write_pairs_csv(pairs, os.path.join(args.outdir, "pairs.csv"))
        positives = sum(p.label for p in pairs)
        print(f"wrote {len(pairs)} labeled pairs ({positives} positive)")
    return 0


def cmd_train(args) -> int:
    from .synthetic import load_pairs_csv

    pairs = load_pairs_csv(args.pairs)
    if args.search:
        params, report = random_search(pairs, budget=args.search, seed=args.seed, workers=args.workers)
        print(f"search best: {params} (validation f1 {report.f1:.3f})")
    else:
        params = ForestParams(n_trees=args.trees, max_depth=args.depth, min_samples_leaf=args.min_leaf)

    # hold out 20% for calibration so the isotonic fit sees unbiased scores
    cut = int(len(pairs) * 0.8)
    forest = train_forest(pairs[:cut], params, seed=args.seed, workers=args.workers)
    hold_X, hold_y = pairs_to_arrays(pairs[cut:])
    calibrator = None
    if len(hold_y) > 0 and hold_y.min() != hold_y.max():
        raw = predict_proba_batch(forest, hold_X)
        calibrator = fit_isotonic(raw, hold_y)
        from .learning import evaluate

        report = evaluate(apply_calibrator_batch(calibrator, raw), hold_y)
        auc = "n/a" if report.roc_auc is None else f"{report.roc_auc:.3f}"
        print(f"holdout: f1 {report.f1:.3f}, roc_auc {auc}")
    save_model(args.out, forest, calibrator)
    print(f"saved model to {args.out}")
    return 0


def cmd_batch(args) -> int:
    cands, cand_report = parse_candidates_csv(args.candidates)
    comps, comp_report = parse_companies_csv(args.companies)
    for lineno, fieldname, reason in cand_report.rejected + comp_report.rejected:
        print(f"rejected row at line {lineno} ({fieldname}): {reason}", file=sys.stderr)
    cfg = _load_cfg(args.config)
    tfidf = _fit_corpus(cands, comps)
    report = batch_match(cands, comps, tfidf, cfg, k=args.top_k, workers=args.workers)
    write_batch_csv(report, args.out)
    print(
        f"scored {report.pair_count} pairs in {report.elapsed:.2f}s "
        f"with {report.worker_count} workers -> {args.out}"
    )
    return 0


def cmd_audit(args) -> int:
    results = read_batch_csv(args.results)
    cands, _ = parse_candidates_csv(args.candidates)
    report = parity_report(results, cands, group_key=args.group_key)
    print(f"parity by {args.group_key} (disparity {report.disparity:.3f}):")
    for group in report.groups:
        gr = report.group_rates[group]
        print(f"  {group}: {gr.recommended_count}/{gr.total_count} recommended (rate {gr.rate:.3f})")
    alerts = check_alert(report, max_disparity=args.max_disparity)
    for alert in alerts:
        print(f"ALERT: {alert.message}")
    if args.out:
        import csv

        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["group", "recommended_count", "total_count", "rate"])
            for group in report.groups:
                gr = report.group_rates[group]
                writer.writerow([group, gr.recommended_count, gr.total_count, repr(gr.rate)])
        print(f"wrote report to {args.out}")
    return 1 if alerts else 0


def cmd_serve(args) -> int:
    import uvicorn

    from .learning import load_model
    from .service import build_state, create_app

    cands, _ = parse_candidates_csv(args.candidates)
    comps, _ = parse_companies_csv(args.companies)
    model = calibrator = None
    if args.model:
        model, calibrator = load_model(args.model)
    state = build_state(
        candidates=cands,
        companies=comps,
        config=_load_cfg(args.config),
        audit_path=args.audit_log,
        model=model,
        calibrator=calibrator,
    )
    app = create_app(state)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jobmatch", description="Matching engine for targeted job placement")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate synthetic candidates/companies (and labeled pairs)")
    p.add_argument("--candidates", type=int, required=True)
    p.add_argument("--companies", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--outdir", default=".")
    p.add_argument("--pairs", action="store_true", help="also emit labeled training pairs")
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("train", help="train the forest (optionally after random search) and calibrate")
    p.add_argument("--pairs", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--trees", type=int, default=100)
    p.add_argument("--depth", type=int, default=12)
    p.add_argument("--min-leaf", type=int, default=5)
    p.add_argument("--search", type=int, default=0, help="random-search budget (0 = use given params)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("batch", help="score a candidate x company grid and emit top-k CSV")
    p.add_argument("--candidates", required=True)
    p.add_argument("--companies", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--top-k", type=int, default=5)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("audit", help="statistical-parity report over a batch output")
    p.add_argument("--results", required=True)
    p.add_argument("--candidates", required=True)
    p.add_argument("--group-key", default="disability_type", choices=["disability_type", "education_level"])
    p.add_argument("--max-disparity", type=float, default=0.10)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("serve", help="run the matching service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--candidates", required=True)
    p.add_argument("--companies", required=True)
    p.add_argument("--model", default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--audit-log", default="audit.jsonl")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
