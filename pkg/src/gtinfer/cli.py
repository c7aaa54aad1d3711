"""Command-line interface.

JSON reports go to stdout (or ``-o``); diagnostics go to stderr. Exit
codes: 0 ok, 2 input error, 3 degenerate or infeasible data.

File formats
------------
votes CSV        header ``c1,...,cn[,truth]``; one label symbol per cell
                 (default ``0`` = alpha, ``1`` = beta; see ``--labels``).
counts JSON      ``{"n": 3, "total": M, "counts": {"aab": 12, ...},
                 "by_truth": {"a": {...}, "b": {...}}}``; absent patterns are
                 zero; counters are integers or ``"p/q"`` strings.
stats JSON       prevalence, per-classifier accuracies and error moments keyed
                 ``"a:1,2"`` (label, 1-based classifier subset); every number is
                 ``{"fraction": "p/q", "decimal": x}`` or ``{"decimal": x}``.
predictions CSV  header ``r1,...,rn[,truth]``; one real number per cell.
scatter CSV      ``classifier,label,trio,truth_accuracy,recovered_accuracy``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .errors import DegenerateError, InputError
from .fixtures import display_tolerance, get_fixture, FIXTURES
from .forward import expected_counts, label_frequencies
from .independence import (
    consistency_vs_correlation,
    detect_trio,
    four_trio_consistency,
    trios_of,
)
from .regressors import (
    consistency_constraints,
    error_covariance_truth,
    mixed_moment_test,
    pairwise_matrix,
    parse_predictions,
    solve_trio_regressors,
)
from .serialize import (
    consistency_to_json,
    counts_from_json,
    counts_to_json,
    detection_to_json,
    estimate_to_json,
    num,
    parse_num,
    stats_from_json,
    stats_to_json,
    summary_to_json,
)
from .simulate import (
    sample_from_pattern_distributions,
    sample_independent_classifiers,
    sample_regressor_panel,
)
from .tally import DEFAULT_LABEL_MAP, LABELS, parse_label_map, parse_votes, project_subset, tally_counts
from .trio import BRANCH_POLICIES, FEASIBILITY_TOL, TrioEstimate, select_branch, solve_trio
from .truth_stats import stats_from_truth_counts, summarize_pairwise

log = logging.getLogger("gtinfer")

EXIT_OK, EXIT_INPUT, EXIT_DEGENERATE = 0, 2, 3


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _read_json(path: str):
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _emit(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=2) + "\n"
    if out and out != "-":
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _indices(spec: str, n: int, k: int | None = None) -> tuple[int, ...]:
    try:
        idx = tuple(int(s) - 1 for s in spec.split(","))
    except ValueError:
        raise InputError(f"bad index list {spec!r}; expected e.g. 1,2,3") from None
    if k is not None and len(idx) != k:
        raise InputError(f"expected {k} indices, got {spec!r}")
    if len(set(idx)) != len(idx) or any(not 0 <= i < n for i in idx):
        raise InputError(f"indices {spec!r} must be distinct and within 1..{n}")
    return idx


def _scatter_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, ["classifier", "label", "trio", "truth_accuracy", "recovered_accuracy"],
                       lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


# -- commands ---------------------------------------------------------------

def cmd_tally(args) -> int:
    labels = parse_label_map(args.labels) if args.labels else DEFAULT_LABEL_MAP
    votes = parse_votes(_read_text(args.votes), args.truth_col, labels)
    _emit(counts_to_json(tally_counts(votes)), args.output)
    return EXIT_OK


def cmd_stats(args) -> int:
    counts = counts_from_json(_read_json(args.counts))
    stats = stats_from_truth_counts(counts, args.max_order)
    _emit(stats_to_json(stats, args.ddof), args.output)
    return EXIT_OK


def cmd_forward(args) -> int:
    stats = stats_from_json(_read_json(args.stats), fill_zero=args.zero_missing)
    total = None if args.total is None else Fraction(args.total)
    _emit(counts_to_json(expected_counts(stats, total)), args.output)
    return EXIT_OK


def _solution_json(branches: tuple[TrioEstimate, TrioEstimate], trio, counts, policy, exact) -> dict:
    from .trio import residuals

    out = {
        "trio": [i + 1 for i in trio],
        "mode": "exact" if exact else "float",
        "branches": [],
    }
    for b in branches:
        j = estimate_to_json(b)
        j["residuals"] = {p: num(v) for p, v in residuals(b, counts).items()}
        out["branches"].append(j)
    try:
        chosen = select_branch(branches, policy)
        out["selected"] = branches.index(chosen)
    except DegenerateError as exc:
        out["selected"] = None
        out["selection_error"] = str(exc)
    return out


def cmd_solve(args) -> int:
    counts = counts_from_json(_read_json(args.counts)).without_truth()
    if args.trio:
        trio = _indices(args.trio, counts.n, 3)
    elif counts.n == 3:
        trio = (0, 1, 2)
    else:
        raise InputError(f"counts have n={counts.n}; pick three classifiers with --trio")
    sub = project_subset(counts, trio)
    branches = solve_trio(sub, exact=args.exact, tol=args.tol)
    _emit(_solution_json(branches, trio, sub, args.branch_policy, args.exact), args.output)
    return EXIT_OK


def cmd_detect(args) -> int:
    counts = counts_from_json(_read_json(args.counts)).without_truth()
    if args.trio:
        trios = [_indices(args.trio, counts.n, 3)]
    elif counts.n == 3:
        trios = [(0, 1, 2)]
    else:
        trios = trios_of(counts.n)
    reports = []
    for trio in trios:
        rep = detection_to_json(detect_trio(project_subset(counts, trio)))
        rep["trio"] = [i + 1 for i in trio]
        reports.append(rep)
    verdicts = {r["verdict"] for r in reports}
    _emit({"reports": reports, "verdicts": sorted(verdicts)}, args.output)
    if verdicts == {"degenerate"}:
        return EXIT_DEGENERATE
    return EXIT_OK


def _truth_stats(counts, truth_path):
    if truth_path:
        truth = counts_from_json(_read_json(truth_path))
        return stats_from_truth_counts(truth)
    if counts.by_truth is not None:
        return stats_from_truth_counts(counts)
    return None


def cmd_consistency(args) -> int:
    counts = counts_from_json(_read_json(args.counts))
    report = four_trio_consistency(counts.without_truth(), exact=args.exact)
    out = consistency_to_json(report)
    stats = _truth_stats(counts, args.truth_counts)
    if stats is not None:
        rows = report.scatter_rows(stats)
        out["vs_correlation"] = {lab: {"mean_spread": num(s), "mean_abs_pairwise_moment": num(g)}
                                 for lab, (s, g) in consistency_vs_correlation(report, stats).items()}
        if args.scatter:
            Path(args.scatter).write_text(_scatter_csv(rows))
        out["scatter_rows"] = len(rows)
    _emit(out, args.output)
    return EXIT_OK


def evaluate_fixture(name: str) -> dict:
    """Full experiment report for an embedded fixture."""
    fx = get_fixture(name)
    counts = fx.counts()
    stats = stats_from_truth_counts(counts)
    summary = summarize_pairwise(stats)
    checks = []
    for label, got, printed in zip(
            ("mean_a", "std_a", "mean_b", "std_b"), summary.as_tuple(), fx.expected_summary):
        tol = display_tolerance(printed)
        checks.append({"quantity": label, "expected": printed, "computed": got,
                       "tolerance": tol, "pass": abs(got - float(printed)) <= tol})
    observed = counts.without_truth()
    report = four_trio_consistency(observed)
    detections = []
    for trio in trios_of(4):
        d = detection_to_json(detect_trio(project_subset(observed, trio)))
        d["trio"] = [i + 1 for i in trio]
        detections.append(d)
    m0, m1 = fx.raw_column_sums()
    return {
        "fixture": fx.name,
        "classifiers": list(fx.classifiers),
        "flip_votes": fx.flip_votes,
        "mass": {"label_0": m0, "label_1": m1, "total": m0 + m1},
        "stats": stats_to_json(stats),
        "correlation_summary": summary_to_json(summary),
        "summary_checks": checks,
        "summary_matches": all(c["pass"] for c in checks),
        "consistency": consistency_to_json(report),
        "vs_correlation": {lab: {"mean_spread": num(s), "mean_abs_pairwise_moment": num(g)}
                           for lab, (s, g) in consistency_vs_correlation(report, stats).items()},
        "scatter": report.scatter_rows(stats),
        "detection": detections,
    }


def cmd_eval_fixture(args) -> int:
    result = evaluate_fixture(args.name)
    if args.scatter:
        Path(args.scatter).write_text(_scatter_csv(result["scatter"]))
    for c in result["summary_checks"]:
        print(f"[{'PASS' if c['pass'] else 'FAIL'}] {args.name} {c['quantity']}: "
              f"{c['computed']:.7g} vs {c['expected']} (+-{c['tolerance']:g})", file=sys.stderr)
    _emit(result, args.output)
    return EXIT_OK


def cmd_regress(args) -> int:
    panel = parse_predictions(_read_text(args.preds), args.truth_col)
    out = {"n": panel.n, "size": panel.size, "regressors": list(panel.regressor_ids)}
    if args.trio:
        trio = _indices(args.trio, panel.n, 3)
        est = solve_trio_regressors(panel, trio)
        out["trio"] = [i + 1 for i in trio]
        out["diag"] = list(est.diag)
        out["negative"] = list(est.negative)
        out["feasible"] = est.feasible
    elif args.consistency:
        if args.quad:
            quads = [_indices(args.quad, panel.n, 4)]
        else:
            rep = mixed_moment_test(panel, args.threshold)
            out["threshold"] = rep.threshold
            out["max_normalized"] = rep.max_normalized
            out["consistency_possible"] = rep.consistency_possible
            out["entries"] = [{"quad": [i + 1 for i in e["quad"]],
                               "pairing": [[a + 1, b + 1] for a, b in e["pairing"]],
                               "moment": e["moment"], "normalized": e["normalized"]}
                              for e in rep.entries]
            quads = []
        if quads:
            out["constraints"] = [
                {"pairing": [[a + 1, b + 1], [c + 1, d + 1]], "moment": v}
                for ((a, b), (c, d)), v in consistency_constraints(panel, quads[0]).items()
            ]
    else:
        raise InputError("regress needs --trio i,j,k or --consistency")
    out["pairwise"] = pairwise_matrix(panel).tolist()
    if panel.truth is not None:
        raw, centered = error_covariance_truth(panel)
        out["truth_error_covariance"] = {"raw": raw.tolist(), "demeaned": centered.tolist()}
    _emit(out, args.output)
    return EXIT_OK


def _classifier_simulation(params: dict, seed: int):
    try:
        prevalence = parse_num(params["prevalence"])
        acc_alpha = [parse_num(x) for x in params["acc_alpha"]]
        acc_beta = [parse_num(x) for x in params["acc_beta"]]
        size = int(params["size"])
    except KeyError as exc:
        raise InputError(f"classifier params need {exc}") from None
    if len(acc_alpha) != len(acc_beta):
        raise InputError("acc_alpha and acc_beta differ in length")
    for v in (prevalence, *acc_alpha, *acc_beta):
        if not 0 <= v <= 1:
            raise InputError(f"parameter {v} outside [0, 1]")
    if size < 0:
        raise InputError("size must be non-negative")
    if not params.get("moments"):
        return sample_independent_classifiers(prevalence, acc_alpha, acc_beta, size, seed)
    stats = stats_from_json({
        "n": len(acc_alpha),
        "prevalence": params["prevalence"],
        "accuracy": [{"classifier": i + 1, "a": a, "b": b}
                     for i, (a, b) in enumerate(zip(params["acc_alpha"], params["acc_beta"]))],
        "moments": params["moments"],
    }, fill_zero=True)
    expected_counts(stats)  # feasibility check
    dists = {lab: label_frequencies(stats, lab) for lab in LABELS}
    return sample_from_pattern_distributions(dists, stats.prevalence, size, seed)


def cmd_simulate(args) -> int:
    params = _read_json(args.params)
    if not isinstance(params, dict):
        raise InputError("params file must hold a JSON object")
    if args.kind == "classifier":
        text = _classifier_simulation(params, args.seed).to_csv()
    else:
        try:
            cov = np.array(params["cov"], dtype=float)
            size = int(params["size"])
        except (KeyError, ValueError, TypeError) as exc:
            raise InputError(f"regressor params need 'cov' and 'size': {exc}") from None
        panel = sample_regressor_panel(cov, size, args.seed, params.get("truth"),
                                       bool(params.get("orthogonal", False)))
        text = panel.to_csv()
    if args.output and args.output != "-":
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="gtinfer",
        description="Ground-truth-free evaluation and independence tests for classifier "
                    "and regressor ensembles.",
        epilog=__doc__.split("File formats", 1)[1],
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_, description=help_)
        sp.set_defaults(func=func)
        sp.add_argument("-o", "--output", help="write JSON here instead of stdout")
        return sp

    sp = add("tally", cmd_tally, "tally a votes CSV into counts JSON")
    sp.add_argument("--votes", required=True, help="votes CSV ('-' for stdin)")
    sp.add_argument("--truth-col", help="name of the truth column")
    sp.add_argument("--labels", help="symbol mapping, default 0=a,1=b")

    sp = add("stats", cmd_stats, "ground-truth statistics from by-truth counts JSON")
    sp.add_argument("--counts", required=True)
    sp.add_argument("--max-order", type=int, help="highest error-moment order (default n)")
    sp.add_argument("--ddof", type=int, default=1, choices=(0, 1),
                    help="std normalization of the pairwise summary (1 = sample)")

    sp = add("forward", cmd_forward, "expected counts from stats JSON")
    sp.add_argument("--stats", required=True)
    sp.add_argument("--total", help="item count M; omit for frequencies")
    sp.add_argument("--zero-missing", action="store_true", help="treat unlisted moments as zero")

    sp = add("solve", cmd_solve, "solve the independent three-classifier system")
    sp.add_argument("--counts", required=True)
    sp.add_argument("--trio", help="1-based classifier indices, e.g. 1,2,4")
    sp.add_argument("--exact", action="store_true", help="rational arithmetic")
    sp.add_argument("--branch-policy", default="mean-acc", choices=sorted(BRANCH_POLICIES))
    sp.add_argument("--tol", type=float, default=FEASIBILITY_TOL, help="feasibility margin")

    sp = add("detect", cmd_detect, "exact non-independence detector (every trio when n > 3)")
    sp.add_argument("--counts", required=True)
    sp.add_argument("--trio")

    sp = add("consistency", cmd_consistency, "four-trio consistency test for n=4 counts")
    sp.add_argument("--counts", required=True)
    sp.add_argument("--truth-counts", help="by-truth counts for truth-vs-recovered comparison")
    sp.add_argument("--scatter", help="write the scatter CSV here")
    sp.add_argument("--exact", action="store_true")

    sp = add("eval-fixture", cmd_eval_fixture, "reproduce an embedded experiment")
    sp.add_argument("--name", required=True, help=f"one of {', '.join(sorted(FIXTURES))}")
    sp.add_argument("--scatter", help="write the scatter CSV here")

    sp = add("regress", cmd_regress, "regressor error-covariance report")
    sp.add_argument("--preds", required=True, help="predictions CSV")
    sp.add_argument("--truth-col")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--trio", help="1-based regressor indices")
    g.add_argument("--consistency", action="store_true", help="pairing-moment test")
    sp.add_argument("--quad", help="restrict --consistency to one 4-subset")
    sp.add_argument("--threshold", type=float, help="normalized-moment threshold (default 5/sqrt(M))")

    sp = add("simulate", cmd_simulate, "seeded synthetic votes or predictions CSV")
    sp.add_argument("kind", choices=("classifier", "regressor"))
    sp.add_argument("--params", required=True, help="parameter JSON")
    sp.add_argument("--seed", type=int, required=True)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    logging.captureWarnings(True)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DegenerateError as exc:
        print(f"degenerate: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
