"""JSON encodings shared by the CLI.

Exact numbers are written as ``{"fraction": "p/q", "decimal": x}`` with the
decimal rounded to six significant digits; inexact ones as
``{"decimal": x}``. Readers take the fraction when present, so exact values
survive a round trip. Counters are JSON integers, or ``"p/q"`` strings for
rational expected counts. Classifier indices are 1-based in every file.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import InputError
from .independence import ConsistencyReport, DetectionReport
from .tally import LABELS, DecisionCounts
from .trio import TrioEstimate
from .truth_stats import CorrelationSummary, EnsembleStats, subsets, summarize_pairwise

SIG_DIGITS = 6


def round_sig(x: float, digits: int = SIG_DIGITS) -> float:
    if x == 0 or not math.isfinite(x):
        return x
    return round(x, digits - 1 - int(math.floor(math.log10(abs(x)))))


def num(x, digits: int = SIG_DIGITS) -> dict:
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        x = Fraction(x)
        return {"fraction": str(x), "decimal": round_sig(float(x), digits)}
    return {"decimal": round_sig(float(x), digits)}


def parse_num(obj):
    """Inverse of ``num``; also accepts bare ints, floats and "p/q" strings."""
    if isinstance(obj, dict):
        if "fraction" in obj:
            return Fraction(obj["fraction"])
        if "decimal" in obj:
            return float(obj["decimal"])
        raise InputError(f"number object needs 'fraction' or 'decimal': {obj}")
    if isinstance(obj, bool):
        raise InputError(f"not a number: {obj!r}")
    if isinstance(obj, int):
        return Fraction(obj)
    if isinstance(obj, float):
        return obj
    if isinstance(obj, str):
        try:
            return Fraction(obj)
        except ValueError:
            raise InputError(f"not a rational: {obj!r}") from None
    raise InputError(f"not a number: {obj!r}")


def _counter_out(v):
    if isinstance(v, int) or (isinstance(v, Fraction) and v.denominator == 1):
        return int(v)
    return str(v)


def _counter_in(v):
    if isinstance(v, bool):
        raise InputError(f"bad counter {v!r}")
    if isinstance(v, int):
        return v
    if isinstance(v, str):
        try:
            f = Fraction(v)
        except ValueError:
            raise InputError(f"bad counter {v!r}") from None
        return int(f) if f.denominator == 1 else f
    raise InputError(f"counters must be integers or 'p/q' strings, got {v!r}")


def counts_to_json(counts: DecisionCounts) -> dict:
    out = {
        "n": counts.n,
        "total": _counter_out(counts.total),
        "counts": {p: _counter_out(v) for p, v in counts.counts.items()},
    }
    if counts.by_truth is not None:
        out["by_truth"] = {lab: {p: _counter_out(v) for p, v in counts.by_truth[lab].items()}
                           for lab in LABELS}
    return out


def counts_from_json(obj: dict) -> DecisionCounts:
    try:
        n = int(obj["n"])
    except (KeyError, TypeError, ValueError):
        raise InputError("counts JSON needs an integer 'n'") from None
    counts = {p: _counter_in(v) for p, v in obj.get("counts", {}).items()}
    bt = obj.get("by_truth")
    if bt is not None:
        bt = {lab: {p: _counter_in(v) for p, v in bt.get(lab, {}).items()} for lab in LABELS}
        if not counts:
            out = DecisionCounts.from_by_truth(n, bt)
        else:
            out = DecisionCounts(n, counts, bt)
    else:
        out = DecisionCounts(n, counts)
    if "total" in obj and _counter_in(obj["total"]) != out.total:
        raise InputError(f"'total' {obj['total']} disagrees with the counters' sum {out.total}")
    return out


def moment_key(label: str, subset) -> str:
    return f"{label}:" + ",".join(str(i + 1) for i in subset)


def parse_moment_key(key: str, n: int):
    try:
        label, rest = key.split(":")
        subset = tuple(sorted(int(i) - 1 for i in rest.split(",")))
    except ValueError:
        raise InputError(f"bad moment key {key!r}; expected like 'a:1,2'") from None
    if label not in LABELS or any(not 0 <= i < n for i in subset):
        raise InputError(f"bad moment key {key!r} for n={n}")
    return label, subset


def summary_to_json(summary: CorrelationSummary) -> dict:
    return {
        "pairs": summary.pairs,
        "ddof": summary.ddof,
        "a": {"mean": num(summary.mean_alpha), "std": num(summary.std_alpha)},
        "b": {"mean": num(summary.mean_beta), "std": num(summary.std_beta)},
    }


def stats_to_json(stats: EnsembleStats, ddof: int = 1) -> dict:
    out = {
        "n": stats.n,
        "prevalence": num(stats.prevalence),
        "accuracy": [{"classifier": i + 1, "a": num(a), "b": num(b)}
                     for i, (a, b) in enumerate(zip(stats.acc_alpha, stats.acc_beta))],
        "moments": {moment_key(lab, s): num(g) for (lab, s), g in sorted(
            stats.moments.items(), key=lambda kv: (kv[0][0], len(kv[0][1]), kv[0][1]))},
    }
    if stats.n >= 2 and all((lab, s) in stats.moments for lab in LABELS for s in subsets(stats.n, 2, 2)):
        out["pairwise_summary"] = summary_to_json(summarize_pairwise(stats, ddof))
    return out


def stats_from_json(obj: dict, fill_zero: bool = False) -> EnsembleStats:
    """Read stats JSON. With ``fill_zero`` every unlisted moment is zero."""
    try:
        n = int(obj["n"])
        prevalence = parse_num(obj["prevalence"])
        acc = sorted(obj["accuracy"], key=lambda r: r["classifier"])
        acc_alpha = [parse_num(r["a"]) for r in acc]
        acc_beta = [parse_num(r["b"]) for r in acc]
    except (KeyError, TypeError) as exc:
        raise InputError(f"stats JSON missing field: {exc}") from None
    moments = {}
    if fill_zero:
        moments = {(lab, s): Fraction(0) for lab in LABELS for s in subsets(n)}
    for key, val in obj.get("moments", {}).items():
        moments[parse_moment_key(key, n)] = parse_num(val)
    return EnsembleStats(n, prevalence, acc_alpha, acc_beta, moments)


def estimate_to_json(est: TrioEstimate, trio=None) -> dict:
    out = {
        "prevalence": num(est.prevalence),
        "acc_alpha": [num(x) for x in est.acc_alpha],
        "acc_beta": [num(x) for x in est.acc_beta],
        "residual": num(est.residual),
        "feasible": est.feasible,
        "exact": est.exact,
    }
    if trio is not None:
        out["trio"] = [i + 1 for i in trio]
    return out


def detection_to_json(rep: DetectionReport) -> dict:
    return {
        "verdict": rep.verdict,
        "evidence": rep.evidence,
        "discriminant": None if rep.discriminant is None else num(rep.discriminant),
        "phi_candidates": None if rep.phi_candidates is None else [num(x) for x in rep.phi_candidates],
        "accuracies_rational": rep.accuracies_rational,
        "detail": rep.detail,
    }


def consistency_to_json(rep: ConsistencyReport) -> dict:
    per = []
    for (i, lab), vals in sorted(rep.estimates.items()):
        per.append({
            "classifier": i + 1,
            "label": lab,
            "estimates": [{"trio": [k + 1 for k in rep.trios[t]], "value": num(v)} for t, v in vals],
            "spread": num(rep.spreads[(i, lab)]) if (i, lab) in rep.spreads else None,
        })
    return {
        "trios": [
            {
                "trio": [k + 1 for k in trio],
                "branch": rep.assignment[t],
                "estimate": None if rep.selected[t] is None else estimate_to_json(rep.selected[t]),
                "failure": rep.failures.get(t),
            }
            for t, trio in enumerate(rep.trios)
        ],
        "per_classifier": per,
        "mean_spread": {lab: num(rep.mean_spread(lab)) for lab in LABELS},
        "prevalence_estimates": [num(x) for x in rep.prevalence_estimates],
        "prevalence_spread": num(rep.prevalence_spread),
    }
