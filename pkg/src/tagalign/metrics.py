"""Strict entity-level micro-F1 and the unlabeled/noisy/boundary error split."""

from __future__ import annotations

from dataclasses import dataclass, field

from .decode import EntitySpan


@dataclass(frozen=True)
class ErrorCounts:
    """Per-sentence classification of gold entities against predictions."""

    ue: int = 0  # entity missed entirely (no overlapping prediction)
    ne: int = 0  # overlapped only by predictions of another type
    be: int = 0  # right type, wrong extent
    correct: int = 0

    def __add__(self, other: "ErrorCounts") -> "ErrorCounts":
        return ErrorCounts(
            self.ue + other.ue,
            self.ne + other.ne,
            self.be + other.be,
            self.correct + other.correct,
        )


@dataclass(frozen=True)
class TypeScore:
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class EvalReport:
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float
    ue: int
    ne: int
    be: int
    ue_rate: float
    ne_rate: float
    be_rate: float
    per_type: dict[str, TypeScore] | None = field(default=None)

    def to_dict(self) -> dict:
        d = {
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "ue": self.ue,
            "ne": self.ne,
            "be": self.be,
            "ue_rate": self.ue_rate,
            "ne_rate": self.ne_rate,
            "be_rate": self.be_rate,
        }
        if self.per_type is not None:
            d["per_type"] = {
                name: {
                    "tp": s.tp,
                    "fp": s.fp,
                    "fn": s.fn,
                    "precision": s.precision,
                    "recall": s.recall,
                    "f1": s.f1,
                }
                for name, s in sorted(self.per_type.items())
            }
        return d


def _prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = (
        2 * precision * recall / (precision + recall)
        if precision + recall
        else 0.0
    )
    return precision, recall, f1


def classify_errors(
    gold: list[EntitySpan], pred: list[EntitySpan]
) -> ErrorCounts:
    """Classify each gold span with the first matching rule.

    Exact (start, end, type) match wins; then a same-type prediction sharing
    at least one token index is a boundary error; then any overlapping
    prediction of another type is a noisy error; an untouched gold span is
    an unlabeled error.  The priority makes the four categories a partition
    of the gold spans.
    """
    pred_keys = {p.key() for p in pred}
    ue = ne = be = correct = 0
    for g in gold:
        if g.key() in pred_keys:
            correct += 1
            continue
        overlapping = [p for p in pred if p.start < g.end and g.start < p.end]
        if any(p.type == g.type for p in overlapping):
            be += 1
        elif overlapping:
            ne += 1
        else:
            ue += 1
    return ErrorCounts(ue, ne, be, correct)


def micro_prf(
    gold: list[list[EntitySpan]],
    pred: list[list[EntitySpan]],
    per_type: bool = False,
) -> EvalReport:
    """Micro-averaged precision/recall/F1 over parallel corpora.

    A predicted span is a true positive iff a gold span of the same sentence
    has identical (start, end, type); each gold span matches at most once.
    Error counts and rates are reported as fractions of gold entities.
    """
    if len(gold) != len(pred):
        raise ValueError(
            f"corpus length mismatch: {len(gold)} gold vs {len(pred)} predicted"
        )
    tp = fp = fn = 0
    errors = ErrorCounts()
    type_counts: dict[str, list[int]] = {}
    for gold_spans, pred_spans in zip(gold, pred):
        gold_keys = {g.key() for g in gold_spans}
        pred_keys = {p.key() for p in pred_spans}
        hit = len(gold_keys & pred_keys)
        tp += hit
        fp += len(pred_keys) - hit
        fn += len(gold_keys) - hit
        errors = errors + classify_errors(gold_spans, pred_spans)
        if per_type:
            for key in gold_keys | pred_keys:
                counts = type_counts.setdefault(key[2], [0, 0, 0])
                in_gold = key in gold_keys
                in_pred = key in pred_keys
                if in_gold and in_pred:
                    counts[0] += 1
                elif in_pred:
                    counts[1] += 1
                else:
                    counts[2] += 1

    precision, recall, f1 = _prf(tp, fp, fn)
    n_gold = tp + fn
    by_type = None
    if per_type:
        by_type = {}
        for name, (ttp, tfp, tfn) in type_counts.items():
            p, r, f = _prf(ttp, tfp, tfn)
            by_type[name] = TypeScore(ttp, tfp, tfn, p, r, f)
    return EvalReport(
        tp=tp,
        fp=fp,
        fn=fn,
        precision=precision,
        recall=recall,
        f1=f1,
        ue=errors.ue,
        ne=errors.ne,
        be=errors.be,
        ue_rate=errors.ue / n_gold if n_gold else 0.0,
        ne_rate=errors.ne / n_gold if n_gold else 0.0,
        be_rate=errors.be / n_gold if n_gold else 0.0,
        per_type=by_type,
    )
