"""HTTP service wrapping the structuring, building and scoring pipelines.

Responses are plain dicts rendered with compact separators and raw UTF-8, so
a client re-serializing a record reproduces the command-line output byte for
byte.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..bench import format_table, run_benchmark
from ..core import (
    LabelSet,
    TaggedSequence,
    TaggingScheme,
    TokenSequence,
    UnknownLabel,
    parse_tag,
)
from ..corpus import DataError, InstanceRecord
from ..decode import EntitySpan, RepairPolicy, decode_entities
from ..genparse import parse_generation
from ..noise import NoiseConfig, corrupt
from ..pipeline import (
    ProcessOptions,
    build_normalizer,
    evaluate_corpora,
    process_records,
)
from ..schema import (
    EntityCentric,
    SamplerConfig,
    TokenByToken,
    build_instance,
    default_external_count,
    sample_label_set,
)
from .models import (
    BenchRequest,
    BuildRequest,
    CorruptRequest,
    EvaluateRequest,
    ProcessRequest,
    RecordIn,
)

_SCHEMES = {"bio": TaggingScheme.BIO, "bioes": TaggingScheme.BIOES}
_POLICIES = {
    "conservative": RepairPolicy.CONSERVATIVE,
    "strict": RepairPolicy.STRICT,
}


def _bad_request(message: str) -> HTTPException:
    return HTTPException(status_code=400, detail=message)


def _to_record(rec: RecordIn) -> InstanceRecord:
    return InstanceRecord(
        id=rec.id,
        tokens=list(rec.tokens),
        label_set=list(rec.label_set),
        generation=rec.generation,
        gold_tags=list(rec.gold_tags) if rec.gold_tags is not None else None,
    )


def _present_types(tag_strings: list[str]) -> list[str]:
    seen: dict[str, None] = {}
    for tag in tag_strings:
        if tag != "O" and len(tag) >= 3 and tag[1] == "-":
            seen.setdefault(tag[2:], None)
    return list(seen)


def _parse_gold(rec: RecordIn) -> tuple[TaggedSequence, LabelSet]:
    """Tagged sequence from a record's gold tags; tags may use either scheme."""
    if rec.gold_tags is None:
        raise DataError(f"record {rec.id}: missing gold_tags")
    if len(rec.gold_tags) != len(rec.tokens):
        raise DataError(f"record {rec.id}: gold_tags/tokens length mismatch")
    present = _present_types(rec.gold_tags)
    names = list(rec.label_set) if rec.label_set else present
    missing = [t for t in present if t not in names]
    if missing:
        raise DataError(f"record {rec.id}: types {missing} not in label_set")
    try:
        labels = LabelSet(names)
    except ValueError as exc:
        raise DataError(f"record {rec.id}: {exc}") from exc
    tags = []
    for i, raw in enumerate(rec.gold_tags):
        parsed = parse_tag(raw, labels, TaggingScheme.BIOES)
        if isinstance(parsed, UnknownLabel):
            raise DataError(f"record {rec.id}: bad tag {raw!r} at position {i}")
        tags.append(parsed)
    try:
        return TaggedSequence(rec.tokens, tags), labels
    except ValueError as exc:
        raise DataError(f"record {rec.id}: {exc}") from exc


def _record_seed(base: int, index: int) -> int:
    # distinct deterministic stream per record
    return (base * 2_654_435_761 + index) % (1 << 63)


def create_app() -> FastAPI:
    app = FastAPI(title="tagalign", version=__version__)

    @app.get("/v1/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/v1/process")
    def process(req: ProcessRequest) -> dict:
        try:
            normalizer = build_normalizer(
                req.options.normalizer.kind, req.options.normalizer.alphabet
            )
        except DataError as exc:
            raise _bad_request(str(exc))
        options = ProcessOptions(
            scheme=_SCHEMES[req.options.scheme],
            normalizer=normalizer,
            repair=_POLICIES[req.options.repair],
            jobs=req.options.jobs,
            gap_marker=req.options.gap_marker,
        )
        records = [_to_record(r) for r in req.records]
        return {"records": process_records(records, options)}

    @app.post("/v1/evaluate")
    def evaluate(req: EvaluateRequest) -> dict:
        scheme = _SCHEMES[req.scheme]

        def spans_of(side) -> list[EntitySpan]:
            if side.entities is not None:
                try:
                    return [
                        EntitySpan(s.start, s.end, s.type, s.text)
                        for s in side.entities
                    ]
                except ValueError as exc:
                    raise _bad_request(f"record {side.id}: {exc}")
            if side.tags is None:
                raise _bad_request(f"record {side.id}: needs entities or tags")
            tokens = side.tokens or [f"w{i}" for i in range(len(side.tags))]
            rec = RecordIn(id=side.id, tokens=tokens, gold_tags=side.tags)
            try:
                seq, _ = _parse_gold(rec)
            except DataError as exc:
                raise _bad_request(str(exc))
            return decode_entities(seq, scheme, RepairPolicy.CONSERVATIVE)

        gold_by_id = {side.id: side for side in req.gold}
        pred_by_id = {side.id: side for side in req.pred}
        if len(gold_by_id) != len(req.gold) or len(pred_by_id) != len(req.pred):
            raise _bad_request("duplicate record ids")
        missing_pred = sorted(set(gold_by_id) - set(pred_by_id))
        missing_gold = sorted(set(pred_by_id) - set(gold_by_id))
        if missing_pred or missing_gold:
            raise _bad_request(
                "id mismatch between corpora;"
                f" missing from pred: {missing_pred[:20]};"
                f" missing from gold: {missing_gold[:20]}"
            )
        gold_spans = [spans_of(side) for side in req.gold]
        pred_spans = [spans_of(pred_by_id[side.id]) for side in req.gold]
        return evaluate_corpora(gold_spans, pred_spans, per_type=req.per_type)

    @app.post("/v1/build")
    def build(req: BuildRequest) -> dict:
        cfg = req.config
        scheme = _SCHEMES[cfg.scheme]
        if cfg.variant == "entity":
            variant = EntityCentric(0)
        elif cfg.variant == "context":
            variant = EntityCentric(cfg.context_len)
        elif cfg.variant == "full":
            variant = EntityCentric(None)
        else:
            variant = TokenByToken(scheme)
        instances = []
        for index, rec in enumerate(req.records):
            try:
                seq, labels = _parse_gold(rec)
                if cfg.shuffle_seed is not None:
                    present = LabelSet(_present_types(rec.gold_tags or []))
                    count = (
                        cfg.external_count
                        if cfg.external_count is not None
                        else default_external_count(len(present))
                    )
                    sampler = SamplerConfig(
                        shuffle_seed=_record_seed(cfg.shuffle_seed, index),
                        external_pool=labels,
                        external_count=count,
                    )
                    labels = sample_label_set(present, sampler)
                inst = build_instance(seq, labels, variant, cfg.gap_marker)
            except (DataError, ValueError) as exc:
                raise _bad_request(f"record {rec.id}: {exc}")
            instances.append(
                {
                    "id": rec.id,
                    "instruction": inst.instruction,
                    "input": inst.input_line,
                    "output": inst.target_line,
                }
            )
        return {"instances": instances}

    @app.post("/v1/corrupt")
    def corrupt_records(req: CorruptRequest) -> dict:
        out = []
        for index, rec in enumerate(req.records):
            try:
                seq, labels = _parse_gold(rec)
                noise = NoiseConfig(
                    p_omit=req.config.p_omit,
                    p_add=req.config.p_add,
                    p_sub=req.config.p_sub,
                    entity_safe=req.config.entity_safe,
                    seed=_record_seed(req.config.seed, index),
                )
                generation = corrupt(seq, noise)
            except (DataError, ValueError) as exc:
                raise _bad_request(f"record {rec.id}: {exc}")
            out.append(
                {
                    "id": rec.id,
                    "tokens": list(rec.tokens),
                    "label_set": list(labels),
                    "generation": generation,
                    "gold_tags": list(rec.gold_tags or []),
                }
            )
        return {"records": out}

    @app.post("/v1/bench")
    def bench(req: BenchRequest) -> dict:
        corpus = []
        for rec in req.records:
            if rec.generation is None:
                raise _bad_request(f"record {rec.id}: carries no generation")
            try:
                corpus.append(
                    (TokenSequence(rec.tokens), parse_generation(rec.generation))
                )
            except ValueError as exc:
                raise _bad_request(f"record {rec.id}: {exc}")
        try:
            report = run_benchmark(
                corpus,
                repetitions=req.repetitions,
                warmup=req.warmup,
                edges=tuple(req.edges),
            )
        except (ValueError, RuntimeError) as exc:
            raise _bad_request(str(exc))
        return {"report": report.to_dict(), "table": format_table(report)}

    return app


app = create_app()
