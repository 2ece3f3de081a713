"""Request schemas for the HTTP service."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field


class NormalizerSpec(BaseModel):
    kind: Literal["identity", "unicode", "vocab", "unicode+vocab"] = "identity"
    alphabet: str | None = None


class ProcessOptionsIn(BaseModel):
    scheme: Literal["bio", "bioes"] = "bio"
    normalizer: NormalizerSpec = Field(default_factory=NormalizerSpec)
    repair: Literal["conservative", "strict"] = "conservative"
    jobs: int = Field(default=1, ge=1, le=64)
    gap_marker: str | None = None


class RecordIn(BaseModel):
    id: str
    tokens: list[str]
    label_set: list[str] = Field(default_factory=list)
    generation: str | None = None
    gold_tags: list[str] | None = None


class ProcessRequest(BaseModel):
    records: list[RecordIn]
    options: ProcessOptionsIn = Field(default_factory=ProcessOptionsIn)


class SpanIn(BaseModel):
    start: int = Field(ge=0)
    end: int
    type: str
    text: str = ""


class EvalSide(BaseModel):
    """One sentence on one side of an evaluation: spans, or tags to decode."""

    id: str
    entities: list[SpanIn] | None = None
    tags: list[str] | None = None
    tokens: list[str] | None = None


class EvaluateRequest(BaseModel):
    gold: list[EvalSide]
    pred: list[EvalSide]
    per_type: bool = False
    scheme: Literal["bio", "bioes"] = "bio"


class BuildConfig(BaseModel):
    variant: Literal["entity", "context", "full", "token"] = "token"
    context_len: int = Field(default=1, ge=0)
    scheme: Literal["bio", "bioes"] = "bio"
    gap_marker: str = "..."
    shuffle_seed: int | None = None
    external_count: int | None = Field(default=None, ge=0)


class BuildRequest(BaseModel):
    records: list[RecordIn]
    config: BuildConfig = Field(default_factory=BuildConfig)


class NoiseConfigIn(BaseModel):
    p_omit: float = Field(default=0.0, ge=0.0, le=1.0)
    p_add: float = Field(default=0.0, ge=0.0, le=1.0)
    p_sub: float = Field(default=0.0, ge=0.0, le=1.0)
    entity_safe: bool = False
    seed: int = 0


class CorruptRequest(BaseModel):
    records: list[RecordIn]
    config: NoiseConfigIn = Field(default_factory=NoiseConfigIn)


class BenchRequest(BaseModel):
    records: list[RecordIn]
    repetitions: int = Field(default=5, ge=1)
    warmup: int = Field(default=2, ge=0)
    edges: list[int] = Field(default_factory=lambda: [0, 60, 100, 200])
