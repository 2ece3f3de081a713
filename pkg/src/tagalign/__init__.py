"""tagalign: structure token-by-token NER generations into entities.

The pipeline recovers (token, label) pairs from a raw generation, aligns
them one-to-one onto the original tokens through a hierarchical
longest-common-subsequence matcher, projects the labels back, and decodes
entity spans.  Companion modules build the token-tagged training instances
the approach consumes, corrupt them for robustness testing, score
predictions with strict entity-level micro-F1, and benchmark the aligners.
"""

__version__ = "0.1.0"

from .align import (
    Alignment,
    AlignStats,
    Chain,
    Identity,
    Normalizer,
    UnicodeFold,
    VocabFilter,
    align_hierarchical,
    lcs_dp_oracle,
    lcs_hunt_szymanski,
    normalize_token,
    project_labels,
)
from .core import (
    OUTSIDE,
    LabelSet,
    Tag,
    TaggedSequence,
    TaggingScheme,
    TokenSequence,
    UnknownLabel,
    check_transition,
    parse_tag,
    render_tag,
    split_tokens,
)
from .decode import EntitySpan, RepairPolicy, decode_entities, spans_to_tags
from .genparse import ParsedPrediction, parse_generation
from .metrics import ErrorCounts, EvalReport, classify_errors, micro_prf
from .noise import NoiseConfig, corrupt
from .pipeline import ProcessOptions, process_record, process_records
from .schema import (
    EntityCentric,
    PromptInstance,
    SamplerConfig,
    TokenByToken,
    build_instance,
    build_instruction,
    build_target,
    sample_label_set,
)

__all__ = [
    "__version__",
    "Alignment",
    "AlignStats",
    "Chain",
    "Identity",
    "Normalizer",
    "UnicodeFold",
    "VocabFilter",
    "align_hierarchical",
    "lcs_dp_oracle",
    "lcs_hunt_szymanski",
    "normalize_token",
    "project_labels",
    "OUTSIDE",
    "LabelSet",
    "Tag",
    "TaggedSequence",
    "TaggingScheme",
    "TokenSequence",
    "UnknownLabel",
    "check_transition",
    "parse_tag",
    "render_tag",
    "split_tokens",
    "EntitySpan",
    "RepairPolicy",
    "decode_entities",
    "spans_to_tags",
    "ParsedPrediction",
    "parse_generation",
    "ErrorCounts",
    "EvalReport",
    "classify_errors",
    "micro_prf",
    "NoiseConfig",
    "corrupt",
    "ProcessOptions",
    "process_record",
    "process_records",
    "EntityCentric",
    "PromptInstance",
    "SamplerConfig",
    "TokenByToken",
    "build_instance",
    "build_instruction",
    "build_target",
    "sample_label_set",
]
