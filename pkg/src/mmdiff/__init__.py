"""Structural model diffing for Ecore-like and BPMN-like documents.

The package parses a small XML interchange subset into generic model trees,
computes element correspondences under configurable matching pipelines,
derives atomic edit scripts, applies them back for verification, and ships
a benchmark harness that runs a configuration matrix over built-in change
scenarios.
"""

from mmdiff.benchmark import (
    BenchmarkReport,
    Scenario,
    builtin_scenarios,
    default_matrix,
    export_scenarios,
    reference_matching,
    run_benchmark,
)
from mmdiff.diff import (
    EditOp,
    EditScript,
    apply_edit_script,
    derive_edit_script,
    diff_models,
    format_script,
)
from mmdiff.errors import (
    ContainmentViolation,
    DanglingEdge,
    DocumentError,
    EmptyGroup,
    EngineError,
    InconsistentMatching,
    InvariantViolation,
    IoFailure,
    MalformedDocument,
    MetatypeMismatch,
    MissingName,
    ModelDiffError,
    UnknownMetatype,
    UnresolvablePath,
)
from mmdiff.matching import (
    MatcherConfig,
    Matching,
    match_edges,
    match_full_scope,
    match_models,
    match_top_down,
    match_two_phase,
    score_pair,
)
from mmdiff.model import (
    Edge,
    Element,
    Metatype,
    Model,
    PathStep,
    canonicalize,
    format_path,
    models_equivalent,
    parse_model,
    resolve_name_path,
    serialize_model,
)
from mmdiff.similarity import (
    SynonymDictionary,
    bigram_sim,
    default_synonyms,
    exact_sim,
    lcs_sim,
    load_synonyms,
    semantic_sim,
    tokenize,
)

__all__ = [
    "BenchmarkReport",
    "ContainmentViolation",
    "DanglingEdge",
    "DocumentError",
    "Edge",
    "EditOp",
    "EditScript",
    "Element",
    "EmptyGroup",
    "EngineError",
    "InconsistentMatching",
    "InvariantViolation",
    "IoFailure",
    "MalformedDocument",
    "MatcherConfig",
    "Matching",
    "MetatypeMismatch",
    "Metatype",
    "MissingName",
    "Model",
    "ModelDiffError",
    "PathStep",
    "Scenario",
    "SynonymDictionary",
    "UnknownMetatype",
    "UnresolvablePath",
    "apply_edit_script",
    "bigram_sim",
    "builtin_scenarios",
    "canonicalize",
    "default_matrix",
    "default_synonyms",
    "derive_edit_script",
    "diff_models",
    "exact_sim",
    "export_scenarios",
    "format_path",
    "format_script",
    "lcs_sim",
    "load_synonyms",
    "match_edges",
    "match_full_scope",
    "match_models",
    "match_top_down",
    "match_two_phase",
    "models_equivalent",
    "parse_model",
    "reference_matching",
    "resolve_name_path",
    "run_benchmark",
    "score_pair",
    "semantic_sim",
    "serialize_model",
    "tokenize",
]
