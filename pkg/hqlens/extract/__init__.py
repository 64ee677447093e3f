"""
Relevance judgement, unit extraction and sentiment scoring backends.
"""

from .backend import (
    BackendInfo,
    BackendMode,
    ExtractionBackend,
    ExtractionResult,
    extract,
    extract_many,
)
from .lexicon import SentimentLexicon, default_lexicon_path, load_lexicon, tokenize
from .llm_backend import LlmBackend, load_exemplars, sample_exemplars
from .llm_client import LlmClient, LlmReply, call_llm
from .predictions import PredictionFileBackend
from .prompts import Exemplar, PromptTask, build_prompt
from .response import extract_json_object, parse_llm_response
from .rule_based import (
    RuleBasedBackend,
    ScoreThresholds,
    raw_sentiment,
    rule_based_extract,
    split_sentences,
)

__all__ = [
    "BackendInfo",
    "BackendMode",
    "Exemplar",
    "ExtractionBackend",
    "ExtractionResult",
    "LlmBackend",
    "LlmClient",
    "LlmReply",
    "PredictionFileBackend",
    "PromptTask",
    "RuleBasedBackend",
    "ScoreThresholds",
    "SentimentLexicon",
    "build_prompt",
    "call_llm",
    "default_lexicon_path",
    "extract",
    "extract_json_object",
    "extract_many",
    "load_exemplars",
    "load_lexicon",
    "parse_llm_response",
    "raw_sentiment",
    "rule_based_extract",
    "sample_exemplars",
    "split_sentences",
    "tokenize",
]
