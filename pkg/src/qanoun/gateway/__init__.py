from .endpoint import (
    ChatClient,
    HttpChatClient,
    InferenceEndpoint,
    ReplayClient,
    RetryPolicy,
    ScriptedClient,
)
from .judge import EntailmentVerdict, judge_entailment, judge_many, judge_prompt_version
from .parse import ParseNote, ParseOutcome, format_output, ground_answer, parse_output
from .prompts import (
    NO_QAS_SENTINEL,
    Exemplar,
    ExemplarQA,
    build_prompt,
    generation_instructions,
    mark_noun,
    prompt_hash,
)

__all__ = [
    "ChatClient",
    "HttpChatClient",
    "InferenceEndpoint",
    "ReplayClient",
    "RetryPolicy",
    "ScriptedClient",
    "EntailmentVerdict",
    "judge_entailment",
    "judge_many",
    "judge_prompt_version",
    "ParseNote",
    "ParseOutcome",
    "format_output",
    "ground_answer",
    "parse_output",
    "NO_QAS_SENTINEL",
    "Exemplar",
    "ExemplarQA",
    "build_prompt",
    "generation_instructions",
    "mark_noun",
    "prompt_hash",
]
