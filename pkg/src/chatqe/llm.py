"""LLM-based quality estimation with conversational context.

Prompts elicit MQM-style error annotations (not a single score) and include
the preceding bilingual source turns as context plus one in-context example.
Responses are parsed under a small grammar (Critical/Major/Minor blocks of
`category - "span"` lines or `no-error`) and converted to severity-weighted
scores. Endpoint calls go through an on-disk cache keyed by model, template,
and rendered prompt, with bounded parallelism and retries.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import requests

from .bridge import ScoreTable, SegmentKey
from .corpus import Conversation, Severity
from .errors import AuthenticationError, ContextError, LlmError
from .mqm import MqmScore, SeverityCounts, mqm_score

DEFAULT_CONTEXT_K = 8

_PLACEHOLDERS = ("source_lang", "target_lang", "context_block", "source", "translation", "in_context_example")


@dataclass(frozen=True)
class PromptTemplate:
    template_id: str
    system_preamble: str
    instruction: str

    def __post_init__(self):
        for name in _PLACEHOLDERS:
            count = self.instruction.count("{" + name + "}")
            if count != 1:
                raise ValueError(f"template {self.template_id!r}: placeholder {{{name}}} appears {count} times")


DEFAULT_TEMPLATE = PromptTemplate(
    template_id="context-mqm.v1",
    system_preamble=(
        "You are an expert annotator of machine translation quality. You identify and "
        "categorize translation errors following the MQM typology."
    ),
    instruction=(
        "Identify and categorize the errors in the {source_lang} to {target_lang} machine "
        "translation below. Use the preceding conversation messages (shown in their original "
        "languages) to resolve ambiguity.\n"
        "\n"
        "Conversation context:\n"
        "{context_block}\n"
        "\n"
        "Example annotation:\n"
        "{in_context_example}\n"
        "\n"
        "Now annotate this translation.\n"
        "Source: {source}\n"
        "Translation: {translation}\n"
        "\n"
        "List the errors grouped under the headers \"Critical:\", \"Major:\" and \"Minor:\". "
        "Under each header write one error per line as: category - \"span\". "
        "Write no-error under a header with no errors.\n"
    ),
)


_HEADER_RE = re.compile(r"^\s*(critical|major|minor)\s*:\s*$", re.IGNORECASE)
_ERROR_LINE_RE = re.compile(r'^\s*(?P<category>.+?)\s+-\s+"(?P<span>.*)"\s*$')

_SEVERITY_BY_HEADER = {"critical": Severity.CRITICAL, "major": Severity.MAJOR, "minor": Severity.MINOR}


@dataclass
class ParsedErrors:
    errors: list[tuple[Severity, str, str]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    unparseable: bool = False


def parse_mqm_response(text: str) -> ParsedErrors:
    """Parse an annotation response; never raises.

    Missing severity blocks mean zero errors of that severity. Lines that fit
    no production become warnings; a response with no recognizable block at
    all is flagged unparseable (and scores as error-free, marked for review).
    """
    parsed = ParsedErrors()
    current: Optional[Severity] = None
    saw_block = False
    for line in text.splitlines():
        if not line.strip():
            continue
        header = _HEADER_RE.match(line)
        if header:
            current = _SEVERITY_BY_HEADER[header.group(1).lower()]
            saw_block = True
            continue
        if current is None:
            parsed.warnings.append(f"line outside any severity block: {line.strip()!r}")
            continue
        if line.strip().lower() == "no-error":
            continue
        m = _ERROR_LINE_RE.match(line)
        if m:
            parsed.errors.append((current, m.group("category").strip(), m.group("span")))
        else:
            parsed.warnings.append(f"unparseable error line: {line.strip()!r}")
    if not saw_block:
        parsed.unparseable = True
        if text.strip():
            parsed.warnings.append("no severity blocks found in response")
    return parsed


@dataclass(frozen=True)
class InContextExample:
    source: str
    translation: str
    gold_annotation: str

    def __post_init__(self):
        parsed = parse_mqm_response(self.gold_annotation)
        if parsed.unparseable:
            raise ValueError("in-context example annotation does not parse under the response grammar")

    def render(self) -> str:
        return f"Source: {self.source}\nTranslation: {self.translation}\n{self.gold_annotation}"


DEFAULT_EXAMPLE = InContextExample(
    source="esse link não abre",
    translation="this link does not openn",
    gold_annotation='Critical:\nno-error\nMajor:\nno-error\nMinor:\nfluency/spelling - "openn"',
)


@dataclass(frozen=True)
class LlmEndpointConfig:
    base_url: str
    model: str
    temperature: float = 0.0
    max_tokens: int = 1024
    timeout: float = 60.0
    max_parallel: int = 4
    retries: int = 3
    backoff: float = 1.0
    api_key_env: str = "CHATQE_API_KEY"


def build_prompt(
    conv: Conversation,
    t: int,
    system_id: str,
    template: PromptTemplate = DEFAULT_TEMPLATE,
    example: InContextExample = DEFAULT_EXAMPLE,
    k: int = DEFAULT_CONTEXT_K,
) -> tuple[str, int]:
    """Render the evaluation prompt for one segment.

    The context block holds the source sentences of the last k preceding turns
    from both participants, each prefixed with the speaker role and language
    tag, oldest first. Returns (prompt text, k actually used).
    """
    turn = next((x for x in conv.turns if x.index == t), None)
    if turn is None:
        raise ContextError(f"conversation {conv.conversation_id!r} has no turn {t}")
    out = turn.output(system_id)
    if out is None:
        raise ContextError(f"conversation {conv.conversation_id!r} turn {t}: no output for system {system_id!r}")

    preceding = [x for x in conv.turns if x.index < t]
    window = preceding[-k:] if k > 0 else []
    lines = []
    for ctx in window:
        lang = conv.agent_lang if ctx.speaker.value == "agent" else conv.customer_lang
        lines.append(f"[{ctx.speaker.value} {lang}] {ctx.source}")
    context_block = "\n".join(lines)

    direction = conv.direction(turn)
    body = template.instruction.format(
        source_lang=direction.src_lang,
        target_lang=direction.tgt_lang,
        context_block=context_block,
        source=turn.source,
        translation=out.hypothesis,
        in_context_example=example.render(),
    )
    prompt = f"{template.system_preamble}\n\n{body}" if template.system_preamble else body
    return prompt, len(window)


def score_llm_segment(parsed: ParsedErrors, cap: Optional[int] = None) -> MqmScore:
    """Severity-weighted score of parsed errors, optionally capping the count
    per severity."""
    minor = sum(1 for sev, _, _ in parsed.errors if sev is Severity.MINOR)
    major = sum(1 for sev, _, _ in parsed.errors if sev is Severity.MAJOR)
    critical = sum(1 for sev, _, _ in parsed.errors if sev is Severity.CRITICAL)
    if cap is not None:
        minor, major, critical = min(minor, cap), min(major, cap), min(critical, cap)
    return mqm_score(SeverityCounts(minor, major, critical))


@dataclass(frozen=True)
class PromptedSegment:
    key: SegmentKey
    prompt: str


def build_prompts(
    corpus,
    system_id: str,
    template: PromptTemplate = DEFAULT_TEMPLATE,
    example: InContextExample = DEFAULT_EXAMPLE,
    k: int = DEFAULT_CONTEXT_K,
) -> list[PromptedSegment]:
    prompted = []
    for conv in corpus.conversations:
        for turn in conv.turns:
            if turn.output(system_id) is None:
                continue
            prompt, _ = build_prompt(conv, turn.index, system_id, template, example, k)
            prompted.append(PromptedSegment((conv.conversation_id, turn.index, system_id), prompt))
    return prompted


def cache_key(model: str, template_id: str, prompt: str) -> str:
    payload = "\x00".join((model, template_id, prompt)).encode("utf-8")
    return hashlib.sha256(payload).hexdigest()


class LlmClient:
    """Chat-completion-style HTTP client with retries and an on-disk cache."""

    def __init__(self, config: LlmEndpointConfig, cache_dir, template_id: str):
        self.config = config
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        self.template_id = template_id
        self.http_calls = 0

    def _cache_path(self, key: str) -> Path:
        return self.cache_dir / f"{key}.json"

    def complete(self, prompt: str) -> str:
        key = cache_key(self.config.model, self.template_id, prompt)
        path = self._cache_path(key)
        if path.exists():
            return json.loads(path.read_text(encoding="utf-8"))["response"]
        request = {
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.config.temperature,
            "max_tokens": self.config.max_tokens,
        }
        response_text = self._post(request)
        # atomic write so a crashed run never leaves a truncated cache entry
        fd, tmp = tempfile.mkstemp(dir=self.cache_dir, suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump({"request": request, "response": response_text}, fh, ensure_ascii=False)
        os.replace(tmp, path)
        return response_text

    def _post(self, request: dict) -> str:
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(self.config.api_key_env)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        last_error: Optional[Exception] = None
        for attempt in range(self.config.retries + 1):
            try:
                self.http_calls += 1
                resp = requests.post(
                    self.config.base_url, json=request, headers=headers, timeout=self.config.timeout
                )
                if resp.status_code in (401, 403):
                    raise AuthenticationError(f"endpoint rejected credentials (HTTP {resp.status_code})")
                resp.raise_for_status()
                body = resp.json()
                return body["choices"][0]["message"]["content"]
            except AuthenticationError:
                raise
            except (requests.RequestException, KeyError, ValueError) as exc:
                last_error = exc
                if attempt < self.config.retries:
                    time.sleep(self.config.backoff * (2**attempt))
        raise LlmError(f"request failed after {self.config.retries + 1} attempts: {last_error}")


@dataclass
class EvaluationOutcome:
    scores: ScoreTable
    failures: list[tuple[SegmentKey, str]] = field(default_factory=list)
    warnings: list[tuple[SegmentKey, str]] = field(default_factory=list)
    http_calls: int = 0


def evaluate_batch(
    prompted: list[PromptedSegment],
    config: LlmEndpointConfig,
    cache_dir,
    archive_path=None,
    template_id: str = DEFAULT_TEMPLATE.template_id,
    cap: Optional[int] = None,
    run_id: Optional[str] = None,
) -> EvaluationOutcome:
    """Score a batch of prompted segments through the endpoint.

    Responses are served from the cache when available; new ones are fetched
    with at most ``max_parallel`` requests in flight. Segments whose requests
    exhaust their retries are recorded as failures and the run continues.
    Authentication failures abort the run.
    """
    client = LlmClient(config, cache_dir, template_id)
    responses: dict[SegmentKey, str] = {}
    failures: list[tuple[SegmentKey, str]] = []

    def fetch(seg: PromptedSegment):
        return seg.key, client.complete(seg.prompt)

    with ThreadPoolExecutor(max_workers=config.max_parallel) as pool:
        futures = {pool.submit(fetch, seg): seg for seg in prompted}
        for future, seg in futures.items():
            try:
                key, text = future.result()
                responses[key] = text
            except AuthenticationError:
                raise
            except LlmError as exc:
                failures.append((seg.key, str(exc)))

    outcome = EvaluationOutcome(
        scores=ScoreTable(metric_name="llm-mqm", run_id=run_id or f"{config.model}-{template_id}"),
        failures=failures,
    )
    archive_fh = open(archive_path, "w", encoding="utf-8", newline="\n") if archive_path else None
    try:
        for seg in prompted:
            if seg.key not in responses:
                continue
            text = responses[seg.key]
            parsed = parse_mqm_response(text)
            if parsed.unparseable:
                outcome.warnings.append((seg.key, "unparseable response; segment marked for review"))
            for warning in parsed.warnings:
                outcome.warnings.append((seg.key, warning))
            outcome.scores.scores[seg.key] = score_llm_segment(parsed, cap).raw
            if archive_fh:
                record = {"key": list(seg.key), "response": text}
                archive_fh.write(json.dumps(record, ensure_ascii=False) + "\n")
    finally:
        if archive_fh:
            archive_fh.close()
    outcome.http_calls = client.http_calls
    return outcome
