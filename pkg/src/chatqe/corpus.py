"""Data model and JSONL ingestion for annotated bilingual chat corpora.

A corpus is a list of conversations; each conversation is an ordered list of
turns; each turn carries the original text, an optional reference translation,
and one hypothesis (with MQM error annotations) per MT system. One turn is one
scoring unit.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

from .errors import CorpusFormatError, CorpusValidationError


class Speaker(Enum):
    AGENT = "agent"
    CUSTOMER = "customer"


class Severity(Enum):
    MINOR = "minor"
    MAJOR = "major"
    CRITICAL = "critical"
    NEUTRAL = "neutral"


@dataclass(frozen=True)
class LanguagePair:
    src_lang: str
    tgt_lang: str

    def __str__(self):
        return f"{self.src_lang}-{self.tgt_lang}"


@dataclass(frozen=True)
class MqmError:
    category: str
    severity: Severity
    span_start: Optional[int] = None
    span_end: Optional[int] = None
    note: Optional[str] = None


@dataclass(frozen=True)
class SystemOutput:
    system_id: str
    hypothesis: str
    errors: tuple[MqmError, ...] = ()
    external_tags: frozenset[str] = frozenset()


@dataclass(frozen=True)
class Turn:
    index: int
    speaker: Speaker
    source: str
    reference: Optional[str] = None
    outputs: tuple[SystemOutput, ...] = ()

    def output(self, system_id: str) -> Optional[SystemOutput]:
        for out in self.outputs:
            if out.system_id == system_id:
                return out
        return None


@dataclass(frozen=True)
class Conversation:
    conversation_id: str
    agent_lang: str
    customer_lang: str
    turns: tuple[Turn, ...] = ()

    def direction(self, turn: Turn) -> LanguagePair:
        """Translation direction of a turn, derived from its speaker."""
        if turn.speaker is Speaker.AGENT:
            return LanguagePair(self.agent_lang, self.customer_lang)
        return LanguagePair(self.customer_lang, self.agent_lang)


@dataclass(frozen=True)
class Corpus:
    conversations: tuple[Conversation, ...] = ()
    metadata: dict = field(default_factory=dict)

    def segments(self) -> Iterable[tuple[Conversation, Turn, SystemOutput]]:
        """All (conversation, turn, output) triples in corpus order."""
        for conv in self.conversations:
            for turn in conv.turns:
                for out in turn.outputs:
                    yield conv, turn, out


@dataclass(frozen=True)
class Violation:
    conversation_id: Optional[str]
    turn_index: Optional[int]
    rule: str
    message: str

    def __str__(self):
        where = self.conversation_id or "<corpus>"
        if self.turn_index is not None:
            where += f"[t={self.turn_index}]"
        return f"{where}: {self.rule}: {self.message}"


_SEVERITIES = {s.value: s for s in Severity}
_SPEAKERS = {s.value: s for s in Speaker}


def _parse_error(obj, line_no):
    try:
        severity = _SEVERITIES[obj["severity"]]
    except KeyError:
        raise CorpusFormatError(f"unknown severity {obj.get('severity')!r}", line_no)
    return MqmError(
        category=obj.get("category", ""),
        severity=severity,
        span_start=obj.get("span_start"),
        span_end=obj.get("span_end"),
        note=obj.get("note"),
    )


def _parse_conversation(obj, line_no):
    try:
        turns = []
        for tobj in obj["turns"]:
            speaker = _SPEAKERS.get(tobj["speaker"])
            if speaker is None:
                raise CorpusFormatError(f"unknown speaker {tobj['speaker']!r}", line_no)
            outputs = tuple(
                SystemOutput(
                    system_id=oobj["system_id"],
                    hypothesis=oobj["hypothesis"],
                    errors=tuple(_parse_error(e, line_no) for e in oobj.get("errors", [])),
                    external_tags=frozenset(oobj.get("external_tags", [])),
                )
                for oobj in tobj.get("outputs", [])
            )
            turns.append(
                Turn(
                    index=tobj["index"],
                    speaker=speaker,
                    source=tobj["source"],
                    reference=tobj.get("reference"),
                    outputs=outputs,
                )
            )
        return Conversation(
            conversation_id=obj["conversation_id"],
            agent_lang=obj["agent_lang"],
            customer_lang=obj["customer_lang"],
            turns=tuple(turns),
        )
    except KeyError as exc:
        raise CorpusFormatError(f"missing field {exc.args[0]!r}", line_no)
    except TypeError as exc:
        raise CorpusFormatError(str(exc), line_no)


def parse_corpus(source, format: str = "jsonl", strict: bool = True) -> Corpus:
    """Parse a corpus from a path, file object, str, or bytes.

    With ``strict=True`` (the default) structural invariants are checked and a
    ``CorpusValidationError`` is raised on the first batch of violations.
    """
    if format != "jsonl":
        raise CorpusFormatError(f"unsupported format {format!r}")
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str) and "\n" not in source and not source.lstrip().startswith("{"):
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    elif isinstance(source, str):
        text = source
    elif isinstance(source, io.IOBase) or hasattr(source, "read"):
        data = source.read()
        text = data.decode("utf-8") if isinstance(data, bytes) else data
    else:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()

    conversations = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusFormatError(f"invalid JSON: {exc.msg}", line_no)
        conversations.append(_parse_conversation(obj, line_no))
    if not conversations:
        raise CorpusFormatError("empty corpus")

    corpus = Corpus(conversations=tuple(conversations))
    if strict:
        violations = validate(corpus)
        if violations:
            raise CorpusValidationError(violations)
    return corpus


def validate(corpus: Corpus) -> list[Violation]:
    """Check every structural invariant; violations are data, not failures."""
    violations = []
    seen_ids = set()
    for conv in corpus.conversations:
        cid = conv.conversation_id
        if cid in seen_ids:
            violations.append(Violation(cid, None, "duplicate-conversation-id", f"conversation_id {cid!r} repeats"))
        seen_ids.add(cid)
        if not conv.agent_lang or not conv.customer_lang or not conv.agent_lang.isascii() or not conv.customer_lang.isascii():
            violations.append(Violation(cid, None, "language-tags", "language tags must be non-empty ASCII"))
        if conv.agent_lang == conv.customer_lang:
            violations.append(Violation(cid, None, "language-pair", "agent and customer languages must differ"))
        prev_index = -1
        for turn in conv.turns:
            if turn.index <= prev_index:
                violations.append(
                    Violation(cid, turn.index, "turn-order", f"index {turn.index} not greater than {prev_index}")
                )
            prev_index = max(prev_index, turn.index)
            if not turn.source:
                violations.append(Violation(cid, turn.index, "empty-source", "source text is empty"))
            seen_sys = set()
            for out in turn.outputs:
                if out.system_id in seen_sys:
                    violations.append(
                        Violation(cid, turn.index, "duplicate-system-id", f"duplicate system_id {out.system_id!r}")
                    )
                seen_sys.add(out.system_id)
                for err in out.errors:
                    if not err.category:
                        violations.append(Violation(cid, turn.index, "empty-category", "error category is empty"))
                    if (err.span_start is None) != (err.span_end is None):
                        violations.append(
                            Violation(cid, turn.index, "span-bounds", "span_start/span_end must be given together")
                        )
                    elif err.span_start is not None:
                        if not (0 <= err.span_start <= err.span_end <= len(out.hypothesis)):
                            violations.append(
                                Violation(
                                    cid,
                                    turn.index,
                                    "span-bounds",
                                    f"span [{err.span_start}, {err.span_end}) outside hypothesis of "
                                    f"length {len(out.hypothesis)} (system {out.system_id!r})",
                                )
                            )
    return violations


def _error_to_obj(err: MqmError) -> dict:
    return {
        "category": err.category,
        "severity": err.severity.value,
        "span_start": err.span_start,
        "span_end": err.span_end,
        "note": err.note,
    }


def conversation_to_obj(conv: Conversation) -> dict:
    return {
        "conversation_id": conv.conversation_id,
        "agent_lang": conv.agent_lang,
        "customer_lang": conv.customer_lang,
        "turns": [
            {
                "index": t.index,
                "speaker": t.speaker.value,
                "source": t.source,
                "reference": t.reference,
                "outputs": [
                    {
                        "system_id": o.system_id,
                        "hypothesis": o.hypothesis,
                        "errors": [_error_to_obj(e) for e in o.errors],
                        "external_tags": sorted(o.external_tags),
                    }
                    for o in t.outputs
                ],
            }
            for t in conv.turns
        ],
    }


def serialize_corpus(corpus: Corpus) -> str:
    """Render a corpus back to JSONL; parse(serialize(c)) == c."""
    return "\n".join(json.dumps(conversation_to_obj(c), ensure_ascii=False) for c in corpus.conversations) + "\n"
