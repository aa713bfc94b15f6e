"""Question bank: CSV parsing, compiled bank files, and question selection.

The editable source of truth is a CSV with header
``topic,language,prompt,image,option1,option2,option3,option4,correct``
(UTF-8, RFC 4180 quoting). `topic` is the display name; its identifier is a
lowercased slug. `correct` is 1-based in the CSV because that is how people
count in a spreadsheet; everywhere else the index is 0-based. Unused option
columns are left empty, from the right.

Compiled banks are a single versioned JSON document::

    { "version": 1,
      "languages": { "<code>": { "topics": [
        { "id", "name", "questions": [
          { "id", "prompt", "image", "options": [...], "correct" } ] } ] } } }

`compile_bank` always emits the canonical byte form (sorted keys, compact
separators, UTF-8), so parse -> compile -> load -> compile is a fixed point.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .rng import SplitMix64

CSV_HEADER = (
    "topic", "language", "prompt", "image",
    "option1", "option2", "option3", "option4", "correct",
)

BANK_VERSION = 1


class BankError(Exception):
    pass


class MalformedBank(BankError):
    pass


class UnsupportedVersion(BankError):
    pass


class UnknownTopic(BankError):
    pass


class EmptyPool(BankError):
    pass


class ChoiceOutOfRange(BankError):
    pass


@dataclass(frozen=True, slots=True)
class QuestionRecord:
    question_id: str
    topic_id: str
    language: str
    prompt: str
    image_ref: str | None
    options: tuple[str, ...]
    correct_index: int


@dataclass(frozen=True, slots=True)
class Topic:
    topic_id: str
    name: str
    questions: tuple[QuestionRecord, ...]


@dataclass(frozen=True, slots=True)
class ParseError:
    row: int        # 1-based; the header is row 1
    code: str
    message: str

    def __str__(self) -> str:
        return f"row {self.row}: {self.message}"


@dataclass(frozen=True, slots=True)
class ValidationIssue:
    code: str       # missing_image | empty_topic | duplicate_id
    detail: str


@dataclass(frozen=True)
class QuestionBank:
    version: int
    languages: dict[str, tuple[Topic, ...]]

    def catalog(self, language: str) -> list[tuple[str, str, int]]:
        """(topic_id, display name, question count) for one language."""
        return [
            (t.topic_id, t.name, len(t.questions))
            for t in self.languages.get(language, ())
        ]

    def topic(self, language: str, topic_id: str) -> Topic:
        for t in self.languages.get(language, ()):
            if t.topic_id == topic_id:
                return t
        raise UnknownTopic(f"no topic {topic_id!r} for language {language!r}")

    def question(self, language: str, question_id: str) -> QuestionRecord:
        for t in self.languages.get(language, ()):
            for q in t.questions:
                if q.question_id == question_id:
                    return q
        raise KeyError(question_id)


@dataclass
class AskedHistory:
    """Question ids already posed to one team during one session."""

    asked: set[str] = field(default_factory=set)


def slugify(name: str) -> str:
    """Topic display name -> stable identifier: "Animals (Kids)" -> animals-kids."""
    slug = re.sub(r"[^a-z0-9]+", "-", name.lower()).strip("-")
    return slug or "topic"


def parse_question_csv(text: str | bytes) -> tuple[QuestionBank | None, list[ParseError]]:
    """Parse CSV content into a bank, collecting every row error.

    Returns (bank, []) on success or (None, errors); a bad row never stops
    diagnosis of the rows after it.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8-sig")
    elif text.startswith("﻿"):
        text = text.lstrip("﻿")
    reader = csv.reader(io.StringIO(text))
    errors: list[ParseError] = []

    header = next(reader, None)
    if header is None or tuple(h.strip().lower() for h in header) != CSV_HEADER:
        errors.append(ParseError(1, "missing_header",
                                 "expected header " + ",".join(CSV_HEADER)))
        return None, errors

    # (language, topic_id) -> list of (name, prompt, image, options, correct)
    by_topic: dict[tuple[str, str], list[tuple]] = {}
    seen_prompts: set[tuple[str, str, str]] = set()

    for row_no, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue  # blank line
        if len(row) != len(CSV_HEADER):
            errors.append(ParseError(row_no, "bad_column_count",
                                     f"expected {len(CSV_HEADER)} columns, got {len(row)}"))
            continue
        name, language, prompt, image, o1, o2, o3, o4, correct = row
        name = name.strip()
        language = language.strip().lower()
        if not prompt.strip():
            errors.append(ParseError(row_no, "empty_prompt", "prompt must not be empty"))
            continue
        raw_options = [o1, o2, o3, o4]
        options: list[str] = []
        gap = False
        for opt in raw_options:
            if opt == "":
                gap = True
            elif gap:
                errors.append(ParseError(row_no, "empty_option_gap",
                                         "options must be filled left to right"))
                options = []
                break
            else:
                options.append(opt)
        else:
            if len(options) < 2:
                errors.append(ParseError(row_no, "too_few_options",
                                         "a question needs at least 2 options"))
                continue
        if not options:
            continue
        try:
            correct_1based = int(correct.strip())
        except ValueError:
            correct_1based = -1
        if not 1 <= correct_1based <= len(options):
            errors.append(ParseError(
                row_no, "correct_index_out_of_range",
                f"correct must be 1..{len(options)}, got {correct.strip() or '(empty)'}"))
            continue
        topic_id = slugify(name)
        key = (language, topic_id, prompt)
        if key in seen_prompts:
            errors.append(ParseError(row_no, "duplicate_question",
                                     f"duplicate prompt for topic {name!r}"))
            continue
        seen_prompts.add(key)
        by_topic.setdefault((language, topic_id), []).append(
            (name, prompt, image.strip() or None, tuple(options), correct_1based - 1)
        )

    if errors:
        return None, errors

    languages: dict[str, list[Topic]] = {}
    for (language, topic_id), rows in by_topic.items():
        questions = tuple(
            QuestionRecord(
                question_id=f"{topic_id}-{i:03d}",
                topic_id=topic_id,
                language=language,
                prompt=prompt,
                image_ref=image,
                options=options,
                correct_index=correct,
            )
            for i, (_, prompt, image, options, correct) in enumerate(rows, start=1)
        )
        languages.setdefault(language, []).append(
            Topic(topic_id, rows[0][0], questions)
        )
    return (
        QuestionBank(
            version=BANK_VERSION,
            languages={
                lang: tuple(sorted(topics, key=lambda t: t.topic_id))
                for lang, topics in languages.items()
            },
        ),
        [],
    )


def compile_bank(bank: QuestionBank) -> bytes:
    """Serialize to the canonical byte form (stable across round trips)."""
    doc = {
        "version": bank.version,
        "languages": {
            lang: {
                "topics": [
                    {
                        "id": t.topic_id,
                        "name": t.name,
                        "questions": [
                            {
                                "id": q.question_id,
                                "prompt": q.prompt,
                                "image": q.image_ref,
                                "options": list(q.options),
                                "correct": q.correct_index,
                            }
                            for q in t.questions
                        ],
                    }
                    for t in topics
                ]
            }
            for lang, topics in bank.languages.items()
        },
    }
    return (json.dumps(doc, sort_keys=True, ensure_ascii=False,
                       separators=(",", ":")) + "\n").encode("utf-8")


def load_bank(data: bytes | str) -> QuestionBank:
    """Parse compiled bank bytes, checking version and structure."""
    try:
        doc = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedBank(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedBank("top level must be an object")
    version = doc.get("version")
    if not isinstance(version, int):
        raise MalformedBank("missing integer 'version'")
    if version != BANK_VERSION:
        raise UnsupportedVersion(f"bank version {version} not supported")
    langs = doc.get("languages")
    if not isinstance(langs, dict):
        raise MalformedBank("missing 'languages' object")

    languages: dict[str, tuple[Topic, ...]] = {}
    for lang, payload in langs.items():
        if not isinstance(payload, dict) or not isinstance(payload.get("topics"), list):
            raise MalformedBank(f"language {lang!r} must carry a topic list")
        topics = []
        for t in payload["topics"]:
            try:
                questions = tuple(
                    QuestionRecord(
                        question_id=q["id"],
                        topic_id=t["id"],
                        language=lang,
                        prompt=q["prompt"],
                        image_ref=q["image"],
                        options=tuple(q["options"]),
                        correct_index=q["correct"],
                    )
                    for q in t["questions"]
                )
                topic = Topic(t["id"], t["name"], questions)
            except (KeyError, TypeError) as exc:
                raise MalformedBank(f"malformed topic in {lang!r}: {exc}") from exc
            for q in topic.questions:
                if not isinstance(q.correct_index, int) or not (
                    0 <= q.correct_index < len(q.options)
                ):
                    raise MalformedBank(f"question {q.question_id}: correct index invalid")
                if not isinstance(q.prompt, str) or not q.prompt:
                    raise MalformedBank(f"question {q.question_id}: bad prompt")
            topics.append(topic)
        languages[lang] = tuple(topics)
    return QuestionBank(version=version, languages=languages)


def validate_bank(bank: QuestionBank, image_root: str | Path | None) -> list[ValidationIssue]:
    """Report content problems a user-edited bank may carry; [] means usable."""
    issues: list[ValidationIssue] = []
    root = Path(image_root) if image_root is not None else None
    for lang, topics in sorted(bank.languages.items()):
        seen_ids: set[str] = set()
        for topic in topics:
            if not topic.questions:
                issues.append(ValidationIssue(
                    "empty_topic", f"{lang}/{topic.topic_id} has no questions"))
            for q in topic.questions:
                if q.question_id in seen_ids:
                    issues.append(ValidationIssue(
                        "duplicate_id", f"{lang}: question id {q.question_id} repeats"))
                seen_ids.add(q.question_id)
                if q.image_ref and root is not None and not (root / q.image_ref).is_file():
                    issues.append(ValidationIssue(
                        "missing_image", f"{q.question_id}: {q.image_ref} not found"))
    return issues


def question_pool(
    bank: QuestionBank, language: str, topics: frozenset[str] | set[str]
) -> tuple[QuestionRecord, ...]:
    """The selection pool for a topic set, in stable (sorted-topic) order."""
    pool: list[QuestionRecord] = []
    for topic_id in sorted(topics):
        pool.extend(bank.topic(language, topic_id).questions)
    return tuple(pool)


def draw_from_pool(
    pool: tuple[QuestionRecord, ...], history: AskedHistory, rng: SplitMix64
) -> QuestionRecord:
    """Uniform draw over the not-yet-asked part of `pool`.

    When every question has been asked, the history for this pool resets and
    play continues; small banks never stall a game.
    """
    if not pool:
        raise EmptyPool("the topic pool holds no questions")
    asked = history.asked
    unasked = [q for q in pool if q.question_id not in asked]
    if not unasked:
        asked.difference_update(q.question_id for q in pool)
        unasked = list(pool)
    question = unasked[rng.randrange(len(unasked))]
    asked.add(question.question_id)
    return question


def select_question(
    bank: QuestionBank,
    language: str,
    topics: frozenset[str] | set[str],
    history: AskedHistory,
    rng: SplitMix64,
) -> QuestionRecord:
    """Draw uniformly from the not-yet-asked questions of the given topics."""
    pool = question_pool(bank, language, topics)
    if not pool:
        raise EmptyPool(f"topics {sorted(topics)} hold no questions")
    return draw_from_pool(pool, history, rng)


def check_answer(question: QuestionRecord, choice: int) -> bool:
    if not 0 <= choice < len(question.options):
        raise ChoiceOutOfRange(
            f"choice {choice} outside 0..{len(question.options) - 1}")
    return choice == question.correct_index
