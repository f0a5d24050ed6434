"""Survey response storage and human-agreement metrics.

A response records one participant's judgment of one meme group: did the
memes look similar (yes/no), and optionally which of the six emotions the
group evokes.  The per-group agreement rate is the percentage of "yes"
answers; the headline number is the unweighted mean of those rates across
groups.  Responses persist as append-only JSONL, one object per line.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field

from .emotion import EMOTIONS, UNLABELED, GroupEmotion
from .errors import ConflictError, DataError, EmptyInputError, ParseError

PARTICIPANT_ID_MAX = 64


def _valid_participant_id(pid: str) -> bool:
    return (
        0 < len(pid) <= PARTICIPANT_ID_MAX
        and all(c.isalnum() or c in "_-" for c in pid)
        and pid.isascii()
    )


@dataclass(frozen=True)
class SurveyResponse:
    participant_id: str
    group_id: int
    similar: bool
    emotion: str | None = None
    timestamp: int = 0  # UTC seconds

    def __post_init__(self):
        if not _valid_participant_id(self.participant_id):
            raise DataError(
                f"participant_id must match [A-Za-z0-9_-]{{1,{PARTICIPANT_ID_MAX}}}, "
                f"got {self.participant_id!r}"
            )
        if self.group_id < 0:
            raise DataError(f"group_id must be >= 0, got {self.group_id}")
        if self.emotion is not None and self.emotion not in EMOTIONS:
            raise DataError(f"unknown emotion {self.emotion!r}")

    def to_dict(self) -> dict:
        out = {
            "participant_id": self.participant_id,
            "group_id": self.group_id,
            "similar": self.similar,
            "timestamp": self.timestamp,
        }
        if self.emotion is not None:
            out["emotion"] = self.emotion
        return out

    @classmethod
    def from_dict(cls, obj: dict) -> "SurveyResponse":
        return cls(
            participant_id=str(obj["participant_id"]),
            group_id=int(obj["group_id"]),
            similar=bool(obj["similar"]),
            emotion=obj.get("emotion"),
            timestamp=int(obj.get("timestamp", 0)),
        )


class ResponseStore:
    """In-memory response set with optional JSONL persistence.

    One writer lock serializes appends; (participant_id, group_id) is unique.
    """

    def __init__(self, path=None):
        self._path = path
        self._lock = threading.Lock()
        self._responses: list[SurveyResponse] = []
        self._keys: set[tuple[str, int]] = set()

    def __len__(self) -> int:
        return len(self._responses)

    @property
    def responses(self) -> list[SurveyResponse]:
        return list(self._responses)

    def has(self, participant_id: str, group_id: int) -> bool:
        return (participant_id, group_id) in self._keys

    def append(self, response: SurveyResponse) -> None:
        with self._lock:
            key = (response.participant_id, response.group_id)
            if key in self._keys:
                raise ConflictError(
                    f"participant {response.participant_id!r} already answered "
                    f"group {response.group_id}"
                )
            if self._path is not None:
                line = json.dumps(response.to_dict(), separators=(",", ":"))
                with open(self._path, "a", encoding="utf-8") as f:
                    f.write(line + "\n")
                    f.flush()
            self._responses.append(response)
            self._keys.add(key)


def load_responses(path) -> ResponseStore:
    """Read a JSONL response log; malformed lines and duplicates are errors."""
    store = ResponseStore(path=None)
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                response = SurveyResponse.from_dict(obj)
            except (json.JSONDecodeError, KeyError, TypeError, ValueError, DataError) as exc:
                raise ParseError(f"{path}: line {lineno}: {exc}", line_number=lineno)
            try:
                store.append(response)
            except ConflictError as exc:
                raise ConflictError(f"{path}: line {lineno}: {exc}")
    store._path = path
    return store


def open_response_log(path) -> ResponseStore:
    """Load an existing log (if any) and keep appending to it."""
    import os

    if os.path.exists(path):
        return load_responses(path)
    return ResponseStore(path=path)


def agreement_rate(responses: list[SurveyResponse]) -> float:
    """Percentage of responses marking the group as similar, 2 decimals."""
    if not responses:
        raise EmptyInputError("agreement_rate: no responses")
    yes = sum(1 for r in responses if r.similar)
    return round(100.0 * yes / len(responses), 2)


@dataclass
class AgreementReport:
    per_group: dict[int, float]
    average: float
    n_groups: int
    n_participants: int
    n_responses: int = 0
    responses_per_group: dict[int, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "per_group": {str(k): v for k, v in sorted(self.per_group.items())},
            "average": self.average,
            "n_groups": self.n_groups,
            "n_participants": self.n_participants,
            "n_responses": self.n_responses,
        }


def average_agreement(per_group: dict[int, float]) -> float:
    """Unweighted mean of per-group rates, 2 decimals."""
    if not per_group:
        raise EmptyInputError("average_agreement: no groups with responses")
    return round(sum(per_group.values()) / len(per_group), 2)


def agreement_report(store: ResponseStore) -> AgreementReport:
    """Per-group rates plus their average over all groups with responses."""
    by_group: dict[int, list[SurveyResponse]] = {}
    participants = set()
    for r in store.responses:
        by_group.setdefault(r.group_id, []).append(r)
        participants.add(r.participant_id)
    if not by_group:
        return AgreementReport(
            per_group={}, average=0.0, n_groups=0,
            n_participants=0, n_responses=0,
        )
    per_group = {gid: agreement_rate(rs) for gid, rs in by_group.items()}
    return AgreementReport(
        per_group=per_group,
        average=average_agreement(per_group),
        n_groups=len(per_group),
        n_participants=len(participants),
        n_responses=len(store),
        responses_per_group={gid: len(rs) for gid, rs in by_group.items()},
    )


@dataclass
class EmotionAgreement:
    accuracy: float  # percent, 2 decimals
    confusion: list[list[int]]  # rows = human choice, cols = model dominant
    matched: int
    total: int
    skipped_unlabeled: int

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "labels": list(EMOTIONS),
            "confusion": self.confusion,
            "matched": self.matched,
            "total": self.total,
            "skipped_unlabeled": self.skipped_unlabeled,
        }


def emotion_agreement(store: ResponseStore,
                      group_dominants: dict[int, GroupEmotion]) -> EmotionAgreement:
    """Compare participants' emotion picks against each group's dominant label."""
    index = {e: k for k, e in enumerate(EMOTIONS)}
    confusion = [[0] * len(EMOTIONS) for _ in EMOTIONS]
    matched = 0
    total = 0
    skipped = 0
    for r in store.responses:
        if r.emotion is None:
            continue
        info = group_dominants.get(r.group_id)
        if info is None or info.dominant == UNLABELED:
            skipped += 1
            continue
        total += 1
        confusion[index[r.emotion]][index[info.dominant]] += 1
        if r.emotion == info.dominant:
            matched += 1
    if total == 0:
        raise EmptyInputError("emotion_agreement: no scorable emotion responses")
    return EmotionAgreement(
        accuracy=round(100.0 * matched / total, 2),
        confusion=confusion,
        matched=matched,
        total=total,
        skipped_unlabeled=skipped,
    )
