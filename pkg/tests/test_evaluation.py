import json
import os

import numpy as np
import pytest

from memesim.emotion import EMOTIONS, GroupEmotion
from memesim.errors import ConflictError, DataError, EmptyInputError, ParseError
from memesim.evaluation import (
    ResponseStore,
    SurveyResponse,
    agreement_rate,
    agreement_report,
    average_agreement,
    emotion_agreement,
    load_responses,
    open_response_log,
)
from .conftest import FIXTURES

PAPER_RATES = [64.71, 45.10, 70.59, 52.94, 60.78, 70.59, 66.67, 82.35, 78.43,
               60.78, 80.39, 70.59, 56.86, 58.82, 66.67, 68.63, 76.47, 74.51,
               60.78, 74.51, 70.59]


def responses(yes, total, group_id=0):
    return [
        SurveyResponse(participant_id=f"p{k:02d}", group_id=group_id,
                       similar=k <= yes, timestamp=k)
        for k in range(1, total + 1)
    ]


def test_agreement_rate_paper_group_one():
    assert agreement_rate(responses(33, 51)) == 64.71


def test_agreement_rate_extremes():
    assert agreement_rate(responses(0, 51)) == 0.0
    assert agreement_rate(responses(51, 51)) == 100.0


def test_agreement_rate_empty():
    with pytest.raises(EmptyInputError):
        agreement_rate([])


def test_average_agreement_paper_value():
    per_group = {gid: rate for gid, rate in enumerate(PAPER_RATES)}
    assert abs(average_agreement(per_group) - 67.23) <= 0.01


def test_average_agreement_trivial_cases():
    assert average_agreement({3: 58.21}) == 58.21
    assert average_agreement({0: 50.0, 1: 50.0, 2: 50.0}) == 50.0


def test_average_bounded_by_min_max():
    per_group = {gid: rate for gid, rate in enumerate(PAPER_RATES)}
    avg = average_agreement(per_group)
    assert min(PAPER_RATES) <= avg <= max(PAPER_RATES)
    assert min(PAPER_RATES) == 45.10 and max(PAPER_RATES) == 82.35


def test_rate_monotonicity():
    base = responses(10, 20)
    rate = agreement_rate(base)
    plus_yes = base + [SurveyResponse("extra", 0, True, timestamp=99)]
    plus_no = base + [SurveyResponse("extra", 0, False, timestamp=99)]
    assert agreement_rate(plus_yes) >= rate
    assert agreement_rate(plus_no) <= rate


def test_store_append_load_round_trip(tmp_path):
    path = tmp_path / "log.jsonl"
    store = ResponseStore(path=path)
    store.append(SurveyResponse("p01", 7, True, emotion="joy", timestamp=5))
    store.append(SurveyResponse("p02", 7, True, timestamp=6))
    store.append(SurveyResponse("p03", 7, False, timestamp=7))
    again = load_responses(path)
    assert len(again) == 3
    assert again.responses[0].emotion == "joy"
    report = agreement_report(again)
    assert report.per_group[7] == 66.67  # 2 of 3


def test_store_duplicate_conflict(tmp_path):
    store = ResponseStore(path=tmp_path / "log.jsonl")
    store.append(SurveyResponse("p01", 3, True, timestamp=1))
    with pytest.raises(ConflictError):
        store.append(SurveyResponse("p01", 3, False, timestamp=2))


def test_load_malformed_line(tmp_path):
    p = tmp_path / "log.jsonl"
    p.write_text('{"participant_id":"a","group_id":0,"similar":true,"timestamp":1}\nboom\n')
    with pytest.raises(ParseError) as err:
        load_responses(p)
    assert err.value.line_number == 2


def test_participant_id_validation():
    with pytest.raises(DataError):
        SurveyResponse("bad id!", 0, True)
    with pytest.raises(DataError):
        SurveyResponse("x" * 65, 0, True)
    with pytest.raises(DataError):
        SurveyResponse("ok", 0, True, emotion="meh")


def test_persistence_fidelity_fixture():
    store = load_responses(os.path.join(FIXTURES, "survey", "responses.jsonl"))
    report = agreement_report(store)
    assert report.n_groups == 21
    assert report.n_participants == 51
    assert sorted(report.per_group.values()) == sorted(PAPER_RATES)
    assert abs(report.average - 67.23) <= 0.01
    # reload reproduces the identical report
    again = agreement_report(
        load_responses(os.path.join(FIXTURES, "survey", "responses.jsonl")))
    assert again == report


def test_open_response_log_appends(tmp_path):
    path = tmp_path / "log.jsonl"
    store = open_response_log(path)
    store.append(SurveyResponse("p01", 0, True, timestamp=1))
    store2 = open_response_log(path)
    assert len(store2) == 1
    store2.append(SurveyResponse("p02", 0, False, timestamp=2))
    assert len(load_responses(path)) == 2


def _dominants(mapping):
    return {
        gid: GroupEmotion(group_id=gid, dominant=label, histogram={})
        for gid, label in mapping.items()
    }


def test_emotion_agreement_perfect():
    store = ResponseStore()
    for gid in range(3):
        for k in range(4):
            store.append(SurveyResponse(f"p{k}", gid, True, emotion="anger",
                                        timestamp=k))
    result = emotion_agreement(store, _dominants({0: "anger", 1: "anger", 2: "anger"}))
    assert result.accuracy == 100.0
    anger_idx = EMOTIONS.index("anger")
    for i, row in enumerate(result.confusion):
        for j, cell in enumerate(row):
            assert cell == (12 if i == j == anger_idx else 0)


def test_emotion_agreement_random_simulation():
    rng = np.random.default_rng(41)
    store = ResponseStore()
    for k in range(1000):
        store.append(SurveyResponse(
            f"p{k:04d}", 0, True,
            emotion=EMOTIONS[int(rng.integers(0, 6))], timestamp=k))
    result = emotion_agreement(store, _dominants({0: "joy"}))
    assert abs(result.accuracy - 16.67) <= 3.0


def test_emotion_agreement_skips_unlabeled():
    store = ResponseStore()
    store.append(SurveyResponse("p1", 0, True, emotion="joy", timestamp=1))
    store.append(SurveyResponse("p1", 1, True, emotion="joy", timestamp=2))
    result = emotion_agreement(store, _dominants({0: "joy", 1: "unlabeled"}))
    assert result.total == 1
    assert result.skipped_unlabeled == 1


def test_emotion_agreement_empty():
    store = ResponseStore()
    store.append(SurveyResponse("p1", 0, True, timestamp=1))  # no emotion
    with pytest.raises(EmptyInputError):
        emotion_agreement(store, _dominants({0: "joy"}))


def test_report_to_dict_round_trips_through_json():
    store = load_responses(os.path.join(FIXTURES, "survey", "responses.jsonl"))
    report = agreement_report(store)
    blob = json.loads(json.dumps(report.to_dict()))
    assert blob["average"] == report.average
    assert blob["n_groups"] == 21
