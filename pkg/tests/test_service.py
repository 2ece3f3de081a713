import json

import pytest
from fastapi.testclient import TestClient

from tagalign.service.app import create_app

from conftest import corpus_of, to_conll


@pytest.fixture(scope="module")
def client():
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DeprecationWarning)
        with TestClient(create_app()) as c:
            yield c


FIG_RECORD = {
    "id": "0",
    "tokens": ["What", "was", "the", "fog", "rated", "?"],
    "label_set": ["title"],
    "generation": "What(O) was(O) the(B-title) fog(I-title) rated(O) ?(O)",
}


def test_health(client):
    got = client.get("/v1/health")
    assert got.status_code == 200
    assert got.json()["status"] == "ok"


def test_process_clean_generation(client):
    got = client.post("/v1/process", json={"records": [FIG_RECORD]})
    assert got.status_code == 200
    record = got.json()["records"][0]
    assert record["entities"] == [
        {"start": 2, "end": 4, "type": "title", "text": "the fog"}
    ]
    assert record["stats"]["tier"] == "exact"
    assert record["tags"] == ["O", "O", "B-title", "I-title", "O", "O"]


def test_process_malformed_generation(client):
    rec = dict(FIG_RECORD, generation="xxxx")
    got = client.post("/v1/process", json={"records": [rec]})
    record = got.json()["records"][0]
    assert record["entities"] == []
    assert record["stats"]["malformed"] == 1


def test_process_soft_failure(client):
    rec = {"id": "0", "tokens": ["a"], "label_set": ["T"]}
    got = client.post("/v1/process", json={"records": [rec]})
    record = got.json()["records"][0]
    assert "error" in record
    assert record["entities"] == []
    assert record["tags"] == ["O"]


def test_process_validation_error(client):
    got = client.post("/v1/process", json={"records": [{"id": "0"}]})
    assert got.status_code == 422


def test_evaluate_spans_vs_tags(client):
    payload = {
        "gold": [
            {
                "id": "0",
                "tags": ["O", "O", "B-title", "I-title", "O", "O"],
                "tokens": FIG_RECORD["tokens"],
            }
        ],
        "pred": [
            {
                "id": "0",
                "entities": [
                    {"start": 2, "end": 4, "type": "title", "text": "the fog"}
                ],
            }
        ],
    }
    got = client.post("/v1/evaluate", json=payload)
    assert got.status_code == 200
    report = got.json()
    assert report["f1"] == 1.0
    assert report["tp"] == 1


def test_evaluate_id_mismatch(client):
    payload = {
        "gold": [{"id": "a", "entities": []}],
        "pred": [{"id": "b", "entities": []}],
    }
    got = client.post("/v1/evaluate", json=payload)
    assert got.status_code == 400
    assert "id mismatch" in got.json()["detail"]


def test_build_instances(client):
    payload = {
        "records": [
            {
                "id": "0",
                "tokens": ["John", "went", "home"],
                "label_set": ["Person"],
                "gold_tags": ["B-Person", "O", "O"],
            }
        ],
        "config": {"variant": "token", "scheme": "bio"},
    }
    got = client.post("/v1/build", json=payload)
    assert got.status_code == 200
    inst = got.json()["instances"][0]
    assert inst["input"] == "John went home"
    assert inst["output"] == "John(B-Person) went(O) home(O)"
    assert "entity tags: Person and O." in inst["instruction"]


def test_build_sampling_deterministic(client):
    payload = {
        "records": [
            {
                "id": "0",
                "tokens": ["John"],
                "label_set": ["Person", "Location", "Org", "Misc"],
                "gold_tags": ["B-Person"],
            }
        ],
        "config": {"variant": "token", "shuffle_seed": 9, "external_count": 2},
    }
    first = client.post("/v1/build", json=payload).json()
    second = client.post("/v1/build", json=payload).json()
    assert first == second
    instruction = first["instances"][0]["instruction"]
    assert "Person" in instruction


def test_build_bad_tags_rejected(client):
    payload = {
        "records": [
            {
                "id": "7",
                "tokens": ["a"],
                "label_set": ["T"],
                "gold_tags": ["B-NotThere"],
            }
        ]
    }
    got = client.post("/v1/build", json=payload)
    assert got.status_code == 400
    assert "record 7" in got.json()["detail"]


def test_corrupt_round_trip(client):
    sentences = corpus_of(55, 5)
    records = []
    for i, (seq, _, labels) in enumerate(sentences):
        from tagalign.core import render_tag

        records.append(
            {
                "id": str(i),
                "tokens": list(seq.tokens),
                "label_set": list(labels),
                "gold_tags": [render_tag(t) for t in seq.tags],
            }
        )
    payload = {
        "records": records,
        "config": {"p_omit": 0.3, "entity_safe": True, "seed": 3},
    }
    first = client.post("/v1/corrupt", json=payload).json()
    second = client.post("/v1/corrupt", json=payload).json()
    assert first == second
    out = first["records"]
    assert len(out) == 5
    assert all("generation" in r for r in out)
    # corrupted output feeds straight back into process
    got = client.post("/v1/process", json={"records": out})
    assert got.status_code == 200
    for rec in got.json()["records"]:
        assert rec["stats"]["tier"] in ("exact", "subsequence")


def test_bench_endpoint(client):
    sentences = corpus_of(77, 4)
    records = []
    from tagalign.core import render_tag

    for i, (seq, _, labels) in enumerate(sentences):
        units = " ".join(
            f"{tok}({render_tag(tag)})" for tok, tag in zip(seq.tokens, seq.tags)
        )
        records.append(
            {
                "id": str(i),
                "tokens": list(seq.tokens),
                "label_set": list(labels),
                "generation": units,
            }
        )
    got = client.post(
        "/v1/bench",
        json={"records": records, "repetitions": 1, "warmup": 0},
    )
    assert got.status_code == 200
    body = got.json()
    assert "table" in body and "Sequence Length" in body["table"]
    assert body["report"]["buckets"][0]["speedup_vs_naive"]["naive_dp"] == 1.0


def test_compact_utf8_body(client):
    rec = dict(
        FIG_RECORD,
        tokens=["What", "was", "the", "fög", "rated", "?"],
        generation="What(O) was(O) the(B-title) fög(I-title) rated(O) ?(O)",
    )
    got = client.post("/v1/process", json={"records": [rec]})
    body = got.content.decode("utf-8")
    assert "the fög" in body  # entity text survives, not ASCII-escaped
    assert '": ' not in body  # compact separators
