import json
from unittest import mock

import pytest
import requests

from scaffoldgen.prompts import PromptText, StageKind
from scaffoldgen.transport import (
    FixtureMissError,
    FixtureTransport,
    LiveTransport,
    RecordingTransport,
    TransportError,
    prompt_key,
)


def _prompt(body="hello world"):
    return PromptText(StageKind.WORKFLOW_ANALYSIS, body)


class TestFixtureTransport:
    def test_replay_is_byte_exact(self, tmp_path):
        prompt = _prompt()
        recorded = "response with trailing newline\nand unicode — ✓\n"
        (tmp_path / f"{prompt_key(prompt)}.txt").write_text(recorded, encoding="utf-8")
        transport = FixtureTransport(tmp_path)
        assert transport.send(prompt) == recorded

    def test_miss_names_the_hash(self, tmp_path):
        transport = FixtureTransport(tmp_path)
        prompt = _prompt("nothing recorded")
        with pytest.raises(FixtureMissError) as excinfo:
            transport.send(prompt)
        assert prompt_key(prompt) in str(excinfo.value)

    def test_missing_directory_rejected(self, tmp_path):
        with pytest.raises(TransportError):
            FixtureTransport(tmp_path / "absent")

    def test_key_depends_only_on_body(self):
        a = PromptText(StageKind.WORKFLOW_ANALYSIS, "same body")
        b = PromptText(StageKind.TOOL_SELECTION, "same body")
        assert prompt_key(a) == prompt_key(b)


class TestRecordingTransport:
    def test_records_for_replay(self, tmp_path):
        class Inner:
            def send(self, prompt):
                return "inner says hi\n"

        recording = RecordingTransport(Inner(), tmp_path / "rec")
        prompt = _prompt()
        assert recording.send(prompt) == "inner says hi\n"
        replay = FixtureTransport(tmp_path / "rec")
        assert replay.send(prompt) == "inner says hi\n"


def _response(payload, status=200):
    response = mock.Mock()
    response.status_code = status
    response.json.return_value = payload
    if status >= 400:
        response.raise_for_status.side_effect = requests.HTTPError(f"{status}")
    else:
        response.raise_for_status.return_value = None
    return response


class TestLiveTransport:
    def test_missing_api_key(self, monkeypatch):
        monkeypatch.delenv("SCAFFOLDGEN_API_KEY", raising=False)
        transport = LiveTransport()
        with pytest.raises(TransportError, match="SCAFFOLDGEN_API_KEY"):
            transport.send(_prompt())

    def test_success_extracts_text(self, monkeypatch):
        monkeypatch.setenv("SCAFFOLDGEN_API_KEY", "k")
        payload = {"choices": [{"message": {"content": "model output"}}]}
        with mock.patch("scaffoldgen.transport.requests.post", return_value=_response(payload)) as post:
            transport = LiveTransport(model="test-model")
            assert transport.send(_prompt()) == "model output"
        body = post.call_args.kwargs["json"]
        assert body["model"] == "test-model"
        assert body["messages"][0]["content"] == "hello world"

    def test_retries_then_fails_with_attempt_count(self, monkeypatch):
        monkeypatch.setenv("SCAFFOLDGEN_API_KEY", "k")
        with mock.patch(
            "scaffoldgen.transport.requests.post",
            side_effect=requests.ConnectionError("down"),
        ) as post:
            transport = LiveTransport(max_retries=3, backoff=0.0)
            with pytest.raises(TransportError) as excinfo:
                transport.send(_prompt())
        assert post.call_count == 3
        assert excinfo.value.attempts == 3

    def test_recovers_on_second_attempt(self, monkeypatch):
        monkeypatch.setenv("SCAFFOLDGEN_API_KEY", "k")
        good = _response({"choices": [{"message": {"content": "ok"}}]})
        with mock.patch(
            "scaffoldgen.transport.requests.post",
            side_effect=[requests.ConnectionError("down"), good],
        ):
            transport = LiveTransport(max_retries=3, backoff=0.0)
            assert transport.send(_prompt()) == "ok"
