"""Tests for the command-line client, including one live-server round trip."""

import json
import threading
import time

import pytest
from click.testing import CliRunner

from twistedwreath.cli import main

INFINITE_ARTIFACT = {
    "case": 1,
    "automorphism": {
        "group": "2^1:1",
        "k": 1,
        "f_blocks": ["1"],
        "m": "-1",
        "twist": [0],
    },
    "predicted_r": 2,
    "block_layout": ["2^1:1 = identity fiber"],
}


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture(scope="module")
def live_server():
    import uvicorn

    from twistedwreath.service.app import create_app

    config = uvicorn.Config(
        create_app(), host="127.0.0.1", port=8752, log_level="error"
    )
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("server did not start")
        time.sleep(0.02)
    yield "http://127.0.0.1:8752"
    server.should_exit = True
    thread.join(timeout=5)


def invoke(runner, args, **kwargs):
    return runner.invoke(main, args, catch_exceptions=False, **kwargs)


class TestClassify:
    def test_happy_path(self, runner):
        result = invoke(runner, ["classify", "--group", "2^1:2,3^1:2", "--k", "3"])
        assert result.exit_code == 0
        body = json.loads(result.output)
        assert body["applicable_cases"] == [1]

    def test_bad_group_exits_2(self, runner):
        result = invoke(runner, ["classify", "--group", "2^2", "--k", "1"])
        assert result.exit_code == 2

    def test_no_case_still_exit_0(self, runner):
        result = invoke(runner, ["classify", "--group", "2^1:1", "--k", "2"])
        assert result.exit_code == 0
        assert json.loads(result.output)["applicable_cases"] == []


class TestConstruct:
    def test_json_out_and_quiet(self, runner, tmp_path):
        out = tmp_path / "c.json"
        result = invoke(
            runner,
            [
                "construct",
                "--group",
                "5^1:1",
                "--k",
                "1",
                "--case",
                "1",
                "--json-out",
                str(out),
                "--quiet",
            ],
        )
        assert result.exit_code == 0
        assert result.output == ""
        artifact = json.loads(out.read_text())
        assert artifact["case"] == 1
        assert artifact["predicted_r"] == 2
        assert artifact["automorphism"]["m"] == "-1"

    def test_no_applicable_case_exits_2(self, runner):
        result = invoke(runner, ["construct", "--group", "2^1:1", "--k", "2"])
        assert result.exit_code == 2

    def test_bad_case_value_exits_2(self, runner):
        result = invoke(
            runner, ["construct", "--group", "5^1:1", "--k", "1", "--case", "9"]
        )
        assert result.exit_code == 2


class TestVerify:
    def _artifact(self, runner, tmp_path):
        out = tmp_path / "c.json"
        invoke(
            runner,
            ["construct", "--group", "5^1:1", "--k", "1", "--json-out", str(out), "--quiet"],
        )
        return out

    def test_from_file(self, runner, tmp_path):
        path = self._artifact(runner, tmp_path)
        result = invoke(runner, ["verify", "--construction", str(path)])
        assert result.exit_code == 0
        body = json.loads(result.output)
        assert body["r_total"] == 2
        assert body["certified"]

    def test_inline_json(self, runner, tmp_path):
        text = self._artifact(runner, tmp_path).read_text()
        result = invoke(runner, ["verify", "--construction", text])
        assert result.exit_code == 0

    def test_stdin(self, runner, tmp_path):
        text = self._artifact(runner, tmp_path).read_text()
        result = invoke(runner, ["verify", "--construction", "-"], input=text)
        assert result.exit_code == 0

    def test_missing_file_exits_2(self, runner):
        result = invoke(runner, ["verify", "--construction", "/nonexistent.json"])
        assert result.exit_code == 2

    def test_corrupted_matrix_exits_2(self, runner):
        bad = json.loads(json.dumps(INFINITE_ARTIFACT))
        bad["automorphism"]["m"] = "2"
        result = invoke(runner, ["verify", "--construction", json.dumps(bad)])
        assert result.exit_code == 2

    def test_extra_field_exits_2(self, runner):
        bad = json.loads(json.dumps(INFINITE_ARTIFACT))
        bad["surprise"] = 1
        result = invoke(runner, ["verify", "--construction", json.dumps(bad)])
        assert result.exit_code == 2

    def test_uncertified_exits_1(self, runner):
        result = invoke(
            runner, ["verify", "--construction", json.dumps(INFINITE_ARTIFACT)]
        )
        assert result.exit_code == 1
        body = json.loads(result.output)
        assert body["r_total"] == "infinite"


class TestOracle:
    def test_counts(self, runner):
        result = invoke(
            runner, ["oracle", "--group", "5^1:1", "--k", "1", "--n", "2"]
        )
        assert result.exit_code == 0
        body = json.loads(result.output)
        assert body["class_count"] == 2
        assert body["counts_agree"]

    def test_cap_exits_3(self, runner):
        result = invoke(
            runner,
            ["oracle", "--group", "5^1:1", "--k", "1", "--n", "4", "--cap", "100"],
        )
        assert result.exit_code == 3

    def test_n_below_2_exits_2(self, runner):
        result = invoke(runner, ["oracle", "--group", "5^1:1", "--k", "1", "--n", "1"])
        assert result.exit_code == 2


class TestReport:
    def test_pipeline_and_determinism(self, runner, tmp_path):
        args = [
            "report",
            "--group",
            "5^1:1",
            "--k",
            "1",
            "--case",
            "1",
            "--n",
            "2",
            "--n",
            "3",
            "--seed",
            "5",
            "--quiet",
        ]
        first = tmp_path / "a.json"
        second = tmp_path / "b.json"
        r1 = invoke(runner, args + ["--json-out", str(first)])
        r2 = invoke(runner, args + ["--json-out", str(second)])
        assert r1.exit_code == 0 and r2.exit_code == 0
        assert first.read_bytes() == second.read_bytes()
        body = json.loads(first.read_text())
        assert body["consistency_ok"]
        assert body["input"]["seed"] == 5
        assert [q["n"] for q in body["quotients"]] == [2, 3]

    def test_bad_n_exits_2(self, runner):
        result = invoke(
            runner, ["report", "--group", "5^1:1", "--k", "1", "--n", "1"]
        )
        assert result.exit_code == 2


class TestServerMode:
    def test_classify_roundtrip(self, runner, live_server):
        local = invoke(runner, ["classify", "--group", "5^1:1", "--k", "1"])
        remote = invoke(
            runner,
            ["classify", "--group", "5^1:1", "--k", "1", "--server", live_server],
        )
        assert remote.exit_code == 0
        assert json.loads(remote.output) == json.loads(local.output)

    def test_server_maps_input_error(self, runner, live_server):
        result = invoke(
            runner, ["classify", "--group", "x", "--k", "1", "--server", live_server]
        )
        assert result.exit_code == 2

    def test_server_maps_cap(self, runner, live_server):
        result = invoke(
            runner,
            [
                "oracle",
                "--group",
                "5^1:1",
                "--k",
                "1",
                "--n",
                "4",
                "--cap",
                "100",
                "--server",
                live_server,
            ],
        )
        assert result.exit_code == 3

    def test_unreachable_server_exits_2(self, runner):
        result = invoke(
            runner,
            [
                "classify",
                "--group",
                "5^1:1",
                "--k",
                "1",
                "--server",
                "http://127.0.0.1:1",
            ],
        )
        assert result.exit_code == 2
