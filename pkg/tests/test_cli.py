import json

import pytest

from sfckit.cli import main
from sfckit.scenario import bundled_scenario_path


@pytest.fixture
def small_scenario(tmp_path):
    """Bundled catalog shrunk for fast CLI runs."""
    raw = json.loads(bundled_scenario_path().read_text())
    raw["request_count"] = 12
    raw["substrate"]["node_count"] = 20
    path = tmp_path / "small.json"
    path.write_text(json.dumps(raw))
    return path


def test_design_command(tmp_path, small_scenario, capsys):
    out = tmp_path / "results"
    assert main(["design", "--scenario", str(small_scenario),
                 "--out", str(out)]) == 0
    text = (out / "design.csv").read_text()
    assert "web-service" in text
    assert "full-backup" in text
    # voip rows are flagged, never silently feasible
    voip_rows = [ln for ln in text.splitlines() if ",voip," in ln]
    assert voip_rows and all(",no," in ln for ln in voip_rows)


def test_design_deterministic_bytes(tmp_path, small_scenario):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    main(["design", "--scenario", str(small_scenario), "--out", str(out1)])
    main(["design", "--scenario", str(small_scenario), "--out", str(out2)])
    assert (out1 / "design.csv").read_bytes() == \
        (out2 / "design.csv").read_bytes()


def test_place_command(tmp_path, small_scenario):
    out = tmp_path / "results"
    assert main(["place", "--scenario", str(small_scenario),
                 "--out", str(out), "--methods", "ilp,mma,mdm,ffd"]) == 0
    lines = (out / "place.csv").read_text().splitlines()
    assert lines[0] == "method,request_count,active_nodes,proposal_count,stable,note"
    assert len(lines) == 5


def test_place_deterministic_bytes(tmp_path, small_scenario):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    main(["place", "--scenario", str(small_scenario), "--out", str(out1)])
    main(["place", "--scenario", str(small_scenario), "--out", str(out2)])
    assert (out1 / "place.csv").read_bytes() == \
        (out2 / "place.csv").read_bytes()


def test_place_exact_skip_threshold(tmp_path, small_scenario, monkeypatch):
    monkeypatch.setenv("SFCKIT_EXACT_LIMIT", "5")
    out = tmp_path / "results"
    assert main(["place", "--scenario", str(small_scenario),
                 "--out", str(out), "--methods", "ilp"]) == 0
    text = (out / "place.csv").read_text()
    assert "skipped" in text


def test_validate_command(tmp_path, small_scenario):
    out = tmp_path / "results"
    code = main(["validate", "--scenario", str(small_scenario),
                 "--out", str(out), "--arrivals", "60000"])
    assert code == 0
    text = (out / "validate.csv").read_text()
    assert "FAIL" not in text
    assert "delay-des" in text and "reliability-exact" in text


def test_simulate_command(tmp_path, small_scenario):
    out = tmp_path / "results"
    assert main(["simulate", "--scenario", str(small_scenario),
                 "--out", str(out), "--arrivals", "20000",
                 "--setting", "mm1"]) == 0
    lines = (out / "simulate.csv").read_text().splitlines()
    assert len(lines) > 4


def test_bench_command(tmp_path, small_scenario):
    out = tmp_path / "results"
    assert main(["bench", "--scenario", str(small_scenario),
                 "--out", str(out), "--sizes", "5,10",
                 "--methods", "mma,mdm"]) == 0
    lines = (out / "bench.csv").read_text().splitlines()
    assert len(lines) == 5


def test_missing_scenario_is_input_error(tmp_path):
    assert main(["design", "--scenario", str(tmp_path / "nope.json"),
                 "--out", str(tmp_path)]) == 2


def test_invalid_scenario_is_input_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema_version": 1}')
    assert main(["design", "--scenario", str(bad),
                 "--out", str(tmp_path)]) == 2


def test_broken_json_is_input_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    assert main(["place", "--scenario", str(bad),
                 "--out", str(tmp_path)]) == 2


def test_unknown_method_is_input_error(tmp_path, small_scenario):
    assert main(["place", "--scenario", str(small_scenario),
                 "--out", str(tmp_path), "--methods", "magic"]) == 2


def test_validate_exits_nonzero_on_unstable_scenario(tmp_path):
    raw = json.loads(bundled_scenario_path().read_text())
    for svc in raw["services"]:
        for vnf in svc["vnfs"]:
            vnf["service_rate"] = 90.0
    path = tmp_path / "unstable.json"
    path.write_text(json.dumps(raw))
    out = tmp_path / "results"
    assert main(["validate", "--scenario", str(path), "--out", str(out),
                 "--arrivals", "10000"]) == 1
    assert "FAIL" in (out / "validate.csv").read_text()


def test_design_records_errors_without_aborting(tmp_path):
    raw = json.loads(bundled_scenario_path().read_text())
    for vnf in raw["services"][0]["vnfs"]:
        vnf["service_rate"] = 90.0
    path = tmp_path / "mixed.json"
    path.write_text(json.dumps(raw))
    out = tmp_path / "results"
    assert main(["design", "--scenario", str(path), "--out", str(out)]) == 0
    text = (out / "design.csv").read_text()
    assert "error: unstable stage" in text
    assert "online-gaming" in text  # healthy services still reported
