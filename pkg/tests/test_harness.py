import io
import json

import pytest

from aqsbench.cli import main
from aqsbench.errors import InvalidConfig, IoFailure
from aqsbench.harness import Report, ScenarioConfig, emit_report, run_scenario


def strip_clock(text):
    d = json.loads(text)
    d.pop("duration_ms")
    return json.dumps(d, sort_keys=True)


def test_honest_bell_accepts():
    r = run_scenario(ScenarioConfig("honest", "bell", n=8, trials=100))
    assert r.rate("accepted") == 1.0
    assert r.rate("message_intact") == 1.0
    assert len(r.trials) == 100


def test_forge_existential_bell():
    r = run_scenario(ScenarioConfig("forge-existential", "bell", n=8, trials=100))
    assert r.rate("forgery_accepted") == 1.0
    assert r.rate("message_changed") == 1.0


def test_disavow_plain():
    r = run_scenario(ScenarioConfig("disavow", "plain", trials=100))
    assert r.rate("dispute_bob_forged") == 1.0
    assert r.rate("accepted") == 1.0


def test_forge_universal_reports_target():
    r = run_scenario(ScenarioConfig("forge-universal", "plain", n=6, trials=20))
    assert r.rate("matches_target") == 1.0
    assert all(len(t["target"]) == 6 for t in r.trials)


def test_enumerate_scenario():
    r = run_scenario(ScenarioConfig("forge-enumerate", "bell", n=2, trials=3))
    assert [t["count"] for t in r.trials] == [15, 15, 15]


def test_json_round_trip():
    r = run_scenario(ScenarioConfig("honest", "plain", n=2, trials=1))
    buf = io.StringIO()
    emit_report(r, "json", buf)
    back = Report.from_json(buf.getvalue())
    assert back == r
    assert set(json.loads(buf.getvalue())) == {"schema_version", "config", "trials", "aggregates", "duration_ms"}


def test_json_rejects_unknown_schema():
    d = run_scenario(ScenarioConfig("honest", n=1, trials=1)).to_dict()
    d["schema_version"] = 99
    with pytest.raises(ValueError):
        Report.from_dict(d)


def test_text_format():
    r = run_scenario(ScenarioConfig("disavow", "bell", n=2, trials=5))
    buf = io.StringIO()
    emit_report(r, "text", buf)
    text = buf.getvalue()
    assert "disavow" in text
    assert "dispute_bob_forged" in text and "rate=1.0000" in text


def test_unwritable_destination(tmp_path):
    r = run_scenario(ScenarioConfig("honest", n=1, trials=1))
    with pytest.raises(IoFailure):
        emit_report(r, "json", tmp_path / "missing" / "report.json")


def test_emit_to_file(tmp_path):
    r = run_scenario(ScenarioConfig("honest", n=1, trials=2))
    out = tmp_path / "r.json"
    emit_report(r, "json", out)
    assert Report.from_json(out.read_text()) == r


@pytest.mark.parametrize("scenario", ["honest", "forge-existential", "disavow", "swaptest-calibration"])
def test_replay_determinism(scenario):
    cfg = ScenarioConfig(scenario, "bell", n=3, trials=10, seed=12345, comparison="physical", swap_repetitions=2)
    assert strip_clock(run_scenario(cfg).to_json()) == strip_clock(run_scenario(cfg).to_json())


def test_trials_are_order_independent():
    a = run_scenario(ScenarioConfig("forge-universal", n=4, trials=6, seed=7))
    b = run_scenario(ScenarioConfig("forge-universal", n=4, trials=3, seed=7))
    assert a.trials[:3] == b.trials


def test_seed_changes_outcomes():
    a = run_scenario(ScenarioConfig("forge-universal", n=8, trials=5, seed=1))
    b = run_scenario(ScenarioConfig("forge-universal", n=8, trials=5, seed=2))
    assert [t["target"] for t in a.trials] != [t["target"] for t in b.trials]


def test_rate_sanity():
    r = run_scenario(ScenarioConfig("disavow", "bell", n=2, trials=40, comparison="physical"))
    for agg in r.aggregates.values():
        assert 0 <= agg["rate"] <= 1
        assert agg["rate"] == agg["successes"] / agg["trials"]
        assert agg["trials"] == 40


def test_calibration_expected_values():
    r = run_scenario(ScenarioConfig("swaptest-calibration", trials=10, swap_repetitions=2))
    assert r.aggregates["pass_f0"]["expected"] == 0.25
    assert r.aggregates["pass_f1"]["rate"] == 1.0


@pytest.mark.parametrize("kwargs,field", [
    (dict(scenario="nope"), "scenario"),
    (dict(scenario="honest", protocol="rsa"), "protocol"),
    (dict(scenario="honest", n=0), "n"),
    (dict(scenario="honest", trials=0), "trials"),
    (dict(scenario="honest", seed=-1), "seed"),
    (dict(scenario="honest", comparison="guess"), "comparison"),
    (dict(scenario="honest", swap_repetitions=0), "swap_repetitions"),
    (dict(scenario="honest", variant="other"), "variant"),
    (dict(scenario="honest", protocol="plain", variant="trent_retains"), "variant"),
    (dict(scenario="honest", timing="later"), "timing"),
    (dict(scenario="forge-enumerate", n=9), "n"),
    (dict(scenario="forge-universal", protocol="plain", timing="pre"), "timing"),
])
def test_invalid_config(kwargs, field):
    with pytest.raises(InvalidConfig) as info:
        run_scenario(ScenarioConfig(**kwargs))
    assert info.value.field == field


def test_cli_success(capsys):
    assert main(["--scenario", "honest", "--n", "2", "--trials", "3", "--format", "json"]) == 0
    report = Report.from_json(capsys.readouterr().out)
    assert report.rate("accepted") == 1.0


def test_cli_invalid_config(capsys):
    assert main(["--scenario", "honest", "--n", "0"]) == 2
    assert "n" in capsys.readouterr().err


def test_cli_io_failure(tmp_path, capsys):
    assert main(["--scenario", "honest", "--n", "1", "--trials", "1", "--out", str(tmp_path / "no" / "x")]) == 1
