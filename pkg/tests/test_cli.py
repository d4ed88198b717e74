import csv
import json

import pytest

from qgelab.cli import (COMMANDS, RunConfig, build_parser, cmd_angles,
                        cmd_debruijn, cmd_highpowers, cmd_kostlan,
                        cmd_normality, cmd_overlaps, main, parse_thresholds,
                        write_report)


def small_cfg(subcommand, **overrides):
    base = dict(subcommand=subcommand, N=3, trials=2000, seed=12)
    base.update(overrides)
    return RunConfig(**base)


def strip_runtime(report):
    # compare as JSON text: NaN p-values would break dict equality
    payload = report.to_dict()
    payload.pop("runtime_seconds")
    return json.dumps(payload, sort_keys=True, default=str)


def test_kostlan_small_run_passes():
    report = cmd_kostlan(small_cfg("kostlan"))
    assert report.passed
    names = [s.name for s in report.statistics]
    assert "order_1" in names and "exact_triangle[1+t]" in names
    assert report.exclusions["pairing_failed"] == 0


def test_kostlan_truncated_ensemble():
    cfg = small_cfg("kostlan", ensemble="truncated_unitary", N=2, trunc_n=1,
                    trials=4000)
    report = cmd_kostlan(cfg)
    assert report.passed
    assert "truncated" in report.law


def test_kostlan_product_is_descriptive():
    cfg = small_cfg("kostlan", ensemble="product", N=2, factors=2, trials=1500)
    report = cmd_kostlan(cfg)
    assert report.experimental
    assert all(not s.asserted for s in report.statistics)
    assert report.passed  # nothing asserted, so nothing can fail


def test_highpowers_default_above_boundary():
    cfg = small_cfg("highpowers", N=2, trials=3000)
    report = cmd_highpowers(cfg)
    assert report.passed
    assert "M=5" in report.law
    control = [s for s in report.statistics if s.name.startswith("control_")]
    assert control and all(not s.asserted for s in control)


def test_highpowers_boundary_reports_counterexample():
    cfg = small_cfg("highpowers", N=2, trials=2000, m_power=4)
    report = cmd_highpowers(cfg)
    moments = {m.name: m for m in report.moments}
    assert moments["exact_E_prod_1_plus_Re_power4"].empirical == pytest.approx(-3.0)
    real_stats = [s for s in report.statistics
                  if s.asserted and s.name.startswith("real_")]
    assert any(not s.verdict for s in real_stats)


def test_overlaps_battery():
    report = cmd_overlaps(small_cfg("overlaps", N=4, trials=40))
    assert report.passed
    names = [s.name for s in report.statistics]
    for expected in ("row_sums_max_dev", "min_eigenvalue_max_dev",
                     "recurrence_vs_dense", "conditioned_exact_N50",
                     "conditioned_limit_N200"):
        assert expected in names


def test_angles_battery():
    report = cmd_angles(small_cfg("angles", N=4, trials=60))
    assert report.passed


def test_debruijn_battery():
    report = cmd_debruijn(small_cfg("debruijn", trials=4))
    assert report.passed


def test_normality_battery():
    report = cmd_normality(small_cfg("normality", N=16, trials=500))
    assert report.passed


def test_reports_replay_bit_for_bit():
    cfg_a = small_cfg("kostlan", N=2, trials=1000)
    cfg_b = small_cfg("kostlan", N=2, trials=1000)
    assert strip_runtime(cmd_kostlan(cfg_a)) == strip_runtime(cmd_kostlan(cfg_b))


def test_replay_from_embedded_config():
    # the config dictionary embedded in a report is a complete RunConfig
    first = cmd_overlaps(small_cfg("overlaps", N=3, trials=20))
    replayed = cmd_overlaps(RunConfig(**first.config))
    assert strip_runtime(first) == strip_runtime(replayed)


def test_threads_do_not_change_results():
    base = strip_runtime(cmd_kostlan(small_cfg("kostlan", N=2, trials=1500)))
    threaded = strip_runtime(cmd_kostlan(small_cfg("kostlan", N=2, trials=1500,
                                                   threads=4)))
    assert base.replace('"threads": 1', '"threads": 4') == threaded


def test_threshold_override_changes_verdict():
    cfg = small_cfg("kostlan", N=2, trials=1000,
                    thresholds={"order_1": 1e-12})
    report = cmd_kostlan(cfg)
    stat = next(s for s in report.statistics if s.name == "order_1")
    assert not stat.verdict and not report.passed


def test_write_json_report(tmp_path):
    out = tmp_path / "report.json"
    cfg = small_cfg("debruijn", trials=2, out=str(out), format="json")
    report = cmd_debruijn(cfg)
    write_report(report, cfg)
    payload = json.loads(out.read_text())
    assert payload["passed"] is True
    assert payload["config"]["seed"] == 12
    assert {s["name"] for s in payload["statistics"]} == \
        {"debruijn_N1", "debruijn_N2", "debruijn_N3"}


def test_write_csv_report(tmp_path):
    out = tmp_path / "report.csv"
    cfg = small_cfg("debruijn", trials=2, out=str(out), format="csv")
    report = cmd_debruijn(cfg)
    write_report(report, cfg)
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 3
    assert set(rows[0]) == {"name", "n", "ks_distance", "p_value", "threshold",
                            "verdict"}
    assert all(row["verdict"] == "pass" for row in rows)


def test_parse_thresholds():
    assert parse_thresholds(["a=0.5", "b=1e-9"]) == {"a": 0.5, "b": 1e-9}
    with pytest.raises(SystemExit):
        parse_thresholds(["broken"])


def test_parser_flags():
    args = build_parser().parse_args(
        ["kostlan", "--ensemble", "spherical", "--n", "2", "--trials", "10",
         "--seed", "3", "--threshold", "order_1=0.5", "--format", "csv"])
    assert args.subcommand == "kostlan" and args.ensemble == "spherical"
    assert args.n == 2 and args.threshold == ["order_1=0.5"]


def test_main_exit_codes(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("QGELAB_THREADS", "1")
    out = tmp_path / "r.json"
    code = main(["debruijn", "--trials", "2", "--seed", "4",
                 "--out", str(out), "--format", "json"])
    assert code == 0 and out.exists()
    captured = capsys.readouterr()
    assert "PASS" in captured.out
    # an impossible threshold forces a failing verdict and exit code 1
    code = main(["debruijn", "--trials", "2", "--seed", "4",
                 "--threshold", "debruijn_N1=0"])
    assert code == 1


def test_all_commands_registered():
    assert set(COMMANDS) == {"kostlan", "highpowers", "overlaps", "angles",
                             "debruijn", "normality"}
