import csv
import io
import math
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

import pytest

import chord_statistics
import main
from chord_statistics import crossing_mean_variance
from harness import (EXIT_OK, EXIT_USAGE, EXIT_VERIFICATION, RECORD_FIELDS, ExperimentConfig,
                     ReportRecord, UsageError, draw_statistic, mc_estimate, parse_records,
                     rational, run, serialize_records)
from limitlab import (crossing_pmf_exact, dkw_radius, empirical_kolmogorov,
                      kolmogorov_distance_to_normal)

GOLDEN = Path(__file__).parent / "golden"


def by_statistic(records):
    return {record.statistic: record for record in records}


def sample_records():
    return [
        ReportRecord("exact-simple", 5, 0, 0, "simple_chords.mean", "10/9", True),
        ReportRecord("stats", 6, 11, 500, "crossings.mean", 0.1 + 0.2, False,
                     ci_low=0.25, ci_high=1 / 3, elapsed_ms=12),
        ReportRecord("distance", 3, 0, 0, "simple_chords.tv_poisson_lambda_n", 2 / 7, False,
                     bound=1.2),
    ]


@pytest.mark.parametrize("fmt", ["json", "csv"])
def test_records_round_trip(fmt):
    records = sample_records()
    assert parse_records(serialize_records(records, fmt), fmt) == records


def test_csv_header_order():
    text = serialize_records(sample_records(), "csv")
    assert text.splitlines()[0] == ",".join(RECORD_FIELDS)
    row = next(csv.DictReader(io.StringIO(text)))
    assert row["exact"] == "true"
    assert row["ci_low"] == ""


def test_rational_format():
    assert rational(Fraction(10, 9)) == "10/9"
    assert rational(4) == "4/1"


def test_exact_record_rejects_ci():
    with pytest.raises(AssertionError):
        ReportRecord("exact-simple", 2, 0, 0, "x", "1/3", True, ci_low=0.0, ci_high=1.0)


@pytest.mark.parametrize("changes, flag", [
    ({"n": 0}, "--n"),
    ({"workers": 0}, "--workers"),
    ({"seed": -1}, "--seed"),
    ({"format": "xml"}, "--format"),
    ({"command": "sample", "samples": 0}, "--samples"),
    ({"statistic": "length_j", "j": 4}, "--j"),
])
def test_config_validation_names_flag(changes, flag):
    config = replace(ExperimentConfig("stats", n=4), **changes)
    with pytest.raises(UsageError) as excinfo:
        config.validate()
    assert excinfo.value.flag == flag


def test_config_from_settings():
    config = ExperimentConfig.from_settings("stats", {"seed": 5, "workers": 3}, n=7, seed=None)
    assert (config.seed, config.workers, config.n) == (5, 3, 7)
    assert ExperimentConfig.from_dict(config.to_dict()) == config


def test_exact_simple_n5():
    status, records = run(ExperimentConfig("exact-simple", n=5))
    assert status == EXIT_OK
    mean = by_statistic(records)["simple_chords.mean"]
    assert mean.estimate == "10/9"
    assert mean.exact


def test_exact_crossings():
    status, records = run(ExperimentConfig("exact-crossings", n=4))
    assert status == EXIT_OK
    found = by_statistic(records)
    assert found["crossings.pmf[0]"].estimate == "2/15"
    assert found["crossings.mean"].estimate == "2/1"
    assert found["crossings.variance"].estimate == "28/15"


def test_scfree():
    status, records = run(ExperimentConfig("scfree", n=5))
    assert status == EXIT_OK
    assert by_statistic(records)["scfree.count"].estimate == "293/1"


def test_sb_verify_crossings_n3():
    status, records = run(ExperimentConfig("sb-verify", n=3, statistic="crossings"))
    assert status == EXIT_OK
    assert by_statistic(records)["crossings.match"].estimate == "true"


def test_corrupted_pmf_fails_verification(caplog):
    config = ExperimentConfig("distance", n=3, kind="tv-poisson", corrupt_pmf=True)
    status, _ = run(config)
    assert status == EXIT_VERIFICATION
    assert "simple-chord Poisson bound 10n/(2n-1)^2" in caplog.text


@pytest.mark.parametrize("kind", ["tv-poisson", "tv-poisson-one", "kolmogorov"])
def test_distances_hold(kind):
    status, records = run(ExperimentConfig("distance", n=6, kind=kind))
    assert status == EXIT_OK
    assert all(r.estimate <= r.bound for r in records)


def test_length_distance():
    status, records = run(ExperimentConfig("distance", n=5, kind="tv-length", j=1))
    assert status == EXIT_OK
    assert 0 <= records[0].estimate <= 1


def test_stats_for_pairs():
    status, records = run(ExperimentConfig("stats", pairs="1,8 2,9 3,4 5,7 6,10 11,12"))
    assert status == EXIT_OK
    found = by_statistic(records)
    assert found["crossings"].estimate == "4/1"
    assert found["components"].estimate == "3/1"
    assert all(r.n == 6 for r in records)


def test_stats_rejects_bad_pairs():
    status, _ = run(ExperimentConfig("stats", pairs="1,2 2,3"))
    assert status == EXIT_USAGE


def test_broken_invariant_is_a_verification_failure(monkeypatch):
    def broken(self):
        raise AssertionError("components out of range")

    monkeypatch.setattr(chord_statistics.DiagramStats, "check", broken)
    status, _ = run(ExperimentConfig("stats", pairs="1,2 3,4"))
    assert status == EXIT_VERIFICATION


def test_stein_bound_theoretical():
    status, records = run(ExperimentConfig("stein-bound", n=10))
    assert status == EXIT_OK
    total = by_statistic(records)["stein.total"]
    assert total.estimate <= 12920 / math.sqrt(10)


def test_sample_command():
    status, records = run(ExperimentConfig("sample", n=4, samples=3, seed=9))
    assert status == EXIT_OK
    assert [r.statistic for r in records] == ["diagram[0]", "diagram[1]", "diagram[2]"]
    _, again = run(ExperimentConfig("sample", n=4, samples=3, seed=9))
    assert [r.estimate for r in records] == [r.estimate for r in again]


def test_mc_estimate_is_deterministic():
    first = mc_estimate("crossings", 6, 1000, seed=5, chunk_size=128)
    second = mc_estimate("crossings", 6, 1000, seed=5, chunk_size=128)
    first.elapsed_ms = second.elapsed_ms = 0
    assert first == second
    assert first.ci_low <= 5 <= first.ci_high


def test_workers_do_not_change_estimates():
    single = draw_statistic("crossings", 8, 2048, seed=17, workers=1, chunk_size=256)
    pooled = draw_statistic("crossings", 8, 2048, seed=17, workers=8, chunk_size=256)
    assert single.tolist() == pooled.tolist()
    one = mc_estimate("simple_chords", 8, 2048, seed=17, workers=1, chunk_size=256)
    eight = mc_estimate("simple_chords", 8, 2048, seed=17, workers=8, chunk_size=256)
    assert one.estimate == eight.estimate


def test_dk_estimate_covers_exact_value():
    n = 6
    mu, var = crossing_mean_variance(n)
    exact = kolmogorov_distance_to_normal(crossing_pmf_exact(n), mu, math.sqrt(var))
    record = mc_estimate("crossings", n, 5000, seed=20240101, kind="dk")
    assert record.ci_low <= exact <= record.ci_high


def test_mc_estimate_needs_samples():
    with pytest.raises(UsageError):
        mc_estimate("crossings", 6, 0, seed=1)


def test_cli_golden_csv(tmp_path, config_file):
    out = tmp_path / "exact_simple.csv"
    status = main.main(["--config", config_file, "exact-simple", "--n", "2", "--seed", "0",
                        "--format", "csv", "--out", str(out)])
    assert status == EXIT_OK
    rows = list(csv.reader(io.StringIO(out.read_text())))
    elapsed = rows[0].index("elapsed_ms")
    for row in rows[1:]:
        row[elapsed] = "0"
    buffer = io.StringIO()
    csv.writer(buffer, lineterminator="\n").writerows(rows)
    assert buffer.getvalue() == (GOLDEN / "exact_simple_n2.csv").read_text()


def test_cli_usage_errors(config_file, capsys):
    with pytest.raises(SystemExit) as excinfo:
        main.main(["--config", config_file, "exact-simple", "--format", "xml"])
    assert excinfo.value.code == EXIT_USAGE
    assert "--format" in capsys.readouterr().err
    assert main.main(["--config", config_file, "exact-simple", "--n", "0"]) == EXIT_USAGE


def test_cli_help_names_the_claim(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main.main(["exact-simple", "--help"])
    assert excinfo.value.code == 0
    assert "2n/(2n-1)" in capsys.readouterr().out


def test_cli_corrupted_pmf(config_file, tmp_path):
    status = main.main(["--config", config_file, "distance", "--kind", "tv-poisson", "--n", "3",
                        "--corrupt-pmf", "--out", str(tmp_path / "out.json")])
    assert status == EXIT_VERIFICATION


def test_cli_json_output(config_file, tmp_path):
    out = tmp_path / "out.json"
    assert main.main(["--config", config_file, "sb-verify", "--n", "3", "--out", str(out)]) == EXIT_OK
    records = parse_records(out.read_text(), "json")
    assert by_statistic(records)["crossings.match"].estimate == "true"


@pytest.mark.slow
def test_report_passes():
    status, records = run(ExperimentConfig("report"))
    assert status == EXIT_OK
    assert records


@pytest.mark.slow
def test_dk_calibration_large_sample():
    n = 20
    mu, var = crossing_mean_variance(n)
    exact = kolmogorov_distance_to_normal(crossing_pmf_exact(n), mu, math.sqrt(var))
    record = mc_estimate("crossings", n, 10 ** 6, seed=1, workers=4, kind="dk")
    assert record.ci_low <= exact <= record.ci_high


@pytest.mark.slow
def test_dk_calibration_n6():
    n = 6
    mu, var = crossing_mean_variance(n)
    exact = kolmogorov_distance_to_normal(crossing_pmf_exact(n), mu, math.sqrt(var))
    values = draw_statistic("crossings", n, 10 ** 6, seed=6, workers=4)
    estimate = empirical_kolmogorov((values - float(mu)) / math.sqrt(var))
    assert abs(estimate - exact) <= dkw_radius(10 ** 6, 1e-6)
