import json
import math

import pytest

from chancf.cli import run


def invoke(capsys, *argv):
    code = run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def invoke_json(capsys, *argv):
    code, out, err = invoke(capsys, *argv)
    assert code == 0, f"exit {code}, stderr: {err}"
    return json.loads(out)


class TestExpand:
    def test_rational_input_terminates(self, capsys):
        payload = invoke_json(capsys, "expand", "--m", "2", "--x", "3/10", "--digits", "10")
        assert payload == {"digits": [1, 0, 1], "terminated": True}

    def test_float_input(self, capsys):
        payload = invoke_json(capsys, "expand", "--m", "2", "--x", "0.5", "--digits", "5")
        assert payload["digits"] == [1]
        assert payload["terminated"]

    def test_domain_error_exit_code(self, capsys):
        code, _, err = invoke(capsys, "expand", "--m", "2", "--x", "1.5", "--digits", "5")
        assert code == 1
        assert "error" in err

    def test_bad_number_is_usage_error(self, capsys):
        code, _, _ = invoke(capsys, "expand", "--m", "2", "--x", "zebra", "--digits", "5")
        assert code == 2


class TestDecode:
    def test_example(self, capsys):
        payload = invoke_json(capsys, "decode", "--m", "2", "--digits", "1,0,1")
        assert payload == {"exact": "3/10", "approx": 0.3}

    def test_malformed_digits(self, capsys):
        code, _, _ = invoke(capsys, "decode", "--m", "2", "--digits", "1,x,1")
        assert code == 2
        code, _, _ = invoke(capsys, "decode", "--m", "2", "--digits", "1,-2")
        assert code == 2

    def test_round_trip_through_cli(self, capsys):
        first = invoke_json(capsys, "decode", "--m", "3", "--digits", "2,0,1,3")
        again = invoke_json(capsys, "expand", "--m", "3", "--x", first["exact"],
                            "--digits", "60")
        assert again["terminated"]
        back = invoke_json(capsys, "decode", "--m", "3",
                           "--digits", ",".join(map(str, again["digits"])))
        assert back["exact"] == first["exact"]


class TestCdf:
    def test_at_zero(self, capsys):
        payload = invoke_json(capsys, "cdf", "--m", "2", "--x", "0")
        assert payload["G"] == 0.0
        assert payload["k"] == pytest.approx(1 / math.log(4 / 3), abs=1e-14)

    def test_at_half(self, capsys):
        payload = invoke_json(capsys, "cdf", "--m", "2", "--x", "0.5")
        assert payload["G"] == pytest.approx(math.log(1.2) / math.log(4 / 3), abs=1e-14)
        assert payload["density"] > 0

    def test_full_precision(self, capsys):
        code, out, _ = invoke(capsys, "cdf", "--m", "2", "--x", "0.5")
        assert code == 0
        value = json.loads(out)["G"]
        assert f"{value!r}" in out  # repr round-trip precision in the JSON


class TestIterate:
    def test_basic_run(self, capsys):
        payload = invoke_json(capsys, "iterate", "--m", "2", "--steps", "4",
                              "--grid", "257")
        assert payload["m"] == 2
        assert len(payload["reports"]) == 5
        assert payload["reports"][0]["n"] == 0
        assert payload["reports"][1]["ratio"] < 1
        assert set(payload["reports"][0]) == {"n", "sup_error", "ratio"}
        assert payload["rate"] is None or 0 < payload["rate"] < 1

    def test_rate_fit_present(self, capsys):
        payload = invoke_json(capsys, "iterate", "--m", "2", "--steps", "8",
                              "--grid", "1025", "--window", "5")
        assert 0 < payload["rate"] < 1
        assert payload["rate_degenerate"] is False

    def test_csv_initial_and_dump(self, capsys, tmp_path):
        dump = tmp_path / "final.csv"
        invoke_json(capsys, "iterate", "--m", "2", "--steps", "2", "--grid", "257",
                    "--dump-final", str(dump))
        assert dump.exists()
        payload = invoke_json(capsys, "iterate", "--m", "2", "--steps", "2",
                              "--initial", str(dump))
        assert payload["reports"][0]["sup_error"] < 1e-2

    def test_bad_grid_size(self, capsys):
        code, _, err = invoke(capsys, "iterate", "--m", "2", "--steps", "2",
                              "--grid", "100")
        assert code == 1
        assert "2^k + 1" in err

    def test_missing_csv(self, capsys):
        code, _, _ = invoke(capsys, "iterate", "--m", "2", "--steps", "2",
                            "--initial", "no-such-file.csv")
        assert code == 1


class TestQm:
    def test_base2(self, capsys):
        payload = invoke_json(capsys, "qm", "--m", "2")
        assert payload["below_one"] is True
        assert payload["q_m"] == pytest.approx(0.840761, abs=1e-4)
        assert payload["tail_bound"] < 1e-12

    def test_scan(self, capsys):
        payload = invoke_json(capsys, "qm", "--scan", "2..5")
        assert [row["m"] for row in payload] == [2, 3, 4, 5]
        assert [row["below_one"] for row in payload] == [True, False, False, False]

    def test_requires_one_selector(self, capsys):
        assert invoke(capsys, "qm")[0] == 2
        assert invoke(capsys, "qm", "--m", "2", "--scan", "2..3")[0] == 2

    def test_domain(self, capsys):
        assert invoke(capsys, "qm", "--m", "1")[0] == 1


class TestAudit:
    def test_base2(self, capsys):
        payload = invoke_json(capsys, "audit", "--m", "2")
        assert payload["printed_value"] == pytest.approx(121 / 72)
        assert payload["printed_at_most_one"] is False
        assert payload["q_m_below_one"] is True
        assert payload["verdict"] == "printed-chain-exceeds-one-series-contracts"

    def test_base3(self, capsys):
        payload = invoke_json(capsys, "audit", "--m", "3")
        assert payload["printed_value"] > 1
        assert payload["q_m_below_one"] is False


class TestSample:
    def test_report_shape(self, capsys):
        payload = invoke_json(capsys, "sample", "--m", "2", "--points", "20000",
                              "--burn-in", "5", "--seed", "7")
        assert payload["n_samples"] == 20000
        assert sum(payload["counts"].values()) == 20000
        assert payload["chi_square"] >= 0
        assert 0 < payload["expected"]["0"] < 1

    def test_deterministic(self, capsys):
        a = invoke_json(capsys, "sample", "--m", "2", "--points", "5000",
                        "--burn-in", "3", "--seed", "11")
        b = invoke_json(capsys, "sample", "--m", "2", "--points", "5000",
                        "--burn-in", "3", "--seed", "11")
        assert a == b


class TestFormatsAndUsage:
    def test_plain_format(self, capsys):
        code, out, _ = invoke(capsys, "--format", "plain", "cdf", "--m", "2", "--x", "0")
        assert code == 0
        assert "G=0.0" in out

    def test_csv_format_for_iterate(self, capsys):
        code, out, _ = invoke(capsys, "--format", "csv", "iterate", "--m", "2",
                              "--steps", "2", "--grid", "257")
        assert code == 0
        assert out.splitlines()[0] == "n,sup_error,ratio"

    def test_csv_format_rejected_for_scalars(self, capsys):
        code, _, _ = invoke(capsys, "--format", "csv", "cdf", "--m", "2", "--x", "0")
        assert code == 1

    def test_unknown_command(self, capsys):
        assert invoke(capsys, "frobnicate")[0] == 2

    def test_missing_required(self, capsys):
        assert invoke(capsys, "expand", "--m", "2")[0] == 2

    def test_help_exits_zero(self, capsys):
        assert invoke(capsys, "--help")[0] == 0
