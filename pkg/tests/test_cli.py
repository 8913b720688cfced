import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from bellsweep.cli import RunConfig, UsageError, main, parse_state_spec, run_command
from bellsweep.report import flatten
from bellsweep.states import PureState, make_named_state, serialize_state

TSIRELSON = 2 * math.sqrt(2)


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def prod_file(tmp_path):
    p = tmp_path / "prod.json"
    p.write_text(serialize_state(PureState(np.kron([0.6, 0.8], [1, 0, 0]), (2, 3))))
    return p


class TestCommands:
    def test_sweep_ghz(self, tmp_path, capsys):
        out = tmp_path / "r.json"
        code, _, _ = run(["sweep", "--state", "ghz:3x2", "--out", str(out)], capsys)
        assert code == 0
        doc = json.loads(out.read_text())
        assert abs(doc["best_violation"] - TSIRELSON) <= 1e-9
        assert doc["verdict"] == "Entangled"
        assert len(doc["records"]) == doc["record_count"] == 18

    def test_analyze_product_assert_separable(self, prod_file, capsys):
        code, out, _ = run(["analyze", "--file", str(prod_file), "--assert-separable"], capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["verdict"] == "Separable"
        assert doc["concurrence"] == 0.0
        assert "records" not in doc

    def test_assertions_fail_with_2(self, prod_file, capsys):
        code, _, err = run(["analyze", "--file", str(prod_file), "--assert-entangled"], capsys)
        assert code == 2 and "assertion failed" in err
        code, _, _ = run(["analyze", "--state", "bell", "--assert-separable"], capsys)
        assert code == 2
        code, _, _ = run(["analyze", "--state", "bell", "--assert-entangled"], capsys)
        assert code == 0

    def test_random_trials(self, capsys):
        code, out, _ = run(["random-trials", "--dims", "2,2", "--n", "1000", "--seed", "7"], capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["counts"]["entangled_not_violating"] == 0
        assert doc["counts"]["separable_violating"] == 0
        assert doc["n"] == 1000

    def test_distill_werner(self, capsys):
        code, out, _ = run(["distill", "--state", "werner:0.85", "--assert-entangled"], capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["verdict"] == "Distillable"
        assert doc["witness"]["output_min_pt_eigenvalue"] < 0
        code, out, _ = run(["distill", "--state", "werner:0.6"], capsys)
        assert json.loads(out)["verdict"] == "Inconclusive"

    def test_ppt(self, capsys):
        code, out, _ = run(["ppt", "--state", "chessboard", "--assert-separable"], capsys)
        assert code == 0
        assert json.loads(out)["verdict"] == "PPT"
        code, out, _ = run(["ppt", "--state", "ghz:3", "--cut", "0,1"], capsys)
        doc = json.loads(out)
        assert len(doc["cuts"]) == 1 and doc["verdict"] == "NPT"

    def test_acin_spec_renormalized(self):
        s = parse_state_spec("acin:l0=0.707,l2=0.707,psi=0")
        assert abs(np.linalg.norm(s.amplitudes) - 1) <= 1e-15
        assert abs(s.amplitudes[0] - 1 / math.sqrt(2)) <= 1e-15

    @pytest.mark.parametrize(
        "spec, dims",
        [("bell:psi-", (2, 2)), ("ghz:4x3", (3, 3, 3, 3)), ("w:4", (2,) * 4),
         ("product:2x3,basis=1x2", (2, 3)), ("haar:2x2x3", (2, 2, 3)),
         ("random-product:3,3", (3, 3)), ("isotropic:3,0.5", (3, 3)), ("werner:0.3", (2, 2))],
    )
    def test_spec_grammar(self, spec, dims):
        assert parse_state_spec(spec, seed=1).dims == dims

    def test_product_basis(self):
        s = parse_state_spec("product:2x3,basis=1x2")
        assert s.amplitudes[5] == 1

    def test_summary_only(self, capsys):
        _, out, _ = run(["sweep", "--state", "bell", "--summary-only"], capsys)
        assert "records" not in json.loads(out)

    def test_entry_point_module(self):
        proc = subprocess.run(
            [sys.executable, "-m", "bellsweep.cli", "analyze", "--state", "bell", "--no-timestamp"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["verdict"] == "Entangled"


class TestOutput:
    @pytest.mark.parametrize(
        "argv",
        [
            ["sweep", "--state", "haar:3x3", "--seed", "11"],
            ["analyze", "--state", "random-product:2x2x2", "--seed", "5"],
            ["random-trials", "--dims", "2,3", "--n", "40", "--seed", "3"],
            ["distill", "--state", "isotropic:3,0.8"],
        ],
    )
    def test_byte_identical(self, argv, tmp_path, capsys):
        paths = []
        for i in range(2):
            p = tmp_path / f"r{i}.json"
            assert main(argv + ["--no-timestamp", "--out", str(p)]) == 0
            paths.append(p.read_bytes())
        assert paths[0] == paths[1]

    def test_timestamp_present_by_default(self, capsys):
        _, out, _ = run(["analyze", "--state", "bell"], capsys)
        assert "generated_at" in json.loads(out)
        _, out, _ = run(["analyze", "--state", "bell", "--no-timestamp"], capsys)
        assert "generated_at" not in json.loads(out)

    def test_csv_matches_json(self, capsys):
        base = ["sweep", "--state", "haar:2x3", "--seed", "2", "--no-timestamp"]
        _, js, _ = run(base, capsys)
        _, cs, _ = run(base + ["--format", "csv"], capsys)
        rows = list(csv.reader(io.StringIO(cs)))
        assert rows[0] == ["key", "value"]
        table = dict(rows[1:])
        flat = flatten(json.loads(js))
        assert len(flat) == len(table)
        for key, value in flat:
            cell = table[key]
            if isinstance(value, bool):
                assert cell == str(value).lower()
            elif value is None:
                assert cell == ""
            elif isinstance(value, float):
                assert float(cell) == value
            else:
                assert cell == str(value)

    def test_seventeen_digits(self, capsys):
        _, out, _ = run(["analyze", "--state", "bell", "--no-timestamp"], capsys)
        doc = json.loads(out)
        assert f'"best_violation": {doc["best_violation"]:.17g}' in out


class TestErrors:
    def test_missing_file(self, tmp_path, capsys):
        code, _, err = run(["analyze", "--file", str(tmp_path / "nope.json")], capsys)
        assert code == 1 and "error" in err

    def test_schema_violation(self, tmp_path, capsys):
        p = tmp_path / "bad.json"
        p.write_text(json.dumps({"kind": "pure", "dims": [2, 2], "amplitudes": [[1, 0]]}))
        code, _, err = run(["analyze", "--file", str(p)], capsys)
        assert code == 1 and err.startswith("error:")

    def test_budget(self, capsys):
        code, _, err = run(["sweep", "--state", "haar:4x4", "--budget", "5"], capsys)
        assert code == 1 and "budget" in err

    def test_two_sources(self, prod_file, capsys):
        code, _, _ = run(["analyze", "--state", "bell", "--file", str(prod_file)], capsys)
        assert code == 1

    def test_no_source(self, capsys):
        assert run(["analyze"], capsys)[0] == 1

    def test_bad_tolerance(self, capsys):
        assert run(["analyze", "--state", "bell", "--tol", "-1"], capsys)[0] == 1

    def test_both_assertions(self, capsys):
        assert run(["analyze", "--state", "bell", "--assert-separable", "--assert-entangled"], capsys)[0] == 1

    def test_argparse_errors_exit_1(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["analyze", "--bogus"])
        assert exc.value.code == 1

    @pytest.mark.parametrize("spec", ["nosuch", "ghz:x", "acin:l9=1", "werner:2", "product:2x2,basis=5x0"])
    def test_bad_specs(self, spec, capsys):
        assert run(["analyze", "--state", spec], capsys)[0] == 1

    def test_validate_direct(self):
        with pytest.raises(UsageError):
            RunConfig("random-trials").validate()
        with pytest.raises(UsageError):
            RunConfig("analyze", state="bell", format="xml").validate()
