import json
import math

import pytest

from shiftpress.cli import main


@pytest.fixture
def files(tmp_path):
    paths = {}
    paths["full2"] = tmp_path / "full2.json"
    paths["full2"].write_text(json.dumps({"alphabet": 2, "full": True}))
    paths["golden"] = tmp_path / "golden.json"
    paths["golden"].write_text(json.dumps({"alphabet": 2, "transitions": [[1, 1], [1, 0]]}))
    paths["oneway"] = tmp_path / "oneway.json"
    paths["oneway"].write_text(json.dumps({"alphabet": 2, "transitions": [[1, 1], [0, 1]]}))
    paths["zero"] = tmp_path / "zero.json"
    paths["zero"].write_text(json.dumps({"memory": 1, "table": {"0": 0.0, "1": 0.0}}))
    paths["weighted"] = tmp_path / "weighted.json"
    paths["weighted"].write_text(json.dumps({"memory": 1, "table": {"0": 0.0, "1": 0.1}}))
    paths["badjson"] = tmp_path / "bad.json"
    paths["badjson"].write_text("{not json")
    paths["tmp"] = tmp_path
    return paths


def run(files, *argv):
    out = files["tmp"] / "out.txt"
    code = main([*argv, "--out", str(out)])
    text = out.read_text() if out.exists() else ""
    return code, text


class TestPressure:
    def test_full2(self, files):
        code, text = run(files, "pressure", "--system", str(files["full2"]), "--potential", str(files["zero"]))
        assert code == 0
        payload = json.loads(text)
        assert payload["oracle"]["value"] == pytest.approx(math.log(2), abs=1e-9)
        assert payload["gap"] < 0.05

    def test_golden(self, files):
        code, text = run(files, "pressure", "--system", str(files["golden"]), "--potential", str(files["zero"]))
        assert code == 0
        payload = json.loads(text)
        assert payload["oracle"]["value"] == pytest.approx(0.481212, abs=1e-6)

    def test_missing_file_exit2(self, files, capsys):
        code = main(["pressure", "--system", str(files["tmp"] / "nope.json"), "--potential", str(files["zero"])])
        assert code == 2

    def test_malformed_json_exit2(self, files):
        code, _ = run(files, "pressure", "--system", str(files["badjson"]), "--potential", str(files["zero"]))
        assert code == 2

    def test_entropy_alias(self, files):
        code, text = run(files, "entropy", "--system", str(files["golden"]))
        assert code == 0
        payload = json.loads(text)
        assert payload["oracle"]["value"] == pytest.approx(0.481212, abs=1e-6)

    def test_memory2_potential_file(self, files):
        phi2 = files["tmp"] / "mem2.json"
        phi2.write_text(json.dumps({"memory": 2, "table": {"00": 0.2, "01": 0.5, "10": 0.1}}))
        code, text = run(files, "pressure", "--system", str(files["golden"]), "--potential", str(phi2))
        assert code == 0
        payload = json.loads(text)
        assert payload["gap"] < 0.05

    def test_memory2_missing_entry_exit2(self, files):
        phi2 = files["tmp"] / "mem2bad.json"
        phi2.write_text(json.dumps({"memory": 2, "table": {"00": 0.2, "01": 0.5}}))
        code, _ = run(files, "pressure", "--system", str(files["golden"]), "--potential", str(phi2))
        assert code == 2


class TestPstarAndSpectrum:
    def test_pstar(self, files):
        code, text = run(files, "pstar", "--system", str(files["golden"]), "--potential", str(files["weighted"]))
        assert code == 0
        payload = json.loads(text)
        assert payload["value"] == pytest.approx(0.05, abs=1e-12)
        assert len(payload["finite_means"]) == 20

    def test_spectrum_gap(self, files):
        code, text = run(
            files, "spectrum", "--system", str(files["full2"]), "--potential", str(files["zero"]),
            "--cycle-cap", "10", "--grid", "50",
        )
        assert code == 0
        gap_line = next(l for l in text.splitlines() if l.startswith("# max_gap"))
        assert float(gap_line.split(":")[1]) < 0.05

    def test_spectrum_no_cycles_budget(self, files):
        code, text = run(
            files, "spectrum", "--system", str(files["full2"]), "--potential", str(files["zero"]),
            "--cycle-cap", "0", "--grid", "5",
        )
        assert code == 0
        rows = [l for l in text.splitlines() if l and not l.startswith("#")]
        assert rows[0] == "kind,parameter,entropy,integral,pressure"
        assert len(rows) == 2 and rows[1].startswith("gibbs")

    def test_non_transitive_exit3(self, files):
        code, _ = run(files, "spectrum", "--system", str(files["oneway"]), "--potential", str(files["zero"]))
        assert code == 3


class TestConstructAndDensity:
    def test_construct_certified(self, files):
        code, text = run(
            files, "construct", "--system", str(files["full2"]), "--potential", str(files["zero"]),
            "--alpha", "0.35", "--eta0", "0.1",
        )
        assert code == 0
        payload = json.loads(text)
        assert payload["certified"] is True
        assert all(i["ok"] for i in payload["inequalities"])
        assert len(payload["words"]) == payload["params"]["E_size"]

    def test_alpha_out_of_range_exit3(self, files):
        code, _ = run(
            files, "construct", "--system", str(files["full2"]), "--potential", str(files["zero"]),
            "--alpha", "0.9", "--eta0", "0.1",
        )
        assert code == 3

    def test_n_cap_exit3(self, files):
        code, _ = run(
            files, "construct", "--system", str(files["full2"]), "--potential", str(files["zero"]),
            "--alpha", "0.35", "--eta0", "0.1", "--n-cap", "3",
        )
        assert code == 3

    def test_density_rows(self, files):
        code, text = run(
            files, "density", "--system", str(files["full2"]), "--potential", str(files["zero"]),
            "--grid", "4", "--eta0", "0.1",
        )
        assert code == 0
        rows = [l for l in text.splitlines() if l and not l.startswith("#")]
        assert rows[0] == "alpha,certified,pressure,gap,N,tau,E_size"
        assert len(rows) == 5
        assert all(r.split(",")[1] == "true" for r in rows[1:])

    def test_density_grid_zero_exit2(self, files):
        code, _ = run(
            files, "density", "--system", str(files["full2"]), "--potential", str(files["zero"]),
            "--grid", "0", "--eta0", "0.1",
        )
        assert code == 2

    def test_density_deterministic_modulo_wallclock(self, files):
        argv = [
            "density", "--system", str(files["golden"]), "--potential", str(files["weighted"]),
            "--grid", "3", "--eta0", "0.1",
        ]
        out1 = files["tmp"] / "d1.csv"
        out2 = files["tmp"] / "d2.csv"
        out3 = files["tmp"] / "d3.csv"
        assert main([*argv, "--out", str(out1)]) == 0
        assert main([*argv, "--out", str(out2)]) == 0
        # results are independent of the worker count
        assert main([*argv, "--workers", "4", "--out", str(out3)]) == 0
        strip = lambda p: [l for l in p.read_text().splitlines() if not l.startswith("# wallclock")]
        assert strip(out1) == strip(out2)
        rows = lambda p: [l for l in p.read_text().splitlines() if not l.startswith("#")]
        assert rows(out1) == rows(out3)

    def test_check_trivial_passes(self, files):
        code, text = run(files, "check", "--system", str(files["golden"]), "--potential", str(files["weighted"]))
        assert code == 0
        payload = json.loads(text)
        assert payload["all_pass"] is True
        assert len(payload["conditions"]) == 5

    def test_verify_bounds(self, files):
        code, text = run(
            files, "verify-bounds", "--system", str(files["full2"]), "--potential", str(files["zero"]),
            "--alpha", "0.12", "--eta0", "0.1", "--n-list", "3,4",
        )
        assert code == 0
        payload = json.loads(text)
        assert payload["counting_bounds"]["3"]["ok"] and payload["counting_bounds"]["4"]["ok"]

    def test_header_fields_present(self, files):
        code, text = run(
            files, "construct", "--system", str(files["full2"]), "--potential", str(files["zero"]),
            "--alpha", "0.35", "--eta0", "0.1",
        )
        payload = json.loads(text)
        header = payload["header"]
        assert set(header) == {"version", "config_hash", "seed", "wallclock"}
