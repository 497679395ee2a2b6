import json

from extreme_chains import cli


def write_config(tmp_path, name, payload):
    p = tmp_path / name
    p.write_text(json.dumps(payload))
    return str(p)


CHI_CONFIG = {
    "kind": "chi",
    "seed": 7,
    "kernel": {"id": "gaussian_copula", "rho": 0.8, "margin": "exponential"},
    "u_grid": [0.9, 0.95],
    "n_paths": 5_000,
    "t": 1,
}

FIG1_CONFIG = {"kind": "figure1", "seed": 21, "x0": 10.0, "horizon": 4,
               "n_paths": 800}


def read(path):
    with open(path, "rb") as fh:
        return fh.read()


class TestRunExperiment:

    def test_chi_outputs_and_manifest(self, tmp_path):
        out = tmp_path / "out"
        cfg = write_config(tmp_path, "chi.json", CHI_CONFIG)
        rc = cli.main(["run", "--config", cfg, "--out", str(out), "--workers", "1"])
        assert rc == 0
        assert (out / "chi.csv").exists()
        manifest = json.loads((out / "manifest.json").read_text())
        # manifest references every written file with matching row counts
        for entry in manifest["outputs"]:
            lines = (out / entry["file"]).read_text().splitlines()
            assert len(lines) - 1 == entry["rows"]
        # config echo round-trips
        assert manifest["config"] == CHI_CONFIG

    def test_same_seed_byte_identical(self, tmp_path):
        cfg = write_config(tmp_path, "chi.json", CHI_CONFIG)
        assert cli.main(["run", "--config", cfg, "--out", str(tmp_path / "a"),
                         "--workers", "1"]) == 0
        assert cli.main(["run", "--config", cfg, "--out", str(tmp_path / "b"),
                         "--workers", "1"]) == 0
        assert read(tmp_path / "a" / "chi.csv") == read(tmp_path / "b" / "chi.csv")

    def test_worker_count_invariance(self, tmp_path):
        cfg = write_config(tmp_path, "chi.json", CHI_CONFIG)
        assert cli.main(["run", "--config", cfg, "--out", str(tmp_path / "w1"),
                         "--workers", "1"]) == 0
        assert cli.main(["run", "--config", cfg, "--out", str(tmp_path / "w3"),
                         "--workers", "3"]) == 0
        assert read(tmp_path / "w1" / "chi.csv") == read(tmp_path / "w3" / "chi.csv")

    def test_figure1_files(self, tmp_path):
        cfg = write_config(tmp_path, "f.json", FIG1_CONFIG)
        out = tmp_path / "fig"
        assert cli.main(["run", "--config", cfg, "--out", str(out),
                         "--workers", "2"]) == 0
        for tag in ("i", "ii", "iii", "iv"):
            text = (out / f"chain_{tag}.csv").read_text().splitlines()
            sources = {line.split(",")[0] for line in text[1:]}
            if tag == "iii":
                assert sources == {"actual"}     # no limiting kernel for (iii)
            else:
                assert sources == {"actual", "tailchain"}

    def test_simulate_and_hidden_kinds(self, tmp_path):
        sim = {"kind": "simulate", "seed": 3,
               "kernel": {"id": "rootzen_smith"},
               "init": {"u": 9.0}, "horizon": 3, "n_paths": 40}
        cfg = write_config(tmp_path, "sim.json", sim)
        out = tmp_path / "sim"
        assert cli.main(["run", "--config", cfg, "--out", str(out)]) == 0
        lines = (out / "paths.csv").read_text().splitlines()
        assert lines[0] == "path,t,value"
        assert len(lines) - 1 == 40 * 4

        hid = {"kind": "hidden", "seed": 4, "example": "rootzen_smith",
               "horizon": 5, "n_paths": 32}
        cfg = write_config(tmp_path, "hid.json", hid)
        out = tmp_path / "hid"
        assert cli.main(["run", "--config", cfg, "--out", str(out)]) == 0
        lines = (out / "hidden_paths.csv").read_text().splitlines()
        assert lines[0] == "path,t,value,regime,is_changepoint"
        assert len(lines) - 1 == 32 * 5

    def test_negdep_kind(self, tmp_path):
        cfg = write_config(tmp_path, "n.json", {
            "kind": "negdep", "seed": 5, "rho": -0.8, "x0": 20.0,
            "horizon": 2, "n_paths": 4_000})
        out = tmp_path / "neg"
        assert cli.main(["run", "--config", cfg, "--out", str(out)]) == 0
        lines = (out / "negdep_signs.csv").read_text().splitlines()
        assert lines[0] == "t,sign_match_freq"
        assert float(lines[1].split(",")[1]) > 0.95

    def test_converge_kind(self, tmp_path):
        cfg = write_config(tmp_path, "c.json", {
            "kind": "converge", "seed": 6,
            "kernel": {"id": "gaussian_copula", "rho": 0.8,
                       "margin": "exponential"},
            "scheme": {"id": "ht_canonical", "alpha": 0.64, "beta": 0.5},
            "limit_law": {"id": "gaussian_exponential", "rho": 0.8},
            "v_grid": [6.0, 12.0], "n_paths": 4_000, "t": 1})
        out = tmp_path / "conv"
        assert cli.main(["run", "--config", cfg, "--out", str(out)]) == 0
        lines = (out / "convergence.csv").read_text().splitlines()
        assert len(lines) == 3
        rlines = (out / "remainders.csv").read_text().splitlines()
        assert rlines[0] == "t,v,x,r_a,r_b"
        # x = -5 is out of range at these thresholds, so 2 of 6 rows drop
        assert len(rlines) == 1 + 4


class TestErrors:

    def test_unknown_kind_exits_2(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "bad.json", {"kind": "nope", "seed": 1})
        assert cli.main(["run", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
        err = json.loads(capsys.readouterr().err)
        assert err["category"] == "config"

    def test_missing_seed_exits_2(self, tmp_path):
        cfg = write_config(tmp_path, "bad.json", {"kind": "chi"})
        assert cli.main(["run", "--config", cfg, "--out", str(tmp_path / "o")]) == 2

    def test_invalid_json_exits_2(self, tmp_path):
        p = tmp_path / "broken.json"
        p.write_text("{not json")
        assert cli.main(["run", "--config", str(p),
                         "--out", str(tmp_path / "o")]) == 2

    def test_bad_kernel_parameter_exits_2(self, tmp_path):
        cfg = write_config(tmp_path, "bad.json", {
            "kind": "chi", "seed": 1,
            "kernel": {"id": "gaussian_copula", "rho": 0.0},
            "u_grid": [0.9], "n_paths": 100})
        assert cli.main(["run", "--config", cfg, "--out", str(tmp_path / "o")]) == 2

    def test_numeric_failure_exits_3(self, tmp_path):
        # threshold beyond the quantile range -> numeric category
        cfg = write_config(tmp_path, "bad.json", {
            "kind": "simulate", "seed": 1,
            "kernel": {"id": "gaussian_copula", "rho": 0.8,
                       "margin": "exponential"},
            "init": {"u": 1e310}, "horizon": 1, "n_paths": 10})
        assert cli.main(["run", "--config", cfg, "--out", str(tmp_path / "o")]) == 3
