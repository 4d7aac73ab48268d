"""Command-line surface: subcommands, file formats, exit codes."""

import json

import pytest

from orchmach.cli import main
from orchmach.fileio import (breed_from_obj, breed_to_obj, load_breed,
                             save_breed)


@pytest.fixture
def workdir(tmp_path, breeds):
    for name in ("cd", "ab", "xy", "cdg", "ej"):
        save_breed(breeds[name], tmp_path / f"{name}.json")
    (tmp_path / "fig2c.ndtm").write_text(
        "0,0 -> 1,0,R | 1,1,R\n1,0 -> 2,0,R | 2,1,R\n")
    return tmp_path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out.strip(), out.err


class TestRunTm:
    def test_machine_e(self, capsys):
        code, out, _ = run(capsys, "run-tm", "--code", "1,0,4")
        assert code == 0
        assert "steps 1 ones 1" in out

    def test_json_mode(self, capsys):
        code, out, _ = run(capsys, "run-tm", "--code", "1,0,4", "--json")
        obj = json.loads(out)
        assert obj["steps"] == 1 and obj["bb_steps"] == 2

    def test_malformed_exits_1(self, capsys):
        code, _out, err = run(capsys, "run-tm", "--code", "1,0")
        assert code == 1 and "error" in err

    def test_from_file(self, capsys, tmp_path):
        f = tmp_path / "m.txt"
        f.write_text("(1, 0, 4)\n")
        code, out, _ = run(capsys, "run-tm", "--file", f)
        assert code == 0 and "steps 1" in out

    def test_cap_reached(self, capsys):
        code, out, _ = run(capsys, "run-tm", "--code", "1,0,5", "--cap", "50")
        assert code == 0 and "cap reached steps 50" in out


class TestRunBreed:
    def test_cd_n(self, capsys, workdir):
        code, out, _ = run(capsys, "run-breed", "--breed", workdir / "cd.json",
                           "--seed", "1", "--return", "N")
        assert code == 0 and out == "3"

    def test_xy_scripted_0110(self, capsys, workdir):
        code, out, _ = run(capsys, "run-breed", "--breed", workdir / "xy.json",
                           "--engine", "om2", "--word", "0110",
                           "--script", "x,x,y,y", "--return", "N")
        assert code == 0 and out == "5"

    def test_cap_marker(self, capsys, workdir):
        code, out, _ = run(capsys, "run-breed", "--breed", workdir / "ej.json",
                           "--seed", "1", "--cap", "1000", "--return", "N")
        assert code == 0 and out.startswith("inf")

    def test_policy_error_exits_2(self, capsys, workdir):
        code, _out, err = run(capsys, "run-breed", "--breed", workdir / "cdg.json",
                              "--script", "g", "--return", "N")
        assert code == 2 and "error" in err

    def test_return_modes(self, capsys, workdir):
        code, out, _ = run(capsys, "run-breed", "--breed", workdir / "cd.json",
                           "--seed", "1", "--return", "T")
        assert code == 0 and set(out) <= {"0", "1"}
        code, out, _ = run(capsys, "run-breed", "--breed", workdir / "cd.json",
                           "--seed", "1", "--return", "O")
        assert code == 0 and len(out.split(",")) == 2
        code, out, _ = run(capsys, "run-breed", "--breed", workdir / "cd.json",
                           "--seed", "1", "--return", "o")
        assert code == 0 and out == "2"

    def test_json_trace(self, capsys, workdir):
        code, out, _ = run(capsys, "run-breed", "--breed", workdir / "cd.json",
                           "--seed", "1", "--json")
        obj = json.loads(out)
        assert obj["N"] == 3 and obj["o2"] == 2 and len(obj["selections"]) == 2

    def test_catalog_reference(self, capsys):
        code, out, _ = run(capsys, "run-breed", "--breed", "@cd",
                           "--seed", "0", "--return", "N")
        assert code == 0 and out == "3"

    def test_om3_engine(self, capsys, workdir):
        code, out, _ = run(capsys, "run-breed", "--breed", workdir / "ej.json",
                           "--engine", "om3", "--inputs", ",1",
                           "--script", "e,j,e,j", "--return", "N")
        assert code == 0 and out.startswith("inf (script_end")

    def test_trace_log_written(self, capsys, workdir):
        log = workdir / "trace.jsonl"
        run(capsys, "run-breed", "--breed", workdir / "cd.json",
            "--seed", "2", "--trace-out", log)
        rec = json.loads(log.read_text().splitlines()[0])
        assert rec["breed"] == "cd" and rec["halted"] is True
        assert rec["policy"] == {"kind": "seeded_random", "seed": 2}
        assert rec["selections_total"] == 2

    def test_missing_file_exits_1(self, capsys):
        code, _out, err = run(capsys, "run-breed", "--breed", "nope.json")
        assert code == 1


class TestAnalyzeEnumerate:
    def test_enumerate_cd(self, capsys, workdir):
        code, out, _ = run(capsys, "enumerate", "--breed", workdir / "cd.json",
                           "--depth", "10", "--json")
        obj = json.loads(out)
        assert obj["verdict"] == "certified_convergent"
        assert obj["computations"] == 4 and obj["n_values"] == [3]

    def test_analyze_purebred_cdg(self, capsys, workdir):
        code, out, _ = run(capsys, "analyze", "--breed", workdir / "cdg.json",
                           "--purebred", "--json")
        obj = json.loads(out)
        assert code == 0
        assert obj["verdict"] == "not_purebred" and obj["witnesses"] == ["C", "D"]

    def test_analyze_convergence_divergent(self, capsys, workdir):
        code, out, _ = run(capsys, "analyze", "--breed", workdir / "ej.json",
                           "--convergence", "--json")
        obj = json.loads(out)
        assert obj["verdict"] == "divergent" and obj["witnesses"][0]["kind"] == "cycle"

    def test_analyze_iq_eq(self, capsys, workdir):
        code, out, _ = run(capsys, "analyze", "--breed", workdir / "cd.json",
                           "--iq-eq", "--json")
        obj = json.loads(out)
        assert obj["iq_lower"] == 3 and obj["eq_lower"] == 2 and obj["exact"]

    def test_analyze_language(self, capsys, workdir):
        code, out, _ = run(capsys, "analyze", "--breed", workdir / "xy.json",
                           "--language", "--depth", "16", "--json")
        obj = json.loads(out)
        assert "0110" in obj["accepted"]

    def test_analyze_w_iq(self, capsys, workdir):
        code, out, _ = run(capsys, "analyze", "--breed", workdir / "xy.json",
                           "--w-iq", "01", "--depth", "16", "--json")
        obj = json.loads(out)
        assert obj["iq_lower"] >= 2

    def test_unknown_verdict_exits_0(self, capsys, workdir):
        code, out, _ = run(capsys, "analyze", "--breed", workdir / "ej.json",
                           "--purebred", "--json")
        assert code == 0 and json.loads(out)["verdict"] == "unknown"


class TestDecomposeVerify:
    def test_pipeline(self, capsys, workdir):
        breed_out = workdir / "fig2c-breed.json"
        code, _out, _ = run(capsys, "decompose", "--ndtm", workdir / "fig2c.ndtm",
                            "-o", breed_out)
        assert code == 0 and breed_out.exists()
        assert len(load_breed(breed_out)) == 4
        code, out, _ = run(capsys, "verify", "--ndtm", workdir / "fig2c.ndtm",
                           "--breed", breed_out, "--cap", "10")
        assert code == 0 and out.startswith("equivalent")

    def test_verify_against_cd(self, capsys, workdir):
        code, out, _ = run(capsys, "verify", "--ndtm", workdir / "fig2c.ndtm",
                           "--breed", workdir / "cd.json", "--cap", "10", "--json")
        assert json.loads(out)["status"] == "equivalent"


class TestSearchIqPlot:
    def test_pipeline(self, capsys, workdir):
        results = workdir / "results.jsonl"
        cfg = workdir / "exp.json"
        cfg.write_text(json.dumps({"breed": str(workdir / "cd.json"),
                                   "episodes": 30, "cap": 100}))
        code, out, _ = run(capsys, "search", "--config", cfg, "-o", results,
                           "--json")
        assert code == 0
        summary = json.loads(out)
        assert summary["halted"] == 30 and summary["best_by_N"] == [2, 3, 1]
        assert len(results.read_text().splitlines()) == 30

        plot = workdir / "plot.csv"
        code, _out, _ = run(capsys, "iq-plot", "--in", results, "-o", plot)
        assert code == 0
        assert plot.read_text() == "o2,maxN\n2,3\n"

    def test_search_table(self, capsys, workdir):
        table = workdir / "table.csv"
        code, _out, _ = run(capsys, "search", "--breed", workdir / "cd.json",
                            "--episodes", "10", "--cap", "100",
                            "-o", workdir / "r.jsonl", "--table", table,
                            "--individual-cap", "1000")
        assert code == 0
        lines = table.read_text().splitlines()
        assert lines[0].startswith("breed,1s,c_t") and lines[1].startswith("cd,2,2")


class TestReplayCli:
    def test_oseq_roundtrip(self, capsys, workdir):
        dump = workdir / "cd.oseq"
        run(capsys, "run-breed", "--breed", workdir / "cd.json", "--seed", "7",
            "--oseq-out", dump, "--return", "N")
        lines = dump.read_text().splitlines()
        assert lines[0] == "step,member,from_index,to_index"
        assert len(lines) == 3
        code, out, _ = run(capsys, "replay", "--breed", workdir / "cd.json",
                           "--oseq", dump)
        assert code == 0 and "halted N=3" in out

    def test_script_replay_mismatch_exits_2(self, capsys, workdir):
        code, _out, err = run(capsys, "replay", "--breed", workdir / "cdg.json",
                              "--script", "g,g")
        assert code == 2


class TestBreedFiles:
    def test_roundtrip_binary_and_blank(self, breeds, tmp_path):
        for name in ("cd", "xy", "xxpy", "champion"):
            p = tmp_path / f"{name}.json"
            save_breed(breeds[name], p)
            again = load_breed(p)
            assert [m.name for m in again.members] == \
                   [m.name for m in breeds[name].members]
            assert [m.rules for m in again.members] == \
                   [m.rules for m in breeds[name].members]

    def test_code_entries_for_binary_machines(self, breeds):
        obj = breed_to_obj(breeds["cd"])
        assert [m["code"] for m in obj["machines"]] == [[2, 0, 8, 2, 14],
                                                        [2, 0, 11, 2, 17]]

    def test_rules_entries_for_blank_machines(self, breeds):
        obj = breed_to_obj(breeds["xy"])
        assert all("rules" in m for m in obj["machines"])

    def test_rejects_both_or_neither(self):
        with pytest.raises(ValueError):
            breed_from_obj({"name": "b", "machines": [{"name": "m"}]})
        with pytest.raises(ValueError):
            breed_from_obj({"name": "b", "machines": [
                {"name": "m", "code": [0], "rules": []}]})

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            breed_from_obj({"name": "b", "machines": []})
