import json

import pytest

from orderforge import cli
from orderforge.taskfile import TaskFileError, parse_task_file

HEAD = "[ring]\nfield = Q\nvars = u, v, w\n"


def run(tmp_path, text, *flags, name="t.task"):
    path = tmp_path / name
    path.write_text(text)
    out = tmp_path / "report.json"
    code = cli.main(["run", str(path), "--out", str(out), *flags])
    report = json.loads(out.read_text()) if out.exists() else None
    return code, report


def test_depth_task_passes(tmp_path, capsys):
    code, rep = run(tmp_path, HEAD + "[tasks]\ndepth ideal=(u,v,w) module=R expect=3\n")
    assert code == 0
    t = rep["tasks"][0]
    assert (t["status"], t["value"], t["line"], t["op"]) == ("pass", 3, 5, "depth")
    assert rep["tool"] == "orderforge" and rep["seed"] == 0
    assert "wall_time" in t


def test_literal_pair_expected_certified_fails(tmp_path):
    code, rep = run(tmp_path, HEAD + "[tasks]\ntheorem1 algebra=quaternion(-1,-1) f=u*i+v g=w*j expect=certified\n")
    assert code == 1
    assert rep["tasks"][0]["status"] == "fail"
    assert rep["tasks"][0]["value"] == "rejected(nonfree_locus_codim=2)"


def test_malformed_polynomial_is_parse_error(tmp_path, capsys):
    code, rep = run(tmp_path, HEAD + "[tasks]\ndepth ideal=(u^) module=R\n")
    assert code == 2 and rep is None
    err = capsys.readouterr().err
    assert "t.task:5:" in err


def test_parse_error_positions():
    with pytest.raises(TaskFileError) as exc:
        parse_task_file(HEAD + "[tasks]\ndepth ideal=(u, v^) module=R\n", "x.task", cli.SIGNATURES)
    assert (exc.value.line, exc.value.col) == (5, 19)
    with pytest.raises(TaskFileError) as exc:
        parse_task_file(HEAD + "[tasks]\nfrobnicate ideal=(u)\n", "x.task", cli.SIGNATURES)
    assert "unknown task" in str(exc.value)
    with pytest.raises(TaskFileError, match="needs module"):
        parse_task_file(HEAD + "[tasks]\ndepth ideal=(u)\n", "x.task", cli.SIGNATURES)
    with pytest.raises(TaskFileError, match="no argument"):
        parse_task_file(HEAD + "[tasks]\nrank module=R colour=red\n", "x.task", cli.SIGNATURES)
    with pytest.raises(TaskFileError, match="unknown field"):
        parse_task_file("[ring]\nfield = Z\nvars = u\n", "x.task", cli.SIGNATURES)


def test_names_reset_with_each_ring(tmp_path):
    text = HEAD + "[define]\nideal m = (u, v, w)\n[tasks]\ndepth ideal=m module=R expect=3\n" + \
        HEAD + "[tasks]\ndepth ideal=m module=R\n"
    with pytest.raises(TaskFileError, match="expected an ideal"):
        parse_task_file(text, "x.task", cli.SIGNATURES)


def test_isolated_failures_and_error_expectations(tmp_path):
    text = HEAD + "[tasks]\n" \
        "depth ideal=(u,v) module=R expect=3\n" \
        "pair_search algebra=quaternion(-1,-1) target=(u,v) expect=error(PreconditionError)\n" \
        "pd module=R/(u) expect=1\n" \
        "syzygy_order n=1\n"
    code, rep = run(tmp_path, text)
    assert [t["status"] for t in rep["tasks"]] == ["fail", "pass", "pass", "error"]
    assert rep["tasks"][3]["error"]["type"] == "PreconditionError"
    assert code == 1
    assert rep["summary"] == {"pass": 2, "fail": 1, "error": 1, "total": 4,
                              "wall_time": rep["summary"]["wall_time"]}


def test_internal_error_exits_two(tmp_path, monkeypatch):
    def broken(a, ctx):
        raise AssertionError("invariant violated")
    fn, sig = cli.OPS["rank"]
    monkeypatch.setitem(cli.OPS, "rank", (broken, sig))
    code, rep = run(tmp_path, HEAD + "[tasks]\nrank module=R\n")
    assert code == 2 and rep["tasks"][0]["internal"]


def test_field_expectations_and_aliases(tmp_path):
    text = HEAD + "[define]\nalgebra A = structure(1, e; e*e = 0)\n[tasks]\n" \
        "azumaya algebra=A expect=false expect.locus=(0) expect.codim=0\n" \
        "dimension ideal=(u^2+v^2,w) expect.codim=2 expect.dim=1\n" \
        "colon ideal=(u*w,v*w) by=(u,v) expect=\"( w )\"\n" \
        "syzygy_order expect=certified expect.checks.end_rank.value=4\n" \
        "surface_order module=R expect=rejected\n"
    code, rep = run(tmp_path, text)
    assert code == 0
    assert [t["status"] for t in rep["tasks"]] == ["pass"] * 5


def test_gf3_and_quotient_rings(tmp_path):
    text = "[ring]\nfield = GF(3)\nvars = u, v, w\n[tasks]\nazumaya algebra=quaternion(-1,-1) expect=true\n" \
        "[ring]\nvars = u, v, w\nquotient = u*v - w^2\ndomain = true\n[tasks]\n" \
        "depth_ext ideal=(u,v,w) module=ideal(u,w) expect=2\n"
    code, rep = run(tmp_path, text)
    assert code == 0


def test_determinism_hash_and_check(tmp_path, capsys):
    text = HEAD + "[tasks]\ndepth ideal=(u,v,w) module=koszul expect=2\ndouble_dual ideal=(u,v) expect=R\n"
    code, rep = run(tmp_path, text, "--seed", "11")
    assert code == 0 and rep["seed"] == 11
    assert rep["determinism_hash"] == cli.determinism_hash(rep)
    report_path = tmp_path / "report.json"
    assert cli.main(["check", str(report_path)]) == 0
    rep["tasks"][0]["value"] = 3
    report_path.write_text(json.dumps(rep))
    assert cli.main(["check", str(report_path)]) == 1


def test_run_check_against_prior(tmp_path):
    text = HEAD + "[tasks]\nrank module=koszul expect=2\n"
    code, rep = run(tmp_path, text)
    prior = tmp_path / "prior.json"
    (tmp_path / "report.json").rename(prior)
    path = tmp_path / "t.task"
    assert cli.main(["run", str(path), "--check", str(prior), "--threads", "2"]) == 0


def test_polynomials_in_report_parse_back(tmp_path):
    text = HEAD + "[tasks]\nfitting_locus module=ideal(u,v)\n"
    _, rep = run(tmp_path, text)
    text2 = HEAD + f"[tasks]\ndimension ideal={rep['tasks'][0]['result']['locus'].replace(' ', '')} expect.codim=2\n"
    code, _ = run(tmp_path, text2, name="u.task")
    assert code == 0


def test_list_and_builtins(capsys):
    assert cli.main(["list"]) == 0
    out = capsys.readouterr().out
    assert "builtin:c01_depth_dim3" in out and "builtin:c10_azumaya" in out
    assert cli.main(["run", "builtin:c09_double_dual", "-q"]) == 0
    assert cli.main(["run", "builtin:nope"]) == 2


def test_usage_errors():
    assert cli.main([]) == 2
    assert cli.main(["run", "x.task", "--threads", "0"]) == 2
    assert cli.main(["run", "x.task", "--seed", "-1"]) == 2
    assert cli.main(["run", "/nonexistent/file.task"]) == 2
