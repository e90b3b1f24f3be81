import json

import pytest

from expsum_lab import koszul
from expsum_lab.charsum import SumCache
from expsum_lab.cli import main
from expsum_lab.ffield import FieldSpec
from expsum_lab.pipeline import Job, run


def job(p, n, f, **kw):
    return Job(field=FieldSpec(p), n=n, f=f, **kw)


def cli(capsys, *args):
    code = main(list(args) + ["--no-cache"])
    return code, capsys.readouterr()


def test_mf_prints_number(capsys):
    code, out = cli(capsys, "mf", "--p", "5", "--n", "2", "--f", "x1^2*x2 + x2^2")
    assert code == 0
    assert out.out.strip() == "3"


def test_check_negative_control(capsys):
    code, out = cli(capsys, "check", "--p", "5", "--n", "2", "--f", "x1^2*x2 + x1^2")
    assert code == 1
    assert "singularity on f^(δ′)=0" in out.out


def test_check_p_dividing_delta_takes_second_route(capsys):
    code, out = cli(capsys, "check", "--p", "3", "--n", "2", "--f", "x1^2*x2 + x2^2")
    assert code == 0
    assert "theorem: 1.11" in out.out


def test_missing_job_file(capsys, tmp_path):
    code, out = cli(capsys, "full", "--job", str(tmp_path / "missing.json"))
    assert code == 3
    assert "cannot load job" in out.err


def test_bad_polynomial(capsys):
    code, _ = cli(capsys, "check", "--p", "5", "--n", "2", "--f", "x1^^2")
    assert code == 3


def test_milnor_subcommand(capsys):
    code, out = cli(capsys, "milnor", "--p", "2", "--n", "2", "--f", "x1^3*x2 + x1*x2^3 + x1^3")
    assert code == 0
    assert "P1: (1, 1) residue degree 1 mu=2" in out.out


def test_budget_error_is_exit_3(capsys):
    code, out = cli(capsys, "lfun", "--p", "5", "--n", "2", "--f", "x1^2*x2 + x2^2", "--budget", "1000")
    assert code == 3
    assert "exceeds budget" in out.out


def test_resource_error_outranks_hypothesis_failure():
    rep = run(job(5, 2, "x1^2*x2 + x1^2", i_max=3, budget=1000))
    assert rep.data["hypotheses"]["verdict"] == "fail"
    assert rep.exit_code == 3


def test_mismatch_banner(monkeypatch):
    real = koszul.mf_from_cokernel

    def off_by_one(decomp, r_max=None, **kw):
        res = real(decomp, r_max, **kw)
        res.total += 1
        return res

    monkeypatch.setattr(koszul, "mf_from_cokernel", off_by_one)
    rep = run(job(5, 2, "x1^2*x2 + x2^2"), ("hypotheses", "koszul"))
    assert rep.banner == "MISMATCH"
    assert rep.exit_code == 2
    assert not rep.data["mf"]["consistent"]


def test_job_b_report(tmp_path):
    rep = run(job(2, 2, "x1^3*x2 + x1*x2^3 + x1^3", guard=2), cache=SumCache(tmp_path))
    d = rep.data
    assert rep.exit_code == 0 and rep.banner is None
    assert d["report_version"] == 1
    assert d["hypotheses"]["theorem"] == "1.11"
    assert {k: d["mf"][k] for k in ("formula", "cokernel", "l_degree", "spectral")} == \
        {"formula": 7, "cokernel": 7, "l_degree": 7, "spectral": 7}
    assert d["lfunction"]["purity"] == "reported-only"
    assert all(d["checks"].values())
    assert d["hypotheses"]["b_interval"] == ["4/3", "8/5"]


def test_job_c_guard_reduction():
    rep = run(job(7, 2, "x1^3 + x2^3 + x1", budget=7 ** 10))
    d = rep.data
    assert rep.exit_code == 0
    assert d["hypotheses"]["theorem"] == "regular-sequence"
    assert d["lfunction"]["guard"] == 1
    assert "guard reduced from 4 to 1 to fit the point budget" in d["caveats"]
    assert d["lfunction"]["purity"] == "asserted"
    assert max(abs(r["abs"] - 7) for r in d["lfunction"]["roots"]) < 1e-9


def test_exploratory_imax_on_failing_job():
    rep = run(job(5, 2, "x1^2*x2 + x1^2", i_max=2), ("hypotheses", "lfunction"))
    lf = rep.data["lfunction"]
    assert lf["certified_degree"] is None
    assert len(lf["series"]) == 3
    assert rep.exit_code == 1


def test_determinism_and_cache(tmp_path):
    j = job(2, 2, "x1^3*x2 + x1*x2^3 + x1^3")
    cold = run(j, cache=SumCache(tmp_path)).dumps()
    warm_cache = SumCache(tmp_path)
    warm = run(j, cache=warm_cache)
    assert warm_cache.hits > 0 and warm_cache.misses == 0
    assert warm.dumps() == cold
    assert run(j).dumps() == cold
    assert json.dumps(json.loads(cold), indent=2, sort_keys=True, ensure_ascii=False) == cold
    assert "timing" not in json.loads(cold)
    assert "cache_hits" in json.loads(warm.dumps(timing=True))["timing"]


def test_job_file_round_trip(tmp_path, capsys):
    j = job(5, 2, "x1^2*x2 + x2^2", guard=1, total_degrees={"P1": 2})
    path = tmp_path / "job.json"
    path.write_text(json.dumps(j.to_json()))
    assert Job.load(path).to_json() == j.to_json()
    out = tmp_path / "report.json"
    code = main(["full", "--job", str(path), "--no-cache", "--out", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["mf"]["l_degree"] == 3
    assert rep["singular"]["points"][0]["total_degree_source"] == "user"


def test_flat_job_schema():
    j = Job.from_json({"field": {"p": 2, "a": 2}, "n": 1, "f": "x1^3", "c": [0, 1], "guard": 2})
    assert j.field.q == 4 and j.c == 2 and j.guard == 2


def test_term_list_polynomial():
    F4 = FieldSpec(2, 2)
    j = Job(field=F4, n=2, f=[[[2, 1], [0, 1]], [[0, 2], [1, 0]]])
    poly = j.polynomial()
    assert poly.terms == {(2, 1): 2, (0, 2): 1}


@pytest.mark.parametrize("bad", [dict(budget=0), dict(guard=0), dict(c=0), dict(n=0)])
def test_job_validation(bad):
    kw = dict(field=FieldSpec(5), n=2, f="x1")
    kw.update(bad)
    with pytest.raises(ValueError):
        Job(**kw)


def test_json_flag(capsys):
    code, out = cli(capsys, "spectral", "--p", "5", "--n", "2", "--f", "x1^2*x2 + x2^2", "--json")
    assert code == 0
    d = json.loads(out.out)
    assert d["spectral"]["pages"][1]["vanish_off_diagonal"]
    assert d["spectral"]["diagonal_total"] == 3
