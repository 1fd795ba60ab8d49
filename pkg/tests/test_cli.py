import io
import json

import pytest

from esrel import cmtrace
from esrel.cli import RunConfig, dispatch


def run(*argv):
    buf = io.StringIO()
    code = dispatch(list(argv), buf)
    return code, buf.getvalue()


@pytest.fixture(autouse=True)
def _fresh_cache(monkeypatch):
    monkeypatch.delenv("SELBERG_CACHE", raising=False)
    saved = cmtrace.default_cache()
    yield
    cmtrace.set_default_cache(saved)


def test_eichler_selberg_verb():
    code, out = run("verify", "es", "--weight", "12", "--nmax", "30")
    assert code == 0
    report = json.loads(out)["report"]
    assert report["status"] is True and report["first_failure"] is None


def test_poincare_combination_verb():
    code, _ = run("verify", "thm13", "--nu", "1", "--m", "1", "--nmax", "50")
    assert code == 0


def test_unknown_verb():
    assert run("frobnicate")[0] == 2


def test_bad_config():
    assert run("--qprec", "4", "trace", "--m", "1", "--d", "3")[0] == 2
    assert run("--bits", "32", "norm")[0] == 2
    with pytest.raises(ValueError):
        RunConfig(output="xml")


def test_value_error_is_usage():
    assert run("norm", "--weight", "24")[0] == 2


def test_failed_check_exit_one(monkeypatch):
    import esrel.relations as rel

    def broken(weight, n_max):
        rep = rel.Report("es", {})
        rep.fail(n=1)
        return rep

    monkeypatch.setattr(rel, "verify_eichler_selberg", broken)
    assert run("verify", "es")[0] == 1


def test_instability_exit_three():
    assert run("--cutoff", "2", "poincare", "--weight", "12", "--index", "-3", "--n", "1")[0] == 3


def test_trace_output_and_config_echo():
    code, out = run("trace", "--m", "1", "--d", "15")
    data = json.loads(out)
    assert code == 0 and data["t"] == -192513
    assert data["config"]["float_bits"] == 192


def test_deterministic_json():
    args = ("kloosterman", "--k", "3/2", "--m", "1", "--n", "-1", "--c", "12")
    assert run(*args)[1] == run(*args)[1]
    args = ("poincare", "--weight", "12", "--index", "-1", "--n", "2")
    first = run(*args)[1]
    assert first == run(*args)[1]
    assert json.loads(first)["exact_part"] == 47709536


def test_classnum_csv():
    code, out = run("--output", "csv", "classnum", "--dmin", "3", "--dmax", "12")
    lines = out.strip().splitlines()
    assert lines[0] == "d,h,H"
    assert lines[1] == "3,1,1/3"
    assert "12,2,4/3" in lines


def test_text_output():
    code, out = run("--output", "text", "gseries", "--m", "1", "--nu", "0", "--nmax", "3")
    assert code == 0 and out.startswith("m: 1")


def test_cache_env_var(tmp_path, monkeypatch):
    path = tmp_path / "env.ndjson"
    monkeypatch.setenv("SELBERG_CACHE", str(path))
    assert run("--cache", str(tmp_path / "ignored.ndjson"), "trace", "--m", "2", "--d", "31")[0] == 0
    assert path.exists() and not (tmp_path / "ignored.ndjson").exists()
    assert json.loads(path.read_text().splitlines()[0])["d"] == 31


def test_lhat_invert_verb():
    code, out = run("lhat", "--m", "1")
    assert code == 0
    assert abs(json.loads(out)["value"] + 33.383) < 1e-2
