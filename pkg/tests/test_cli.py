import json
from math import comb

import pytest

from fglcalc.cli import CliConfig, ConfigError, main


def run_json(tmp_path, args):
    out = tmp_path / "out.json"
    code = main(args + ["--out", str(out)])
    return code, json.loads(out.read_text())


def run_text(tmp_path, args):
    out = tmp_path / "out.txt"
    code = main(args + ["--out", str(out)])
    return code, out.read_text()


# -- config --------------------------------------------------------------------


def test_config_defaults_and_bounds():
    cfg = CliConfig()
    assert (cfg.trunc, cfg.window, cfg.weight, cfg.seed) == (12, 6, 6, 0)
    with pytest.raises(ConfigError):
        CliConfig(trunc=3)
    with pytest.raises(ConfigError):
        CliConfig(window=1)
    with pytest.raises(ConfigError):
        CliConfig(weight=0)
    with pytest.raises(ConfigError):
        CliConfig(format="xml")


def test_bad_trunc_exits_2(tmp_path, capsys):
    assert main(["fgl", "--kind", "additive", "--trunc", "2"]) == 2


# -- fgl ------------------------------------------------------------------------


def test_fgl_one_parameter_logarithm(tmp_path):
    # phi = s^{-1} log(1 + s z): coefficient of z^n is (-1)^(n+1) s^(n-1) / n
    code, d = run_json(tmp_path, ["fgl", "--kind", "one_parameter",
                                  "--trunc", "8"])
    assert code == 0
    phi = {r["exp"]: r["coeff"] for r in d["rows"] if r["series"] == "phi"}
    assert phi["1"] == "1"
    assert phi["2"] == "-1/2*s"
    assert phi["3"] == "1/3*s^2"
    assert phi["4"] == "-1/4*s^3"


def test_fgl_p_typical_integrality(tmp_path):
    code, d = run_json(tmp_path, ["fgl", "--kind", "p_typical",
                                  "--p", "2", "--h", "1", "--trunc", "10"])
    assert code == 0
    assert d["integral"] is True
    assert d["law"] == "p_typical(2,1)"


def test_fgl_malformed_law_file_exits_2(tmp_path):
    bad = tmp_path / "law.json"
    bad.write_text(json.dumps(
        {"trunc": 8, "coeffs": [[1, 0, "1"], [0, 1, "1"], [2, 0, "1"]]}))
    assert main(["fgl", "--law-file", str(bad)]) == 2
    bad.write_text("not json at all")
    assert main(["fgl", "--law-file", str(bad)]) == 2


def test_fgl_valid_law_file(tmp_path):
    f = tmp_path / "mult.json"
    f.write_text(json.dumps(
        {"name": "mult-file", "trunc": 8,
         "coeffs": [[1, 0, "1"], [0, 1, "1"], [1, 1, "1"]]}))
    code, d = run_json(tmp_path, ["fgl", "--law-file", str(f)])
    assert code == 0
    assert d["law"] == "mult-file"


# -- binom -----------------------------------------------------------------------


def test_binom_additive_pascal(tmp_path):
    code, d = run_json(tmp_path, ["binom", "--kind", "additive",
                                  "--nmin", "0", "--nmax", "4"])
    assert code == 0
    got = {(r["n"], r["exp"]): r["coeff"] for r in d["rows"]}
    for n in range(0, 5):
        for j in range(0, n + 1):
            assert got[(n, f"{n - j};{j}")] == str(comb(n, j))
    assert d["truncated_rows"] == []


def test_binom_negative_rows_flagged(tmp_path):
    code, d = run_json(tmp_path, ["binom", "--kind", "additive",
                                  "--nmin", "-1", "--nmax", "0",
                                  "--window", "3"])
    assert code == 0
    assert d["truncated_rows"] == [-1]
    for r in d["rows"]:
        if r["n"] == -1:
            i, j = map(int, r["exp"].split(";"))
            assert -3 <= i <= 3 and -3 <= j <= 3


def test_binom_one_parameter_closed_form(tmp_path):
    code, d = run_json(tmp_path, ["binom", "--kind", "one_parameter",
                                  "--nmin", "-2", "--nmax", "3"])
    assert code == 0
    assert d["closed_form_match"] is True


# -- verify ----------------------------------------------------------------------


def test_verify_hyper_passes(tmp_path):
    code, d = run_json(tmp_path, ["verify", "--suite", "hyper",
                                  "--kind", "multiplicative"])
    assert code == 0
    assert d["ok"] is True
    assert all(r["status"] == "pass" for r in d["rows"])


def test_verify_delta_elliptic_window4(tmp_path):
    code, d = run_json(tmp_path, ["verify", "--suite", "delta",
                                  "--kind", "elliptic", "--window", "4"])
    assert code == 0
    assert d["ok"] is True
    # surviving windows are recorded in the reports
    surv = d["reports"][0]["window"]
    assert all(lo <= hi for lo, hi in surv)


def test_verify_injected_fault_exits_1(tmp_path):
    code, d = run_json(tmp_path, ["verify", "--suite", "binom",
                                  "--kind", "additive", "--inject-fault"])
    assert code == 1
    assert d["ok"] is False
    assert d["first_failure"]["identity"].startswith("f_binomial")


def test_verify_payload_is_byte_stable(tmp_path):
    args = ["verify", "--suite", "binom", "--kind", "additive", "--seed", "0"]
    _, a = run_text(tmp_path, args)
    _, b = run_text(tmp_path, args)
    assert a == b


def test_verify_thread_env_does_not_change_payload(tmp_path, monkeypatch):
    args = ["verify", "--suite", "hyper", "--kind", "additive"]
    _, a = run_text(tmp_path, args)
    monkeypatch.setenv("FGLCALC_THREADS", "3")
    _, b = run_text(tmp_path, args)
    assert a == b


def test_verify_vertex_needs_rationals(tmp_path, capsys):
    assert main(["verify", "--suite", "vertex", "--kind", "elliptic"]) == 2


def test_verify_vertex_multiplicative(tmp_path):
    code, d = run_json(tmp_path, ["verify", "--suite", "vertex",
                                  "--kind", "multiplicative",
                                  "--weight", "4", "--window", "2"])
    assert code == 0
    assert d["ok"] is True
    names = [r["check"] for r in d["rows"]]
    assert "lie_axioms" in names and "jacobi" in names


# -- heisenberg --------------------------------------------------------------------


def test_heisenberg_commutator_table(tmp_path):
    code, d = run_json(tmp_path, ["heisenberg", "--action", "commutators",
                                  "--kind", "additive", "--weight", "4"])
    assert code == 0
    assert d["ok"] is True
    got = {(r["n"], r["m"]): r["bracket"] for r in d["rows"]}
    for n in range(-4, 5):
        for m in range(-4, 5):
            assert got[(n, m)] == (str(n) if n == -m else "0")


def test_heisenberg_shift_matrices(tmp_path):
    code, d = run_json(tmp_path, ["heisenberg", "--action", "shift",
                                  "--kind", "additive", "--weight", "3"])
    assert code == 0
    rows = {(r["n"], r["input"], r["output"]): r["coeff"] for r in d["rows"]}
    # additive S^(n) = D^n / n! on the b_{-1}-power basis
    assert rows[(1, "-1", "-2")] == "1"
    assert rows[(2, "-1", "-3")] == "1"
    assert rows[(1, "-1;-1", "-2;-1")] == "2"
    assert rows[(0, "vac", "vac")] == "1"


def test_heisenberg_bracket_table(tmp_path):
    code, d = run_json(tmp_path, ["heisenberg", "--action", "bracket_table",
                                  "--kind", "additive"])
    assert code == 0
    assert d["ok"] is True
    assert all(r["class"] == "0" for r in d["rows"])


def test_heisenberg_rejects_symbolic_ring(tmp_path):
    assert main(["heisenberg", "--action", "commutators",
                 "--kind", "one_parameter"]) == 2


# -- output formats ----------------------------------------------------------------


def test_csv_flattens_exponents(tmp_path):
    out = tmp_path / "t.csv"
    code = main(["binom", "--kind", "additive", "--nmax", "2",
                 "--format", "csv", "--out", str(out)])
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "n,exp,coeff"
    assert any(";" in ln.split(",")[1] for ln in lines[1:])


def test_pretty_format_smoke(tmp_path):
    code, text = run_text(tmp_path, ["fgl", "--kind", "additive",
                                     "--trunc", "6", "--format", "pretty"])
    assert code == 0
    assert "law" in text and "series=F" in text
