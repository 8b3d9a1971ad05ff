import json

import pytest

from cmfactor.cli import run_command


def run(capsys, *argv):
    code = run_command(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


@pytest.fixture
def cache(tmp_path):
    return ["--cache-dir", str(tmp_path)]


def test_classgroup(capsys):
    code, out = run(capsys, "classgroup", "--disc", "23")
    assert code == 0 and out["h"] == 3 and out["identity"] == "1,1,6"


def test_repcount(capsys):
    code, out = run(capsys, "repcount", "--disc", "23", "--class", "O", "--upto", "30")
    assert code == 0
    assert out["r"]["2"] == 0 and out["r"]["6"] == 2  # x^2 + xy + 6y^2 = 6 has 4 solutions


def test_repcount_nonprincipal_two(capsys):
    _, a = run(capsys, "repcount", "--disc", "23", "--class", "J", "--upto", "3")
    _, b = run(capsys, "repcount", "--disc", "23", "--class", "Jinv", "--upto", "3")
    assert a["r"]["2"] + b["r"]["2"] == 2


def test_series(capsys):
    code, out = run(capsys, "series", "--name", "j", "--prec", "3")
    assert code == 0 and out["series"]


def test_unknown_series_is_error(capsys):
    code, _ = run(capsys, "series", "--name", "nope", "--prec", "3")
    assert code == 1


def test_theta_cached(capsys, cache):
    code, a = run(capsys, "theta", "--disc", "23", "--class", "J", "--prec", "5", *cache)
    code2, b = run(capsys, "theta", "--disc", "23", "--class", "J", "--prec", "5", *cache)
    assert code == code2 == 0 and a == b


def test_factor_prime_3_is_zero(capsys, cache):
    code, out = run(capsys, "factor", "--disc", "23", "--class", "O", "--prime", "3", "--prec", "60", *cache)
    assert code == 0
    assert [c["e"] for c in out["primes"][0]["classes"]] == [0, 0, 0]


def test_factor_with_ramified(capsys, cache):
    code, out = run(capsys, "factor", "--disc", "23", "--class", "O", "--with-ramified", "--prec", "60", *cache)
    assert code == 0 and out["ramified"]["experimental"] is True


def test_unknown_flag_exit_1(capsys):
    assert run_command(["factor", "--bogus"]) == 1
    assert run_command(["no-such-command"]) == 1


def test_config_validation(capsys):
    assert run_command(["seesaw-h", "--prec", "20"]) == 1
    assert run_command(["heegner-poly", "-d", "20", "--bits", "64"]) == 1


def test_heegner_poly_golden(capsys, cache):
    code, out = run(capsys, "heegner-poly", "--disc", "23", "-d", "20", *cache)
    assert code == 0 and out["golden_match"] is True
    assert out["factorization"]["basis"] == {"pi5": 2} and out["factorization"]["rho"] == 10


def test_seesaw_h_second_run_is_cache_hit(capsys, cache):
    code, a = run(capsys, "seesaw-h", "--disc", "23", "--prec", "60", "--dump-table", *cache)
    assert code == 0 and a["cache"]["misses"] >= 1
    code, b = run(capsys, "seesaw-h", "--disc", "23", "--prec", "60", "--dump-table", *cache)
    assert b["cache"]["misses"] == 0 and b["cache"]["hits"] >= 1
    a.pop("cache"), b.pop("cache")
    assert a == b


def test_output_is_deterministic(capsys, cache):
    run_command(["classgroup", "--disc", "47"])
    first = capsys.readouterr().out
    run_command(["classgroup", "--disc", "47"])
    assert capsys.readouterr().out == first


def test_green_k6_rejected(capsys):
    assert run_command(["green", "-k", "6"]) == 1
