"""CLI: worked examples, formats, round trips, exit codes, determinism."""

import csv
import io
import json

import pytest

from alphacf.cli import parse_alpha, run


def go(*argv):
    return run(list(argv))


def test_match_worked_example():
    code, out = go("match", "7/10", "--json")
    assert code == 0
    d = json.loads(out)
    assert d["schema"] == "alpha-cf/1"
    assert (d["outcome"], d["M"], d["N"], d["index"]) == ("matched", 3, 3, 0)


def test_member_all_concordant():
    code, out = go("member", "4/5", "--method", "all", "--json")
    d = json.loads(out)
    assert code == 0
    assert all(v["member"] == "yes" for v in d["verdicts"].values())
    assert set(d["verdicts"]) == {"talpha", "tg", "gauss"}


def test_expand_example():
    code, out = go("expand", "7/10")
    assert (code, out) == (0, "[0;1,2,3]")


def test_eval_round_trip():
    code, out = go("eval", "[0;1,2,(3)]", "--json")
    d = json.loads(out)
    assert d["value"]["exact"] == "(5-1*sqrt(13))/2"
    code, out = go("expand", d["value"]["exact"], "--json")
    assert json.loads(out)["expansion"] == "[0;1,2,(3)]"


def test_orbit_csv_columns():
    code, out = go("orbit", "4/5", "1/4", "--n", "5")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["n", "value", "digit", "approx"]
    assert rows[1][:3] == ["0", "1/4", ""]
    assert rows[2][:3] == ["1", "0", "4"]


def test_interval_json_schema():
    code, out = go("interval", "7/10")
    d = json.loads(out)
    assert d["pseudocenter"] == "7/10" and d["M"] == 3 and d["case"] == "inner"


def test_scan_deterministic_and_round_trip():
    o1 = go("scan", "--max-den", "30", "--json")[1]
    o2 = go("scan", "--max-den", "30", "--json")[1]
    o3 = go("scan", "--max-den", "30", "--threads", "2", "--json")[1]
    assert o1 == o2 == o3
    d = json.loads(o1)
    from alphacf.matching import interval_from_json, interval_to_json

    for rec in d["intervals"]:
        iv = interval_from_json(rec)
        assert interval_to_json(iv) == {k: rec[k] for k in interval_to_json(iv)}


def test_inexact_decimal_semantics():
    code, out = go("member", "0.700", "--json")
    d = json.loads(out)
    assert d["inexact"] and d["verdicts"]["interval"]["member"] == "no"
    code, out = go("member", "0.7", "--json")
    assert json.loads(out)["verdicts"]["interval"]["member"] == "undecided"
    code, out = go("match", "0.700", "--json")
    assert json.loads(out)["M"] == 3
    code, out = go("interval", "0.700", "--json")
    d = json.loads(out)
    assert d["inexact"] and d["outcome"] == "undecided"


def test_exit_codes():
    assert go("match", "2")[0] == 1
    assert go("interval", "4/5")[0] == 1
    assert go("expand", "0.5")[0] == 1  # decimals are inexact
    with pytest.raises(SystemExit) as e:
        go("nonsense")
    assert e.value.code == 2
    code, out = go("member", "1/2")
    assert code == 1
    assert json.loads(out)["error"]["kind"] == "DomainError"


def test_gen_members_families():
    code, out = go("gen-members", "--family", "nminus1", "--n-max", "6")
    d = json.loads(out)
    assert [m["value"] for m in d["members"]] == ["2/3", "3/4", "4/5", "5/6"]
    code, out = go("gen-members", "--family", "embed", "--n", "1",
                   "--base", "[0;(2)]")
    d = json.loads(out)
    assert d["members"][0]["expansion"].startswith("[0;1,1,1,1,1,2")
    code, out = go("gen-members", "--family", "separator", "--a-max", "3")
    assert len(json.loads(out)["members"]) == 2


def test_entropy_seed_echoed():
    code, out = go("entropy", "1", "--family", "gauss", "--n-iter", "500",
                   "--n-samples", "20", "--seed", "77", "--json")
    d = json.loads(out)
    assert d["seed"] == 77 and d["n_iter"] == 500


def test_curve_csv():
    code, out = go("curve", "--lo", "0.49", "--hi", "0.51", "--step", "0.02",
                   "--n-iter", "300", "--n-samples", "20")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0][0] == "family"
    assert len(rows) == 1 + 4  # 2 grid points x 2 families


def test_alpha_parsing():
    assert parse_alpha("g").value.exact_str() == "(-1+1*sqrt(5))/2"
    p = parse_alpha("0.125")
    assert p.inexact and p.radius == 1 / __import__("fractions").Fraction(2000)
    assert parse_alpha("[0;(1)]").value.exact_str() == "(-1+1*sqrt(5))/2"
