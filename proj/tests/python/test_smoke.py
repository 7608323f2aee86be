from fractions import Fraction

import pytest

cw = pytest.importorskip("choiceworks")

LINE = '{"pieces":[{"interval":["0","1"],"coeffs":["-1/2","1"]}],"minima_budget":0}'
PARABOLA = '{"pieces":[{"interval":["0","1"],"coeffs":["3/16","-1","1"]}],"minima_budget":1}'


def test_kappa_closed_form():
    assert [cw.kappa(n) for n in range(4)] == [2, 6, 18, 54]


def test_kappa_table_bases():
    table = cw.kappa_table(3)
    for i, row in enumerate(table):
        assert row[0] == (1, 1)  # j = 0
    assert [k2 for _, k2 in table[0]] == [1, 1, 1, 1]  # i = 0


def test_localize_line():
    out = cw.localize_zeros(LINE, 20)
    assert len(out["candidates"]) == 2
    for c in out["candidates"]:
        assert abs(Fraction(c) - Fraction(1, 2)) <= Fraction(1, 2**20)
    assert out["splits"] == []


def test_localize_parabola_and_filter():
    out = cw.localize_zeros(PARABOLA, 16)
    cands = [Fraction(c) for c in out["candidates"]]
    assert len(cands) == 6
    for root in (Fraction(1, 4), Fraction(3, 4)):
        assert min(abs(c - root) for c in cands) <= Fraction(1, 2**16)
    assert out["splits"][0]["obstruction"] == "N"
    kept = cw.filter_candidates(PARABOLA, out["candidates"], 16)
    assert kept["index"] >= 0
    point = Fraction(kept["point"])
    assert min(abs(point - r) for r in (Fraction(1, 4), Fraction(3, 4))) <= Fraction(1, 2**16)


def test_filter_rejects_nonzero_everywhere():
    spec = '{"pieces":[{"interval":["0","1"],"coeffs":["1","0","1"]}],"minima_budget":0}'
    with pytest.raises(cw.ChoiceworksError):
        cw.filter_candidates(spec, ["1/2"], 12)


def test_validate_event_script():
    good = '{"dimension":1,"mode":"exactly","n":2,"events":[{"stage":2,"kind":"split","ball":0}]}'
    res = cw.validate_name(good, 16)
    assert res["ok"]


def test_validate_convex_script():
    script = (
        '{"mode":"convex","stages":['
        '{"vertices":[["0","0"],["1","0"],["0","1"]]},'
        '{"vertices":[["0","0"],["1/2","0"],["0","1/2"]]}]}'
    )
    assert cw.validate_name(script, 12)["ok"]
    out = cw.slice_convex(script, 2, 32)
    assert (out["axis"], out["i"]) == (0, 1)


def test_parse_error_raises():
    with pytest.raises(cw.ChoiceworksError):
        cw.localize_zeros("{", 10)
