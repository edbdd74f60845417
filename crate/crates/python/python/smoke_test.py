"""Smoke test for the asdim extension module.

Run after `pip install --no-build-isolation ./crates/python`:

    python crates/python/python/smoke_test.py
"""

from fractions import Fraction
from pathlib import Path

import asdim

DESK = Path(__file__).resolve().parents[2] / "cli" / "tests" / "data" / "desk.gw"


def check_metric(wb):
    assert wb.norm("w1", "(3,4)", 100) == 7
    assert wb.norm("unit", "-9", 5) is None
    assert wb.norm("wq", "1/3", 10) == Fraction(5)
    assert wb.distance("w13", "0", "7", 100) == 3
    ball = wb.ball("unit", 2)
    assert [x for x, _ in ball] == ["0", "-1", "1", "-2", "2"]
    assert all(isinstance(n, Fraction) for _, n in ball)
    rows = wb.rho_profile("w5", "unit", [1, 2, 3], 20, hom="times5")
    assert all(r["rho1_certified"] for r in rows)
    assert wb.sandwich("w13", "unit", 20)["violations"] == []


def check_covers(wb):
    assert wb.verify_cover("i5", 40)["clean"]
    tampered = wb.verify_cover("tampered", 20)
    assert not tampered["clean"] and tampered["disjointness_violations"]
    cover = asdim.interval_cover(5, rank=2)
    assert cover["bound"] == 10 and cover["families"] == 4
    ids = [str(n) for n in range(-3, 4)]
    distances = [abs(i - j) for i in range(-3, 4) for j in range(i + 1, 4)]
    solved = asdim.solve_min_diameter(ids, distances, 2, 2)
    assert solved["exact"] and solved["r_star"] == 1
    assert asdim.exhaustive_cover_oracle(ids, distances, 2, 2) == solved["r_star"]


def check_algebra(wb):
    snf = asdim.smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    assert snf["diagonal"] == [2, 6, 12]
    assert asdim.rank_and_torsion(3, [[2, 0, 0]]) == (2, [2])
    assert asdim.asdim_abelian(1, [[6]]) == 0
    assert asdim.asdim_abelian(3, [[0, 0, 4]]) == 2
    big = 10**30 + 7
    assert asdim.smith_normal_form([[big]])["diagonal"] == [big]
    computed, verified = asdim.snf_counts()
    assert computed >= 3 and verified <= computed
    assert wb.hirsch_length("heisenberg") == 3
    assert wb.bounds("heisenberg") == (3, 3)
    assert wb.bounds("lamplighter") == (0, 1)
    assert wb.bounds("lamplighter_witness") == (1, 1)
    assert wb.trace("bs12")["rule"] == "SUBGROUP_MONO"


def check_errors(wb):
    for call in (
        lambda: asdim.Workbench("[group:Z]\nkind = nonsense\n"),
        lambda: wb.norm("missing", "1", 3),
        lambda: wb.norm("wq", "1/7", 3),
    ):
        try:
            call()
        except asdim.WorkbenchParseError:
            continue
        raise AssertionError("expected a parse error")
    try:
        asdim.smith_normal_form([[1, 2], [3]])
    except asdim.AsdimError:
        pass
    else:
        raise AssertionError("expected a domain error")


def main():
    wb = asdim.Workbench.open(str(DESK))
    assert asdim.Workbench(wb.to_text()).to_text() == wb.to_text()
    assert "w5" in wb.names("weights")
    check_metric(wb)
    check_covers(wb)
    check_algebra(wb)
    check_errors(wb)
    print("smoke test passed")


if __name__ == "__main__":
    main()
