from fractions import Fraction as F

import pytest

from wildmap import (
    Branch,
    DomainError,
    check_branch,
    check_branch_properties,
    check_expansion_ratios,
    dichotomy_scan,
)
from wildmap import ExpansionConfig, FullBranchMap, ProportionSchedule


# ---------------------------------------------------------------------------
# Branch property sweep
# ---------------------------------------------------------------------------


def test_properties_pass_first_branches(default_map):
    report = check_branch_properties(default_map, branches=range(1, 11), grid=400)
    assert report.passed
    row = report.rows[0]
    assert row.min_slope_exact == F(8, 3)
    assert row.min_slope_sampled == pytest.approx(8 / 3, rel=1e-12)


def test_report_rows_reproducible(default_map):
    a = check_branch_properties(default_map, branches=range(1, 5), grid=300)
    b = check_branch_properties(default_map, branches=range(1, 5), grid=300)
    assert a.to_json_dict() == b.to_json_dict()


def test_corrupted_cap_reported(default_map):
    good = default_map.branch(1)
    bad = Branch(
        index=1,
        lo=good.lo,
        hi=good.hi,
        junction=good.junction,
        slope=good.slope,
        cap=good.slope - 3,  # derivative sinks below the floor on the right
    )
    row = check_branch(default_map, bad, grid=400)
    assert not row.ok
    assert not row.expanding
    assert not row.convex


def test_degenerate_affine_right_piece_convex():
    m = FullBranchMap(
        ExpansionConfig(c=F(3, 2), schedule=ProportionSchedule.constant(F(2, 3)))
    )
    row = check_branch(m, m.branch(1), grid=400)
    assert row.convex and row.monotone and row.ok


def test_render_table_mentions_proxy(default_map):
    report = check_branch_properties(default_map, branches=range(1, 3), grid=200)
    assert "proxy" in report.render_table()


# ---------------------------------------------------------------------------
# Exact stretch ratios
# ---------------------------------------------------------------------------


def test_ratios_branch1(default_map):
    rc = check_expansion_ratios(default_map, 1)
    assert rc.left_ratio == rc.slope == F(8, 3)
    assert rc.right_ratio == 4
    assert rc.complement_bound == 4
    assert rc.ok


def test_ratios_constant_schedule(constant_map):
    rc = check_expansion_ratios(constant_map, 2)
    assert rc.slope == F(5, 2)
    assert rc.left_equality
    assert rc.ok


def test_ratios_exact_many(default_map):
    for n in range(1, 51):
        rc = check_expansion_ratios(default_map, n)
        assert rc.left_equality
        assert rc.right_chain


def test_ratio_approaches_floor(default_map):
    # As p_n -> 1 the left-piece stretch tends to the expansion floor.
    slopes = [check_expansion_ratios(default_map, n).slope for n in (5, 15, 40)]
    gaps = [abs(s - default_map.expansion) for s in slopes]
    assert gaps[0] > gaps[1] > gaps[2]


# ---------------------------------------------------------------------------
# Degenerating-slope scan
# ---------------------------------------------------------------------------


def test_dichotomy_c2(boundary_map):
    scan = dichotomy_scan(boundary_map, 40, eps=F(1, 100))
    assert scan.rows[0][1] == F(4, 3)
    assert scan.rows[4][1] == F(64, 63)
    assert scan.rows[39][1] <= F(101, 100)
    assert scan.strictly_decreasing
    assert scan.limit == 1
    assert scan.first_below_one is None
    assert scan.crossing == 6
    # Verify the crossing exactly.
    assert scan.rows[5][1] <= F(101, 100) < scan.rows[4][1]


def test_dichotomy_c3_slopes_below_one():
    m = FullBranchMap(
        ExpansionConfig(c=F(3), schedule=ProportionSchedule.geometric_to_one(F(1, 2)))
    )
    scan = dichotomy_scan(m, 10)
    assert scan.limit == F(1, 2)
    assert scan.first_below_one == 1  # floor/p_1 = (1/2)/(3/4) = 2/3 < 1
    assert all(s < 1 for _, s in scan.rows)


def test_dichotomy_rejects_uniform_regime(default_map):
    with pytest.raises(DomainError):
        dichotomy_scan(default_map, 10)


def test_dichotomy_rejects_constant_schedule():
    m = FullBranchMap(
        ExpansionConfig(c=F(2), schedule=ProportionSchedule.constant(F(4, 5)))
    )
    with pytest.raises(DomainError):
        dichotomy_scan(m, 10)


def test_dichotomy_json_round_trip(boundary_map):
    payload = dichotomy_scan(boundary_map, 5, eps=F(1, 10)).to_json_dict()
    assert payload["rows"][0]["min_slope"]["rational"] == "4/3"
    assert payload["strictly_decreasing"] is True
