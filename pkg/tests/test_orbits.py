import random
from fractions import Fraction as F

import numpy as np
import pytest

from wildmap import (
    DomainError,
    basin_sample,
    classify_itinerary,
    iterate,
    left_subinterval,
    rational_orbit,
)


# ---------------------------------------------------------------------------
# Itinerary classification
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "itinerary, expected",
    [
        ((1, 2, 3, 4), (3, 0)),
        ((2, 1, 3, 4, 5), (0, 1)),
        ((3, 3, 3), (0, None)),
        ((1, 2, 2, 3), (1, 2)),
        ((5, 4, 8), (0, 1)),
        ((1, 2), (1, 0)),
        ((2,), (0, None)),
    ],
)
def test_classify_cases(itinerary, expected):
    assert classify_itinerary(itinerary) == expected


def test_classify_against_brute_force():
    rng = random.Random(12345)
    for _ in range(300):
        seq = [rng.randint(1, 4) for _ in range(rng.randint(2, 9))]
        core, eventual = classify_itinerary(seq)
        # Brute force the definitions.
        core_ref = 0
        for n in range(1, len(seq)):
            if all(seq[i] < seq[i + 1] for i in range(n)):
                core_ref = n
            else:
                break
        ev_ref = None
        for start in range(len(seq) - 1):
            if all(seq[i] < seq[i + 1] for i in range(start, len(seq) - 1)):
                ev_ref = start
                break
        assert (core, eventual) == (core_ref, ev_ref), seq


# ---------------------------------------------------------------------------
# Exact orbits
# ---------------------------------------------------------------------------


def test_exact_orbit_junction_point(default_map):
    # 11/12 maps to the shared breakpoint 2/3, which classifies into the
    # deeper branch 2 and sits in its right piece, ending the exact run.
    rec = rational_orbit(default_map, F(11, 12))
    assert rec.points == [F(11, 12), F(2, 3)]
    assert rec.itinerary == [1, 2]
    assert rec.core_depth == 1
    assert rec.stop_reason == "entered-right-piece"


def test_exact_orbit_breakpoint_start(default_map):
    # 2/3 itself classifies into branch 2 whose junction is 23/36 < 2/3,
    # so the start already sits in a right piece.
    rec = rational_orbit(default_map, F(2, 3))
    assert rec.itinerary == [2]
    assert rec.core_depth == 0
    assert rec.stop_reason == "outside-left-piece"


def test_exact_orbit_breakpoint_image(default_map):
    # f(5/6) = 4/9 is the shared breakpoint b_3, classified into branch 3,
    # and 4/9 exceeds that branch's junction 47/108, so the exact run ends.
    rec = rational_orbit(default_map, F(5, 6))
    assert rec.points == [F(5, 6), F(4, 9)]
    assert rec.itinerary == [1, 3]
    assert rec.core_depth == 1
    assert rec.stop_reason == "entered-right-piece"


def test_exact_orbit_follows_left_cylinder(default_map):
    lo, hi = left_subinterval(default_map, [1, 2])
    rec = rational_orbit(default_map, (lo + hi) / 2)
    assert rec.itinerary[:2] == [1, 2]
    assert rec.core_depth >= 2
    assert all(isinstance(x, F) for x in rec.points)


def test_exact_orbit_right_piece_start(default_map):
    b1 = default_map.branch(1)
    x0 = b1.junction + F(1, 100)
    rec = rational_orbit(default_map, x0)
    assert rec.stop_reason == "outside-left-piece"
    assert rec.core_depth == 0
    assert len(rec.points) == 1


def test_exact_orbit_images_stay_in_domain(default_map):
    rec = rational_orbit(default_map, F(7, 10), max_steps=64)
    for x in rec.points:
        assert 0 < x <= 1


# ---------------------------------------------------------------------------
# Float orbits
# ---------------------------------------------------------------------------


def test_float_orbit_shape(default_map):
    rec = iterate(default_map, 0.37, steps=100, mode="float")
    assert len(rec.itinerary) == 100
    assert len(rec.points) == 101
    assert not rec.precision_escaped


def test_float_orbit_itinerary_consistency(default_map):
    # Recorded branch indices bracket the iterates in the float tables.
    rec = iterate(default_map, 0.37, steps=200, mode="float")
    tables = default_map.float_tables()
    for x, k in zip(rec.points, rec.itinerary):
        assert tables.bp[k + 1] < x <= tables.bp[k]


def test_float_orbit_precision_escape(default_map):
    # Start just above the guard; a couple of left steps sink past it.
    x0 = default_map.float_tables().floor_value * 4.0
    rec = iterate(default_map, x0, steps=50, mode="float")
    assert rec.precision_escaped
    assert rec.stop_reason == "precision-floor"
    assert len(rec.points) < 51


def test_float_vs_exact_agreement(default_map):
    # Shared dyadic start inside a deep increasing cylinder: the float
    # orbit tracks the exact one to 1e-9 over 20 steps.
    lo, hi = left_subinterval(default_map, list(range(1, 25)))
    x0 = float((lo + hi) / 2)
    exact = rational_orbit(default_map, F(x0), max_steps=30)
    floats = iterate(default_map, x0, steps=20, mode="float")
    assert len(exact.points) >= 21
    for i in range(21):
        assert abs(floats.points[i] - float(exact.points[i])) < 1e-9


def test_orbit_domain_errors(default_map):
    with pytest.raises(DomainError):
        iterate(default_map, 0.0, steps=5)
    with pytest.raises(DomainError):
        iterate(default_map, 1.5, steps=5)
    with pytest.raises(DomainError):
        iterate(default_map, 0.5, steps=0)
    with pytest.raises(DomainError):
        rational_orbit(default_map, F(0))


def test_membership_bridge(default_map):
    # A rational sampled uniformly inside the left subinterval of a depth-n
    # cylinder has core depth at least n+1.
    rng = random.Random(99)
    prefixes = [(1,), (2, 3), (1, 3, 5), (1, 2, 3, 4)]
    for prefix in prefixes:
        lo, hi = left_subinterval(default_map, prefix)
        for _ in range(5):
            x = lo + (hi - lo) * F(rng.randrange(1, 2**40), 2**40)
            rec = rational_orbit(default_map, x, max_steps=len(prefix) + 4)
            assert rec.core_depth >= len(prefix), (prefix, x)


# ---------------------------------------------------------------------------
# Basin statistics
# ---------------------------------------------------------------------------


def test_basin_deterministic(default_map):
    kwargs = dict(count=2000, checkpoints=[10, 50], seed=42, deltas=[1e-6, 1e-3])
    a = basin_sample(default_map, **kwargs)
    b = basin_sample(default_map, **kwargs)
    assert a.to_json_dict() == b.to_json_dict()


def test_basin_thread_invariant(default_map):
    kwargs = dict(count=3000, checkpoints=[10, 60], seed=5, deltas=[1e-6])
    one = basin_sample(default_map, threads=1, **kwargs)
    four = basin_sample(default_map, threads=4, **kwargs)
    assert one.to_json_dict() == four.to_json_dict()


def test_basin_trends(default_map):
    stats = basin_sample(default_map, 4000, [10, 100, 1000], seed=3, deltas=[1e-6])
    medians = [stats.median[n] for n in (10, 100, 1000)]
    assert medians[0] > medians[1] > medians[2]
    fracs = [stats.fraction_below["1e-06"][n] for n in (10, 100, 1000)]
    assert fracs[0] <= fracs[1] <= fracs[2]
    assert stats.mean_core_depth > 0


def test_basin_forced_endpoint(default_map):
    stats = basin_sample(default_map, 1, [10], seed=0, deltas=[1e-6], x0=[1.0])
    # The right endpoint is a fixed point up to rounding: never below 1e-6.
    assert stats.fraction_below["1e-06"][10] == 0.0
    assert stats.median[10] == pytest.approx(1.0, abs=1e-9)


def test_basin_input_validation(default_map):
    with pytest.raises(DomainError):
        basin_sample(default_map, 0, [10], seed=1, deltas=[1e-6])
    with pytest.raises(DomainError):
        basin_sample(default_map, 10, [], seed=1, deltas=[1e-6])
    with pytest.raises(DomainError):
        basin_sample(default_map, 10, [5], seed=1, deltas=[])
    with pytest.raises(DomainError):
        basin_sample(default_map, 4, [5], seed=1, deltas=[1e-6], x0=[0.5, 0.5])


def test_basin_uniform_draw_in_domain(default_map):
    stats = basin_sample(default_map, 500, [1], seed=8, deltas=[2.0])
    # Every first iterate exists, so every start point was in (0, 1].
    assert stats.fraction_below[repr(2.0)][1] == 1.0
