"""Exact itinerary-cylinder geometry and truncated core measures.

A finite itinerary prefix (k_0, ..., k_n) names the set of points that visit
branch k_0, then k_1, and so on; for a full-branch map that set is an
interval, computed here by pulling the final branch interval back through
the earlier branches.  Two facts drive everything:

  * a pullback step through branch k is affine exactly when the incoming
    interval sits inside (0, b_{k+1}], i.e. when the next index is larger;
    hence a strictly increasing prefix has an exact rational interval whose
    length obeys the product formula

        |[k_0, ..., k_n]| = |I_{k_n}| * prod_{i<n} p_{k_i} * (c - 1),

    each factor p/q with q = 1/(c-1) being the reciprocal affine slope;

  * the points whose first n itinerary moves all increase (equivalently:
    whose first n iterates stay in left pieces) form the disjoint union of
    the cylinders with strictly increasing prefixes.  Their total length,
    written core_n here, is what :func:`core_measure` bounds.

The core measure is an infinite sum, truncated at a largest index K and
certified: the dynamic program

    V_0(k) = |I_k|,  V_{j+1}(k) = (p_k / q) * sum_{k' > k} V_j(k')

sums core_n = sum_k V_n(k).  The innermost suffix sums are geometric and
exactly summable (sum_{k'>k} |I_k'| = c^-k), so V_1 is computed without
truncation error; consequently the truncated lower bound at depth n is the
exact measure of the left subintervals of all prefixes with entries <= K,
the last itinerary index being unrestricted.  At deeper levels the mass
beyond K is no longer in closed form, but every level obeys the envelope
V_j(k) <= |I_k| (each level multiplies by p_k/q <= 1/q and the geometric
suffix sum contributes exactly a factor q), so the beyond-K mass per level
is at most sum_{k>K} |I_k| = c^-K.  Running the DP twice, once dropping
that mass and once adding the envelope to every suffix sum, yields exact
rational lower and upper bounds whose gap is the reported tail bound.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ConvergenceError, DomainError, ResourceLimitError
from .mapcore import FullBranchMap
from .rational import format_rational, rational_json

_ENUMERATION_GUARD = 10_000_000
_NESTING_GUARD = 200_000
_DP_K_GUARD = 100_000


def _check_indices(indices) -> tuple[int, ...]:
    idx = tuple(int(k) for k in indices)
    if not idx:
        raise DomainError("cylinder index sequence must be non-empty")
    if any(k < 1 for k in idx):
        raise DomainError(f"cylinder indices must be >= 1: {idx}")
    return idx


def _strictly_increasing(idx: tuple[int, ...]) -> bool:
    return all(a < b for a, b in zip(idx, idx[1:]))


@dataclass(frozen=True)
class Cylinder:
    """Interval of points sharing an itinerary prefix.

    ``exact`` is true precisely when the prefix is strictly increasing, in
    which case the endpoints are Fractions; otherwise they are floats
    carrying the per-step inversion tolerance.
    """

    indices: tuple[int, ...]
    lo: Fraction | float
    hi: Fraction | float
    exact: bool

    @property
    def length(self):
        return self.hi - self.lo

    def to_json_dict(self) -> dict:
        out: dict = {"indices": list(self.indices), "exact": self.exact}
        if self.exact:
            out["interval"] = [format_rational(self.lo), format_rational(self.hi)]
            out["interval_decimal"] = [float(self.lo), float(self.hi)]
            out["measure"] = format_rational(self.length)
            out["measure_decimal"] = float(self.length)
        else:
            out["interval"] = [repr(float(self.lo)), repr(float(self.hi))]
            out["interval_decimal"] = [float(self.lo), float(self.hi)]
            out["measure_decimal"] = float(self.hi) - float(self.lo)
        return out


def cylinder_interval(m: FullBranchMap, indices) -> Cylinder:
    """Pull the last branch interval back through the earlier branches."""
    idx = _check_indices(indices)
    exact = _strictly_increasing(idx)
    last = idx[-1]
    lo = m.breakpoint(last + 1)
    hi = m.breakpoint(last)
    if exact:
        for k in reversed(idx[:-1]):
            br = m.branch(k)
            lo = br.lo + lo / br.slope
            hi = br.lo + hi / br.slope
        return Cylinder(indices=idx, lo=lo, hi=hi, exact=True)
    lo_f, hi_f = float(lo), float(hi)
    for k in reversed(idx[:-1]):
        lo_f = m.invert_branch(k, lo_f)
        hi_f = m.invert_branch(k, hi_f)
    if not lo_f < hi_f:
        raise ConvergenceError(
            f"numeric pullback of {idx} degenerated to [{lo_f}, {hi_f}]"
        )
    return Cylinder(indices=idx, lo=lo_f, hi=hi_f, exact=False)


def cylinder_measure(m: FullBranchMap, indices) -> Fraction:
    """Exact length of a strictly increasing cylinder via the product formula."""
    idx = _check_indices(indices)
    if not _strictly_increasing(idx):
        raise DomainError(f"product formula needs strictly increasing indices: {idx}")
    last = idx[-1]
    acc = m.breakpoint(last) - m.breakpoint(last + 1)
    for k in idx[:-1]:
        acc *= m.proportion(k) / m.expansion
    return acc


def left_subinterval(m: FullBranchMap, indices) -> tuple[Fraction, Fraction]:
    """Preimage of the final branch's left piece inside the cylinder (exact)."""
    idx = _check_indices(indices)
    if not _strictly_increasing(idx):
        raise DomainError(f"left subinterval needs strictly increasing indices: {idx}")
    br_last = m.branch(idx[-1])
    lo, hi = br_last.lo, br_last.junction
    for k in reversed(idx[:-1]):
        br = m.branch(k)
        lo = br.lo + lo / br.slope
        hi = br.lo + hi / br.slope
    return lo, hi


# ---------------------------------------------------------------------------
# Truncated core measures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MeasureReport:
    """Certified bracket around the depth-n core measure."""

    depth: int
    k_max: int
    lower_bound: Fraction
    tail_bound: Fraction
    meets_tol: bool | None = None

    @property
    def upper_bound(self) -> Fraction:
        return self.lower_bound + self.tail_bound

    @property
    def certified_interval(self) -> tuple[Fraction, Fraction]:
        return (self.lower_bound, self.upper_bound)

    def to_json_dict(self) -> dict:
        return {
            "depth": self.depth,
            "k_max": self.k_max,
            "lower_bound": rational_json(self.lower_bound),
            "tail_bound": rational_json(self.tail_bound),
            "certified_interval": [
                rational_json(self.lower_bound),
                rational_json(self.upper_bound),
            ],
            "meets_tol": self.meets_tol,
        }


def _dp_levels(m: FullBranchMap, depth: int, k_max: int):
    """Lower/upper DP tables per level; index 0 of each row is padding.

    The level-0 suffix tail beyond the table is the exact geometric sum
    c^-K, so it is added to both bounds and level 1 carries no error at
    all.  Deeper levels have no closed-form tail; the envelope c^-K is
    added to the upper bound only.
    """
    floor = m.expansion
    bp = [m.breakpoint(k) for k in range(1, k_max + 2)]  # bp[i-1] = c^(1-i)
    sizes = [Fraction(0)] * (k_max + 1)
    for k in range(1, k_max + 1):
        sizes[k] = bp[k - 1] - bp[k]
    ratio = [Fraction(0)] * (k_max + 1)
    for k in range(1, k_max + 1):
        ratio[k] = m.proportion(k) / floor
    beyond = bp[k_max]  # c^(-k_max): exact mass of all deeper branch intervals
    lower_levels = [list(sizes)]
    upper_levels = [list(sizes)]
    for level in range(depth):
        prev_lo = lower_levels[-1]
        prev_up = upper_levels[-1]
        new_lo = [Fraction(0)] * (k_max + 1)
        new_up = [Fraction(0)] * (k_max + 1)
        suffix_lo = Fraction(0) if level > 0 else beyond
        suffix_up = beyond
        for k in range(k_max, 0, -1):
            new_lo[k] = ratio[k] * suffix_lo
            new_up[k] = ratio[k] * suffix_up
            suffix_lo += prev_lo[k]
            suffix_up += prev_up[k]
        lower_levels.append(new_lo)
        upper_levels.append(new_up)
    return lower_levels, upper_levels, beyond


def core_measure(m: FullBranchMap, depth: int, k_max: int, tol: float | None = None) -> MeasureReport:
    """Certified bounds on the measure of the depth-n core set.

    ``k_max`` truncates every branch index; the omitted mass is charged to
    the tail bound through the per-level envelope described in the module
    docstring, so the true measure always lies in the certified interval.
    """
    depth = int(depth)
    k_max = int(k_max)
    if depth < 1:
        raise DomainError(f"depth must be >= 1, got {depth}")
    if k_max < depth + 1:
        raise DomainError(
            f"k_max = {k_max} admits no strictly increasing sequence of depth {depth}"
        )
    if k_max > _DP_K_GUARD:
        raise ResourceLimitError(f"k_max = {k_max} exceeds the DP guard {_DP_K_GUARD}")
    lower_levels, upper_levels, beyond = _dp_levels(m, depth, k_max)
    lower_total = sum(lower_levels[-1][1:], Fraction(0))
    upper_total = sum(upper_levels[-1][1:], Fraction(0)) + beyond
    tail = upper_total - lower_total
    meets = None if tol is None else bool(tail <= Fraction(tol))
    return MeasureReport(
        depth=depth,
        k_max=k_max,
        lower_bound=lower_total,
        tail_bound=tail,
        meets_tol=meets,
    )


def core_measure_by_enumeration(m: FullBranchMap, depth: int, k_max: int) -> Fraction:
    """Independent oracle for the DP lower bound: explicit enumeration.

    For depth n >= 1, the truncated core mass is the disjoint union of the
    left subintervals of the cylinders with strictly increasing prefixes
    (k_0, ..., k_{n-1}) <= k_max; each contributes p_last times the
    cylinder's product-formula length (the unrestricted final index summed
    in closed form).  Depth 0 sums the bare branch intervals up to k_max.
    """
    depth = int(depth)
    k_max = int(k_max)
    if depth < 0:
        raise DomainError(f"depth must be >= 0, got {depth}")
    if k_max < max(depth, 1):
        raise DomainError(
            f"k_max = {k_max} admits no strictly increasing prefix of depth {depth}"
        )
    floor = m.expansion
    sizes = {k: m.breakpoint(k) - m.breakpoint(k + 1) for k in range(1, k_max + 1)}
    if depth == 0:
        return sum((sizes[k] for k in range(1, k_max + 1)), Fraction(0))
    count = math.comb(k_max, depth)
    if count > _ENUMERATION_GUARD:
        raise ResourceLimitError(
            f"{count} sequences exceed the enumeration guard {_ENUMERATION_GUARD}"
        )
    ratio = {k: m.proportion(k) / floor for k in range(1, k_max + 1)}
    p = {k: m.proportion(k) for k in range(1, k_max + 1)}
    total = Fraction(0)
    for seq in itertools.combinations(range(1, k_max + 1), depth):
        acc = p[seq[-1]] * sizes[seq[-1]]
        for k in seq[:-1]:
            acc *= ratio[k]
        total += acc
    return total


# ---------------------------------------------------------------------------
# Nesting structure
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NestingReport:
    depth: int
    k_max: int
    cylinder_count: int
    per_cylinder_equal: bool
    aggregate_equal: bool
    left_in_cylinder: bool
    disjoint: bool

    @property
    def ok(self) -> bool:
        return (
            self.per_cylinder_equal
            and self.aggregate_equal
            and self.left_in_cylinder
            and self.disjoint
        )

    def to_json_dict(self) -> dict:
        return {
            "depth": self.depth,
            "k_max": self.k_max,
            "cylinder_count": self.cylinder_count,
            "per_cylinder_equal": self.per_cylinder_equal,
            "aggregate_equal": self.aggregate_equal,
            "left_in_cylinder": self.left_in_cylinder,
            "disjoint": self.disjoint,
            "ok": self.ok,
        }


def nesting_check(m: FullBranchMap, depth: int, k_max: int) -> NestingReport:
    """Exact consistency of the left-subinterval decomposition.

    For every strictly increasing prefix with entries <= k_max this checks,
    in rational arithmetic, that the left subinterval sits inside its
    cylinder, that its length is p_last times the cylinder length, that it
    equals the sum of its children (the within-table children enumerated
    one by one, the deeper ones in closed form), and that the left
    subintervals of distinct cylinders are pairwise disjoint.  The
    aggregate row cross-checks pullback endpoint arithmetic against the
    product-formula enumeration of the next depth.
    """
    depth = int(depth)
    k_max = int(k_max)
    if depth < 0:
        raise DomainError(f"depth must be >= 0, got {depth}")
    if k_max < depth + 1:
        raise DomainError(f"k_max = {k_max} admits no sequence of depth {depth}")
    count = math.comb(k_max, depth + 1)
    if count > _NESTING_GUARD:
        raise ResourceLimitError(f"{count} cylinders exceed the nesting guard {_NESTING_GUARD}")

    beyond = m.breakpoint(k_max + 1)
    per_cyl = True
    contained = True
    intervals: list[tuple[Fraction, Fraction]] = []
    total_left = Fraction(0)
    for seq in itertools.combinations(range(1, k_max + 1), depth + 1):
        cyl = cylinder_interval(m, seq)
        measure = cylinder_measure(m, seq)
        last = seq[-1]
        p_last = m.proportion(last)
        left_lo, left_hi = left_subinterval(m, seq)
        left_len = left_hi - left_lo
        if not (cyl.lo <= left_lo and left_hi <= cyl.hi):
            contained = False
        if left_len != p_last * measure:
            per_cyl = False
        children = Fraction(0)
        for child in range(last + 1, k_max + 1):
            children += cylinder_measure(m, seq + (child,))
        # Children beyond the table, in closed form: the affine chain maps
        # the deep branch mass c^-K into the cylinder with ratio p_last/b_{last+1}.
        tail = measure * p_last * beyond / m.breakpoint(last + 1)
        if left_len != children + tail:
            per_cyl = False
        intervals.append((left_lo, left_hi))
        total_left += left_len

    aggregate = total_left == core_measure_by_enumeration(m, depth + 1, k_max)
    intervals.sort()
    disjoint = all(a_hi <= b_lo for (_, a_hi), (b_lo, _) in zip(intervals, intervals[1:]))
    return NestingReport(
        depth=depth,
        k_max=k_max,
        cylinder_count=count,
        per_cylinder_equal=per_cyl,
        aggregate_equal=aggregate,
        left_in_cylinder=contained,
        disjoint=disjoint,
    )
