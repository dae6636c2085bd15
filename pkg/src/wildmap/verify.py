"""Batch property checks tying the built map back to its defining laws.

Three groups:

  * per-branch geometry: monotonicity, convexity, expansion floor,
    endpoint surjectivity, and a finite-difference smoothness proxy at the
    junction (smoothness itself is not finitely checkable, so the report
    labels that column a proxy);
  * exact ratio identities: the left piece is stretched by exactly
    floor/p_n, the right piece by at least 1/(1-p_n) >= floor/p_n, both
    verified in rational arithmetic with no tolerances;
  * the degenerating-slope scan for c >= 2: the minimum slope on branch n
    is exactly floor/p_n, strictly decreasing toward floor <= 1, so the
    map cannot be uniformly expanding there.

Grids are deterministic (equispaced plus points clustered at the junction)
so any failure reproduces bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError
from .mapcore import GEOMETRIC, Branch, FullBranchMap, branch_curve
from .rational import format_rational, rational_json


def branch_grid(branch: Branch, density: int) -> np.ndarray:
    """Deterministic sample grid on (lo, hi]: equispaced plus a cluster
    tightening geometrically toward the junction from both sides."""
    lo = float(branch.lo)
    hi = float(branch.hi)
    junction = float(branch.junction)
    width = hi - lo
    base = lo + width * np.arange(1, density + 1) / density
    scales = 2.0 ** -np.arange(2, 34)
    cluster_right = junction + (hi - junction) * scales
    cluster_left = junction - (junction - lo) * scales
    xs = np.concatenate([base, cluster_right, cluster_left, [junction]])
    xs = xs[(xs > lo) & (xs <= hi)]
    return np.unique(xs)


@dataclass(frozen=True)
class BranchPropertyRow:
    branch: int
    monotone: bool
    convex: bool
    expanding: bool
    surjective: bool
    junction_smooth: bool   # finite-difference proxy, not a smoothness proof
    min_slope_sampled: float
    min_slope_exact: Fraction
    junction_image_exact: bool
    right_end_error: float

    @property
    def ok(self) -> bool:
        return (
            self.monotone
            and self.convex
            and self.expanding
            and self.surjective
            and self.junction_smooth
        )

    def to_json_dict(self) -> dict:
        return {
            "branch": self.branch,
            "monotone": self.monotone,
            "convex": self.convex,
            "expanding": self.expanding,
            "surjective": self.surjective,
            "junction_smooth_proxy": self.junction_smooth,
            "min_slope_sampled": self.min_slope_sampled,
            "min_slope_exact": rational_json(self.min_slope_exact),
            "junction_image_exact": self.junction_image_exact,
            "right_end_error": self.right_end_error,
            "ok": self.ok,
        }


@dataclass(frozen=True)
class PropertyReport:
    rows: tuple[BranchPropertyRow, ...]
    grid: int
    tol: float

    @property
    def passed(self) -> bool:
        return all(r.ok for r in self.rows)

    def to_json_dict(self) -> dict:
        return {
            "grid": self.grid,
            "tol": self.tol,
            "passed": self.passed,
            "rows": [r.to_json_dict() for r in self.rows],
        }

    def render_table(self) -> str:
        header = (
            f"{'branch':>6} {'monotone':>8} {'convex':>6} {'expand':>6} "
            f"{'surject':>7} {'smooth*':>7} {'min_slope':>12}"
        )
        lines = [header, "-" * len(header)]
        for r in self.rows:
            lines.append(
                f"{r.branch:>6} {str(r.monotone):>8} {str(r.convex):>6} "
                f"{str(r.expanding):>6} {str(r.surjective):>7} "
                f"{str(r.junction_smooth):>7} {r.min_slope_sampled:>12.6f}"
            )
        lines.append("(* junction smoothness is a finite-difference proxy)")
        return "\n".join(lines)


def check_branch(
    m: FullBranchMap,
    branch: Branch,
    grid: int = 1000,
    tol: float = 1e-9,
    expansion_rtol: float = 1e-10,
) -> BranchPropertyRow:
    """Property row for one branch record.

    Takes the record explicitly (rather than the index) so deliberately
    corrupted branches can be fed through the same checks as fixtures.
    """
    xs = branch_grid(branch, grid)
    values, deriv, curv = branch_curve(branch, m.profile, xs)

    # Sampled values may tie at float resolution on very narrow branches;
    # strictness is carried by the derivative sign.
    monotone = bool(np.all(np.diff(values) >= 0.0) and np.all(deriv > 0.0))
    convex = bool(np.all(curv >= -tol) and np.all(np.diff(deriv) >= -tol))
    min_slope = float(np.min(deriv))
    floor = float(m.expansion)
    expanding = bool(
        min_slope >= floor * (1.0 - expansion_rtol) and branch.slope >= m.expansion
    )

    junction_exact = branch.slope * (branch.junction - branch.lo) == branch.lo
    # Endpoint value from the record's exact rationals: the sampled grid's
    # float abscissa would lose half an ulp, which steep deep branches
    # amplify past any reasonable tolerance.
    right_end = (
        float(branch.lo)
        + float(branch.slope * branch.right_width)
        + float((branch.cap - branch.slope) * branch.right_width) * m.profile.half
    )
    right_end_error = abs(right_end - 1.0)
    left_limit_ok = bool(values[0] <= float(branch.slope) * (xs[0] - float(branch.lo)) + tol)
    surjective = bool(junction_exact and right_end_error <= tol and left_limit_ok)

    # One-sided derivative-of-slope proxy at the junction: the left side is
    # identically the affine slope; the right side must flatten onto it.
    rw = float(branch.right_width)
    hs = rw * np.array([1e-3, 1e-4, 1e-5])
    _, d_right, _ = branch_curve(branch, m.profile, float(branch.junction) + hs)
    slope_f = float(branch.slope)
    proxies = np.abs(d_right - slope_f) / hs
    junction_smooth = bool(proxies[-1] <= tol * max(1.0, abs(slope_f)))

    return BranchPropertyRow(
        branch=branch.index,
        monotone=monotone,
        convex=convex,
        expanding=expanding,
        surjective=surjective,
        junction_smooth=junction_smooth,
        min_slope_sampled=min_slope,
        min_slope_exact=branch.slope,
        junction_image_exact=bool(junction_exact),
        right_end_error=right_end_error,
    )


def check_branch_properties(
    m: FullBranchMap,
    branches=range(1, 31),
    grid: int = 1000,
    tol: float = 1e-9,
) -> PropertyReport:
    rows = tuple(check_branch(m, m.branch(n), grid=grid, tol=tol) for n in branches)
    return PropertyReport(rows=rows, grid=grid, tol=tol)


# ---------------------------------------------------------------------------
# Exact stretch ratios
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RatioCheck:
    """Exact rational verification of the per-branch stretch identities."""

    branch: int
    left_ratio: Fraction        # |(0, b_{n+1}]| / |L_n|
    slope: Fraction             # floor / p_n
    right_ratio: Fraction       # |(b_{n+1}, 1]| / |R_n|
    complement_bound: Fraction  # 1 / (1 - p_n)

    @property
    def left_equality(self) -> bool:
        return self.left_ratio == self.slope

    @property
    def right_chain(self) -> bool:
        return self.right_ratio >= self.complement_bound >= self.slope

    @property
    def ok(self) -> bool:
        return self.left_equality and self.right_chain

    def to_json_dict(self) -> dict:
        return {
            "branch": self.branch,
            "left_ratio": rational_json(self.left_ratio),
            "slope": rational_json(self.slope),
            "right_ratio": rational_json(self.right_ratio),
            "complement_bound": rational_json(self.complement_bound),
            "left_equality": self.left_equality,
            "right_chain": self.right_chain,
            "ok": self.ok,
        }


def check_expansion_ratios(m: FullBranchMap, n: int) -> RatioCheck:
    if n < 1:
        raise DomainError(f"branch index must be >= 1, got {n}")
    lo = m.breakpoint(n + 1)
    hi = m.breakpoint(n)
    p = m.proportion(n)
    width = hi - lo
    return RatioCheck(
        branch=n,
        left_ratio=lo / (p * width),
        slope=m.expansion / p,
        right_ratio=(1 - lo) / ((1 - p) * width),
        complement_bound=1 / (1 - p),
    )


# ---------------------------------------------------------------------------
# Degenerating-slope scan (c >= 2)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DichotomyScan:
    rows: tuple[tuple[int, Fraction], ...]
    limit: Fraction
    strictly_decreasing: bool
    first_below_one: int | None
    eps: Fraction | None
    crossing: int | None

    def to_json_dict(self) -> dict:
        return {
            "rows": [
                {"branch": n, "min_slope": rational_json(s)} for n, s in self.rows
            ],
            "limit": rational_json(self.limit),
            "strictly_decreasing": self.strictly_decreasing,
            "first_below_one": self.first_below_one,
            "eps": None if self.eps is None else rational_json(self.eps),
            "crossing": self.crossing,
        }

    def render_table(self) -> str:
        lines = [f"{'branch':>6} {'min_slope':>16} {'decimal':>14}"]
        for n, s in self.rows:
            lines.append(f"{n:>6} {format_rational(s):>16} {float(s):>14.10f}")
        lines.append(f"limit = {format_rational(self.limit)} = {float(self.limit):.10f}")
        if self.eps is not None:
            lines.append(
                f"min slope <= 1 + {format_rational(self.eps)} from branch {self.crossing}"
            )
        return "\n".join(lines)


def dichotomy_scan(m: FullBranchMap, n_branches: int, eps=None) -> DichotomyScan:
    """Exact minimum slopes per branch in the c >= 2 regime.

    The minimum slope on branch n is floor/p_n (attained on the whole left
    piece); with p_n increasing to 1 it decreases strictly to
    floor = 1/(c-1) <= 1, so no uniform expansion constant above 1 exists.
    """
    if m.config.c < 2:
        raise DomainError(
            f"scan targets c >= 2, got c = {format_rational(m.config.c)}"
        )
    if m.config.schedule.kind != GEOMETRIC:
        raise DomainError("scan needs a schedule with proportions increasing to 1")
    if n_branches < 1:
        raise DomainError(f"need at least one branch, got {n_branches}")

    floor = m.expansion
    rows = tuple((n, floor / m.proportion(n)) for n in range(1, n_branches + 1))
    decreasing = all(a[1] > b[1] for a, b in zip(rows, rows[1:]))
    first_below = next((n for n, s in rows if s < 1), None)

    crossing = None
    eps_q = None
    if eps is not None:
        eps_q = Fraction(str(eps)) if isinstance(eps, float) else Fraction(eps)
        if eps_q <= 0:
            raise DomainError(f"eps must be positive, got {eps!r}")
        threshold = 1 + eps_q
        if floor < threshold:
            n = 1
            while floor / m.proportion(n) > threshold:
                n += 1
                if n > 10**6:
                    raise DomainError("crossing index exceeds 10^6; eps too tight")
            crossing = n
    return DichotomyScan(
        rows=rows,
        limit=floor,
        strictly_decreasing=decreasing,
        first_below_one=first_below,
        eps=eps_q,
        crossing=crossing,
    )
