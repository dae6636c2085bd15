"""Construction and evaluation of the piecewise-smooth expanding interval map.

Geometry on (0, 1]: fix a rational base c > 1 and breakpoints b_n = c^(1-n),
so branch n lives on I_n = (b_{n+1}, b_n] and the branch intervals accumulate
at 0.  A proportion schedule p_n in (0, 1) splits each I_n at the junction
j_n = b_{n+1} + p_n * |I_n| into a left piece L_n = (b_{n+1}, j_n] and a
right piece R_n = (j_n, b_n].

Every branch maps onto (0, 1]:

  * on L_n the map is affine with slope s_n = q / p_n, sending L_n onto
    (0, b_{n+1}]; here q = 1/(c-1) is the global expansion floor, and the
    exact identity |(0, b_{n+1}]| / |L_n| = q / p_n makes the fit work;
  * on R_n the derivative is s_n + (M_n - s_n) * step((x - j_n)/|R_n|),
    rising smoothly from s_n to the cap M_n.  The step integrates to 1/2,
    so requiring the piece to end exactly at height 1 forces

        M_n = s_n + 2 * ((1 - b_{n+1}) / |R_n| - s_n),

    which is >= s_n precisely when the mean slope (1 - b_{n+1})/|R_n|
    demanded of the right piece is at least the left slope.

The derivative is continuous and flat across the junction (the step is flat
at 0), each branch is convex, and the minimum slope on branch n is exactly
s_n, attained on the whole left piece.  For c in (1, 2) the floor q exceeds
1 and the map is uniformly expanding; for c >= 2 the slopes s_n sink toward
q <= 1 as p_n -> 1, which is the non-uniform regime probed by the
dichotomy scan.

Boundary convention: a point x is assigned the unique branch with
b_{n+1} < x <= b_n (right-closed intervals).  Under this rule the map is a
total function (0, 1] -> (0, 1]: left pieces exclude their left endpoint,
so images never reach 0, and the shared breakpoints b_n belong to the
deeper branch n.

Exactness: breakpoints, junctions, slopes and caps are rationals, and
evaluation at a Fraction inside a left piece stays rational.  Right pieces
go through the numeric antiderivative of the step and return floats
accurate to the configured quadrature tolerance.
"""

from __future__ import annotations

import math
import sys
import threading
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    ConstructionError,
    ConvergenceError,
    DomainError,
    PrecisionError,
    ScheduleExhausted,
)
from .rational import format_rational, parse_rational
from .transition import TransitionProfile, default_profile

GEOMETRIC = "geometric-to-one"
CONSTANT = "constant"
TABLE = "explicit-table"

_INVERT_MAX_ITER = 200


def expansion_constant(c) -> Fraction:
    """Expansion floor 1/(c-1) attached to the breakpoint base c > 1."""
    c = _coerce_rational(c, "c")
    if c <= 1:
        raise DomainError(f"base must exceed 1, got {format_rational(c)}")
    return 1 / (c - 1)


def branch_breakpoint(c, n: int) -> Fraction:
    """Right endpoint c^(1-n) of branch n; branch 1 ends at 1."""
    c = _coerce_rational(c, "c")
    if c <= 1:
        raise DomainError(f"base must exceed 1, got {format_rational(c)}")
    if n < 1:
        raise DomainError(f"branch index must be >= 1, got {n}")
    return c ** (1 - n)


def _coerce_rational(value, name: str) -> Fraction:
    if isinstance(value, (Fraction, int)):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise DomainError(f"{name} must be an exact rational, got {value!r}")


# ---------------------------------------------------------------------------
# Proportion schedules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProportionSchedule:
    """Sequence of left-piece proportions p_n in (0, 1).

    Three kinds are supported:

      * ``geometric-to-one``: p_n = 1 - beta * 2^-n, increasing to 1.  The
        defect sum is finite, so the infinite product of the p_n is
        analytically positive; this is the only kind that certifies.
      * ``constant``: p_n = value.  The infinite product vanishes, so the
        schedule can never certify, but it is useful for experiments.
      * ``explicit-table``: finite list; indices past the end raise
        :class:`ScheduleExhausted`.
    """

    kind: str
    beta: Fraction | None = None
    value: Fraction | None = None
    table: tuple[Fraction, ...] | None = None

    @classmethod
    def geometric_to_one(cls, beta) -> "ProportionSchedule":
        beta = _coerce_rational(beta, "beta")
        # p_n = 1 - beta*2^-n lies in (0, 1) for every n iff beta in (0, 2).
        if not 0 < beta < 2:
            raise DomainError(f"beta must lie in (0, 2), got {format_rational(beta)}")
        return cls(kind=GEOMETRIC, beta=beta)

    @classmethod
    def constant(cls, value) -> "ProportionSchedule":
        value = _coerce_rational(value, "p")
        if not 0 < value < 1:
            raise DomainError(f"constant proportion must lie in (0, 1), got {format_rational(value)}")
        return cls(kind=CONSTANT, value=value)

    @classmethod
    def from_table(cls, values) -> "ProportionSchedule":
        vals = tuple(_coerce_rational(v, "p") for v in values)
        if not vals:
            raise DomainError("proportion table must be non-empty")
        for i, v in enumerate(vals, start=1):
            if not 0 < v < 1:
                raise DomainError(f"table entry {i} out of (0, 1): {format_rational(v)}")
        return cls(kind=TABLE, table=vals)

    def p(self, n: int) -> Fraction:
        if n < 1:
            raise DomainError(f"proportion index must be >= 1, got {n}")
        if self.kind == GEOMETRIC:
            return 1 - self.beta * Fraction(1, 2**n)
        if self.kind == CONSTANT:
            return self.value
        if self.kind == TABLE:
            if n > len(self.table):
                raise ScheduleExhausted(
                    f"schedule table has {len(self.table)} entries, index {n} requested"
                )
            return self.table[n - 1]
        raise DomainError(f"unknown schedule kind {self.kind!r}")

    def product_positive_guaranteed(self) -> bool:
        """Whether this kind analytically guarantees prod p_n > 0."""
        return self.kind == GEOMETRIC

    def increasing(self) -> bool:
        if self.kind == GEOMETRIC:
            return True
        if self.kind == CONSTANT:
            return False
        return all(a <= b for a, b in zip(self.table, self.table[1:]))

    def first_ratio(self) -> Fraction:
        p1 = self.p(1)
        return p1 / (1 - p1)

    def certified_for(self, floor: Fraction) -> bool:
        """True when the schedule provably keeps every branch feasible."""
        return self.product_positive_guaranteed() and self.first_ratio() >= floor

    def describe(self) -> str:
        if self.kind == GEOMETRIC:
            return f"geometric-to-one(beta={format_rational(self.beta)})"
        if self.kind == CONSTANT:
            return f"constant(p={format_rational(self.value)})"
        return f"explicit-table({len(self.table)} entries)"


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


_FLOAT_FLOOR_LOG = math.log(1e-300)  # headroom above the denormal range


def _default_float_branch_limit(c: Fraction, schedule: "ProportionSchedule") -> int:
    """Deepest branch whose float geometry stays finite.

    Two constraints: the breakpoint c^(1-n) must stay above ~1e-300, and the
    right-piece width (1-p_n)(c-1)c^-n must as well, or the derivative cap
    (1 - b_{n+1}) / |R_n| overflows.  For schedules whose defect 1-p_n
    shrinks geometrically the second bound is the binding one.
    """
    ln_c = math.log(float(c))
    bound = -_FLOAT_FLOOR_LOG / ln_c
    if schedule.kind == GEOMETRIC:
        num = -_FLOAT_FLOOR_LOG + math.log(float(schedule.beta)) + math.log(float(c) - 1.0)
        bound = min(bound, num / (math.log(2.0) + ln_c))
    elif schedule.kind == CONSTANT:
        num = -_FLOAT_FLOOR_LOG + math.log(1.0 - float(schedule.value)) + math.log(float(c) - 1.0)
        bound = min(bound, num / ln_c)
    else:
        bound = min(bound, len(schedule.table))
    return max(1, int(math.floor(bound)) - 2)


def _float_saturating(q: Fraction) -> float:
    try:
        return float(q)
    except OverflowError:
        return math.inf if q > 0 else -math.inf


@dataclass(frozen=True)
class ExpansionConfig:
    """Immutable parameter bundle for one map.

    ``strict`` demands the uniformly expanding regime (1 < c < 2) together
    with a certified schedule; building a map from a failing strict config
    raises :class:`ConstructionError`.  Non-strict configs admit c >= 2 so
    the degenerating-slope regime can be explored.
    """

    c: Fraction
    schedule: ProportionSchedule
    strict: bool = False
    quad_tol: float = 1e-12
    max_float_branch: int | None = None

    def __post_init__(self):
        c = _coerce_rational(self.c, "c")
        if c <= 1:
            raise DomainError(f"base must exceed 1, got {format_rational(c)}")
        object.__setattr__(self, "c", c)
        if not 0.0 < float(self.quad_tol) < 1e-2:
            raise DomainError(f"quad_tol out of range: {self.quad_tol!r}")
        object.__setattr__(self, "quad_tol", float(self.quad_tol))
        if self.max_float_branch is None:
            object.__setattr__(
                self, "max_float_branch", _default_float_branch_limit(c, self.schedule)
            )
        elif self.max_float_branch < 1:
            raise DomainError("max_float_branch must be >= 1")

    @property
    def expansion(self) -> Fraction:
        return expansion_constant(self.c)

    @property
    def schedule_certified(self) -> bool:
        return self.schedule.certified_for(self.expansion)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    required: bool
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[Check, ...]
    strict: bool

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks if c.required)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if c.required and not c.passed]

    def warnings(self) -> list[Check]:
        return [c for c in self.checks if not c.required and not c.passed]

    def to_json_dict(self) -> dict:
        return {
            "ok": self.ok,
            "strict": self.strict,
            "checks": [
                {"name": c.name, "passed": c.passed, "required": c.required, "detail": c.detail}
                for c in self.checks
            ],
        }

    def render_table(self) -> str:
        lines = []
        for c in self.checks:
            status = "PASS" if c.passed else ("FAIL" if c.required else "WARN")
            lines.append(f"{status:<5} {c.name:<28} {c.detail}")
        lines.append(f"{'OK' if self.ok else 'INVALID':<5} overall (strict={self.strict})")
        return "\n".join(lines)


def validate(config: ExpansionConfig, max_branch: int = 16) -> ValidationReport:
    """Feasibility report for a configuration.

    Regime and certification rows are failures only in strict mode; the
    per-branch mean-slope rows are always required because an infeasible
    branch cannot be built at all.
    """
    checks: list[Check] = []
    c = config.c
    floor = config.expansion
    strict = config.strict

    in_regime = 1 < c < 2
    detail = f"c = {format_rational(c)}, expansion floor = {format_rational(floor)}"
    if not in_regime:
        detail += " <= 1: not uniformly expanding regime"
    checks.append(Check("uniform-expansion-regime", in_regime, strict, detail))

    ratio = config.schedule.first_ratio()
    checks.append(
        Check(
            "first-proportion-ratio",
            ratio >= floor,
            strict,
            f"p_1/(1-p_1) = {format_rational(ratio)} vs floor {format_rational(floor)}",
        )
    )

    certified = config.schedule_certified
    checks.append(
        Check(
            "schedule-certified",
            certified,
            strict,
            f"{config.schedule.describe()}: infinite product "
            + ("provably positive" if config.schedule.product_positive_guaranteed() else "not certified"),
        )
    )

    for n in range(1, max_branch + 1):
        try:
            p = config.schedule.p(n)
        except ScheduleExhausted:
            checks.append(Check(f"branch-{n}-feasible", False, True, "schedule exhausted"))
            break
        lo = branch_breakpoint(c, n + 1)
        hi = branch_breakpoint(c, n)
        slope = floor / p
        demand = (1 - lo) / ((1 - p) * (hi - lo))
        checks.append(
            Check(
                f"branch-{n}-feasible",
                demand >= slope,
                True,
                f"mean right slope {format_rational(demand)} vs left slope {format_rational(slope)}",
            )
        )

    return ValidationReport(checks=tuple(checks), strict=strict)


# ---------------------------------------------------------------------------
# Branches
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Branch:
    """One branch: interval data plus the two derivative parameters."""

    index: int
    lo: Fraction        # left breakpoint b_{n+1}
    hi: Fraction        # right breakpoint b_n
    junction: Fraction  # split between the affine and smooth pieces
    slope: Fraction     # affine slope on the left piece
    cap: Fraction       # derivative at the right endpoint

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def left_width(self) -> Fraction:
        return self.junction - self.lo

    @property
    def right_width(self) -> Fraction:
        return self.hi - self.junction


@dataclass(frozen=True)
class _BranchFloats:
    lo: float
    hi: float
    junction: float
    slope: float
    cap: float
    right_width: float


@dataclass
class FloatTables:
    """Per-branch float data laid out for vectorized orbit stepping.

    Arrays are indexed by branch number; entry 0 is padding.  ``bp`` has one
    extra slot so ``bp[n+1]`` is valid for every branch in range.
    """

    n_max: int
    bp: np.ndarray
    junction: np.ndarray
    slope: np.ndarray
    cap: np.ndarray
    right_width: np.ndarray

    @property
    def floor_value(self) -> float:
        """Smallest representable iterate before the precision guard trips."""
        return float(self.bp[self.n_max + 1])


class FullBranchMap:
    """Lazily built, immutable family of branches plus evaluation machinery.

    Safe for concurrent readers: the branch cache is populated under a lock
    and nothing else mutates after construction.
    """

    def __init__(self, config: ExpansionConfig, profile: TransitionProfile | None = None):
        self.config = config
        self.expansion = expansion_constant(config.c)
        self.profile = profile if profile is not None else default_profile(config.quad_tol)
        self._branches: dict[int, Branch] = {}
        self._branch_floats: dict[int, _BranchFloats] = {}
        self._lock = threading.Lock()
        self._tables: FloatTables | None = None
        self._ln_c = math.log(float(config.c))
        if config.strict:
            report = validate(config)
            if not report.ok:
                names = ", ".join(c.name for c in report.failures())
                raise ConstructionError(f"strict validation failed: {names}")

    # -- exact geometry ----------------------------------------------------

    def breakpoint(self, n: int) -> Fraction:
        return branch_breakpoint(self.config.c, n)

    def proportion(self, n: int) -> Fraction:
        return self.config.schedule.p(n)

    def branch(self, n: int) -> Branch:
        if n < 1:
            raise DomainError(f"branch index must be >= 1, got {n}")
        br = self._branches.get(n)
        if br is not None:
            return br
        with self._lock:
            br = self._branches.get(n)
            if br is None:
                br = self._build_branch(n)
                self._branches[n] = br
            return br

    def _build_branch(self, n: int) -> Branch:
        lo = self.breakpoint(n + 1)
        hi = self.breakpoint(n)
        p = self.proportion(n)
        width = hi - lo
        junction = lo + p * width
        slope = self.expansion / p
        demand = (1 - lo) / (hi - junction)
        if demand < slope:
            raise ConstructionError(
                f"branch {n} infeasible: mean right slope {format_rational(demand)} "
                f"< left slope {format_rational(slope)}"
            )
        cap = slope + 2 * (demand - slope)
        return Branch(index=n, lo=lo, hi=hi, junction=junction, slope=slope, cap=cap)

    def _floats(self, n: int) -> _BranchFloats:
        bf = self._branch_floats.get(n)
        if bf is not None:
            return bf
        br = self.branch(n)
        bf = _BranchFloats(
            lo=float(br.lo),
            hi=float(br.hi),
            junction=float(br.junction),
            slope=float(br.slope),
            cap=_float_saturating(br.cap),
            right_width=float(br.right_width),
        )
        with self._lock:
            self._branch_floats[n] = bf
        return bf

    # -- classification ----------------------------------------------------

    def branch_index(self, x) -> int:
        """Unique n with b_{n+1} < x <= b_n.

        Fractions are classified exactly for any depth.  Floats are refused
        with :class:`PrecisionError` once they sink past the branch where
        c^(1-n) approaches the underflow range.
        """
        if isinstance(x, (Fraction, int)):
            return self._branch_index_exact(Fraction(x))
        return self._branch_index_float(float(x))

    def _branch_index_exact(self, x: Fraction) -> int:
        if x <= 0 or x > 1:
            raise DomainError(f"point outside (0, 1]: {format_rational(x)}")
        xf = float(x)
        if xf > 0.0:
            n = int(math.floor(-math.log(xf) / self._ln_c)) + 1
        else:
            # Denominator dwarfs the numerator; estimate from bit lengths.
            bits = x.denominator.bit_length() - x.numerator.bit_length()
            n = int(bits * math.log(2.0) / self._ln_c) + 1
        n = max(1, n)
        while x <= self.breakpoint(n + 1):
            n += 1
        while n > 1 and x > self.breakpoint(n):
            n -= 1
        return n

    def _branch_index_float(self, x: float) -> int:
        if math.isnan(x) or x <= 0.0 or x > 1.0:
            raise DomainError(f"point outside (0, 1]: {x!r}")
        tables = self.float_tables()
        if x <= tables.floor_value:
            raise PrecisionError(
                f"iterate {x!r} below branch {tables.n_max}; exact mode required"
            )
        n = int(math.floor(-math.log(x) / self._ln_c)) + 1
        n = min(max(n, 1), tables.n_max)
        while x <= tables.bp[n + 1] and n < tables.n_max:
            n += 1
        while n > 1 and x > tables.bp[n]:
            n -= 1
        return n

    # -- evaluation ---------------------------------------------------------

    def __call__(self, x):
        """Map value; rational on left pieces for rational x, float elsewhere."""
        if isinstance(x, (Fraction, int)):
            x = Fraction(x)
            n = self._branch_index_exact(x)
            br = self.branch(n)
            if x <= br.junction:
                return br.slope * (x - br.lo)
            # Rational input: take the junction offset exactly before
            # rounding, so steep deep branches do not amplify the half-ulp
            # the abscissa itself would lose in float.
            return self._smooth_value_from_offset(
                self._floats(n), float(x - br.junction), float(br.right_width)
            )
        n = self._branch_index_float(float(x))
        bf = self._floats(n)
        if x <= bf.junction:
            return bf.slope * (x - bf.lo)
        return self._smooth_value(bf, float(x))

    def _smooth_value(self, bf: _BranchFloats, x: float) -> float:
        if bf.right_width <= 0.0:
            # Right piece narrower than float resolution; its image is
            # indistinguishable from the branch's right endpoint value.
            return 1.0
        return self._smooth_value_from_offset(bf, x - bf.junction, bf.right_width)

    def _smooth_value_from_offset(self, bf: _BranchFloats, dx: float, rw: float) -> float:
        if rw <= 0.0:
            return 1.0
        t = min(max(dx / rw, 0.0), 1.0)
        value = (
            bf.lo
            + bf.slope * dx
            + (bf.cap - bf.slope) * rw * self.profile.step_integral(t)
        )
        return min(value, 1.0)

    def derivative(self, x):
        if isinstance(x, (Fraction, int)):
            x = Fraction(x)
            n = self._branch_index_exact(x)
            br = self.branch(n)
            if x <= br.junction:
                return br.slope
            bf = self._floats(n)
            dx = float(x - br.junction)
        else:
            n = self._branch_index_float(float(x))
            bf = self._floats(n)
            if x <= bf.junction:
                return bf.slope
            dx = float(x) - bf.junction
        if bf.right_width <= 0.0:
            return bf.cap
        t = min(max(dx / bf.right_width, 0.0), 1.0)
        return bf.slope + (bf.cap - bf.slope) * self.profile.step(t)

    def second_derivative(self, x):
        if isinstance(x, (Fraction, int)):
            x = Fraction(x)
            n = self._branch_index_exact(x)
            br = self.branch(n)
            if x <= br.junction:
                return Fraction(0)
            bf = self._floats(n)
            dx = float(x - br.junction)
        else:
            n = self._branch_index_float(float(x))
            bf = self._floats(n)
            if x <= bf.junction:
                return 0.0
            dx = float(x) - bf.junction
        if bf.right_width <= 0.0:
            return 0.0
        t = min(max(dx / bf.right_width, 0.0), 1.0)
        return (bf.cap - bf.slope) * self.profile.step_derivative(t) / bf.right_width

    def invert_branch(self, n: int, y):
        """Unique x in branch n with f(x) = y.

        Exact (rational in, rational out) while y <= b_{n+1}, since that
        preimage lies in the affine piece; otherwise solved numerically on
        the smooth piece by bisection with Newton acceleration.
        """
        br = self.branch(n)
        exact = isinstance(y, (Fraction, int))
        yq = Fraction(y) if exact else None
        yf = float(y)
        if math.isnan(yf) or yf <= 0.0 or yf > 1.0 + 1e-12:
            raise DomainError(f"target outside (0, 1]: {y!r}")
        if exact and yq <= br.lo:
            return br.lo + yq / br.slope
        bf = self._floats(n)
        if not exact and yf <= bf.lo:
            return bf.lo + yf / bf.slope
        return self._invert_smooth(bf, min(yf, 1.0))

    def _invert_smooth(self, bf: _BranchFloats, y: float) -> float:
        tol = self.config.quad_tol
        if bf.right_width <= 0.0:
            return bf.hi
        lo, hi = bf.junction, bf.hi
        f_lo = self._smooth_value(bf, lo) - y
        f_hi = self._smooth_value(bf, hi) - y
        if f_lo >= 0.0:
            return lo
        if f_hi <= 0.0:
            return hi
        x = 0.5 * (lo + hi)
        for _ in range(_INVERT_MAX_ITER):
            g = self._smooth_value(bf, x) - y
            if abs(g) <= tol:
                return x
            if g > 0.0:
                hi = x
            else:
                lo = x
            t = min(max((x - bf.junction) / bf.right_width, 0.0), 1.0)
            dg = bf.slope + (bf.cap - bf.slope) * self.profile.step(t)
            step = g / dg
            candidate = x - step
            if not (lo < candidate < hi):
                candidate = 0.5 * (lo + hi)
            if hi - lo <= sys.float_info.epsilon * max(abs(hi), 1.0):
                return candidate
            x = candidate
        raise ConvergenceError(
            f"branch inversion stalled at bracket [{lo}, {hi}] for target {y}"
        )

    # -- vectorized support --------------------------------------------------

    def float_tables(self, n_max: int | None = None) -> FloatTables:
        """Branch parameter arrays up to the float evaluation limit."""
        limit = self.config.max_float_branch if n_max is None else int(n_max)
        tables = self._tables
        if tables is not None and tables.n_max >= limit:
            return tables
        with self._lock:
            tables = self._tables
            if tables is not None and tables.n_max >= limit:
                return tables
            tables = self._build_tables(limit)
            self._tables = tables
            return tables

    def _build_tables(self, n_max: int) -> FloatTables:
        cf = float(self.config.c)
        n = np.arange(0, n_max + 3, dtype=np.float64)
        bp = cf ** (1.0 - n)  # bp[k] = c^(1-k); bp[0] unused padding
        idx = np.arange(0, n_max + 2, dtype=np.int64)
        defect = np.empty(n_max + 2, dtype=np.float64)  # 1 - p_n
        sched = self.config.schedule
        if sched.kind == GEOMETRIC:
            bf = float(sched.beta)
            with np.errstate(under="ignore"):
                defect[:] = bf * np.exp2(-idx.astype(np.float64))
        elif sched.kind == CONSTANT:
            defect[:] = 1.0 - float(sched.value)
        else:
            if n_max + 1 > len(sched.table):
                raise ScheduleExhausted(
                    f"schedule table has {len(sched.table)} entries; float tables "
                    f"need {n_max + 1}"
                )
            defect[0] = 0.5  # padding
            for k in range(1, n_max + 2):
                defect[k] = 1.0 - float(sched.table[k - 1])
        p = 1.0 - defect
        width = bp[idx] - bp[idx + 1]
        # Forming the right width as defect*width (not bp - junction) avoids
        # catastrophic cancellation once the defect is tiny.
        with np.errstate(under="ignore"):
            right_width = defect * width
        junction = bp[idx] - right_width
        floor = 1.0 / (cf - 1.0)
        slope = floor / p
        with np.errstate(divide="ignore", invalid="ignore", under="ignore"):
            demand = (1.0 - bp[idx + 1]) / right_width
        cap = slope + 2.0 * (demand - slope)
        return FloatTables(
            n_max=n_max,
            bp=bp[: n_max + 2],
            junction=junction,
            slope=slope,
            cap=cap,
            right_width=right_width,
        )


def branch_curve(branch: Branch, profile: TransitionProfile, xs: np.ndarray):
    """Vectorized (f, f', f'') along one branch from its record alone.

    Works for any Branch instance, including deliberately corrupted ones,
    which is what the property checker's negative controls rely on.
    """
    xs = np.asarray(xs, dtype=float)
    lo = float(branch.lo)
    junction = float(branch.junction)
    slope = float(branch.slope)
    cap = float(branch.cap)
    rw = float(branch.right_width)
    t = np.clip((xs - junction) / rw, 0.0, 1.0)
    in_left = xs <= junction
    values = np.where(
        in_left,
        slope * (xs - lo),
        lo + slope * (xs - junction) + (cap - slope) * rw * profile.step_integral(t),
    )
    deriv = np.where(in_left, slope, slope + (cap - slope) * profile.step(t))
    curv = np.where(in_left, 0.0, (cap - slope) * profile.step_derivative(t) / rw)
    return values, deriv, curv
