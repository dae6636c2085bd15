"""Orbit iteration, itinerary classification, and basin sampling.

An orbit's itinerary is the sequence of branch numbers it visits.  Because
a point sits in a left piece exactly when its image lands strictly deeper
(branch index goes up), everything about left-piece membership can be read
off the itinerary: the *core depth* is the number of strictly increasing
steps at the start, and the *eventual start* is the earliest step from
which the observed itinerary increases for good.

Float orbits carry an underflow guard: once an iterate would need a branch
beyond ``max_float_branch`` the sample is frozen and flagged rather than
allowed to decay into denormal noise.  Exact orbits run in rational
arithmetic, which is possible precisely while the orbit stays in the affine
left pieces, and stop with a reason at the first exit.

Basin sampling is vectorized and deterministic: the start points are drawn
in one block from the seeded generator before any work is split across
threads, every per-sample quantity is written to a preallocated slot, and
the summary statistics are reduced over the assembled arrays in index
order, so the output is identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DomainError, PrecisionError
from .mapcore import FloatTables, FullBranchMap
from .rational import format_rational

_EXACT_STEP_DEFAULT = 256
_MIN_CHUNK = 25_000


def classify_itinerary(itinerary) -> tuple[int, int | None]:
    """(core depth, eventual start) of a finite itinerary.

    Core depth: largest n such that the first n consecutive moves all
    increase.  Eventual start: smallest N such that every observed move
    from step N on increases, or None when even the final move fails
    (a suffix needs at least one move to count).
    """
    seq = list(itinerary)
    core = 0
    for a, b in zip(seq, seq[1:]):
        if b > a:
            core += 1
        else:
            break
    last_bad = None
    for i, (a, b) in enumerate(zip(seq, seq[1:])):
        if b <= a:
            last_bad = i
    if last_bad is None:
        eventual = 0 if len(seq) >= 2 else None
    else:
        eventual = last_bad + 1
        if eventual > len(seq) - 2:
            eventual = None
    return core, eventual


@dataclass
class OrbitRecord:
    """One orbit: iterates, itinerary, and its classification."""

    x0: Fraction | float
    mode: str
    points: list
    itinerary: list[int]
    precision_escaped: bool = False
    stop_reason: str | None = None
    core_depth: int = 0
    eventual_start: int | None = None

    def __post_init__(self):
        self.core_depth, self.eventual_start = classify_itinerary(self.itinerary)

    def to_csv(self, fh) -> None:
        fh.write("step,x,branch_index\n")
        for i, x in enumerate(self.points):
            branch = str(self.itinerary[i]) if i < len(self.itinerary) else ""
            fh.write(f"{i},{float(x)!r},{branch}\n")

    def summary_dict(self) -> dict:
        out = {
            "mode": self.mode,
            "steps_recorded": len(self.points) - 1,
            "core_depth": self.core_depth,
            "eventual_start": self.eventual_start,
            "precision_escaped": self.precision_escaped,
            "stop_reason": self.stop_reason,
        }
        if self.mode == "exact-affine":
            out["exact_points"] = [format_rational(x) for x in self.points]
        return out


def iterate(m: FullBranchMap, x0, steps: int, mode: str = "float") -> OrbitRecord:
    if steps < 1:
        raise DomainError(f"steps must be >= 1, got {steps}")
    if mode == "float":
        return _iterate_float(m, float(x0), steps)
    if mode == "exact-affine":
        return rational_orbit(m, x0, max_steps=steps)
    raise DomainError(f"unknown orbit mode {mode!r}")


def _iterate_float(m: FullBranchMap, x0: float, steps: int) -> OrbitRecord:
    if math.isnan(x0) or x0 <= 0.0 or x0 > 1.0:
        raise DomainError(f"start point outside (0, 1]: {x0!r}")
    points = [x0]
    itinerary: list[int] = []
    escaped = False
    reason = None
    x = x0
    for _ in range(steps):
        try:
            n = m.branch_index(x)
        except PrecisionError:
            escaped = True
            reason = "precision-floor"
            break
        itinerary.append(n)
        bf = m._floats(n)
        if x <= bf.junction:
            x = bf.slope * (x - bf.lo)
        else:
            x = m._smooth_value(bf, x)
        points.append(x)
    return OrbitRecord(
        x0=x0,
        mode="float",
        points=points,
        itinerary=itinerary,
        precision_escaped=escaped,
        stop_reason=reason,
    )


def rational_orbit(m: FullBranchMap, x0, max_steps: int = _EXACT_STEP_DEFAULT) -> OrbitRecord:
    """Exact orbit while it stays in the affine left pieces.

    The final recorded itinerary entry classifies the terminal point even
    when that point sits in a right piece, so callers can see where the
    exact regime ended.
    """
    x = Fraction(x0)
    if x <= 0 or x > 1:
        raise DomainError(f"start point outside (0, 1]: {format_rational(x)}")
    points = [x]
    itinerary: list[int] = []
    reason = None
    for step in range(max_steps):
        n = m.branch_index(x)
        itinerary.append(n)
        br = m.branch(n)
        if x > br.junction:
            reason = "outside-left-piece" if step == 0 else "entered-right-piece"
            break
        x = br.slope * (x - br.lo)
        points.append(x)
    else:
        reason = "step-limit"
    return OrbitRecord(
        x0=Fraction(x0),
        mode="exact-affine",
        points=points,
        itinerary=itinerary,
        stop_reason=reason,
    )


# ---------------------------------------------------------------------------
# Vectorized basin statistics
# ---------------------------------------------------------------------------


@dataclass
class BasinStats:
    sample_count: int
    seed: int
    checkpoints: tuple[int, ...]
    deltas: tuple[float, ...]
    fraction_below: dict = field(default_factory=dict)   # delta label -> {N: fraction}
    median: dict = field(default_factory=dict)           # N -> median of x_N
    escaped_fraction: dict = field(default_factory=dict)  # N -> fraction frozen by the guard
    mean_core_depth: float = 0.0

    def to_json_dict(self, params: dict | None = None) -> dict:
        out = {
            "sample_count": self.sample_count,
            "seed": self.seed,
            "checkpoints": list(self.checkpoints),
            "deltas": [repr(d) for d in self.deltas],
            "fraction_below": {
                label: {str(n): v for n, v in per.items()}
                for label, per in self.fraction_below.items()
            },
            "median_x": {str(n): v for n, v in self.median.items()},
            "escaped_fraction": {str(n): v for n, v in self.escaped_fraction.items()},
            "mean_core_depth": self.mean_core_depth,
        }
        if params:
            out["parameters"] = params
        return out


def _classify_vec(x: np.ndarray, can: np.ndarray, tables: FloatTables, ln_c: float):
    """Branch indices for the masked entries; flags those past the guard."""
    safe = np.where(can & (x > 0.0), x, 1.0)
    escape = can & (safe <= tables.floor_value)
    safe = np.where(escape, 1.0, safe)
    n = np.floor(-np.log(safe) / ln_c).astype(np.int64) + 1
    np.clip(n, 1, tables.n_max, out=n)
    for _ in range(2):
        bump = (safe <= tables.bp[n + 1]) & (n < tables.n_max)
        n = np.where(bump, n + 1, n)
        drop = (safe > tables.bp[n]) & (n > 1)
        n = np.where(drop, n - 1, n)
    return n, escape


def basin_sample(
    m: FullBranchMap,
    count: int,
    checkpoints,
    seed: int,
    deltas,
    threads: int = 1,
    x0=None,
) -> BasinStats:
    """Monte Carlo statistics of orbits started uniformly on (0, 1].

    Deterministic in (seed, count, checkpoints, deltas) and invariant under
    ``threads``: randomness is consumed before the work is split, and the
    reductions run over the fully assembled arrays.
    """
    count = int(count)
    if count < 1:
        raise DomainError(f"sample count must be >= 1, got {count}")
    cps = tuple(sorted({int(n) for n in checkpoints}))
    if not cps or cps[0] < 1:
        raise DomainError(f"checkpoints must be positive integers: {checkpoints}")
    dls = tuple(float(d) for d in deltas)
    if not dls or any(d <= 0 for d in dls):
        raise DomainError(f"thresholds must be positive: {deltas}")
    threads = max(1, int(threads))

    if x0 is None:
        rng = np.random.default_rng(seed)
        starts = 1.0 - rng.random(count)  # uniform on (0, 1]
    else:
        starts = np.asarray(x0, dtype=float)
        if starts.shape != (count,):
            raise DomainError(f"x0 override must have shape ({count},)")
        if np.any(starts <= 0.0) or np.any(starts > 1.0):
            raise DomainError("x0 override must lie in (0, 1]")

    tables = m.float_tables()
    max_step = cps[-1]
    xs_at = {n: np.empty(count, dtype=np.float64) for n in cps}
    escaped_at = {n: np.empty(count, dtype=bool) for n in cps}
    depth_out = np.empty(count, dtype=np.int64)

    def run_chunk(lo: int, hi: int) -> None:
        x = starts[lo:hi].copy()
        ln_c = m._ln_c
        can = np.ones(x.shape, dtype=bool)
        k, esc = _classify_vec(x, can, tables, ln_c)
        can &= ~esc
        run = can.copy()
        depth = np.zeros(x.shape, dtype=np.int64)
        profile = m.profile
        bp = tables.bp
        junction = tables.junction
        slope = tables.slope
        cap = tables.cap
        rwidth = tables.right_width
        cp_set = set(cps)
        for t in range(1, max_step + 1):
            j = junction[k]
            s = slope[k]
            blo = bp[k + 1]
            left = x <= j
            rw = rwidth[k]
            # Deep branches collapse to rw == 0 in float (p rounds to 1);
            # those points always take the left arm, so the smooth arm's
            # 0/0 is discarded by the where().
            with np.errstate(invalid="ignore", under="ignore", divide="ignore"):
                t_rel = np.clip((x - j) / rw, 0.0, 1.0)
                t_rel = np.nan_to_num(t_rel, nan=0.0)
                smooth = blo + s * (x - j) + (cap[k] - s) * rw * profile.step_integral(t_rel)
            x_next = np.where(left, s * (x - blo), smooth)
            x_next = np.minimum(x_next, 1.0)
            x = np.where(can, x_next, x)
            k_new, esc_new = _classify_vec(x, can, tables, ln_c)
            increased = np.where(esc_new, True, k_new > k)  # past-guard means deeper
            depth += (run & can & increased).astype(np.int64)
            run &= increased | ~can
            k = np.where(can & ~esc_new, k_new, k)
            can &= ~esc_new
            if t in cp_set:
                xs_at[t][lo:hi] = x
                escaped_at[t][lo:hi] = ~can
        depth_out[lo:hi] = depth

    # threads caps the worker count; below _MIN_CHUNK samples per worker the
    # GIL makes extra threads a pure loss, so small jobs run in one chunk.
    # The output is chunking-invariant either way.
    n_chunks = min(threads, max(1, count // _MIN_CHUNK))
    if n_chunks == 1:
        run_chunk(0, count)
    else:
        bounds = np.linspace(0, count, n_chunks + 1, dtype=int)
        with ThreadPoolExecutor(max_workers=n_chunks) as pool:
            futures = [
                pool.submit(run_chunk, int(a), int(b))
                for a, b in zip(bounds, bounds[1:])
                if a < b
            ]
            for fut in futures:
                fut.result()

    stats = BasinStats(sample_count=count, seed=int(seed), checkpoints=cps, deltas=dls)
    for d in dls:
        stats.fraction_below[repr(d)] = {
            n: float(np.mean(xs_at[n] < d)) for n in cps
        }
    for n in cps:
        stats.median[n] = float(np.median(xs_at[n]))
        stats.escaped_fraction[n] = float(np.mean(escaped_at[n]))
    stats.mean_core_depth = float(np.mean(depth_out))
    return stats
