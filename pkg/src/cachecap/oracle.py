"""Exact task counting: a solver-independent check of the capacity exponent.

For a catalog whose read times all sit on a common grid, the number nu(T) of
distinct file sequences with total time exactly T satisfies the recurrence

    nu(T) = sum over classes of  count * nu(T - tau)        nu(0) = 1

with tau in grid units. Counting is done in exact integer arithmetic (the
values outgrow 64 bits quickly), and log2(nu(T)) / (T * grid) converges to
the capacity in bits per original time unit, giving an independent
cross-check of the root-finding solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .model import EffectiveCatalog, Network, effective_catalog

__all__ = [
    "QuantizedCatalog",
    "OraclePoint",
    "OracleReport",
    "quantize",
    "quantize_node",
    "infer_grid",
    "count_tasks",
    "count_series",
    "convergence_report",
]

_GRID_REL_TOL = 1e-9
_MAX_DENOMINATOR = 10**6


@dataclass(frozen=True)
class QuantizedCatalog:
    """Catalog with read times as exact positive integers on a common grid.

    ``original tau = tau_int * grid``. ``time_gcd`` is the gcd of all
    tau_int; nu(T) can be nonzero only at multiples of it.
    """

    int_times: tuple[tuple[int, int], ...]  # (count, tau_int)
    grid: float
    time_gcd: int

    @property
    def total_files(self) -> int:
        return sum(count for count, _ in self.int_times)

    @property
    def max_time(self) -> int:
        return max((tau for _, tau in self.int_times), default=0)


@dataclass(frozen=True)
class OraclePoint:
    time_steps: int  # T in grid units
    count: int  # nu(T), exact
    rate: float  # log2(nu(T)) / (T * grid), bits per original time unit


@dataclass(frozen=True)
class OracleReport:
    points: tuple[OraclePoint, ...]
    grid: float
    solver_capacity: float
    final_gap: float

    def to_json_dict(self) -> dict:
        return {
            "grid": self.grid,
            "solver_capacity": self.solver_capacity,
            "final_gap": self.final_gap,
            "series": [
                {"T": p.time_steps, "nu": str(p.count), "rate": p.rate}
                for p in self.points
            ],
        }


def quantize(
    catalog: EffectiveCatalog, grid: float, counts: Mapping[str, int]
) -> QuantizedCatalog:
    """Snap a catalog's read times onto integer multiples of ``grid``.

    Every time must be an exact multiple of the grid (to within double
    rounding, 1e-9 relative); an off-grid time is rejected with the class
    named, never silently rounded.
    """
    if not (grid > 0 and math.isfinite(grid)):
        raise ValueError(f"grid must be positive and finite, got {grid}")
    int_times: list[tuple[int, int]] = []
    for cid, entry in sorted(catalog.entries.items()):
        steps = entry.min_time / grid
        tau_int = round(steps)
        if tau_int < 1 or abs(steps - tau_int) > _GRID_REL_TOL * max(1.0, abs(steps)):
            raise ValueError(
                f"class '{cid}': time {entry.min_time} is not a multiple of grid {grid}"
            )
        int_times.append((counts[cid], tau_int))
    time_gcd = math.gcd(*(tau for _, tau in int_times)) if int_times else 0
    return QuantizedCatalog(int_times=tuple(int_times), grid=grid, time_gcd=time_gcd)


def infer_grid(times: Iterable[float]) -> float:
    """Largest grid making all times integer multiples of it.

    Times are interpreted as rationals with denominator up to 10**6; the
    grid is their rational gcd.
    """
    gcd = Fraction(0)
    for t in times:
        gcd = _fraction_gcd(gcd, Fraction(t).limit_denominator(_MAX_DENOMINATOR))
    if gcd == 0:
        raise ValueError("cannot infer a grid from an empty catalog")
    return float(gcd)


def _fraction_gcd(a: Fraction, b: Fraction) -> Fraction:
    return Fraction(
        math.gcd(a.numerator * b.denominator, b.numerator * a.denominator),
        a.denominator * b.denominator,
    )


def quantize_node(net: Network, node_id: str, grid: float | None = None) -> QuantizedCatalog:
    """Quantized catalog for a node; infers the grid when none is given."""
    catalog = effective_catalog(net, node_id)
    if grid is None:
        grid = infer_grid(entry.min_time for entry in catalog.entries.values())
    return quantize(catalog, grid, net.class_counts())


def count_tasks(q: QuantizedCatalog, T: int) -> int:
    """nu(T): exact number of file sequences with total quantized time T.

    Files within a class are distinct, so a class contributes ``count``
    choices per position. nu(0) = 1 is the empty task.
    """
    if T < 0:
        raise ValueError(f"T must be >= 0, got {T}")
    return count_series(q, T)[T]


def count_series(q: QuantizedCatalog, t_max: int) -> list[int]:
    """nu(0..t_max) by dynamic programming over the recurrence, exact integers."""
    if t_max < 0:
        raise ValueError(f"t_max must be >= 0, got {t_max}")
    nu = [0] * (t_max + 1)
    nu[0] = 1
    for t in range(1, t_max + 1):
        total = 0
        for count, tau in q.int_times:
            if tau <= t:
                total += count * nu[t - tau]
        nu[t] = total
    return nu


def _log2_exact(n: int) -> float:
    """log2 of an arbitrarily large positive integer, to double precision."""
    bits = n.bit_length()
    if bits <= 64:
        return math.log2(n)
    shift = bits - 64
    return math.log2(n >> shift) + shift


def convergence_report(
    q: QuantizedCatalog, t_max: int, solver_x0: float
) -> OracleReport:
    """Growth-rate series log2(nu(T))/(T*grid) against the solver's log2(x0).

    Points appear only at achievable T (nu(T) > 0, which restricts them to
    multiples of the catalog's time gcd). ``final_gap`` is the distance
    between the last point's rate and the solver capacity; it shrinks like
    1/T as the horizon grows.
    """
    if t_max < q.max_time:
        raise ValueError(f"t_max {t_max} is below the largest quantized time {q.max_time}")
    solver_capacity = math.log2(solver_x0) if solver_x0 > 0 else 0.0
    nu = count_series(q, t_max)
    points = tuple(
        OraclePoint(time_steps=t, count=nu[t], rate=_log2_exact(nu[t]) / (t * q.grid))
        for t in range(1, t_max + 1)
        if nu[t] > 0
    )
    if points:
        final_gap = abs(points[-1].rate - solver_capacity)
    else:
        final_gap = abs(solver_capacity)
    return OracleReport(
        points=points, grid=q.grid, solver_capacity=solver_capacity, final_gap=final_gap
    )
