"""Robot-to-target assignment: distance cost matrices and an exact
minimum-cost solver (Hungarian method, shortest augmenting paths).

Ties between equal-cost assignments break toward the lexicographically
smallest robot-index vector (ordered by target index). The tie-break is
realised exactly by solving over pair costs (distance, lexicographic key)
rather than by perturbation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .geometry import Pose


class InfeasibleAssignmentError(ValueError):
    """More targets than robots; the shortfall cannot be assigned."""


@dataclass(frozen=True)
class CostMatrix:
    """costs[i][j] = distance (mm) from robot i to target j."""

    costs: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        if not self.costs or not self.costs[0]:
            raise ValueError("cost matrix must be non-empty")
        width = len(self.costs[0])
        for row in self.costs:
            if len(row) != width:
                raise ValueError("ragged cost matrix")
            for c in row:
                if not math.isfinite(c) or c < 0.0:
                    raise ValueError(f"cost entries must be finite and >= 0, got {c!r}")

    @property
    def n_robots(self) -> int:
        return len(self.costs)

    @property
    def n_targets(self) -> int:
        return len(self.costs[0])


@dataclass(frozen=True)
class Assignment:
    """Injective target -> robot mapping plus the robots left over."""

    pairs: dict[int, int]
    total_cost: float
    unassigned_robots: tuple[int, ...]


def build_cost_matrix(robots: Sequence[Pose], targets: Sequence[Pose]) -> CostMatrix:
    """Euclidean distances between robot and target positions (headings ignored)."""
    if not robots or not targets:
        raise ValueError("robots and targets must both be non-empty")
    rows = tuple(
        tuple(math.hypot(t.x - r.x, t.y - r.y) for t in targets) for r in robots
    )
    return CostMatrix(rows)


def _solve_square(prim, sec, n):
    """Shortest-augmenting-path assignment over (primary, secondary) pair costs.

    Returns col -> row matching. Pair costs compare lexicographically, so
    the result minimises total primary cost and, among those optima, total
    secondary cost.
    """
    INF = (math.inf, 0)
    u = [(0.0, 0)] * n            # row potentials
    v = [(0.0, 0)] * (n + 1)      # column potentials (last = virtual column)
    p = [-1] * (n + 1)            # p[j] = row matched to column j
    way = [0] * (n + 1)
    for i in range(n):
        p[n] = i
        j0 = n
        minv = [INF] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            up, us = u[i0]
            delta = INF
            j1 = -1
            for j in range(n):
                if used[j]:
                    continue
                vp, vs = v[j]
                cur = (prim[i0][j] - up - vp, sec[i0][j] - us - vs)
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            dp, ds = delta
            for j in range(n + 1):
                if used[j]:
                    r = p[j]
                    u[r] = (u[r][0] + dp, u[r][1] + ds)
                    v[j] = (v[j][0] - dp, v[j][1] - ds)
                else:
                    minv[j] = (minv[j][0] - dp, minv[j][1] - ds)
            j0 = j1
            if p[j0] == -1:
                break
        while j0 != n:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    return p[:n]


def solve_assignment(matrix: CostMatrix) -> Assignment:
    """Minimum-total-distance assignment of every target to a distinct robot.

    Rectangular inputs are padded to square with a sentinel column cost
    strictly greater than any achievable total, so real targets always win.
    Raises when there are more targets than robots.
    """
    n, m = matrix.n_robots, matrix.n_targets
    if m > n:
        raise InfeasibleAssignmentError(
            f"{m} targets but only {n} robots ({m - n} short)"
        )
    sentinel = sum(c for row in matrix.costs for c in row) + 1.0
    prim = [[matrix.costs[i][j] if j < m else sentinel for j in range(n)] for i in range(n)]
    # secondary costs encode the robot-index vector base-(n+1), ordered by target
    sec = [
        [i * (n + 1) ** (m - 1 - j) if j < m else 0 for j in range(n)]
        for i in range(n)
    ]
    col_to_row = _solve_square(prim, sec, n)
    pairs = {j: col_to_row[j] for j in range(m)}
    total = sum(matrix.costs[pairs[j]][j] for j in range(m))
    unassigned = tuple(sorted(set(range(n)) - set(pairs.values())))
    return Assignment(pairs=pairs, total_cost=total, unassigned_robots=unassigned)
