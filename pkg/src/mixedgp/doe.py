"""Design-of-experiments generators over mixed spaces.

Two designs are provided: Latin hypercube sampling and full-factorial
grids.  Randomness comes from ``numpy.random.Generator`` seeded with the
documented PCG64 bit generator, so designs are reproducible from the seed
alone.  Draw order is fixed: variables are visited in space order; each
continuous/integer variable consumes one permutation and one uniform block,
each categorical variable one permutation and one shuffle.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import SizeOverflow
from .space import Categorical, Continuous, DesignSpace, Integer, MixedPoint

__all__ = ["DoeRequest", "lhs", "grid", "GRID_SIZE_CAP"]

GRID_SIZE_CAP = 10_000_000


@dataclass(frozen=True)
class DoeRequest:
    """A sampling request: LHS of ``n_points`` or a grid of ``points_per_dim``."""

    space: DesignSpace
    n_points: int = 1
    seed: int = 0
    method: str = "lhs"  # "lhs" | "grid"
    points_per_dim: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.method not in ("lhs", "grid"):
            raise ValueError(f"unknown DoE method {self.method!r}")
        if self.n_points < 1:
            raise ValueError("n_points must be >= 1")
        if self.points_per_dim is not None and any(c < 1 for c in self.points_per_dim):
            raise ValueError("grid counts must be >= 1 per dimension")

    def run(self) -> tuple[MixedPoint, ...]:
        if self.method == "lhs":
            return lhs(self.space, self.n_points, self.seed)
        counts = self.points_per_dim
        n_numeric = self.space.n_continuous + self.space.n_integer
        if counts is None:
            counts = (self.n_points,) * n_numeric
        return grid(self.space, counts)


def lhs(space: DesignSpace, n_points: int, seed: int = 0) -> tuple[MixedPoint, ...]:
    """Latin hypercube sample of ``n_points`` mixed points.

    Continuous and integer coordinates are stratified: each of the
    ``n_points`` equal-width bins of a dimension receives exactly one
    sample, jittered uniformly inside its bin (integers are rounded after
    unscaling).  Categorical coordinates cycle a random permutation of the
    levels and are then shuffled, so level counts differ by at most one.
    """
    if n_points < 1:
        raise ValueError("n_points must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    columns: list[np.ndarray] = []
    for var in space.variables:
        if isinstance(var, (Continuous, Integer)):
            bins = rng.permutation(n_points)
            unit = (bins + rng.random(n_points)) / n_points
            values = var.lower + unit * (var.upper - var.lower)
            if isinstance(var, Integer):
                values = np.clip(np.rint(values), var.lower, var.upper)
            columns.append(values)
        else:
            order = rng.permutation(var.n_levels) + 1
            reps = math.ceil(n_points / var.n_levels)
            levels = np.tile(order, reps)[:n_points]
            rng.shuffle(levels)
            columns.append(levels)
    points = []
    for row in range(n_points):
        cont, intg, cat = [], [], []
        for var, col in zip(space.variables, columns):
            if isinstance(var, Continuous):
                cont.append(float(col[row]))
            elif isinstance(var, Integer):
                intg.append(float(col[row]))
            else:
                cat.append(int(col[row]))
        points.append(MixedPoint(tuple(cont), tuple(intg), tuple(cat)))
    return tuple(points)


def grid(
    space: DesignSpace,
    points_per_dim,
    size_cap: int = GRID_SIZE_CAP,
) -> tuple[MixedPoint, ...]:
    """Full-factorial grid, row-major in variable order.

    ``points_per_dim`` lists one count per continuous/integer variable (in
    space order); categorical variables always contribute all their levels.
    Continuous axes are linspace(lower, upper, count); integer axes use the
    rounded linspace.
    """
    counts = [int(c) for c in points_per_dim]
    n_numeric = space.n_continuous + space.n_integer
    if len(counts) != n_numeric:
        raise ValueError(
            f"expected {n_numeric} grid counts (one per continuous/integer "
            f"variable), got {len(counts)}"
        )
    if any(c < 1 for c in counts):
        raise ValueError("grid counts must be >= 1 per dimension")

    total = 1
    axes: list[tuple[str, np.ndarray]] = []
    numeric_pos = 0
    for var in space.variables:
        if isinstance(var, Continuous):
            values = np.linspace(var.lower, var.upper, counts[numeric_pos])
            axes.append(("cont", values))
            total *= values.size
            numeric_pos += 1
        elif isinstance(var, Integer):
            values = np.rint(np.linspace(var.lower, var.upper, counts[numeric_pos]))
            axes.append(("int", values))
            total *= values.size
            numeric_pos += 1
        else:
            axes.append(("cat", np.arange(1, var.n_levels + 1)))
            total *= var.n_levels
        if total > size_cap:
            raise SizeOverflow(f"grid would hold {total} > {size_cap} points")

    points = []
    for combo in itertools.product(*(values for _, values in axes)):
        cont, intg, cat = [], [], []
        for (kind, _), value in zip(axes, combo):
            if kind == "cont":
                cont.append(float(value))
            elif kind == "int":
                intg.append(float(value))
            else:
                cat.append(int(value))
        points.append(MixedPoint(tuple(cont), tuple(intg), tuple(cat)))
    return tuple(points)
