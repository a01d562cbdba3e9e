"""Repulsive wall potentials with compact-support onset and boundary blow-up."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np


class WallDomainError(ValueError):
    """Raised when a state (or an integrator stage) leaves the open domain."""


@dataclass(frozen=True)
class WallPotential:
    """Single-wall potential measured as distance x > 0 from the wall.

        U(x) = theta * max(ell - x, 0)^4 / x

    Smooth on (0, inf), supported on (0, ell), divergent as x -> 0+.
    theta = 0 disables the wall entirely (used for negative controls);
    a disabled wall exerts no force and imposes no domain restriction.
    """

    ell: float = 1.0
    theta: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.ell) and self.ell > 0):
            raise ValueError("wall range ell must be positive and finite")
        if not (math.isfinite(self.theta) and self.theta >= 0):
            raise ValueError("wall strength theta must be nonnegative and finite")

    @property
    def disabled(self) -> bool:
        return self.theta == 0.0

    def _gap(self, x):
        return np.maximum(self.ell - x, 0.0)

    def value(self, x):
        """U(x); zero for x >= ell, +inf is never returned (x <= 0 raises)."""
        x = self._check(x)
        if self.disabled:
            out = np.zeros_like(x)
        else:
            g = self._gap(x)
            out = self.theta * g**4 / x
        return out if out.ndim else float(out)

    def force(self, x):
        """-U'(x) = theta * (4 g^3 x + g^4) / x^2 with g = (ell - x)+, pointing away from the wall."""
        x = self._check(x)
        if self.disabled:
            out = np.zeros_like(x)
        else:
            g = self._gap(x)
            out = self.theta * (4.0 * g**3 * x + g**4) / (x * x)
        return out if out.ndim else float(out)

    def curvature(self, x):
        """U''(x) = theta * (12 g^2 / x + 8 g^3 / x^2 + 2 g^4 / x^3)."""
        x = self._check(x)
        if self.disabled:
            out = np.zeros_like(x)
        else:
            g = self._gap(x)
            out = self.theta * (12.0 * g**2 / x + 8.0 * g**3 / (x * x) + 2.0 * g**4 / x**3)
        return out if out.ndim else float(out)

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(x)):
            raise WallDomainError("wall distance must be finite")
        if not self.disabled and np.any(x <= 0.0):
            raise WallDomainError("wall distance must be positive")
        return x


@dataclass(frozen=True)
class Geometry:
    """Open confinement domain: the half-line (0, inf) or an interval (a, b)."""

    variant: str = "halfline"
    a: float | None = None
    b: float | None = None

    def __post_init__(self):
        if self.variant not in ("halfline", "interval"):
            raise ValueError(f"unknown geometry variant {self.variant!r}")
        if self.variant == "interval":
            if self.a is None or self.b is None:
                raise ValueError("interval geometry requires both endpoints a and b")
            if not (math.isfinite(self.a) and math.isfinite(self.b) and self.b > self.a):
                raise ValueError("interval geometry requires finite endpoints with b > a")


def wall_distances(geom: Geometry, x) -> np.ndarray:
    """Distance from each position to every wall, one row per wall."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if geom.variant == "halfline":
        return x[None, :].copy()
    return np.stack([x - geom.a, geom.b - x])


def check_domain(geom: Geometry, wall: WallPotential, x) -> None:
    """Raise unless every position is strictly inside the open domain.

    A disabled wall (theta = 0) lifts the restriction so that control runs
    can cross the boundary and be flagged by the collision check afterwards.
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise WallDomainError("positions must be finite")
    if wall.disabled:
        return
    if np.any(wall_distances(geom, x) <= 0.0):
        raise WallDomainError("position at or behind a wall")


def geometry_potential(geom: Geometry, wall: WallPotential, x):
    """Per-position confinement energy, one wall term per boundary."""
    if geom.variant == "halfline":
        return wall.value(x)
    return wall.value(np.asarray(x, dtype=float) - geom.a) + wall.value(geom.b - np.asarray(x, dtype=float))


def geometry_force(geom: Geometry, wall: WallPotential, x):
    """Signed confining force: each wall pushes toward the interior."""
    if geom.variant == "halfline":
        return wall.force(x)
    x = np.asarray(x, dtype=float)
    return wall.force(x - geom.a) - wall.force(geom.b - x)


def geometry_curvature(geom: Geometry, wall: WallPotential, x):
    if geom.variant == "halfline":
        return wall.curvature(x)
    x = np.asarray(x, dtype=float)
    return wall.curvature(x - geom.a) + wall.curvature(geom.b - x)


def warn_if_overlapping(geom: Geometry, wall: WallPotential) -> None:
    # overlapping ranges are legal but leave no force-free interior region
    if geom.variant == "interval" and wall.ell > (geom.b - geom.a) / 2.0:
        warnings.warn(
            f"wall range ell={wall.ell} exceeds half the interval width {(geom.b - geom.a) / 2.0}",
            stacklevel=2,
        )
