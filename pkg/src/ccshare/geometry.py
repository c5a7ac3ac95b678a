"""Indoor geometry and log-distance path gain with wall penetration.

The service area is a rectangular single-story building, optionally split
by internal wall segments. The default layout is a 50x50 m floor divided
into four identical rooms by two full-length partitions. A radio link is
line-of-sight when the straight path between endpoints crosses no wall;
otherwise the NLOS coefficient set applies plus the penetration loss of
every wall crossed.

Coefficients follow the WINNER II A1 indoor office model and are stored
as data so alternative models can be configured:

    PL_LOS(d)  = 18.7 * log10(d) + 46.8 + 20 * log10(fc / 5.0)
    PL_NLOS(d) = 36.8 * log10(d) + 43.8 + 20 * log10(fc / 5.0)

with d in meters (clamped below at ``min_distance_m``) and fc in GHz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Position:
    x: float
    y: float

    def distance_to(self, other: "Position") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class Wall:
    """Internal wall segment with a penetration loss in dB."""

    x1: float
    y1: float
    x2: float
    y2: float
    loss_db: float = 10.0

    def __post_init__(self):
        if self.loss_db < 0:
            raise ValueError("wall loss_db must be >= 0")


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle, used for rooms and UE placement regions."""

    x0: float
    y0: float
    x1: float
    y1: float

    @property
    def area(self) -> float:
        return (self.x1 - self.x0) * (self.y1 - self.y0)

    def contains(self, p: Position) -> bool:
        return self.x0 <= p.x <= self.x1 and self.y0 <= p.y <= self.y1


@dataclass(frozen=True)
class Layout:
    width_m: float = 50.0
    height_m: float = 50.0
    walls: tuple[Wall, ...] = ()
    rooms: tuple[Rect, ...] = ()

    def __post_init__(self):
        for w in self.walls:
            for x, y in ((w.x1, w.y1), (w.x2, w.y2)):
                if not (0 <= x <= self.width_m and 0 <= y <= self.height_m):
                    raise ValueError("wall endpoints must lie within the building")

    def contains(self, p: Position) -> bool:
        return 0 <= p.x <= self.width_m and 0 <= p.y <= self.height_m

    def room(self, index: int) -> Rect:
        return self.rooms[index]


def four_room_layout(side_m: float = 50.0, wall_loss_db: float = 10.0) -> Layout:
    """Square building split into four identical rooms by two partitions."""
    h = side_m / 2.0
    walls = (
        Wall(h, 0.0, h, side_m, wall_loss_db),
        Wall(0.0, h, side_m, h, wall_loss_db),
    )
    rooms = (
        Rect(0.0, 0.0, h, h),
        Rect(h, 0.0, side_m, h),
        Rect(0.0, h, h, side_m),
        Rect(h, h, side_m, side_m),
    )
    return Layout(side_m, side_m, walls, rooms)


def open_layout(side_m: float = 50.0) -> Layout:
    """Same building with no internal walls (one big room)."""
    return Layout(side_m, side_m, (), (Rect(0.0, 0.0, side_m, side_m),))


@dataclass(frozen=True)
class LogDistanceModel:
    """PL(d) = slope * log10(d) + intercept + freq_coeff * log10(fc / 5 GHz)."""

    slope: float
    intercept: float
    freq_coeff: float = 20.0

    def loss_db(self, distance_m: float, carrier_freq_ghz: float) -> float:
        return (
            self.slope * math.log10(distance_m)
            + self.intercept
            + self.freq_coeff * math.log10(carrier_freq_ghz / 5.0)
        )


@dataclass(frozen=True)
class PropagationParams:
    carrier_freq_ghz: float = 5.0
    los: LogDistanceModel = field(default_factory=lambda: LogDistanceModel(18.7, 46.8, 20.0))
    nlos: LogDistanceModel = field(default_factory=lambda: LogDistanceModel(36.8, 43.8, 20.0))
    shadowing_sigma_los_db: float = 3.0
    shadowing_sigma_nlos_db: float = 4.0
    shadowing_enabled: bool = False
    min_distance_m: float = 1.0

    def __post_init__(self):
        if self.los.slope <= 0 or self.nlos.slope <= 0:
            raise ValueError("path loss slopes must be positive")
        if self.min_distance_m <= 0:
            raise ValueError("min_distance_m must be positive")
        if self.shadowing_sigma_los_db < 0 or self.shadowing_sigma_nlos_db < 0:
            raise ValueError("shadowing sigmas must be >= 0")


def _orient(ax, ay, bx, by, cx, cy):
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def _on_segment(ax, ay, bx, by, px, py):
    # assumes p collinear with a-b
    return min(ax, bx) <= px <= max(ax, bx) and min(ay, by) <= py <= max(ay, by)


def _segments_intersect(ax, ay, bx, by, cx, cy, dx, dy) -> bool:
    """Closed-segment intersection test; touching an endpoint counts."""
    d1 = _orient(cx, cy, dx, dy, ax, ay)
    d2 = _orient(cx, cy, dx, dy, bx, by)
    d3 = _orient(ax, ay, bx, by, cx, cy)
    d4 = _orient(ax, ay, bx, by, dx, dy)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
        return True
    if d1 == 0 and _on_segment(cx, cy, dx, dy, ax, ay):
        return True
    if d2 == 0 and _on_segment(cx, cy, dx, dy, bx, by):
        return True
    if d3 == 0 and _on_segment(ax, ay, bx, by, cx, cy):
        return True
    if d4 == 0 and _on_segment(ax, ay, bx, by, dx, dy):
        return True
    return False


def crossed_walls(a: Position, b: Position, layout: Layout) -> list[Wall]:
    """Walls whose segment intersects segment a-b (endpoint touch counts once)."""
    return [
        w
        for w in layout.walls
        if _segments_intersect(a.x, a.y, b.x, b.y, w.x1, w.y1, w.x2, w.y2)
    ]


def wall_count(a: Position, b: Position, layout: Layout) -> int:
    return len(crossed_walls(a, b, layout))


def path_gain_db(
    tx: Position,
    rx: Position,
    layout: Layout,
    params: PropagationParams,
    shadowing_db: float = 0.0,
) -> float:
    """Channel gain in dB (negative of total path loss) for one link.

    LOS coefficients apply iff the link crosses no wall. ``shadowing_db``
    is an externally drawn per-link normal sample so that the function
    stays deterministic and symmetric for a fixed draw.
    """
    d = max(tx.distance_to(rx), params.min_distance_m)
    walls = crossed_walls(tx, rx, layout)
    if walls:
        loss = params.nlos.loss_db(d, params.carrier_freq_ghz)
        loss += sum(w.loss_db for w in walls)
    else:
        loss = params.los.loss_db(d, params.carrier_freq_ghz)
    return -(loss + shadowing_db)


def place_ues(n: int, region: tuple[Rect, ...], rng: np.random.Generator) -> list[Position]:
    """Draw n i.i.d. uniform positions over a union of rectangles.

    The region is sampled area-proportionally so the union is uniform even
    for unequal rectangles. Raises on an empty or zero-area region.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    areas = np.array([r.area for r in region], dtype=float)
    if len(region) == 0 or areas.sum() <= 0:
        raise ValueError("placement region is empty")
    idx = rng.choice(len(region), size=n, p=areas / areas.sum())
    out = []
    for i in idx:
        r = region[i]
        out.append(Position(rng.uniform(r.x0, r.x1), rng.uniform(r.y0, r.y1)))
    return out
