"""Randomized maze layouts: rooms, corridors, objects, and a spawn pose.

Layouts are generated by rejection sampling: rectangular rooms are placed
at odd-aligned positions inside the interior, a random spanning tree of
L-shaped corridors connects them, and the whole attempt is discarded if
the room count misses the configured range or the objects cannot be
placed. The result is always a single 4-connected floor region surrounded
by a solid boundary ring.

Randomness comes from the package-wide Philox streams (see rng.py), so
``generate(config, seed)`` is a pure function: identical arguments yield a
bit-identical layout.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .rng import STREAM_LAYOUT, make_rng

# Object colors, in order, for 1..6 objects. The prompt border must be
# unambiguous, hence a fixed maximally-saturated palette.
PALETTE = np.array(
    [
        (255, 0, 0),  # red
        (0, 255, 0),  # green
        (0, 0, 255),  # blue
        (255, 255, 0),  # yellow
        (255, 0, 255),  # magenta
        (0, 255, 255),  # cyan
    ],
    dtype=np.uint8,
)

# World geometry constants: one grid cell is 1.0 world unit, walls are
# 1.0 unit tall. All world-space code assumes these.
CELL_SIZE = 1.0
WALL_HEIGHT = 1.0

_LAYOUT_RETRIES = 2000
_ROOM_ATTEMPTS = 64
_OBJECT_ATTEMPTS = 200


class GenerationFailed(RuntimeError):
    """No valid layout found within the retry budget.

    Seeing this for a preset config is a bug; for a custom config it
    signals the config is inconsistent (e.g. more rooms than fit).
    """


@dataclass(frozen=True)
class MazeConfig:
    """Size parameters of one maze family."""

    grid_size: int
    n_objects: int
    room_count_range: tuple[int, int]
    room_size_range: tuple[int, int]
    episode_length: int

    def validate(self) -> None:
        n = self.grid_size
        if n < 5 or n % 2 == 0:
            raise ValueError(f"grid_size must be odd and >= 5, got {n}")
        if not 1 <= self.n_objects <= len(PALETTE):
            raise ValueError(f"n_objects must be in 1..{len(PALETTE)}")
        lo, hi = self.room_count_range
        if not 1 <= lo <= hi:
            raise ValueError("room_count_range must be a nonempty positive interval")
        slo, shi = self.room_size_range
        if not 1 <= slo <= shi:
            raise ValueError("room_size_range must be a nonempty positive interval")
        if shi > n - 2:
            raise ValueError("rooms cannot exceed the maze interior")
        if self.episode_length < 1:
            raise ValueError("episode_length must be positive")


PRESETS: dict[int, MazeConfig] = {
    9: MazeConfig(9, 3, (3, 4), (3, 5), 1000),
    11: MazeConfig(11, 4, (4, 6), (3, 5), 2000),
    13: MazeConfig(13, 5, (5, 6), (3, 5), 3000),
    15: MazeConfig(15, 6, (9, 9), (3, 3), 4000),
}


@dataclass
class MazeLayout:
    """A concrete maze: wall grid plus placement metadata.

    ``walls`` is an (N, N) bool grid, True = wall. Rooms are (row, col,
    height, width) cell rectangles. Cell (r, c) spans world coordinates
    [c, c+1) x [r, r+1); object centers sit at cell centers.
    """

    walls: np.ndarray
    rooms: list[tuple[int, int, int, int]]
    object_cells: list[tuple[int, int]]
    object_colors: np.ndarray
    spawn_cell: tuple[int, int]
    spawn_heading: float
    config: MazeConfig = field(repr=False, default=None)

    @property
    def grid_size(self) -> int:
        return self.walls.shape[0]

    @property
    def n_objects(self) -> int:
        return len(self.object_cells)

    def object_centers(self) -> np.ndarray:
        """(k, 2) world-space (x, y) centers of the objects."""
        cells = np.asarray(self.object_cells, dtype=np.float64)
        return np.stack([cells[:, 1] + 0.5, cells[:, 0] + 0.5], axis=1)


def connectivity_check(walls: np.ndarray) -> bool:
    """True iff all floor cells form one 4-connected component.

    An all-wall grid has no floor cells and counts as connected
    (vacuously true). Expects a square grid with a solid boundary.
    """
    walls = np.asarray(walls, dtype=bool)
    floor = np.argwhere(~walls)
    if len(floor) == 0:
        return True
    n = walls.shape[0]
    seen = np.zeros_like(walls, dtype=bool)
    start = (int(floor[0][0]), int(floor[0][1]))
    seen[start] = True
    queue = deque([start])
    count = 1
    while queue:
        r, c = queue.popleft()
        for rr, cc in ((r - 1, c), (r, c + 1), (r + 1, c), (r, c - 1)):
            if 0 <= rr < n and 0 <= cc < n and not walls[rr, cc] and not seen[rr, cc]:
                seen[rr, cc] = True
                count += 1
                queue.append((rr, cc))
    return count == len(floor)


def generate(config: MazeConfig, seed: int) -> MazeLayout:
    """Generate a random layout satisfying all MazeLayout invariants."""
    config.validate()
    rng = make_rng(seed, STREAM_LAYOUT)
    for _ in range(_LAYOUT_RETRIES):
        layout = _attempt(config, rng)
        if layout is not None:
            return layout
    raise GenerationFailed(
        f"no valid layout for {config} within {_LAYOUT_RETRIES} attempts"
    )


def _attempt(config: MazeConfig, rng: np.random.Generator) -> MazeLayout | None:
    n = config.grid_size
    lo, hi = config.room_count_range
    target_rooms = int(rng.integers(lo, hi + 1))

    rooms = _place_rooms(config, target_rooms, rng)
    if rooms is None:
        return None

    walls = np.ones((n, n), dtype=bool)
    for r0, c0, h, w in rooms:
        walls[r0 : r0 + h, c0 : c0 + w] = False
    _carve_corridor_tree(walls, rooms, rng)

    if not connectivity_check(walls):  # cannot happen by construction; guards edits
        return None

    placement = _place_objects(walls, config.n_objects, rng)
    if placement is None:
        return None
    spawn_cell, object_cells = placement

    return MazeLayout(
        walls=walls,
        rooms=rooms,
        object_cells=object_cells,
        object_colors=PALETTE[: config.n_objects].copy(),
        spawn_cell=spawn_cell,
        spawn_heading=float(rng.uniform(0.0, 2.0 * np.pi)),
        config=config,
    )


def _place_rooms(
    config: MazeConfig, target: int, rng: np.random.Generator
) -> list[tuple[int, int, int, int]] | None:
    """Greedy rejection placement of non-touching, odd-aligned rooms."""
    n = config.grid_size
    slo, shi = config.room_size_range
    rooms: list[tuple[int, int, int, int]] = []
    for _ in range(_ROOM_ATTEMPTS):
        if len(rooms) == target:
            break
        h = int(rng.integers(slo, shi + 1))
        w = int(rng.integers(slo, shi + 1))
        # Candidate odd-aligned top-left corners that keep the room inside
        # the interior and at least one wall cell away from other rooms.
        options = [
            (r0, c0)
            for r0 in range(1, n - h, 2)
            for c0 in range(1, n - w, 2)
            if all(
                r0 > rr + hh or r0 + h <= rr - 1 or c0 > cc + ww or c0 + w <= cc - 1
                for rr, cc, hh, ww in rooms
            )
        ]
        if not options:
            continue
        r0, c0 = options[int(rng.integers(len(options)))]
        rooms.append((r0, c0, h, w))
    if not config.room_count_range[0] <= len(rooms) <= config.room_count_range[1]:
        return None
    return rooms


def _odd_cell_in(room: tuple[int, int, int, int], rng: np.random.Generator) -> tuple[int, int]:
    # Odd-aligned cells keep corridors on the odd lattice, one wall apart.
    r0, c0, h, w = room
    r = r0 + 2 * int(rng.integers((h + 1) // 2))
    c = c0 + 2 * int(rng.integers((w + 1) // 2))
    return r, c


def _carve_corridor_tree(
    walls: np.ndarray, rooms: list[tuple[int, int, int, int]], rng: np.random.Generator
) -> None:
    """Connect rooms with a random spanning tree of L-shaped corridors."""
    order = rng.permutation(len(rooms))
    for i in range(1, len(rooms)):
        a = rooms[order[i]]
        b = rooms[order[int(rng.integers(i))]]
        ra, ca = _odd_cell_in(a, rng)
        rb, cb = _odd_cell_in(b, rng)
        if rng.integers(2) == 0:
            _carve_row(walls, ra, ca, cb)
            _carve_col(walls, cb, ra, rb)
        else:
            _carve_col(walls, ca, ra, rb)
            _carve_row(walls, rb, ca, cb)


def _carve_row(walls: np.ndarray, r: int, c0: int, c1: int) -> None:
    walls[r, min(c0, c1) : max(c0, c1) + 1] = False


def _carve_col(walls: np.ndarray, c: int, r0: int, r1: int) -> None:
    walls[min(r0, r1) : max(r0, r1) + 1, c] = False


def _place_objects(
    walls: np.ndarray, n_objects: int, rng: np.random.Generator
) -> tuple[tuple[int, int], list[tuple[int, int]]] | None:
    """Spawn plus objects, no two within Chebyshev distance 1 of each other."""
    floor = [(int(r), int(c)) for r, c in np.argwhere(~walls)]
    if len(floor) < n_objects + 1:
        return None
    spawn = floor[int(rng.integers(len(floor)))]
    taken = [spawn]
    objects: list[tuple[int, int]] = []
    for _ in range(_OBJECT_ATTEMPTS):
        if len(objects) == n_objects:
            break
        cell = floor[int(rng.integers(len(floor)))]
        if all(max(abs(cell[0] - r), abs(cell[1] - c)) > 1 for r, c in taken):
            objects.append(cell)
            taken.append(cell)
    if len(objects) < n_objects:
        return None
    return spawn, objects


def layout_to_json(layout: MazeLayout) -> str:
    """Debug/export form: walls as 0/1 rows, objects as [row, col, rgb]."""
    doc = {
        "grid_size": layout.grid_size,
        "walls": layout.walls.astype(int).tolist(),
        "rooms": [list(r) for r in layout.rooms],
        "objects": [
            [r, c, [int(v) for v in rgb]]
            for (r, c), rgb in zip(layout.object_cells, layout.object_colors)
        ],
        "spawn_cell": list(layout.spawn_cell),
        "spawn_heading": layout.spawn_heading,
    }
    return json.dumps(doc)


def layout_from_json(text: str) -> MazeLayout:
    doc = json.loads(text)
    return MazeLayout(
        walls=np.asarray(doc["walls"], dtype=bool),
        rooms=[tuple(r) for r in doc["rooms"]],
        object_cells=[(r, c) for r, c, _rgb in doc["objects"]],
        object_colors=np.asarray(
            [rgb for _r, _c, rgb in doc["objects"]], dtype=np.uint8
        ),
        spawn_cell=tuple(doc["spawn_cell"]),
        spawn_heading=float(doc["spawn_heading"]),
        config=None,
    )
