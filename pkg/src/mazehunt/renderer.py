"""Software raycaster producing the agent's 64x64 RGB view.

Walls are rendered column-by-column with incremental grid traversal (DDA)
against the camera plane, using perpendicular distance so flat walls stay
flat (no fisheye). Objects are depth-tested billboard circles. The current
target's color is painted over the outer two pixel rows/columns as the
prompt. A separate top-down map renderer serves debugging and the play
client's practice mode.

The hot path is compiled with numba; a Renderer instance owns its frame
buffer so steady-state rendering performs no Python-level allocation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .simcore import EnvState

FRAME_SIZE = 64
BORDER_PX = 2

# World-space size of the object billboards: spheres of radius 0.25 resting
# on the floor, so their centers sit at height 0.25.
OBJECT_RADIUS = 0.25
OBJECT_CENTER_HEIGHT = 0.25

# Flat shading palette (RGB). Two wall grays keyed by which face the ray
# hit give cheap geometry cues; floor and ceiling are flat tones.
WALL_X_COLOR = (161, 161, 161)  # faces perpendicular to the x axis
WALL_Y_COLOR = (113, 113, 113)  # faces perpendicular to the y axis
FLOOR_COLOR = (60, 60, 60)
CEILING_COLOR = (92, 92, 102)

MAP_FLOOR_COLOR = (228, 228, 228)
MAP_WALL_COLOR = (42, 42, 48)
MAP_AGENT_COLOR = (0, 0, 0)
MAP_HEADING_COLOR = (96, 96, 96)


@dataclass(frozen=True)
class CameraParams:
    horizontal_fov: float = 90.0  # degrees
    eye_height: float = 0.5  # world units
    near_clip: float = 0.05  # world units

    def __post_init__(self):
        if not 0.0 < self.horizontal_fov < 180.0:
            raise ValueError("horizontal_fov must be in (0, 180) degrees")

    @property
    def plane_scale(self) -> float:
        """Half-width of the camera plane: tan(fov/2)."""
        return math.tan(math.radians(self.horizontal_fov) / 2.0)


DEFAULT_CAMERA = CameraParams()


@njit(cache=True)
def _cast_ray(walls, px, py, rdx, rdy):
    """March one ray from (px, py) through the wall grid.

    Returns (hit_row, hit_col, side, perp) where side is 0 for a hit on a
    face perpendicular to x and 1 for y, and perp is the distance from the
    camera plane (not the euclidean ray length) assuming the direction
    component of (rdx, rdy) along the view axis is unit length.
    """
    map_c = int(px)
    map_r = int(py)
    ddx = abs(1.0 / rdx) if rdx != 0.0 else 1e30
    ddy = abs(1.0 / rdy) if rdy != 0.0 else 1e30
    if rdx < 0.0:
        step_c = -1
        side_x = (px - map_c) * ddx
    else:
        step_c = 1
        side_x = (map_c + 1.0 - px) * ddx
    if rdy < 0.0:
        step_r = -1
        side_y = (py - map_r) * ddy
    else:
        step_r = 1
        side_y = (map_r + 1.0 - py) * ddy
    n = walls.shape[0]
    side = 0
    while True:
        if side_x < side_y:
            side_x += ddx
            map_c += step_c
            side = 0
        else:
            side_y += ddy
            map_r += step_r
            side = 1
        if map_r < 0 or map_r >= n or map_c < 0 or map_c >= n:
            # Unreachable when the boundary ring is solid; stop defensively.
            return map_r, map_c, side, 1e30
        if walls[map_r, map_c]:
            break
    if side == 0:
        perp = side_x - ddx
    else:
        perp = side_y - ddy
    return map_r, map_c, side, perp


@njit(cache=True)
def _render_scene(
    walls,
    out,
    zbuf,
    px,
    py,
    dx,
    dy,
    plane_scale,
    eye_h,
    near,
    obj_xy,
    obj_rgb,
    obj_order,
    obj_depth,
    obj_screen,
    wall_x_rgb,
    wall_y_rgb,
    floor_rgb,
    ceil_rgb,
):
    h, w = out.shape[0], out.shape[1]
    plx = -dy * plane_scale
    ply = dx * plane_scale
    vscale = h / (2.0 * plane_scale)
    hscale = w / (2.0 * plane_scale)

    for col in range(w):
        cx = 2.0 * (col + 0.5) / w - 1.0
        rdx = dx + plx * cx
        rdy = dy + ply * cx
        _, _, side, perp = _cast_ray(walls, px, py, rdx, rdy)
        if perp < near:
            perp = near
        zbuf[col] = perp

        y_top = h / 2.0 - (1.0 - eye_h) * vscale / perp
        y_bot = h / 2.0 + eye_h * vscale / perp
        top = int(math.floor(y_top + 0.5))
        bot = int(math.floor(y_bot + 0.5))
        if top < 0:
            top = 0
        if bot > h:
            bot = h
        for r in range(0, min(top, h)):
            out[r, col, 0] = ceil_rgb[0]
            out[r, col, 1] = ceil_rgb[1]
            out[r, col, 2] = ceil_rgb[2]
        wall_rgb = wall_x_rgb if side == 0 else wall_y_rgb
        for r in range(top, bot):
            out[r, col, 0] = wall_rgb[0]
            out[r, col, 1] = wall_rgb[1]
            out[r, col, 2] = wall_rgb[2]
        for r in range(max(bot, 0), h):
            out[r, col, 0] = floor_rgb[0]
            out[r, col, 1] = floor_rgb[1]
            out[r, col, 2] = floor_rgb[2]

    # Billboard objects, painter's order far to near, walls via zbuf.
    k = obj_xy.shape[0]
    for i in range(k):
        relx = obj_xy[i, 0] - px
        rely = obj_xy[i, 1] - py
        obj_depth[i] = dx * relx + dy * rely
        obj_screen[i] = (dx * rely - dy * relx) / plane_scale
        obj_order[i] = i
    for i in range(1, k):  # insertion sort by depth, descending
        j = i
        while j > 0 and obj_depth[obj_order[j - 1]] < obj_depth[obj_order[j]]:
            obj_order[j - 1], obj_order[j] = obj_order[j], obj_order[j - 1]
            j -= 1
    for oi in range(k):
        i = obj_order[oi]
        ty = obj_depth[i]
        if ty <= near:
            continue
        sx = (w / 2.0) * (1.0 + obj_screen[i] / ty)
        r_px = OBJECT_RADIUS * hscale / ty
        yc = h / 2.0 - (OBJECT_CENTER_HEIGHT - eye_h) * vscale / ty
        c0 = int(math.floor(sx - r_px + 0.5))
        c1 = int(math.floor(sx + r_px + 0.5))
        if c0 < 0:
            c0 = 0
        if c1 > w:
            c1 = w
        for c in range(c0, c1):
            if ty >= zbuf[c]:
                continue
            dcol = (c + 0.5) - sx
            under = r_px * r_px - dcol * dcol
            if under <= 0.0:
                continue
            half = math.sqrt(under)
            r0 = int(math.floor(yc - half + 0.5))
            r1 = int(math.floor(yc + half + 0.5))
            if r0 < 0:
                r0 = 0
            if r1 > h:
                r1 = h
            for r in range(r0, r1):
                out[r, c, 0] = obj_rgb[i, 0]
                out[r, c, 1] = obj_rgb[i, 1]
                out[r, c, 2] = obj_rgb[i, 2]


class Renderer:
    """Owns reusable buffers; use one instance per thread."""

    def __init__(self, cam: CameraParams = DEFAULT_CAMERA, size: int = FRAME_SIZE):
        self.cam = cam
        self.size = size
        self._frame = np.empty((size, size, 3), dtype=np.uint8)
        self._zbuf = np.empty(size, dtype=np.float64)
        self._obj_order = np.empty(0, dtype=np.int64)
        self._obj_depth = np.empty(0, dtype=np.float64)
        self._obj_screen = np.empty(0, dtype=np.float64)
        self._wall_x = np.array(WALL_X_COLOR, dtype=np.uint8)
        self._wall_y = np.array(WALL_Y_COLOR, dtype=np.uint8)
        self._floor = np.array(FLOOR_COLOR, dtype=np.uint8)
        self._ceil = np.array(CEILING_COLOR, dtype=np.uint8)

    def first_person(self, state: EnvState, out: np.ndarray | None = None) -> np.ndarray:
        """Render the agent's view; returns the internal buffer unless
        ``out`` is given (then that array is filled and returned)."""
        frame = self._frame if out is None else out
        if frame.shape != (self.size, self.size, 3) or frame.dtype != np.uint8:
            raise ValueError("output frame must be (size, size, 3) uint8")
        k = state.layout.n_objects
        if self._obj_order.shape[0] != k:
            self._obj_order = np.empty(k, dtype=np.int64)
            self._obj_depth = np.empty(k, dtype=np.float64)
            self._obj_screen = np.empty(k, dtype=np.float64)
        pose = state.pose
        _render_scene(
            state.layout.walls,
            frame,
            self._zbuf,
            pose.x,
            pose.y,
            pose.hx,
            pose.hy,
            self.cam.plane_scale,
            self.cam.eye_height,
            self.cam.near_clip,
            state.object_centers,
            state.layout.object_colors,
            self._obj_order,
            self._obj_depth,
            self._obj_screen,
            self._wall_x,
            self._wall_y,
            self._floor,
            self._ceil,
        )
        b = BORDER_PX
        color = state.layout.object_colors[state.target_index]
        frame[:b, :] = color
        frame[-b:, :] = color
        frame[:, :b] = color
        frame[:, -b:] = color
        return frame


def render_first_person(
    state: EnvState,
    cam: CameraParams = DEFAULT_CAMERA,
    out: np.ndarray | None = None,
) -> np.ndarray:
    """Reentrant one-shot render; allocates a frame unless ``out`` is given."""
    r = Renderer(cam)
    if out is None:
        out = np.empty((FRAME_SIZE, FRAME_SIZE, 3), dtype=np.uint8)
    return r.first_person(state, out=out)


def render_layout_map(layout, scale: int = 8) -> np.ndarray:
    """Top-down map of walls and objects, (N*scale, N*scale, 3) uint8."""
    if scale < 1:
        raise ValueError("scale must be >= 1")
    n = layout.grid_size
    cells = np.empty((n, n, 3), dtype=np.uint8)
    cells[:] = MAP_FLOOR_COLOR
    cells[layout.walls] = MAP_WALL_COLOR
    for (r, c), rgb in zip(layout.object_cells, layout.object_colors):
        cells[r, c] = rgb
    return np.repeat(np.repeat(cells, scale, axis=0), scale, axis=1)


def render_top_down(state: EnvState, scale: int = 8) -> np.ndarray:
    """Layout map plus the agent: a disc at its position and a heading tick."""
    img = render_layout_map(state.layout, scale)
    pose = state.pose
    cx, cy = pose.x * scale, pose.y * scale
    radius = 0.3 * scale
    size = img.shape[0]
    r0 = max(int(cy - radius - 1), 0)
    r1 = min(int(cy + radius + 2), size)
    c0 = max(int(cx - radius - 1), 0)
    c1 = min(int(cx + radius + 2), size)
    for r in range(r0, r1):
        for c in range(c0, c1):
            if (c + 0.5 - cx) ** 2 + (r + 0.5 - cy) ** 2 <= radius * radius:
                img[r, c] = MAP_AGENT_COLOR
    # heading tick: a line of pixels from the center past the disc edge
    for t in np.linspace(0.0, 0.55 * scale, 4 * scale):
        r = int(cy + pose.hy * t)
        c = int(cx + pose.hx * t)
        if 0 <= r < size and 0 <= c < size:
            img[r, c] = MAP_HEADING_COLOR
    return img


def save_png(image: np.ndarray, path) -> None:
    """Write an (H, W, 3) uint8 image to a PNG file."""
    from PIL import Image

    Image.fromarray(image, mode="RGB").save(path, format="PNG")
