"""Deterministic discrete-time scavenger-hunt environment.

One control step rotates the agent, advances it with wall sliding, checks
whether it touched the prompted object, and advances the episode clock.
All randomness (initial target, target resampling) flows through a Philox
stream derived from the reset seed, so a (seed, action sequence) pair
replays to a bit-identical trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import mazegen
from .rng import STREAM_TARGETS, make_rng

# Action index -> (forward, turn). Turn -1 is left, +1 is right.
ACTIONS: tuple[tuple[float, float], ...] = (
    (0.0, 0.0),  # 0 noop
    (1.0, 0.0),  # 1 forward
    (0.0, -1.0),  # 2 turn left
    (0.0, 1.0),  # 3 turn right
    (1.0, -1.0),  # 4 forward left
    (1.0, 1.0),  # 5 forward right
)
N_ACTIONS = len(ACTIONS)


class SteppedAfterDone(RuntimeError):
    """step() was called on a finished episode."""


@dataclass(frozen=True)
class Kinematics:
    """Motion constants, in cells and degrees per control step."""

    forward_speed: float = 0.25
    turn_rate_deg: float = 22.5
    collision_radius: float = 0.2
    touch_radius: float = 0.6

    @property
    def turn_rate(self) -> float:
        return math.radians(self.turn_rate_deg)


DEFAULT_KINEMATICS = Kinematics()


@dataclass
class AgentPose:
    x: float
    y: float
    hx: float
    hy: float

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)

    @property
    def heading(self) -> tuple[float, float]:
        return (self.hx, self.hy)

    @property
    def heading_angle(self) -> float:
        return math.atan2(self.hy, self.hx)


@dataclass
class SemanticObs:
    """Ground-truth state channels, shaped like the dataset schema."""

    maze_layout: np.ndarray  # (N, N) bool
    agent_pos: np.ndarray  # (2,) f32
    agent_dir: np.ndarray  # (2,) f32
    targets_pos: np.ndarray  # (k, 2) f32
    targets_vec: np.ndarray  # (k, 2) f32
    target_pos: np.ndarray  # (2,) f32
    target_vec: np.ndarray  # (2,) f32
    target_color: np.ndarray  # (3,) f32


@dataclass
class StepOutcome:
    reward: float
    done: bool
    semantic: SemanticObs


@dataclass
class EnvState:
    layout: mazegen.MazeLayout
    pose: AgentPose
    target_index: int
    step: int
    score: int
    rng: np.random.Generator
    kinematics: Kinematics = DEFAULT_KINEMATICS
    object_centers: np.ndarray = field(default=None, repr=False)  # (k, 2) f64 x,y

    @property
    def episode_length(self) -> int:
        return self.layout.config.episode_length

    @property
    def done(self) -> bool:
        return self.step >= self.episode_length

    @property
    def cell(self) -> tuple[int, int]:
        return (int(self.pose.y), int(self.pose.x))


def reset(
    config: mazegen.MazeConfig,
    seed: int,
    kinematics: Kinematics = DEFAULT_KINEMATICS,
) -> EnvState:
    """Fresh episode: new layout, agent at spawn, uniform initial target."""
    layout = mazegen.generate(config, seed)
    rng = make_rng(seed, STREAM_TARGETS)
    sr, sc = layout.spawn_cell
    theta = layout.spawn_heading
    pose = AgentPose(sc + 0.5, sr + 0.5, math.cos(theta), math.sin(theta))
    return EnvState(
        layout=layout,
        pose=pose,
        target_index=int(rng.integers(layout.n_objects)),
        step=0,
        score=0,
        rng=rng,
        kinematics=kinematics,
        object_centers=layout.object_centers(),
    )


def step(state: EnvState, action: int) -> tuple[EnvState, StepOutcome]:
    """Advance one control step; mutates and returns the state."""
    if state.done:
        raise SteppedAfterDone(f"episode already finished at step {state.step}")
    if not 0 <= action < N_ACTIONS:
        raise ValueError(f"action index must be in 0..{N_ACTIONS - 1}, got {action}")

    forward, turn = ACTIONS[action]
    kin = state.kinematics
    pose = state.pose

    if turn != 0.0:
        a = turn * kin.turn_rate
        ca, sa = math.cos(a), math.sin(a)
        hx = pose.hx * ca - pose.hy * sa
        hy = pose.hx * sa + pose.hy * ca
        norm = math.sqrt(hx * hx + hy * hy)
        pose.hx, pose.hy = hx / norm, hy / norm

    if forward != 0.0:
        v = forward * kin.forward_speed
        pose.x, pose.y = _slide(
            state.layout.walls,
            pose.x,
            pose.y,
            v * pose.hx,
            v * pose.hy,
            kin.collision_radius,
        )

    reward = 0.0
    tx, ty = state.object_centers[state.target_index]
    if math.hypot(pose.x - tx, pose.y - ty) < kin.touch_radius:
        reward = 1.0
        state.score += 1
        state.target_index = _next_target(state)

    state.step += 1
    return state, StepOutcome(reward, state.done, semantic_obs(state))


def _next_target(state: EnvState) -> int:
    # Uniform over the other k-1 objects; never repeat the one just touched.
    k = state.layout.n_objects
    if k == 1:
        return 0
    j = int(state.rng.integers(k - 1))
    return j + 1 if j >= state.target_index else j


def _slide(
    walls: np.ndarray, x: float, y: float, dx: float, dy: float, half: float
) -> tuple[float, float]:
    """Axis-separated move of a square of half-extent ``half``.

    Each axis is advanced then clamped against overlapping wall-cell boxes
    (x first, then y), which slides the agent along walls without bounce.
    Exact face contact is allowed; only strict overlap is resolved.
    """
    n = walls.shape[0]
    if dx != 0.0:
        nx = x + dx
        r0, r1 = int(y - half), int(y + half)
        c0, c1 = int(nx - half), int(nx + half)
        for rr in range(max(r0, 0), min(r1, n - 1) + 1):
            for cc in range(max(c0, 0), min(c1, n - 1) + 1):
                if walls[rr, cc] and _overlaps(nx, y, half, rr, cc):
                    nx = min(nx, cc - half) if dx > 0.0 else max(nx, cc + 1.0 + half)
        x = nx
    if dy != 0.0:
        ny = y + dy
        r0, r1 = int(ny - half), int(ny + half)
        c0, c1 = int(x - half), int(x + half)
        for rr in range(max(r0, 0), min(r1, n - 1) + 1):
            for cc in range(max(c0, 0), min(c1, n - 1) + 1):
                if walls[rr, cc] and _overlaps(x, ny, half, rr, cc):
                    ny = min(ny, rr - half) if dy > 0.0 else max(ny, rr + 1.0 + half)
        y = ny
    return x, y


def _overlaps(cx: float, cy: float, half: float, rr: int, cc: int) -> bool:
    return cx - half < cc + 1 and cx + half > cc and cy - half < rr + 1 and cy + half > rr


def semantic_obs(state: EnvState) -> SemanticObs:
    """Ground-truth observation with agent-centric object coordinates.

    targets_vec[i] is targets_pos[i] - agent_pos rotated by -heading:
    first component along the heading, second along the rightward normal.
    """
    pose = state.pose
    pos = np.array([pose.x, pose.y])
    centers = state.object_centers
    rel = centers - pos
    fwd = rel[:, 0] * pose.hx + rel[:, 1] * pose.hy
    side = -rel[:, 0] * pose.hy + rel[:, 1] * pose.hx
    vec = np.stack([fwd, side], axis=1)
    ti = state.target_index
    return SemanticObs(
        maze_layout=state.layout.walls,
        agent_pos=pos.astype(np.float32),
        agent_dir=np.array([pose.hx, pose.hy], dtype=np.float32),
        targets_pos=centers.astype(np.float32),
        targets_vec=vec.astype(np.float32),
        target_pos=centers[ti].astype(np.float32),
        target_vec=vec[ti].astype(np.float32),
        target_color=state.layout.object_colors[ti].astype(np.float32) / 255.0,
    )
