import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mazehunt import mazegen, simcore
from mazehunt.mazegen import PRESETS, MazeConfig
from mazehunt.simcore import (
    ACTIONS,
    DEFAULT_KINEMATICS,
    SteppedAfterDone,
    reset,
    semantic_obs,
    step,
)


def test_action_table():
    assert ACTIONS == (
        (0.0, 0.0),
        (1.0, 0.0),
        (0.0, -1.0),
        (0.0, 1.0),
        (1.0, -1.0),
        (1.0, 1.0),
    )


def test_default_kinematics():
    k = DEFAULT_KINEMATICS
    assert k.forward_speed == 0.25
    assert k.turn_rate_deg == 22.5
    assert k.collision_radius == 0.2
    assert k.touch_radius == 0.6
    assert k.turn_rate == pytest.approx(math.pi / 8)


def test_reset_places_agent_at_spawn():
    state = reset(PRESETS[9], 7)
    sr, sc = state.layout.spawn_cell
    assert state.pose.position == (sc + 0.5, sr + 0.5)
    th = state.layout.spawn_heading
    assert state.pose.heading == (math.cos(th), math.sin(th))
    assert state.step == 0 and state.score == 0
    assert 0 <= state.target_index < state.layout.n_objects
    assert not state.done


def test_initial_target_deterministic_per_seed():
    assert reset(PRESETS[9], 3).target_index == reset(PRESETS[9], 3).target_index
    picks = {reset(PRESETS[9], s).target_index for s in range(30)}
    assert len(picks) > 1  # not a constant choice


def _open_box_state(episode_length=1000):
    """A 9x9 with an all-floor interior: motion checks without layout noise."""
    state = reset(PRESETS[9], 0)
    walls = np.zeros((9, 9), dtype=bool)
    walls[0] = walls[-1] = True
    walls[:, 0] = walls[:, -1] = True
    layout = mazegen.MazeLayout(
        walls=walls,
        rooms=[(1, 1, 7, 7)],
        object_cells=[(1, 1), (1, 7), (7, 1)],
        object_colors=mazegen.PALETTE[:3].copy(),
        spawn_cell=(4, 4),
        spawn_heading=0.0,
        config=MazeConfig(9, 3, (1, 1), (7, 7), episode_length),
    )
    state.layout = layout
    state.object_centers = layout.object_centers()
    state.pose = simcore.AgentPose(4.5, 4.5, 1.0, 0.0)
    state.target_index = 0
    state.step = 0
    state.score = 0
    return state


def test_forward_moves_quarter_cell():
    state = _open_box_state()
    step(state, 1)
    assert state.pose.position == pytest.approx((4.75, 4.5))
    assert state.pose.heading == pytest.approx((1.0, 0.0))


def test_turn_right_is_positive_angle():
    # Heading angle theta maps to (cos, sin); +y is downward (row) axis, so
    # turning "right" on screen adds the turn rate to theta.
    state = _open_box_state()
    step(state, 3)
    assert state.pose.heading_angle == pytest.approx(math.radians(22.5))
    step(state, 2)
    step(state, 2)
    assert state.pose.heading_angle == pytest.approx(math.radians(-22.5))


def test_forward_turn_combines():
    state = _open_box_state()
    step(state, 5)
    th = math.radians(22.5)
    assert state.pose.heading_angle == pytest.approx(th)
    # rotation happens before translation
    assert state.pose.x == pytest.approx(4.5 + 0.25 * math.cos(th))
    assert state.pose.y == pytest.approx(4.5 + 0.25 * math.sin(th))


def test_noop_only_advances_clock():
    state = _open_box_state()
    state, out = step(state, 0)
    assert state.pose.position == (4.5, 4.5)
    assert state.step == 1 and out.reward == 0.0


def test_sixteen_turns_return_to_start():
    state = _open_box_state()
    for _ in range(16):
        step(state, 3)
    assert state.pose.heading == pytest.approx((1.0, 0.0))


def test_wall_stops_forward_motion():
    state = _open_box_state()
    for _ in range(40):
        step(state, 1)
    # wall face at x=8; collision radius 0.2 puts the agent at 7.8
    assert state.pose.x == pytest.approx(8.0 - 0.2)
    assert state.pose.y == pytest.approx(4.5)


def test_wall_slide_preserves_tangent_motion():
    state = _open_box_state()
    state.pose = simcore.AgentPose(7.8, 4.5, math.cos(0.3), math.sin(0.3))
    state, _ = step(state, 1)
    # x is clamped at the wall, y still advances by the full v*sin component
    assert state.pose.x == pytest.approx(7.8)
    assert state.pose.y == pytest.approx(4.5 + 0.25 * math.sin(0.3))


def test_touch_requires_prompted_object():
    state = _open_box_state()
    state.target_index = 0  # object at cell (1,1), center (1.5, 1.5)
    # park on top of a non-target object: no reward
    state.pose = simcore.AgentPose(7.5, 1.5, 1.0, 0.0)  # object 1 at (1,7)->(7.5,1.5)
    state, out = step(state, 0)
    assert out.reward == 0.0 and state.score == 0 and state.target_index == 0


def test_touch_rewards_and_resamples():
    state = _open_box_state()
    state.target_index = 0
    state.pose = simcore.AgentPose(1.5 + 0.59, 1.5, -1.0, 0.0)
    old = state.target_index
    state, out = step(state, 0)  # dist 0.59 < 0.6 already: touch on the spot
    assert out.reward == 1.0 and state.score == 1
    assert state.target_index != old
    assert 0 <= state.target_index < 3


def test_touch_boundary_is_strict():
    state = _open_box_state()
    state.target_index = 0
    state.pose = simcore.AgentPose(1.5 + 0.6, 1.5, 0.0, 1.0)
    state, out = step(state, 0)  # dist exactly 0.6: no touch
    assert out.reward == 0.0


def test_resample_never_repeats_and_is_uniform():
    state = _open_box_state()
    counts = {i: 0 for i in range(3)}
    for _ in range(600):
        state.target_index = 0
        new = simcore._next_target(state)
        assert new != 0
        counts[new] += 1
    assert counts[0] == 0
    # both alternatives drawn roughly equally (binomial, 600 draws)
    assert abs(counts[1] - counts[2]) < 150


def test_episode_end_and_stepped_after_done():
    cfg = MazeConfig(9, 3, (3, 4), (3, 5), 4)
    state = reset(cfg, 1)
    flags = []
    for _ in range(4):
        state, out = step(state, 0)
        flags.append(out.done)
    assert flags == [False, False, False, True]
    assert state.done
    with pytest.raises(SteppedAfterDone):
        step(state, 0)


def test_invalid_action_rejected():
    state = reset(PRESETS[9], 1)
    for bad in (-1, 6, 100):
        with pytest.raises(ValueError):
            step(state, bad)


def test_replay_bit_identical():
    actions = np.random.default_rng(11).integers(0, 6, 600)

    def run():
        state = reset(PRESETS[11], 17)
        trace = []
        for a in actions:
            state, out = step(state, int(a))
            trace.append(
                (
                    state.pose.x,
                    state.pose.y,
                    state.pose.hx,
                    state.pose.hy,
                    out.reward,
                    state.target_index,
                )
            )
        return trace

    assert run() == run()


def test_semantic_obs_schema_and_dtypes():
    state = reset(PRESETS[13], 5)
    obs = semantic_obs(state)
    n, k = 13, 5
    assert obs.maze_layout.shape == (n, n) and obs.maze_layout.dtype == np.bool_
    assert obs.agent_pos.shape == (2,) and obs.agent_pos.dtype == np.float32
    assert obs.agent_dir.shape == (2,) and obs.agent_dir.dtype == np.float32
    assert obs.targets_pos.shape == (k, 2) and obs.targets_pos.dtype == np.float32
    assert obs.targets_vec.shape == (k, 2) and obs.targets_vec.dtype == np.float32
    assert obs.target_pos.shape == (2,) and obs.target_pos.dtype == np.float32
    assert obs.target_vec.shape == (2,) and obs.target_vec.dtype == np.float32
    assert obs.target_color.shape == (3,) and obs.target_color.dtype == np.float32
    assert np.array_equal(obs.target_pos, obs.targets_pos[state.target_index])
    assert ((obs.target_color == 0.0) | (obs.target_color == 1.0)).all()


def test_semantic_obs_agent_frame():
    state = _open_box_state()
    state.pose = simcore.AgentPose(4.5, 4.5, 0.0, 1.0)  # facing +y
    obs = semantic_obs(state)
    rel = state.object_centers - np.array([4.5, 4.5])
    # forward component is +y, rightward component is -x when facing +y
    assert np.allclose(obs.targets_vec[:, 0], rel[:, 1], atol=1e-6)
    assert np.allclose(obs.targets_vec[:, 1], -rel[:, 0], atol=1e-6)
    # distances are rotation-invariant
    assert np.allclose(
        np.linalg.norm(obs.targets_vec, axis=1),
        np.linalg.norm(rel, axis=1),
        atol=1e-5,
    )


def _square_clear(walls, x, y, half):
    n = walls.shape[0]
    for rr in range(max(int(y - half), 0), min(int(y + half), n - 1) + 1):
        for cc in range(max(int(x - half), 0), min(int(x + half), n - 1) + 1):
            if walls[rr, cc] and simcore._overlaps(x, y, half, rr, cc):
                return False
    return True


@settings(max_examples=25, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=2**32 - 1),
    actions=st.lists(st.integers(min_value=0, max_value=5), min_size=1, max_size=120),
)
def test_collision_invariant_random_walks(seed, actions):
    state = reset(PRESETS[9], seed)
    for a in actions:
        state, _ = step(state, a)
        assert _square_clear(
            state.layout.walls,
            state.pose.x,
            state.pose.y,
            state.kinematics.collision_radius,
        )
        assert math.hypot(state.pose.hx, state.pose.hy) == pytest.approx(1.0)


@settings(max_examples=25, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=2**32 - 1),
    actions=st.lists(st.integers(min_value=0, max_value=5), min_size=1, max_size=80),
)
def test_score_equals_cumulative_reward(seed, actions):
    state = reset(PRESETS[9], seed)
    total = 0.0
    for a in actions:
        state, out = step(state, a)
        total += out.reward
    assert state.score == total
