"""Deterministic synthetic scenes: analytic ground truth for the pipeline.

Scenes are built from infinite textured planes (fronto-parallel or slanted,
nearest intersection wins) plus an optional moving textured box. Rendering
is point-sampled with exact per-pixel intersection depths, so warps,
cost-volume recovery, and mask behavior can be checked against closed-form
geometry instead of trained models.

World frame conventions match the camera at identity pose: +z into the
scene, +y down. Textures are functions of the world (x, y) of the hit
point, anchored to the moving box for mover pixels so the box carries its
texture with it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateRay
from .geometry import Intrinsics, Pose, _pixel_rays


@dataclass(frozen=True)
class Texture:
    """Procedural surface intensity in [0, 1].

    grating: 0.5 + amp_x sin(2 pi (x / period_x + phase_x)) + same in y
    checker: 0.25 / 0.75 cells of size ``cell``
    noise:   smoothstep-interpolated value noise on a ``cell`` lattice,
             keyed by the scene seed
    """

    kind: str = "grating"
    period_x: float = 1.0
    period_y: float = 1.0
    amp_x: float = 0.25
    amp_y: float = 0.25
    phase_x: float = 0.0
    phase_y: float = 0.0
    cell: float = 1.0


@dataclass(frozen=True)
class PlaneElement:
    """Infinite plane normal . X = offset with a texture and an RGB albedo."""

    normal: tuple[float, float, float]
    offset: float
    texture: Texture
    albedo: tuple[float, float, float] = (1.0, 1.0, 1.0)


@dataclass(frozen=True)
class Mover:
    """Fronto-parallel textured box translating rigidly between frames.

    ``center`` is the box center at time 0; at time t it sits at
    center + t * velocity. ``half_size`` is the (x, y) half extent.
    """

    center: tuple[float, float, float]
    half_size: tuple[float, float]
    velocity: tuple[float, float, float]
    texture: Texture
    albedo: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def position(self, t: float) -> np.ndarray:
        return np.asarray(self.center, dtype=float) + t * np.asarray(
            self.velocity, dtype=float
        )


@dataclass(frozen=True)
class Scene:
    planes: tuple[PlaneElement, ...]
    mover: Mover | None = None
    seed: int = 0


@dataclass(frozen=True)
class Frame:
    image: np.ndarray
    depth_gt: np.ndarray
    pose: Pose  # camera to world
    time: int


def _value_noise(x: np.ndarray, y: np.ndarray, cell: float, seed: int) -> np.ndarray:
    """Classic lattice value noise with smoothstep blending."""

    def lattice(ix, iy):
        h = np.sin(ix * 12.9898 + iy * 78.233 + seed * 0.5417) * 43758.5453
        return h - np.floor(h)

    gx, gy = x / cell, y / cell
    ix, iy = np.floor(gx), np.floor(gy)
    fx, fy = gx - ix, gy - iy
    wx = fx * fx * (3 - 2 * fx)
    wy = fy * fy * (3 - 2 * fy)
    v00 = lattice(ix, iy)
    v10 = lattice(ix + 1, iy)
    v01 = lattice(ix, iy + 1)
    v11 = lattice(ix + 1, iy + 1)
    return (v00 * (1 - wx) + v10 * wx) * (1 - wy) + (v01 * (1 - wx) + v11 * wx) * wy


def texture_value(tex: Texture, x: np.ndarray, y: np.ndarray, seed: int = 0) -> np.ndarray:
    """Evaluate a texture at surface coordinates (x, y)."""
    if tex.kind == "grating":
        return (
            0.5
            + tex.amp_x * np.sin(2 * np.pi * (x / tex.period_x + tex.phase_x))
            + tex.amp_y * np.sin(2 * np.pi * (y / tex.period_y + tex.phase_y))
        )
    if tex.kind == "checker":
        parity = (np.floor(x / tex.cell) + np.floor(y / tex.cell)) % 2
        return 0.25 + 0.5 * parity
    if tex.kind == "noise":
        return 0.1 + 0.8 * _value_noise(x, y, tex.cell, seed)
    raise ValueError(f"unknown texture kind {tex.kind!r}")


def _plane_hits(
    plane: PlaneElement, origin: np.ndarray, dirs: np.ndarray
) -> np.ndarray:
    """Ray parameter (= camera depth) of the intersection; inf where missed."""
    n = np.asarray(plane.normal, dtype=float)
    denom = dirs @ n
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (plane.offset - origin @ n) / denom
    s = np.where(np.isfinite(s) & (s > 0), s, np.inf)
    return s


def render(scene: Scene, pose: Pose, K: Intrinsics, t: int = 0) -> Frame:
    """Render one frame: nearest-intersection image and exact depth map."""
    dirs_cam = _pixel_rays(K)  # z component is 1, so ray parameter == depth
    dirs_w = dirs_cam @ pose.rotation.T
    origin = pose.translation

    depth = np.full((K.height, K.width), np.inf)
    winner = np.full((K.height, K.width), -1, dtype=int)
    for i, plane in enumerate(scene.planes):
        s = _plane_hits(plane, origin, dirs_w)
        closer = s < depth
        depth = np.where(closer, s, depth)
        winner = np.where(closer, i, winner)

    if scene.mover is not None:
        s, inside = _mover_hits(scene.mover, origin, dirs_w, t)
        closer = inside & (s < depth)
        depth = np.where(closer, s, depth)
        winner = np.where(closer, len(scene.planes), winner)

    if np.any(np.isinf(depth)):
        raise DegenerateRay("some rays hit no scene element at positive depth")

    points = origin + dirs_w * depth[..., None]
    image = np.zeros((K.height, K.width, 3))
    for i, plane in enumerate(scene.planes):
        sel = winner == i
        if not sel.any():
            continue
        val = texture_value(plane.texture, points[sel, 0], points[sel, 1], scene.seed)
        image[sel] = val[:, None] * np.asarray(plane.albedo)
    if scene.mover is not None:
        sel = winner == len(scene.planes)
        if sel.any():
            pos = scene.mover.position(t)
            val = texture_value(
                scene.mover.texture,
                points[sel, 0] - pos[0],
                points[sel, 1] - pos[1],
                scene.seed + 1,
            )
            image[sel] = val[:, None] * np.asarray(scene.mover.albedo)

    return Frame(image=image, depth_gt=depth, pose=pose, time=t)


def _mover_hits(
    mover: Mover, origin: np.ndarray, dirs: np.ndarray, t: float
) -> tuple[np.ndarray, np.ndarray]:
    pos = mover.position(t)
    dz = dirs[..., 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (pos[2] - origin[2]) / dz
    s = np.where(np.isfinite(s) & (s > 0), s, np.inf)
    px = origin[0] + dirs[..., 0] * s
    py = origin[1] + dirs[..., 1] * s
    hx, hy = mover.half_size
    inside = (
        np.isfinite(s)
        & (np.abs(px - pos[0]) <= hx)
        & (np.abs(py - pos[1]) <= hy)
    )
    return s, inside


def make_sequence(scene: Scene, camera_motion: list[Pose], K: Intrinsics) -> list[Frame]:
    """Render one frame per pose, advancing the mover by its per-frame velocity."""
    if len(camera_motion) < 2:
        raise ValueError("a sequence needs at least 2 poses")
    return [render(scene, pose, K, t) for t, pose in enumerate(camera_motion)]


def relative_pose(target: Pose, source: Pose) -> Pose:
    """Transform mapping target-camera coordinates into the source camera.

    Both arguments are camera-to-world poses.
    """
    return source.inverse().compose(target)


def mover_mask(scene: Scene, pose: Pose, K: Intrinsics, t: int) -> np.ndarray:
    """Boolean image mask of pixels where the mover is the nearest hit."""
    if scene.mover is None:
        return np.zeros((K.height, K.width), dtype=bool)
    dirs_w = _pixel_rays(K) @ pose.rotation.T
    origin = pose.translation
    static_depth = np.full((K.height, K.width), np.inf)
    for plane in scene.planes:
        static_depth = np.minimum(static_depth, _plane_hits(plane, origin, dirs_w))
    s, inside = _mover_hits(scene.mover, origin, dirs_w, t)
    return inside & (s < static_depth)


def mover_rect(scene: Scene, pose: Pose, K: Intrinsics, t: int) -> tuple[float, float, float, float] | None:
    """Projected (u0, v0, u1, v1) of the box; exact for identity-rotation poses."""
    if scene.mover is None:
        return None
    pos = scene.mover.position(t)
    hx, hy = scene.mover.half_size
    corners = np.array(
        [
            [pos[0] - hx, pos[1] - hy, pos[2]],
            [pos[0] + hx, pos[1] + hy, pos[2]],
        ]
    )
    cam = (corners - pose.translation) @ pose.rotation
    u = K.fx * cam[:, 0] / cam[:, 2] + K.cx
    v = K.fy * cam[:, 1] / cam[:, 2] + K.cy
    return (float(u.min()), float(v.min()), float(u.max()), float(v.max()))


def texture_contrast_mask(gray: np.ndarray, threshold: float = 0.01) -> np.ndarray:
    """Pixels with local intensity gradient above ``threshold`` per pixel."""
    padded = np.pad(gray, 1, mode="edge")
    gx = (padded[1:-1, 2:] - padded[1:-1, :-2]) / 2.0
    gy = (padded[2:, 1:-1] - padded[:-2, 1:-1]) / 2.0
    return np.hypot(gx, gy) > threshold


@dataclass(frozen=True)
class SceneSetup:
    """A bundled scene: geometry, camera trajectory, and intrinsics."""

    scene: Scene
    poses: list[Pose]
    K: Intrinsics
    target_index: int = 1


def _desk_intrinsics(width: int = 64, height: int = 48) -> Intrinsics:
    return Intrinsics(
        fx=float(width),
        fy=float(width),
        cx=(width - 1) / 2.0,
        cy=(height - 1) / 2.0,
        width=width,
        height=height,
    )


def _default_planes(background_texture: Texture | None = None) -> tuple[PlaneElement, ...]:
    """A slanted floor filling the lower half and a far wall behind it."""
    if background_texture is None:
        background_texture = Texture(
            kind="grating", period_x=1.4, period_y=1.9, amp_x=0.24, amp_y=0.18,
            phase_x=0.13, phase_y=0.41,
        )
    wall = PlaneElement(
        normal=(0.0, 0.0, 1.0),
        offset=5.4,
        texture=background_texture,
        albedo=(0.95, 0.8, 0.65),
    )
    floor = PlaneElement(
        normal=(0.0, 1.0, 0.38),
        offset=2.1,
        texture=Texture(
            kind="grating", period_x=1.0, period_y=1.3, amp_x=0.22, amp_y=0.2,
            phase_x=0.71, phase_y=0.07,
        ),
        albedo=(0.65, 0.85, 0.95),
    )
    return (wall, floor)


def _lateral_poses(baseline: float = 0.1, n: int = 3) -> list[Pose]:
    return [Pose.from_translation(baseline * t, 0.0, 0.0) for t in range(n)]


def _forward_poses(step: float = 0.1, n: int = 3) -> list[Pose]:
    return [Pose.from_translation(0.0, 0.0, step * t) for t in range(n)]


def _default_mover() -> Mover:
    return Mover(
        center=(0.1, 0.05, 2.5),
        half_size=(0.45, 0.35),
        velocity=(0.06, 0.0, 0.0),
        texture=Texture(
            kind="grating", period_x=0.35, period_y=0.3, amp_x=0.25, amp_y=0.22,
            phase_x=0.52, phase_y=0.9,
        ),
        albedo=(0.9, 0.35, 0.3),
    )


def preset_scene(name: str, seed: int = 0) -> SceneSetup:
    """Bundled verification scenes.

    static_lateral   -- rigid scene, camera translating along +x
    static_forward   -- rigid scene, camera translating along +z
    moving_box       -- static_lateral plus a laterally drifting box
    static_camera    -- rigid scene, three identical poses (zero baseline)
    textureless_band -- static_lateral with a contrast-free far wall
    """
    K = _desk_intrinsics()
    if name == "static_lateral":
        return SceneSetup(Scene(_default_planes(), seed=seed), _lateral_poses(), K)
    if name == "static_forward":
        return SceneSetup(Scene(_default_planes(), seed=seed), _forward_poses(), K)
    if name == "moving_box":
        return SceneSetup(
            Scene(_default_planes(), mover=_default_mover(), seed=seed),
            _lateral_poses(),
            K,
        )
    if name == "static_camera":
        return SceneSetup(
            Scene(_default_planes(), seed=seed), [Pose.identity()] * 3, K
        )
    if name == "textureless_band":
        flat = Texture(kind="grating", amp_x=0.0, amp_y=0.0)
        return SceneSetup(
            Scene(_default_planes(background_texture=flat), seed=seed),
            _lateral_poses(),
            K,
        )
    raise ValueError(f"unknown scene preset {name!r}; see preset_scene.__doc__")


PRESET_NAMES = (
    "static_lateral",
    "static_forward",
    "moving_box",
    "static_camera",
    "textureless_band",
)


def _pose_from_json(obj) -> Pose:
    if isinstance(obj, dict):
        return Pose(
            np.asarray(obj["R"], dtype=float).reshape(3, 3),
            np.asarray(obj["t"], dtype=float),
        )
    return Pose.from_translation(*obj)


def load_scene_setup(path) -> SceneSetup:
    """Parse a scene description JSON file.

    Expected keys: "planes" (list of {normal, offset, texture, albedo}),
    optional "mover" ({center, half_size, velocity, texture, albedo}),
    "camera_motion" (list of [tx, ty, tz] or {R, t}), optional "intrinsics",
    "seed", and "target_index".
    """
    import json
    from pathlib import Path as _Path

    obj = json.loads(_Path(path).read_text())
    planes = tuple(
        PlaneElement(
            normal=tuple(p["normal"]),
            offset=float(p["offset"]),
            texture=Texture(**p.get("texture", {})),
            albedo=tuple(p.get("albedo", (1.0, 1.0, 1.0))),
        )
        for p in obj["planes"]
    )
    mover = None
    if obj.get("mover"):
        m = obj["mover"]
        mover = Mover(
            center=tuple(m["center"]),
            half_size=tuple(m["half_size"]),
            velocity=tuple(m["velocity"]),
            texture=Texture(**m.get("texture", {})),
            albedo=tuple(m.get("albedo", (1.0, 1.0, 1.0))),
        )
    if "intrinsics" in obj:
        k = obj["intrinsics"]
        K = Intrinsics(
            fx=float(k["fx"]), fy=float(k["fy"]), cx=float(k["cx"]),
            cy=float(k["cy"]), width=int(k["width"]), height=int(k["height"]),
        )
    else:
        K = _desk_intrinsics(int(obj.get("width", 64)), int(obj.get("height", 48)))
    poses = [_pose_from_json(p) for p in obj["camera_motion"]]
    return SceneSetup(
        scene=Scene(planes=planes, mover=mover, seed=int(obj.get("seed", 0))),
        poses=poses,
        K=K,
        target_index=int(obj.get("target_index", 1)),
    )
