"""Plane-sweep cost volume construction and depth extraction.

The volume scores, for every feature-map pixel and every hypothesis plane,
the photometric agreement between the target features and each source's
features warped to the target viewpoint under that plane. Cells that no
source can explain (all samples out of bounds) carry an infinite sentinel
cost and are excluded from the argmin.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    EmptyBatch,
    EmptySourceList,
    FrozenState,
    InvalidRange,
    ShapeMismatch,
)
from .features import FeatureMap
from .geometry import Intrinsics, Pose, bilinear_sample, plane_warp_grid

DEFAULT_PLANE_COUNT = 96
DEFAULT_MOMENTUM = 0.99


@dataclass(frozen=True)
class DepthPlaneSet:
    """Ordered fronto-parallel hypothesis depths from d_min to d_max."""

    depths: np.ndarray
    d_min: float
    d_max: float

    def __len__(self) -> int:
        return len(self.depths)

    @property
    def quantization_floor(self) -> float:
        """Half the plane spacing: the best achievable argmin accuracy."""
        return (self.d_max - self.d_min) / (2 * (len(self.depths) - 1))


@dataclass(frozen=True)
class CostVolume:
    """Matching costs (H', W', P) and the per-cell count of contributing sources."""

    costs: np.ndarray
    valid_count: np.ndarray

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.costs.shape


@dataclass(frozen=True)
class AdaptiveRangeState:
    """Exponential-moving-average estimates of the usable depth range."""

    d_min: float
    d_max: float
    momentum: float = DEFAULT_MOMENTUM
    frozen: bool = False

    def __post_init__(self):
        if not (0 < self.d_min < self.d_max):
            raise InvalidRange(f"need 0 < d_min < d_max, got ({self.d_min}, {self.d_max})")
        if not (0 <= self.momentum < 1):
            raise InvalidRange(f"momentum must be in [0, 1), got {self.momentum}")


def linear_planes(d_min: float, d_max: float, count: int = DEFAULT_PLANE_COUNT) -> DepthPlaneSet:
    """``count`` depths linearly spaced from d_min to d_max inclusive."""
    if not (0 < d_min < d_max):
        raise InvalidRange(f"need 0 < d_min < d_max, got ({d_min}, {d_max})")
    if count < 2:
        raise InvalidRange(f"need at least 2 planes, got {count}")
    step = (d_max - d_min) / (count - 1)
    depths = d_min + step * np.arange(count, dtype=float)
    depths[-1] = d_max
    return DepthPlaneSet(depths=depths, d_min=float(d_min), d_max=float(d_max))


def inverse_depth_planes(d_min: float, d_max: float, count: int = DEFAULT_PLANE_COUNT) -> DepthPlaneSet:
    """Experimental alternative: planes uniform in 1/depth. Not the default."""
    if not (0 < d_min < d_max):
        raise InvalidRange(f"need 0 < d_min < d_max, got ({d_min}, {d_max})")
    if count < 2:
        raise InvalidRange(f"need at least 2 planes, got {count}")
    depths = 1.0 / np.linspace(1.0 / d_min, 1.0 / d_max, count)
    depths[0], depths[-1] = d_min, d_max
    return DepthPlaneSet(depths=depths, d_min=float(d_min), d_max=float(d_max))


def _thread_count(plane_count: int) -> int:
    raw = os.environ.get("SWEEPDEPTH_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = min(os.cpu_count() or 1, 4)
    return max(1, min(n, plane_count))


def build_cost_volume(
    target: FeatureMap,
    sources: list[tuple[FeatureMap, Pose]],
    K: Intrinsics,
    planes: DepthPlaneSet,
) -> CostVolume:
    """Sweep the hypothesis planes and score each against every source.

    ``K`` must already be rescaled to the feature resolution. Each source
    pose maps target-camera points into that source's camera. For plane p
    and source s the contribution at pixel (i, j) is the channel-mean
    absolute difference between the warped source features and the target
    features; contributions average over the sources whose warped sample
    was in bounds. Cells with no valid source get cost +inf.

    The plane loop may run on a thread pool (capped by SWEEPDEPTH_THREADS);
    every plane writes a disjoint slice, so the result does not depend on
    execution order.
    """
    if not sources:
        raise EmptySourceList("cost volume needs at least one source view")
    h, w, _ = target.shape
    if (K.height, K.width) != (h, w):
        raise ShapeMismatch(
            f"intrinsics {K.height}x{K.width} do not match features {h}x{w}; "
            "rescale K to the feature resolution"
        )
    for fmap, _pose in sources:
        if fmap.shape != target.shape or fmap.scale != target.scale:
            raise ShapeMismatch("all feature maps must share the target's shape and scale")

    n_planes = len(planes)
    costs = np.empty((h, w, n_planes))
    counts = np.empty((h, w, n_planes), dtype=int)

    def sweep_plane(p: int) -> None:
        total = np.zeros((h, w))
        count = np.zeros((h, w), dtype=int)
        for fmap, pose in sources:
            grid = plane_warp_grid(float(planes.depths[p]), pose, K)
            warped, valid = bilinear_sample(fmap.data, grid)
            diff = np.abs(warped - target.data).mean(axis=2)
            total += np.where(valid, diff, 0.0)
            count += valid
        with np.errstate(invalid="ignore"):
            costs[:, :, p] = np.where(count > 0, total / np.maximum(count, 1), np.inf)
        counts[:, :, p] = count

    workers = _thread_count(n_planes)
    if workers == 1:
        for p in range(n_planes):
            sweep_plane(p)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(sweep_plane, range(n_planes)))

    return CostVolume(costs=costs, valid_count=counts)


def argmin_depth(cv: CostVolume, planes: DepthPlaneSet) -> tuple[np.ndarray, np.ndarray]:
    """Depth of the cheapest plane per pixel.

    Ties resolve to the smallest plane index. Returns (depth, valid);
    pixels whose every cell is the invalid sentinel get the range midpoint
    and valid=False.
    """
    if cv.costs.shape[2] != len(planes):
        raise ShapeMismatch(
            f"volume has {cv.costs.shape[2]} planes but plane set has {len(planes)}"
        )
    idx = np.argmin(cv.costs, axis=2)
    depth = planes.depths[idx]
    valid = np.isfinite(np.min(cv.costs, axis=2))
    depth = np.where(valid, depth, (planes.d_min + planes.d_max) / 2.0)
    return depth, valid


def zero_volume(height: int, width: int, plane_count: int) -> CostVolume:
    """The all-zeros substitute volume used when no usable source exists.

    Marked valid everywhere so the argmin tie rule yields the first plane.
    """
    if height <= 0 or width <= 0 or plane_count <= 0:
        raise InvalidRange("zero volume dimensions must be positive")
    return CostVolume(
        costs=np.zeros((height, width, plane_count)),
        valid_count=np.ones((height, width, plane_count), dtype=int),
    )


def adaptive_range_update(
    state: AdaptiveRangeState, batch: list[np.ndarray]
) -> AdaptiveRangeState:
    """Blend the batch's average depth extrema into the running estimates.

    b_min is the mean over the batch of each map's minimum (b_max likewise);
    the new bound is m * old + (1 - m) * batch value.
    """
    if state.frozen:
        raise FrozenState("adaptive range state is frozen")
    if not batch:
        raise EmptyBatch("adaptive range update needs a non-empty batch")
    mins, maxes = [], []
    for depth in batch:
        depth = np.asarray(depth, dtype=float)
        if depth.size == 0 or np.any(depth <= 0):
            raise InvalidRange("batch depth maps must be non-empty and positive")
        mins.append(depth.min())
        maxes.append(depth.max())
    b_min = float(np.mean(mins))
    b_max = float(np.mean(maxes))
    m = state.momentum
    return replace(
        state,
        d_min=m * state.d_min + (1 - m) * b_min,
        d_max=m * state.d_max + (1 - m) * b_max,
    )


def upsample_nearest(depth: np.ndarray, scale: int, height: int, width: int) -> np.ndarray:
    """Expand a feature-resolution map back to image resolution.

    Each image pixel takes the value of the feature cell that covers it
    (the inverse of the box downsample used by the extractors).
    """
    if scale == 1:
        return depth[:height, :width]
    return np.repeat(np.repeat(depth, scale, axis=0), scale, axis=1)[:height, :width]
