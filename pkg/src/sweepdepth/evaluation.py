"""Standard depth-evaluation protocol.

Metrics follow the usual monocular-depth convention: evaluate only where
ground truth lies in (0, cap), clamp predictions to [1e-3, cap], and report
abs rel, sq rel, RMSE, log RMSE, and the three delta accuracy thresholds
(strict <). Median scaling removes the global scale ambiguity of monocular
predictions before scoring.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyValidSet, ShapeMismatch, TooSmall

DEPTH_CAP = 80.0
PRED_FLOOR = 1e-3
CROP_SCHEMES = ("none", "cityscapes_A", "cityscapes_B")


@dataclass(frozen=True)
class MetricsReport:
    abs_rel: float
    sq_rel: float
    rmse: float
    rmse_log: float
    delta1: float
    delta2: float
    delta3: float

    def to_json_dict(self) -> dict:
        return {
            "abs_rel": self.abs_rel,
            "sq_rel": self.sq_rel,
            "rmse": self.rmse,
            "rmse_log": self.rmse_log,
            "delta1": self.delta1,
            "delta2": self.delta2,
            "delta3": self.delta3,
        }


def median_scale(pred: np.ndarray, gt: np.ndarray, valid: np.ndarray) -> np.ndarray:
    """Rescale pred by median(gt[valid]) / median(pred[valid])."""
    pred = np.asarray(pred, dtype=float)
    gt = np.asarray(gt, dtype=float)
    if pred.shape != gt.shape or valid.shape != gt.shape:
        raise ShapeMismatch("median scaling inputs must share a shape")
    if not valid.any():
        raise EmptyValidSet("median scaling needs at least one valid pixel")
    return pred * (np.median(gt[valid]) / np.median(pred[valid]))


def depth_metrics(pred: np.ndarray, gt: np.ndarray, cap: float = DEPTH_CAP) -> MetricsReport:
    """Score a prediction against ground truth over the (0, cap) valid set."""
    pred = np.asarray(pred, dtype=float)
    gt = np.asarray(gt, dtype=float)
    if pred.shape != gt.shape:
        raise ShapeMismatch(f"pred {pred.shape} does not match gt {gt.shape}")
    valid = (gt > 0) & (gt < cap)
    if not valid.any():
        raise EmptyValidSet(f"no ground truth in (0, {cap})")
    g = gt[valid]
    p = np.clip(pred[valid], PRED_FLOOR, cap)

    ratio = np.maximum(p / g, g / p)
    sq_err = (p - g) ** 2
    return MetricsReport(
        abs_rel=float(np.mean(np.abs(p - g) / g)),
        sq_rel=float(np.mean(sq_err / g)),
        rmse=float(np.sqrt(np.mean(sq_err))),
        rmse_log=float(np.sqrt(np.mean((np.log(p) - np.log(g)) ** 2))),
        delta1=float(np.mean(ratio < 1.25)),
        delta2=float(np.mean(ratio < 1.25**2)),
        delta3=float(np.mean(ratio < 1.25**3)),
    )


def abs_rel_error_map(pred: np.ndarray, gt: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-pixel |pred - gt| / gt, with a mask of pixels where gt is positive.

    The map is 0 where gt is not positive; such pixels are flagged false.
    """
    pred = np.asarray(pred, dtype=float)
    gt = np.asarray(gt, dtype=float)
    if pred.shape != gt.shape:
        raise ShapeMismatch(f"pred {pred.shape} does not match gt {gt.shape}")
    valid = gt > 0
    err = np.zeros_like(gt)
    err[valid] = np.abs(pred[valid] - gt[valid]) / gt[valid]
    return err, valid


def crop(data: np.ndarray, scheme: str = "none") -> np.ndarray:
    """Apply an evaluation crop.

    cityscapes_A keeps the middle 50% of rows and trims 3/32 of the columns
    from each side (192 px per side at 2048 wide); cityscapes_B keeps the
    top 75% of rows. Both generalize proportionally to other resolutions.
    """
    if scheme == "none":
        return data
    h, w = data.shape[:2]
    if scheme == "cityscapes_A":
        top = h // 4
        bottom = top + h // 2
        side = 3 * w // 32
        if bottom <= top or w - 2 * side < 1:
            raise TooSmall(f"{h}x{w} input too small for cityscapes_A")
        return data[top:bottom, side : w - side]
    if scheme == "cityscapes_B":
        bottom = 3 * h // 4
        if bottom < 1:
            raise TooSmall(f"{h}x{w} input too small for cityscapes_B")
        return data[:bottom]
    raise ValueError(f"unknown crop scheme {scheme!r}; expected one of {CROP_SCHEMES}")


def error_heatmap(err: np.ndarray, saturate: float = 0.2) -> np.ndarray:
    """Color an abs-rel error map: blue at 0 through white to red at >= saturate.

    Returns an (H, W, 3) image in [0, 1].
    """
    t = np.clip(np.asarray(err, dtype=float) / saturate, 0.0, 1.0)
    blue = np.array([0.0, 0.0, 1.0])
    white = np.array([1.0, 1.0, 1.0])
    red = np.array([1.0, 0.0, 0.0])
    low = blue + (white - blue) * (2 * t)[..., None]
    high = white + (red - white) * (2 * t - 1)[..., None]
    return np.where(t[..., None] < 0.5, low, high)
