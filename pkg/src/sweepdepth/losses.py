"""Self-supervised loss terms and the student/teacher consistency mask.

The photometric pieces follow the usual SSIM + L1 recipe (3x3 windows,
alpha = 0.85). The consistency mask flags pixels where the cost-volume
argmin depth and the teacher depth disagree by more than a directed factor
of two, and the total loss suppresses the reprojection term there in favor
of an L1 pull toward the teacher.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptySources, NonPositiveDepth, ShapeMismatch

SSIM_C1 = 0.01**2
SSIM_C2 = 0.03**2
DEFAULT_ALPHA = 0.85
DEFAULT_SMOOTHNESS_WEIGHT = 1e-3


@dataclass(frozen=True)
class LossReport:
    """All loss terms for one target frame.

    ``total = mean((1 - M) * per_pixel_lp) + lc + smoothness_weight * ls``.
    ``lp`` is the mean of the per-pixel minimum reprojection error over the
    pixels covered by at least one source; ``per_pixel_lp`` is zero at
    uncovered pixels.
    """

    lp: float
    lc: float
    ls: float
    total: float
    per_pixel_lp: np.ndarray
    mask_fraction: float

    def to_json_dict(self) -> dict:
        return {
            "lp": self.lp,
            "lc": self.lc,
            "ls": self.ls,
            "total": self.total,
            "mask_fraction": self.mask_fraction,
        }


def _as_hwc(img: np.ndarray) -> np.ndarray:
    img = np.asarray(img, dtype=float)
    return img[..., None] if img.ndim == 2 else img


def _window_mean(img: np.ndarray) -> np.ndarray:
    """3x3 box mean per channel with replicate padding."""
    padded = np.pad(img, ((1, 1), (1, 1), (0, 0)), mode="edge")
    out = np.zeros_like(img)
    for dy in range(3):
        for dx in range(3):
            out += padded[dy : dy + img.shape[0], dx : dx + img.shape[1]]
    return out / 9.0


def ssim(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Per-pixel structural similarity with 3x3 replicate-padded windows.

    Output has the input's shape (per channel for multi-channel inputs) and
    lies in [-1, 1].
    """
    a, b = _as_hwc(a), _as_hwc(b)
    if a.shape != b.shape:
        raise ShapeMismatch(f"ssim inputs differ: {a.shape} vs {b.shape}")
    mu_a = _window_mean(a)
    mu_b = _window_mean(b)
    var_a = _window_mean(a * a) - mu_a**2
    var_b = _window_mean(b * b) - mu_b**2
    cov = _window_mean(a * b) - mu_a * mu_b
    num = (2 * mu_a * mu_b + SSIM_C1) * (2 * cov + SSIM_C2)
    den = (mu_a**2 + mu_b**2 + SSIM_C1) * (var_a + var_b + SSIM_C2)
    return num / den


def photometric_error(pred: np.ndarray, target: np.ndarray, alpha: float = DEFAULT_ALPHA) -> np.ndarray:
    """Blend of SSIM dissimilarity and L1, channel-averaged to (H, W).

    pe = alpha/2 * (1 - SSIM) + (1 - alpha) * |pred - target|.
    """
    pred, target = _as_hwc(pred), _as_hwc(target)
    if pred.shape != target.shape:
        raise ShapeMismatch(f"photometric inputs differ: {pred.shape} vs {target.shape}")
    dissim = alpha / 2.0 * (1.0 - ssim(pred, target)) if alpha != 0 else 0.0
    return (dissim + (1.0 - alpha) * np.abs(pred - target)).mean(axis=2)


def min_reprojection_loss(
    target: np.ndarray,
    synthesized: list[tuple[np.ndarray, np.ndarray]],
    alpha: float = DEFAULT_ALPHA,
) -> tuple[float, np.ndarray]:
    """Per-pixel minimum photometric error over the synthesized views.

    Each synthesized entry is (image, valid_mask); a source competes only at
    pixels where its mask is true. Pixels covered by no source are excluded
    from the scalar mean and carry 0 in the returned map.
    """
    if not synthesized:
        raise EmptySources("min reprojection loss needs at least one synthesized view")
    h, w = np.asarray(target).shape[:2]
    best = np.full((h, w), np.inf)
    for img, valid in synthesized:
        pe = photometric_error(img, target, alpha=alpha)
        if pe.shape != (h, w) or valid.shape != (h, w):
            raise ShapeMismatch("synthesized view shape does not match target")
        best = np.where(valid, np.minimum(best, pe), best)
    covered = np.isfinite(best)
    per_pixel = np.where(covered, best, 0.0)
    scalar = float(per_pixel[covered].mean()) if covered.any() else 0.0
    return scalar, per_pixel


def consistency_mask(d_cv: np.ndarray, d_hat: np.ndarray) -> np.ndarray:
    """Pixels where argmin depth and teacher depth differ beyond a factor 2.

    True exactly where max((d_cv - d_hat)/d_hat, (d_hat - d_cv)/d_cv) > 1;
    the boundary (one depth exactly double the other) stays unmasked.
    """
    d_cv = np.asarray(d_cv, dtype=float)
    d_hat = np.asarray(d_hat, dtype=float)
    if d_cv.shape != d_hat.shape:
        raise ShapeMismatch(f"depth shapes differ: {d_cv.shape} vs {d_hat.shape}")
    if np.any(d_cv <= 0) or np.any(d_hat <= 0):
        raise NonPositiveDepth("consistency mask needs positive depths")
    ratio = np.maximum((d_cv - d_hat) / d_hat, (d_hat - d_cv) / d_cv)
    return ratio > 1.0


def consistency_loss(d_t: np.ndarray, d_hat: np.ndarray, mask: np.ndarray) -> float:
    """Mean over all pixels of mask * |student - teacher|."""
    d_t = np.asarray(d_t, dtype=float)
    d_hat = np.asarray(d_hat, dtype=float)
    if d_t.shape != d_hat.shape or mask.shape != d_t.shape:
        raise ShapeMismatch("consistency loss inputs must share a shape")
    return float((mask * np.abs(d_t - d_hat)).mean())


def smoothness_loss(depth: np.ndarray, img: np.ndarray) -> float:
    """Edge-aware first-order smoothness of mean-normalized inverse depth.

    The x term averages |d/dx of normalized disparity| * exp(-|d/dx image|)
    over the H x (W-1) forward-difference grid, the y term likewise over
    (H-1) x W, and the loss is their sum. Image gradients average over
    channels. Invariant to scaling the depth map by any positive constant.
    """
    depth = np.asarray(depth, dtype=float)
    if np.any(depth <= 0):
        raise NonPositiveDepth("smoothness loss needs positive depths")
    img = _as_hwc(img)
    if img.shape[:2] != depth.shape:
        raise ShapeMismatch(f"image {img.shape[:2]} does not match depth {depth.shape}")
    disp = 1.0 / depth
    disp = disp / disp.mean()
    dx = np.abs(disp[:, 1:] - disp[:, :-1])
    dy = np.abs(disp[1:, :] - disp[:-1, :])
    ix = np.abs(img[:, 1:] - img[:, :-1]).mean(axis=2)
    iy = np.abs(img[1:, :] - img[:-1, :]).mean(axis=2)
    return float((dx * np.exp(-ix)).mean() + (dy * np.exp(-iy)).mean())


def total_loss(
    target: np.ndarray,
    synthesized: list[tuple[np.ndarray, np.ndarray]],
    d_t: np.ndarray,
    d_hat: np.ndarray,
    d_cv: np.ndarray,
    img: np.ndarray,
    smoothness_weight: float = DEFAULT_SMOOTHNESS_WEIGHT,
    alpha: float = DEFAULT_ALPHA,
) -> LossReport:
    """Assemble the full training loss for one frame.

    The mask comes from (d_cv, d_hat); the reprojection term is suppressed
    where it is set, the consistency term pulls the student toward the
    teacher there, and the smoothness term regularizes the student against
    ``img``. All depth maps must be at image resolution.
    """
    mask = consistency_mask(d_cv, d_hat)
    lp, per_pixel = min_reprojection_loss(target, synthesized, alpha=alpha)
    lc = consistency_loss(d_t, d_hat, mask)
    ls = smoothness_loss(d_t, img)
    total = float(((1.0 - mask) * per_pixel).mean() + lc + smoothness_weight * ls)
    return LossReport(
        lp=lp,
        lc=lc,
        ls=ls,
        total=total,
        per_pixel_lp=per_pixel,
        mask_fraction=float(mask.mean()),
    )
