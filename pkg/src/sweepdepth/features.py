"""Matching descriptors for cost-volume construction.

Classical stand-ins for a learned encoder: each extractor turns an (H, W, C)
image into a coarser (H', W', F) descriptor grid, where H' = ceil(H/scale).
Downsampling is box averaging so results are deterministic and exactly
checkable by hand.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnknownExtractor

EXTRACTOR_KINDS = ("intensity", "rgb", "gradient")
VALID_SCALES = (1, 2, 4)


@dataclass(frozen=True)
class FeatureMap:
    """Descriptor grid of shape (H', W', F) plus its downsample factor."""

    data: np.ndarray
    scale: int

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.data.shape


def _box_downsample(img: np.ndarray, scale: int) -> np.ndarray:
    """Average over scale x scale blocks; partial edge blocks average what exists."""
    if scale == 1:
        return img
    h, w = img.shape[:2]
    hp = -(-h // scale)
    wp = -(-w // scale)
    out = np.empty((hp, wp) + img.shape[2:], dtype=float)
    for i in range(hp):
        for j in range(wp):
            block = img[i * scale : (i + 1) * scale, j * scale : (j + 1) * scale]
            out[i, j] = block.mean(axis=(0, 1))
    return out


def _to_gray(img: np.ndarray) -> np.ndarray:
    if img.ndim == 2:
        return img
    return img.mean(axis=2)


def _central_diff_x(img: np.ndarray) -> np.ndarray:
    padded = np.pad(img, ((0, 0), (1, 1)), mode="edge")
    return (padded[:, 2:] - padded[:, :-2]) / 2.0


def _central_diff_y(img: np.ndarray) -> np.ndarray:
    padded = np.pad(img, ((1, 1), (0, 0)), mode="edge")
    return (padded[2:, :] - padded[:-2, :]) / 2.0


def extract_features(img: np.ndarray, kind: str = "gradient", scale: int = 4) -> FeatureMap:
    """Encode an image into a feature map.

    Kinds:
      intensity -- 1 channel, box-downsampled grayscale
      rgb       -- input channels, box-downsampled
      gradient  -- 3 channels: grayscale plus d/dx and d/dy central differences
                   (replicate edges), computed at the downsampled resolution

    ``scale`` must be 1, 2, or 4.
    """
    img = np.asarray(img, dtype=float)
    if scale not in VALID_SCALES:
        raise UnknownExtractor(f"scale must be one of {VALID_SCALES}, got {scale}")
    if kind == "intensity":
        data = _box_downsample(_to_gray(img), scale)[..., None]
    elif kind == "rgb":
        data = _box_downsample(img if img.ndim == 3 else img[..., None], scale)
    elif kind == "gradient":
        gray = _box_downsample(_to_gray(img), scale)
        data = np.stack([gray, _central_diff_x(gray), _central_diff_y(gray)], axis=-1)
    else:
        raise UnknownExtractor(f"unknown extractor kind {kind!r}")
    return FeatureMap(data=data, scale=scale)
