"""Feature extractors: downsampling, gradients, equivariance."""

import numpy as np
import pytest

from sweepdepth.errors import UnknownExtractor
from sweepdepth.features import extract_features


def test_constant_image_has_zero_gradients():
    img = np.full((8, 8, 3), 0.5)
    fmap = extract_features(img, "gradient", 1)
    assert np.allclose(fmap.data[:, :, 0], 0.5)
    assert np.allclose(fmap.data[:, :, 1:], 0.0)


def test_rgb_scale_one_is_identity(rng):
    img = rng.random((6, 7, 3))
    fmap = extract_features(img, "rgb", 1)
    assert np.array_equal(fmap.data, img)


def test_checkerboard_box_average():
    img = np.indices((4, 4)).sum(axis=0) % 2.0
    fmap = extract_features(img, "intensity", 2)
    assert fmap.data.shape == (2, 2, 1)
    assert np.allclose(fmap.data, 0.5)


def test_ceil_shapes_for_non_divisible_sizes(rng):
    fmap = extract_features(rng.random((5, 7)), "intensity", 2)
    assert fmap.data.shape == (3, 4, 1)
    # the 1x1 corner block is just the corner pixel


def test_shift_equivariance_at_scale_one(rng):
    img = rng.random((10, 12))
    a = extract_features(img, "gradient", 1).data
    b = extract_features(np.roll(img, 2, axis=1), "gradient", 1).data
    # compare away from the wrapped/replicated borders
    assert np.allclose(a[:, 3:-3], np.roll(b, -2, axis=1)[:, 3:-3])


def test_gradient_locality_3x3(rng):
    img = rng.random((9, 9))
    poked = img.copy()
    poked[4, 4] += 1.0
    a = extract_features(img, "gradient", 1).data
    b = extract_features(poked, "gradient", 1).data
    changed = np.argwhere(np.any(a != b, axis=2))
    assert (np.abs(changed - [4, 4]).max(axis=1) <= 1).all()


def test_finite_output(rng):
    for kind in ("intensity", "rgb", "gradient"):
        for scale in (1, 2, 4):
            fmap = extract_features(rng.random((13, 17, 3)), kind, scale)
            assert np.isfinite(fmap.data).all()


def test_unknown_kind_and_scale_rejected():
    img = np.zeros((4, 4, 3))
    with pytest.raises(UnknownExtractor):
        extract_features(img, "sift", 1)
    with pytest.raises(UnknownExtractor):
        extract_features(img, "rgb", 3)
