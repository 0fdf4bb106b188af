import numpy as np
import pytest

from conftest import rand_image
from corescale import CoreScaleError, GrayImage, crop, method, ncc_map, pair_images
from corescale.image import Rect
from corescale.resample import coarsen
from oracles import oracle_ncc


def test_self_match_scores_one(rng):
    img = rand_image(rng, 9, 9, lo=0.1, hi=1.0)
    surface = ncc_map(img, img)
    assert surface.shape == (1, 1)
    assert surface[0, 0] == pytest.approx(1.0, abs=1e-12)


def test_zero_template_rejected():
    z = GrayImage(np.zeros((4, 4)))
    s = GrayImage(np.ones((8, 8)))
    with pytest.raises(CoreScaleError) as err:
        ncc_map(z, s)
    assert err.value.code == "zero-template-energy"
    with pytest.raises(CoreScaleError):
        ncc_map(GrayImage(np.full((4, 4), 0.7)), s, zero_mean=True)  # zero variance


def test_template_larger_than_search():
    with pytest.raises(CoreScaleError):
        ncc_map(GrayImage(np.ones((5, 5))), GrayImage(np.ones((4, 8))))


def test_planted_crop_peak_and_oracle(rng):
    big = rand_image(rng, 32, 32, lo=0.05, hi=1.0)
    tpl = crop(big, Rect(3, 5, 10, 8))
    surface = ncc_map(tpl, big)
    want = oracle_ncc(tpl.pixels, big.pixels)
    assert np.max(np.abs(surface - want)) <= 1e-12
    peak = np.unravel_index(np.argmax(surface), surface.shape)
    assert peak == (5, 3)
    assert surface[peak] == pytest.approx(1.0, abs=1e-12)


def test_zero_mean_matches_oracle_and_bounds(rng):
    tpl = rand_image(rng, 6, 7)
    search = rand_image(rng, 20, 18)
    surface = ncc_map(tpl, search, zero_mean=True)
    want = oracle_ncc(tpl.pixels, search.pixels, zero_mean=True)
    assert np.max(np.abs(surface - want)) <= 1e-12
    assert surface.min() >= -1.0 - 1e-12 and surface.max() <= 1.0 + 1e-12


def test_flagged_windows_are_zero_not_nan():
    tpl = GrayImage(np.ones((2, 2)))
    search = GrayImage(np.pad(np.ones((2, 2)), ((0, 2), (0, 2))))  # zero windows exist
    surface = ncc_map(tpl, search)
    assert np.all(np.isfinite(surface))
    assert surface[2, 2] == 0.0  # all-zero window, flagged
    assert surface[0, 0] == pytest.approx(1.0, abs=1e-12)


def test_scale_covariance(rng):
    tpl = rand_image(rng, 5, 5, lo=0.1)
    search = rand_image(rng, 14, 14, lo=0.1)
    base = ncc_map(tpl, search)
    for c in (0.125, 3.7):
        scaled_t = ncc_map(GrayImage(tpl.pixels * c), search)
        scaled_s = ncc_map(tpl, GrayImage(search.pixels * c))
        assert np.max(np.abs(scaled_t - base)) <= 1e-12
        assert np.max(np.abs(scaled_s - base)) <= 1e-12


def test_pair_self_match(rng):
    hr = rand_image(rng, 24, 24, lo=0.05)
    lr = coarsen(hr, 2, method("bilinear"))
    alignment = pair_images(hr, lr, 2, method("bilinear"))
    assert (alignment.offset_x, alignment.offset_y) == (0, 0)
    assert alignment.score >= 0.999
    assert alignment.hr_rect.w == alignment.lr_rect.w * 2


def test_pair_factor_one_identity(rng):
    img = rand_image(rng, 12, 12, lo=0.05)
    alignment = pair_images(img, img, 1, method("bilinear"))
    assert (alignment.offset_x, alignment.offset_y) == (0, 0)
    assert alignment.score == pytest.approx(1.0, abs=1e-12)


def test_pair_recovers_planted_offset(rng):
    # HR is an aligned crop of a larger scene; its location inside the full
    # LR image is the planted offset the pairing must find.
    recovered = 0
    for trial in range(100):
        trng = np.random.default_rng(9000 + trial)
        big = GrayImage(0.05 + 0.95 * trng.random((48, 48)))
        lr = coarsen(big, 4, method("box"))
        ox, oy = int(trng.integers(0, 6)), int(trng.integers(0, 6))
        hr = crop(big, Rect(ox * 4, oy * 4, 28, 28))
        alignment = pair_images(hr, lr, 4, method("box"))
        if (alignment.offset_x, alignment.offset_y) == (ox, oy) and alignment.score >= 0.999:
            recovered += 1
    assert recovered == 100


def test_pair_central_subtemplate_offset(rng):
    # LR is a shifted crop of the coarsened scene; HR covers the whole scene,
    # so the recovered rects differ by exactly the planted offset.
    big = rand_image(rng, 96, 96, lo=0.05)
    lr_full = coarsen(big, 4, method("box"))
    ox, oy = 7, 2
    lr = crop(lr_full, Rect(ox, oy, 14, 14))
    alignment = pair_images(big, lr, 4, method("box"), central_fraction=0.25)
    tpl_x0 = alignment.hr_rect.x0 // 4
    tpl_y0 = alignment.hr_rect.y0 // 4
    assert (alignment.offset_x, alignment.offset_y) == (tpl_x0 - ox, tpl_y0 - oy)
    assert alignment.score >= 0.999


def test_pair_score_floor_failure(rng):
    hr = rand_image(rng, 16, 16, lo=0.05)
    lr = rand_image(rng, 8, 8, lo=0.05)  # unrelated content
    with pytest.raises(CoreScaleError) as err:
        pair_images(hr, lr, 2, method("bilinear"), score_floor=0.9999)
    assert err.value.code == "pairing-failed"
    assert "best NCC score" in err.value.message
