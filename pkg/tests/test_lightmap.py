import numpy as np
import pytest

from oracles import direct_convolve, per_component_render

from nightglow.errors import ParameterError
from nightglow.lightmap import (
    LightSourceMap,
    assign_kernel_types,
    binarize_light_map,
    connected_components,
    extract_lights_threshold,
    render_alsf_layer,
    render_apsf_layer,
)
from nightglow.seeding import make_rng


def lights_from(arr):
    return LightSourceMap(intensity=arr, provenance="external_file")


def box_kernel(s):
    return np.full((s, s), 1.0 / (s * s))


def test_extract_threshold_black_image():
    out = extract_lights_threshold(np.zeros((8, 8, 3)), tau=0.5)
    assert not out.intensity.any()
    assert out.provenance == "threshold_fallback"


def test_extract_threshold_keeps_rgb_of_bright_pixel():
    img = np.zeros((6, 6, 3))
    img[2, 3] = (1.0, 0.9, 0.8)
    out = extract_lights_threshold(img, tau=0.9)
    assert np.array_equal(out.intensity[2, 3], img[2, 3])
    assert out.intensity.sum() == pytest.approx(img[2, 3].sum())


def test_extract_threshold_rejects_degenerate_tau():
    img = np.zeros((4, 4, 3))
    for tau in (0.0, 1.0, -0.5):
        with pytest.raises(ParameterError):
            extract_lights_threshold(img, tau=tau)


def test_components_empty_mask():
    cm = connected_components(np.zeros((5, 5), dtype=bool), min_area=1)
    assert cm.count == 0
    assert not cm.labels.any()


def test_components_diagonal_touch_merges():
    mask = np.zeros((6, 6), dtype=bool)
    mask[1, 1] = True
    mask[2, 2] = True  # touches only diagonally
    mask[3, 3] = True
    cm = connected_components(mask, min_area=1)
    assert cm.count == 1
    assert cm.areas.tolist() == [3]


def test_components_min_area_filter():
    mask = np.zeros((7, 7), dtype=bool)
    mask[0, 0:3] = True          # area 3
    mask[4:6, 4:6] = True        # area 4
    cm = connected_components(mask, min_area=3)
    assert cm.count == 2
    cm = connected_components(mask, min_area=4)
    assert cm.count == 1
    assert cm.labels[5, 5] == 1
    assert cm.labels[0, 0] == 0


def test_components_raster_compaction_order():
    mask = np.zeros((5, 9), dtype=bool)
    mask[3, 0:2] = True   # lowest rows, but leftmost later in raster order
    mask[0, 4:6] = True   # encountered first
    mask[2, 7:9] = True
    cm = connected_components(mask, min_area=1)
    assert cm.labels[0, 4] == 1
    assert cm.labels[2, 7] == 2
    assert cm.labels[3, 0] == 3


def test_components_permutation_stable_partition():
    rng = np.random.default_rng(0)
    mask = rng.uniform(size=(24, 24)) < 0.35
    cm = connected_components(mask, min_area=1)
    # the same partition must come back when the mask is re-labeled from
    # any pixel ordering: compare pixel partitions, not label values
    groups = {}
    for y, x in zip(*np.nonzero(mask)):
        groups.setdefault(cm.labels[y, x], set()).add((int(y), int(x)))
    rebuilt = connected_components(mask[::-1, ::-1], min_area=1)
    groups_flipped = {}
    h, w = mask.shape
    for y, x in zip(*np.nonzero(mask[::-1, ::-1])):
        groups_flipped.setdefault(rebuilt.labels[y, x], set()).add(
            (int(h - 1 - y), int(w - 1 - x))
        )
    assert set(map(frozenset, groups.values())) == set(
        map(frozenset, groups_flipped.values())
    )


def test_components_invalid_min_area():
    with pytest.raises(ParameterError):
        connected_components(np.zeros((3, 3), dtype=bool), min_area=0)


def test_binarize_uses_channel_max():
    arr = np.zeros((3, 3, 3))
    arr[0, 0, 2] = 0.03  # above floor in one channel only
    arr[1, 1, :] = 0.01  # below floor everywhere
    mask = binarize_light_map(lights_from(arr))
    assert mask[0, 0]
    assert not mask[1, 1]


def test_assignment_empty():
    cm = connected_components(np.zeros((4, 4), dtype=bool))
    assert assign_kernel_types(cm, make_rng(0)).size == 0


def test_assignment_deterministic():
    mask = np.zeros((10, 10), dtype=bool)
    mask[1:3, 1:3] = True
    mask[6:9, 6:9] = True
    cm = connected_components(mask)
    a = assign_kernel_types(cm, make_rng(42))
    b = assign_kernel_types(cm, make_rng(42))
    assert np.array_equal(a, b)
    assert set(a) <= {0, 1, 2}


def test_render_zero_map_is_zero():
    arr = np.zeros((12, 12, 3))
    cm = connected_components(np.zeros((12, 12), dtype=bool))
    out = render_alsf_layer(lights_from(arr), cm, np.zeros(0, dtype=int), tuple(box_kernel(3) for _ in range(3)))
    assert not out.any()


def test_render_identical_kernels_collapse_to_plain_convolution():
    rng = np.random.default_rng(1)
    arr = np.zeros((16, 16, 3))
    arr[3:5, 3:5] = rng.uniform(0.5, 1.0, size=(2, 2, 3))
    arr[10:13, 9:12] = rng.uniform(0.5, 1.0, size=(3, 3, 3))
    light = lights_from(arr)
    cm = connected_components(binarize_light_map(light))
    assert cm.count == 2
    assignment = assign_kernel_types(cm, make_rng(3))
    k = box_kernel(5)
    got = render_alsf_layer(light, cm, assignment, (k, k, k))
    want = direct_convolve(arr, k)
    assert np.abs(got - want).max() <= 1e-6


def test_render_distinct_kernels_match_per_component_oracle():
    rng = np.random.default_rng(2)
    for _ in range(5):
        arr = np.zeros((20, 20, 3))
        n = int(rng.integers(2, 5))
        for _k in range(n):
            r = int(rng.integers(1, 17))
            c = int(rng.integers(1, 17))
            arr[r : r + 2, c : c + 2] = rng.uniform(0.3, 1.0, size=3)
        light = lights_from(arr)
        cm = connected_components(binarize_light_map(light), min_area=1)
        assignment = assign_kernel_types(cm, make_rng(5))
        kernels = tuple(
            k / k.sum() for k in (rng.uniform(size=(5, 5)) for _ in range(3))
        )
        got = render_alsf_layer(light, cm, assignment, kernels)
        want = per_component_render(arr, cm.labels, assignment, kernels)
        assert np.abs(got - want).max() <= 1e-6


def test_render_linear_in_light_map():
    rng = np.random.default_rng(3)
    arr = np.zeros((14, 14, 3))
    arr[4:6, 4:6] = rng.uniform(0.5, 1.0, size=(2, 2, 3))
    light = lights_from(arr)
    cm = connected_components(binarize_light_map(light))
    assignment = assign_kernel_types(cm, make_rng(7))
    kernels = tuple(k / k.sum() for k in (rng.uniform(size=(3, 3)) for _ in range(3)))
    one = render_alsf_layer(light, cm, assignment, kernels)
    two = render_alsf_layer(lights_from(2.0 * arr), cm, assignment, kernels)
    assert np.abs(two - 2.0 * one).max() <= 1e-12


def test_render_requires_assignment_per_component():
    arr = np.zeros((8, 8, 3))
    arr[2:4, 2:4] = 1.0
    light = lights_from(arr)
    cm = connected_components(binarize_light_map(light))
    with pytest.raises(ParameterError):
        render_alsf_layer(light, cm, np.zeros(5, dtype=int), tuple(box_kernel(3) for _ in range(3)))


def test_apsf_layer_zero_map():
    out = render_apsf_layer(lights_from(np.zeros((10, 10, 3))), box_kernel(5))
    assert not out.any()


def test_apsf_layer_delta_embeds_kernel():
    arr = np.zeros((11, 11, 1))
    arr[5, 5, 0] = 0.75
    kernel = box_kernel(5)
    out = render_apsf_layer(lights_from(arr), kernel)
    assert np.abs(out[3:8, 3:8, 0] - 0.75 * kernel).max() <= 1e-12
    assert out[0, 0, 0] <= 1e-12  # FFT dust only outside the footprint


def test_apsf_layer_conserves_interior_energy():
    rng = np.random.default_rng(4)
    arr = np.zeros((24, 24, 3))
    arr[10:14, 10:14] = rng.uniform(0.2, 1.0, size=(4, 4, 3))
    kernel = box_kernel(7)
    out = render_apsf_layer(lights_from(arr), kernel)
    assert abs(out.sum() - arr.sum()) <= 1e-6 * arr.sum()


def test_layers_nonnegative():
    rng = np.random.default_rng(5)
    arr = rng.uniform(size=(16, 16, 3)) * (rng.uniform(size=(16, 16, 1)) > 0.8)
    light = lights_from(arr)
    cm = connected_components(binarize_light_map(light), min_area=1)
    assignment = assign_kernel_types(cm, make_rng(9))
    kernels = tuple(k / k.sum() for k in (rng.uniform(size=(5, 5)) for _ in range(3)))
    assert (render_alsf_layer(light, cm, assignment, kernels) >= 0.0).all()
    assert (render_apsf_layer(light, kernels[0]) >= 0.0).all()
