import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ltda.filtration import vietoris_rips
from ltda.gh import gh_k_exact
from ltda.landscape import (GeneralizedLandscape, SampledLandscape, default_grid, default_levels,
                            generalized_landscape, image_landscape, interpolate, mse_distance, path_values,
                            restrict_to, sup_distance, to_json_doc, to_long_csv)
from ltda.metric_space import diam_Q, from_point_cloud, hausdorff
from ltda.oracles import brute_generalized_landscape, golden_cases, random_instance
from ltda.persistence import barcode, landscape_1d
from ltda.poset import chain_poset, make_weighting, power_poset, weight_constant

U = frozenset({0, 1})
LINE3 = [(0,), (1,), (2,)]


def plain(lms, S, n_max, j=0):
    return landscape_1d(barcode(vietoris_rips(lms, S, max_dim=j), j), n_max=n_max)


@pytest.mark.parametrize("case", golden_cases(), ids=lambda c: c.name)
def test_grid_values_match_closed_forms(case):
    Z = np.linspace(0, 1.5, 61)
    gl = generalized_landscape(case.lms, case.poset, case.degree, Z, case.n_max)
    for p in gl.elements:
        for n in range(1, case.n_max + 1):
            expected = [case.formula(p, n, r) for r in Z]
            np.testing.assert_allclose(gl.values[n - 1, :, gl.element_index(p)], expected, atol=1e-9,
                                       err_msg=f"{sorted(p)} level {n}")


def test_six_point_worked_values():
    case = golden_cases()[2]
    # the grid must reach the largest union diameter so chains can stay low long enough
    gl = generalized_landscape(case.lms, case.poset, 0, [0.0, 0.3, 0.7, 1.0, 1.5], 6)
    assert gl.value(4, 1, U) == pytest.approx(0.1, abs=1e-12)
    assert gl.value(2, 2, U) == pytest.approx(0.1, abs=1e-12)
    s = restrict_to(gl, {0})
    assert s(1, 0.3) == pytest.approx(0.3, abs=1e-12)
    assert s(1, 0.7) == pytest.approx(0.3, abs=1e-12)


def test_single_label_is_plain_landscape():
    lms = from_point_cloud(np.random.default_rng(3).random((6, 2)), [range(6)])
    Z = np.linspace(0, 1.2, 41)
    for j in (0, 1):
        gl = generalized_landscape(lms, power_poset(1), j, Z, 4)
        ls = plain(lms, [0], 4, j)
        assert len(gl.paths) == 1
        for n in range(1, 5):
            np.testing.assert_allclose(gl.values[n - 1, :, 0], ls(n, Z), atol=1e-12)


@pytest.mark.parametrize("seed", range(50))
def test_pipeline_matches_brute_oracle(seed):
    lms = random_instance(seed, max_points=6)
    scheme, value = [("constant", 0.07), ("diameter", None), ("hausdorff", 0.5)][seed % 3]
    P = make_weighting(power_poset(2), lms, scheme, value)
    Z = np.linspace(0, 1.4, 15)
    j = seed % 2 if lms.n_points >= 4 else 0
    gl = generalized_landscape(lms, P, j, Z, 3)
    oracle = brute_generalized_landscape(lms, P, j, Z, 3)
    for p in gl.elements:
        np.testing.assert_allclose(gl.values[:, :, gl.element_index(p)], oracle[p], atol=1e-9,
                                   err_msg=f"seed {seed}, {scheme}, {sorted(p)}")


def test_two_classes_on_a_line_level_two():
    # X_1 = {0, 1}, X_2 = {1/2}, edge weight 1/4, slice at X_1
    lms = from_point_cloud([(0,), (0.5,), (1,)], [[0, 2], [1]])
    P = weight_constant(power_poset(2), 0.25)
    gl = generalized_landscape(lms, P, 0, np.linspace(0, 1, 41), 3)
    s = restrict_to(gl, {0})
    assert s(2, 0.6) == pytest.approx(0.25, abs=1e-12)
    assert s(2, 0.3) == pytest.approx(0.3, abs=1e-12)
    assert s(2, 0.9) == pytest.approx(0.1, abs=1e-12)


def test_two_classes_on_a_line_at_unit_spacing():
    # X_1 = {0, 2}, X_2 = {1}: frozen slice, with a flat stretch at the edge weight
    lms = from_point_cloud(LINE3, [[0, 2], [1]])
    P = weight_constant(power_poset(2), 0.25)
    Z = np.linspace(0, 2, 81)
    s = restrict_to(generalized_landscape(lms, P, 0, Z, 3), {0})
    expected = np.select([Z <= 0.625, Z <= 1, Z <= 1.75], [Z, 1.25 - Z, 0.25 + 0 * Z], 2 - Z)
    np.testing.assert_allclose(s.values[1], expected, atol=1e-12)


def test_flat_height_tracks_the_weight():
    lms = from_point_cloud(LINE3, [[0, 2], [1]])
    Z = np.linspace(0, 2, 81)
    H = hausdorff(lms, lms.labels[0], range(3))
    heights = []
    for frac in np.arange(0.2, 1.0, 0.1):
        P = weight_constant(power_poset(2), frac * H)
        s = restrict_to(generalized_landscape(lms, P, 0, Z, 3), {0})
        heights.append(float(s(2, 1.2)))
        if frac * H >= diam_Q(lms, [0, 1]) / 2:
            np.testing.assert_allclose(s.values[1], plain(lms, [0], 3)(2, Z), atol=1e-12)
    assert heights == sorted(heights)
    assert heights[0] == pytest.approx(0.2 * H, abs=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_large_weights_collapse_to_plain_landscapes(seed):
    lms = random_instance(seed, max_points=6)
    P = weight_constant(power_poset(2), 0.51 * diam_Q(lms, [0, 1]))
    Z = default_grid(lms, P, 33)
    gl = generalized_landscape(lms, P, 0, Z, 4)
    for p in gl.elements:
        ls = plain(lms, sorted(p), 4)
        s = restrict_to(gl, p)
        for n in range(1, 5):
            np.testing.assert_allclose(s.values[n - 1], ls(n, Z), atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["constant", "diameter", "hausdorff"]))
def test_monotone_in_level_and_lipschitz(seed, scheme):
    lms = random_instance(seed, max_points=6)
    P = make_weighting(power_poset(2), lms, scheme, 0.1)
    Z = np.linspace(0, 1.4, 29)
    gl = generalized_landscape(lms, P, 0, Z, 4)
    v = gl.values
    assert np.all(v >= 0)
    assert np.all(v[:-1] >= v[1:] - 1e-12)
    assert np.all(np.abs(np.diff(v, axis=1)) <= np.diff(Z)[None, :, None] + 1e-12)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_stability_against_labeled_gh(seed):
    rng = np.random.default_rng(seed)
    X = random_instance(int(rng.integers(10**6)), max_points=4)
    Y = random_instance(int(rng.integers(10**6)), max_points=4)
    Z = np.linspace(0, 1.5, 16)
    gx = generalized_landscape(X, make_weighting(power_poset(2), X, "diameter"), 0, Z, 4, kind="ultrametric")
    gy = generalized_landscape(Y, make_weighting(power_poset(2), Y, "diameter"), 0, Z, 4, kind="ultrametric")
    assert sup_distance(gx, gy) <= 4 * gh_k_exact(X, Y).value + 1e-9


def test_interpolation_at_and_between_grid_points():
    case = golden_cases()[0]
    Z = np.linspace(0, 1, 21)
    gl = generalized_landscape(case.lms, case.poset, 0, Z, 2)
    for i, z in enumerate(Z):
        assert interpolate(gl, 1, z, U) == gl.value(1, i, U)
    # the union slice is flat at 0.25 between 0.25 and 0.75
    assert interpolate(gl, 1, 0.525, U) == pytest.approx(0.25, abs=1e-15)
    assert interpolate(gl, 9, 0.5, U) == 0
    with pytest.raises(ValueError):
        interpolate(gl, 1, 1.5, U)


def test_interpolation_error_within_one_step():
    rng = np.random.default_rng(12)
    lms = random_instance(12, max_points=6)
    P = make_weighting(power_poset(2), lms, "hausdorff", 0.3)
    coarse = np.linspace(0, 1.4, 15)
    fine = np.linspace(0, 1.4, 29)
    gc = generalized_landscape(lms, P, 0, coarse, 3)
    gf = generalized_landscape(lms, P, 0, fine, 3)
    step = coarse[1] - coarse[0]
    for _ in range(100):
        i = int(rng.integers(len(fine)))
        p = gc.elements[int(rng.integers(3))]
        n = int(rng.integers(1, 4))
        assert abs(interpolate(gc, n, fine[i], p) - gf.value(n, i, p)) <= step + 1e-12


def test_restrict_to():
    case = golden_cases()[2]
    gl = generalized_landscape(case.lms, case.poset, 0, np.linspace(0, 1.2, 25), 6)
    s = restrict_to(gl, {0})
    assert isinstance(s, SampledLandscape) and s.element == frozenset({0})
    np.testing.assert_array_equal(s.values, gl.values[:, :, gl.element_index({0})])
    np.testing.assert_allclose(s.values[0], np.maximum(np.minimum(gl.Z, 1 - gl.Z), 0), atol=1e-12)
    with pytest.raises(KeyError):
        restrict_to(gl, set())


def test_image_landscape_examples():
    Z = np.linspace(0, 2, 41)
    full = from_point_cloud(LINE3, [[0, 1, 2], [0, 1, 2]])
    im = image_landscape(full, 0, 3, Z)
    ls = plain(full, [0], 3)
    for n in range(1, 4):
        np.testing.assert_allclose(im.values[n - 1], ls(n, Z), atol=1e-12)
    lone = from_point_cloud([(0,), (1,)], [[0], [0, 1]])
    assert np.all(image_landscape(lone, 0, 2, np.linspace(0, 1, 11)).values == 0)
    ends = from_point_cloud(LINE3, [[0, 2], [0, 1, 2]])
    im = image_landscape(ends, 0, 2, Z)
    np.testing.assert_allclose(im.values[1], np.maximum(np.minimum(Z, 1 - Z), 0), atol=1e-12)
    with pytest.raises(ValueError):
        image_landscape(from_point_cloud(LINE3, [[0, 1], [1, 2]]))


def test_image_matches_rank_oracle_over_the_chain():
    ends = from_point_cloud(LINE3, [[0, 2], [0, 1, 2]])
    Z = np.linspace(0, 2, 41)
    P = weight_constant(chain_poset(2), 0.0)
    oracle = brute_generalized_landscape(ends, P, 0, Z, 2)[frozenset({0})]
    np.testing.assert_allclose(image_landscape(ends, 0, 2, Z).values, oracle, atol=1e-12)


def test_sup_distance():
    case = golden_cases()[0]
    gl = generalized_landscape(case.lms, case.poset, 0, np.linspace(0, 1, 11), 2)
    assert sup_distance(gl, gl) == 0
    bumped = GeneralizedLandscape(gl.Z, gl.poset, gl.elements, 0, gl.values.copy(), gl.provenance, gl.paths)
    bumped.values[0, 3, 2] += 0.125
    assert sup_distance(gl, bumped) == 0.125
    other = generalized_landscape(case.lms, case.poset, 0, np.linspace(0, 1, 12), 2)
    with pytest.raises(ValueError):
        sup_distance(gl, other)


def test_mse_distance():
    r = np.linspace(0, 1, 11)
    a = SampledLandscape(r, np.zeros((1, 11)))
    b = SampledLandscape(r, np.full((1, 11), 0.5))
    assert mse_distance(a, a) == 0
    assert mse_distance(a, b) == pytest.approx(0.25, abs=1e-15)
    with pytest.raises(ValueError):
        mse_distance(a, b, resample_count=1)
    with pytest.raises(ValueError):
        mse_distance(a, SampledLandscape(r + 5, np.zeros((1, 11))))
    # missing levels count as zero
    c = SampledLandscape(r, np.stack([np.zeros(11), np.full(11, 0.5)]))
    assert mse_distance(a, c) == pytest.approx(0.25, abs=1e-15)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_mse_symmetric(seed):
    rng = np.random.default_rng(seed)
    r = np.linspace(0, 1, 9)
    a = SampledLandscape(r, rng.random((2, 9)))
    b = landscape_1d([(float(x), float(x) + 0.5) for x in rng.random(3)])
    assert mse_distance(a, b) == mse_distance(b, a)


def test_mse_of_generalized_landscapes():
    case = golden_cases()[2]
    Z = np.linspace(0, 1.2, 25)
    gl = generalized_landscape(case.lms, case.poset, 0, Z, 6)
    assert mse_distance(gl, gl) == 0
    with pytest.raises(TypeError):
        mse_distance(gl, restrict_to(gl, U))


def test_provenance_points_at_a_minimizing_path():
    lms = random_instance(4, max_points=6)
    P = make_weighting(power_poset(2), lms, "hausdorff", 0.3)
    Z = np.linspace(0, 1.2, 9)
    gl = generalized_landscape(lms, P, 0, Z, 3)
    cache = {}
    per_path = [path_values(lms, P, f, 0, Z, 3, cache) for f in gl.paths]
    col = {P.elements.index(e): c for c, e in enumerate(gl.elements)}
    for n in range(3):
        for z in range(len(Z)):
            for c in range(len(gl.elements)):
                pi = gl.provenance[n, z, c]
                hits = [(vals[n, list(idx).index(z)]) for node, idx, vals in per_path[pi] if col[node] == c and z in idx]
                assert gl.values[n, z, c] in hits
                # no earlier path reaches the same value
                for earlier in per_path[:pi]:
                    for node, idx, vals in earlier:
                        if col[node] == c and z in idx:
                            assert vals[n, list(idx).index(z)] > gl.values[n, z, c]


def test_workers_give_identical_results():
    lms = random_instance(9, max_points=6)
    P = make_weighting(power_poset(2), lms, "diameter")
    Z = np.linspace(0, 1.2, 13)
    one = generalized_landscape(lms, P, 0, Z, 3, workers=1)
    two = generalized_landscape(lms, P, 0, Z, 3, workers=2)
    np.testing.assert_array_equal(one.values, two.values)
    np.testing.assert_array_equal(one.provenance, two.provenance)


def test_defaults_and_errors():
    case = golden_cases()[2]
    assert default_levels(case.lms, case.poset) == 6
    Z = default_grid(case.lms, case.poset)
    assert len(Z) == 64 and Z[0] == 0 and Z[-1] == pytest.approx(math.sqrt(2), abs=1e-15)
    with pytest.raises(ValueError):
        generalized_landscape(case.lms, power_poset(3), 0)
    with pytest.raises(ValueError):
        generalized_landscape(case.lms, case.poset, 0, [])
    with pytest.raises(ValueError):
        generalized_landscape(case.lms, case.poset, 0, [0.5, 0.2])
    with pytest.raises(ValueError):
        generalized_landscape(case.lms, power_poset(2), 0, kind="taxicab")


def test_ultrametric_needs_short_chains():
    lms = from_point_cloud([(0,), (1,), (2,)], [[0], [1], [2]])
    with pytest.raises(ValueError):
        generalized_landscape(lms, power_poset(3), 0, [0.0, 1.0], kind="ultrametric")


def test_long_csv_and_json():
    case = golden_cases()[0]
    gl = generalized_landscape(case.lms, case.poset, 0, [0.0, 0.5], 1)
    text = to_long_csv(gl, {"seed": 0})
    lines = text.splitlines()
    assert lines[0] == '# {"seed": 0}'
    assert lines[1] == "level,r,poset_element,value"
    assert lines[2:] == ["1,0.0,1,0.0", "1,0.5,1,0.0", "1,0.0,2,0.0", "1,0.5,2,0.0",
                         "1,0.0,1+2,0.0", "1,0.5,1+2,0.25"]
    doc = to_json_doc(gl, {"seed": 0})
    assert doc["format"] == "ltda-landscape/1"
    assert doc["elements"] == ["1", "2", "1+2"]
    assert doc["config"] == {"seed": 0}
    assert doc["paths"] == len(gl.paths)
