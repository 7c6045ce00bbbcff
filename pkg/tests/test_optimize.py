import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.basis.expansion import build_spec, expand
from src.model.correlation import XiBlocks
from src.model.phantom import PhantomSpec
from src.model.rotation import Rotation
from src.model.volume import Volume
from src.optimize.aligner import DegenerateInputError, ShiftOutcome, _ranking_key, align, basis_for, coarse_shifts, fine_shifts, masked_subtomogram, search_rotation
from src.optimize.bands import select_bands
from src.optimize.baseline import exhaustive_baseline
from src.optimize.landscape import count_sign_changes, landscape, landscape_slice
from src.optimize.newton import NewtonRefiner, refine
from src.optimize.seeding import grid_local_maxima, seed_candidates
from src.settings.settings_model import OptimizerConfig
from src.steer.steering import rotate_expansion
from src.volio.metrics import geodesic_degrees
from src.volio.phantom import make_phantom
from src.volio.transforms import rotate_volume, shift_volume
from src.xcorr.kernel import evaluate, euler_grid_shape, value_and_derivatives, xi_coefficients
from src.xcorr.wedge import GridSizeMismatchError, apply_wedge, build_wedge_mask

from .conftest import gaussian_blobs, random_expansion

TRUE_ROTATION = Rotation.from_euler(0.5, 1.0, 2.0)


@pytest.fixture(scope="module")
def steered_pair():
    """Template coefficients t and f = R_g t steered exactly in coefficient space."""
    t = expand(gaussian_blobs(32), build_spec(8, 15.0))
    return t, rotate_expansion(t, TRUE_ROTATION)


@pytest.fixture(scope="module")
def small_config():
    return OptimizerConfig(l_max=8, lambda_cut=15.0, fixed_bands=[3, 5, 8], max_candidates=5, shift_radius=0, workers=1)


def _xi_with_energies(energies: list[float]) -> XiBlocks:
    blocks = []
    for l, e in enumerate(energies):
        block = np.zeros((2 * l + 1, 2 * l + 1), dtype=np.complex128)
        block[0, 0] = math.sqrt(e)
        blocks.append(block)
    return XiBlocks(l_max=len(energies) - 1, blocks=blocks)


def test_select_bands_from_energy_ratio():
    xi = _xi_with_energies([4.0, 3.0, 2.0, 1.0])
    # tail ratios are 0.6, 0.3, 0.1, 0
    assert select_bands(xi, [0.5, 0.25, 0.05]) == [1, 2, 3]
    assert select_bands(xi, [0.7, 0.65]) == [0]
    assert select_bands(xi, [0.01]) == [3]


def test_coarse_and_fine_shift_grids():
    assert len(coarse_shifts(4, 2)) == 125
    assert coarse_shifts(1, 2) == [(0, 0, 0)]
    assert coarse_shifts(0, 1) == [(0, 0, 0)]
    fine = fine_shifts((4, 0, 0), 4, 2)
    assert len(fine) == 75
    assert all(-4 <= s <= 4 for shift in fine for s in shift)


def test_equal_scores_rank_by_shift_tuple():
    outcomes = [ShiftOutcome(shift=s, score=0.5) for s in [(0, 0, 1), (-2, 0, 0), (0, -1, 3)]]
    assert min(outcomes, key=_ranking_key).shift == (-2, 0, 0)
    better = ShiftOutcome(shift=(3, 3, 3), score=0.6)
    assert min([*outcomes, better], key=_ranking_key).shift == (3, 3, 3)


def test_euler_grid_shape():
    assert euler_grid_shape(math.pi / 8) == (16, 9, 16)
    assert euler_grid_shape(math.pi / 4) == (8, 5, 8)
    with pytest.raises(ValueError):
        euler_grid_shape(0.0)


def test_grid_local_maxima_wrap_in_alpha_and_gamma():
    shape = (8, 9, 8)
    a, b, c = np.meshgrid(np.arange(8), np.arange(9), np.arange(8), indexing="ij")

    def periodic(i, center, n):
        d = np.abs(i - center)
        return np.minimum(d, n - d)

    scores = -(periodic(a, 0, 8) ** 2) - (b - 4) ** 2 - periodic(c, 7, 8) ** 2
    maxima = grid_local_maxima(scores.astype(float))
    assert maxima.tolist() == [[0, 4, 7]]


def test_grid_local_maxima_are_strict_away_from_the_poles():
    _, b, _ = np.meshgrid(np.arange(8), np.arange(9), np.arange(8), indexing="ij")
    scores = -0.01 * (b - 4.0) ** 2
    scores[2, 4, 3] = scores[3, 4, 3] = 1.0
    scores[6, 2, 1] = 2.0
    # on the beta = 0 row, nodes with equal alpha + gamma are the same rotation
    diagonal = {(a, 0, (5 - a) % 8) for a in range(8)}
    for node in diagonal:
        scores[node] = 0.5
    maxima = {tuple(int(i) for i in node) for node in grid_local_maxima(scores)}
    assert maxima == diagonal | {(6, 2, 1)}


def test_seeds_are_sorted_by_score(steered_pair):
    t, f = steered_pair
    xi = xi_coefficients(t, f)
    seeds = seed_candidates(xi, 3, math.pi / 8, 10)
    assert 1 <= len(seeds) <= 10
    scores = [score for _, score in seeds]
    assert scores == sorted(scores, reverse=True)


def test_refine_converges_from_a_nearby_start(steered_pair):
    t, f = steered_pair
    xi = xi_coefficients(t, f)
    target = TRUE_ROTATION.inverse()
    start = target.compose(Rotation.from_axis_angle((1.0, 2.0, -1.0), math.radians(8.0)))
    cfg = OptimizerConfig(l_max=8, fixed_bands=[3, 5, 8])
    result = refine(xi, start, [3, 5, 8], cfg)
    assert result.converged
    assert geodesic_degrees(result.rotation, target) < 1e-3
    # the maximum of <t, R_g R_true t> is ||t||^2
    assert_allclose(result.score, t.norm() ** 2, rtol=1e-9)
    assert set(result.evaluations_per_band) == {3, 5, 8}
    assert result.trace and result.trace[0].step == "start"


def test_refine_rejects_empty_schedule(steered_pair):
    t, f = steered_pair
    with pytest.raises(ValueError):
        refine(xi_coefficients(t, f), Rotation.identity(), [], OptimizerConfig(l_max=8, fixed_bands=[8]))


def test_each_band_continues_from_the_current_iterate(steered_pair):
    t, f = steered_pair
    xi = xi_coefficients(t, f)
    refiner = NewtonRefiner(xi, OptimizerConfig(l_max=8, fixed_bands=[3, 5, 8]))
    target = TRUE_ROTATION.inverse()
    current = target.compose(Rotation.from_axis_angle((1.0, 0.0, 0.0), math.radians(30.0)))
    # the original start sits on the optimum and outscores the current iterate
    state = refiner.start(target, 8).model_copy(update={"rotation": current})
    after = refiner.refine_band(state, 5)
    first = next(entry for entry in after.trace if entry.band == 5)
    assert geodesic_degrees(Rotation.from_euler(*first.euler), current) < 1e-6
    assert first.score == pytest.approx(evaluate(xi, current, 5), rel=1e-9)


def test_marching_never_loses_score(steered_pair):
    t, f = steered_pair
    xi = xi_coefficients(t, f)
    cfg = OptimizerConfig(l_max=8, fixed_bands=[3, 5, 8])
    target = TRUE_ROTATION.inverse()
    for axis, degrees in [((1.0, 0.0, 0.0), 15.0), ((0.0, 1.0, 1.0), 20.0), ((1.0, -2.0, 0.5), 10.0)]:
        start = target.compose(Rotation.from_axis_angle(axis, math.radians(degrees)))
        result = refine(xi, start, [3, 5, 8], cfg)
        assert result.converged
        assert result.score >= evaluate(xi, start, 8)
        for band in (3, 5, 8):
            scores = [entry.score for entry in result.trace if entry.band == band]
            assert all(later >= earlier - 1e-12 * abs(earlier) for earlier, later in zip(scores, scores[1:]))


def test_stalled_refinement_keeps_its_best_iterate(steered_pair, monkeypatch):
    t, f = steered_pair
    xi = xi_coefficients(t, f)
    # every trial point scores below the current iterate
    monkeypatch.setattr("src.optimize.newton.evaluate_euler_complex", lambda *args: complex(-np.inf))
    start = TRUE_ROTATION.inverse().compose(Rotation.from_axis_angle((1.0, 2.0, -1.0), math.radians(8.0)))
    result = refine(xi, start, [3, 5, 8], OptimizerConfig(l_max=8, fixed_bands=[3, 5, 8]))
    assert result.diverged
    assert not result.converged
    assert geodesic_degrees(result.rotation, start) < 1e-6
    assert {entry.band for entry in result.trace} == {3}


def test_iteration_cap_leaves_the_run_unconverged(steered_pair):
    t, f = steered_pair
    xi = xi_coefficients(t, f)
    start = TRUE_ROTATION.inverse().compose(Rotation.from_axis_angle((1.0, 2.0, -1.0), math.radians(8.0)))
    result = refine(xi, start, [3, 5, 8], OptimizerConfig(l_max=8, fixed_bands=[3, 5, 8], newton_max_iter=1))
    assert not result.converged
    assert not result.diverged
    assert [entry.band for entry in result.trace] == [3, 5, 8]


def test_search_rotation_finds_the_global_maximum(steered_pair):
    t, f = steered_pair
    xi = xi_coefficients(t, f)
    cfg = OptimizerConfig(l_max=8, fixed_bands=[3, 5, 8], seed_grid_step=math.pi / 6, max_candidates=20)
    search = search_rotation(xi, [3, 5, 8], cfg)
    assert geodesic_degrees(search.best.rotation, TRUE_ROTATION.inverse()) < 1e-2
    assert search.candidates >= 1
    assert search.evaluations_per_band[3] >= int(np.prod(euler_grid_shape(math.pi / 6)))


def test_pruning_keeps_the_best_candidate(steered_pair):
    t, f = steered_pair
    xi = xi_coefficients(t, f)
    cfg = OptimizerConfig(l_max=8, fixed_bands=[3, 5, 8], seed_grid_step=math.pi / 6, prune_after_band=3)
    search = search_rotation(xi, [3, 5, 8], cfg)
    assert geodesic_degrees(search.best.rotation, TRUE_ROTATION.inverse()) < 1e-2


def test_align_identical_volumes(small_config):
    volume = gaussian_blobs(24, sigmas=[0.15, 0.12, 0.18])
    result = align(volume, volume, small_config)
    assert result.shift == (0, 0, 0)
    assert geodesic_degrees(result.rotation, Rotation.identity()) < 0.1
    assert result.bands == [3, 5, 8]
    assert result.shifts_evaluated == 1
    assert_allclose(result.score, 1.0, rtol=1e-6)
    assert result.total_evaluations > 0


def test_align_recovers_an_integer_shift(small_config):
    volume = gaussian_blobs(24, sigmas=[0.15, 0.12, 0.18])
    moved = shift_volume(volume, (1, 0, -1))
    cfg = small_config.model_copy(update={"shift_radius": 1, "shift_step": 1, "max_candidates": 3})
    result = align(volume, moved, cfg)
    assert result.shift == (1, 0, -1)
    assert geodesic_degrees(result.rotation, Rotation.identity()) < 0.5
    assert result.shifts_evaluated == 27


def test_align_rejects_bad_inputs(small_config):
    volume = gaussian_blobs(24)
    with pytest.raises(DegenerateInputError):
        align(Volume(data=np.zeros((24, 24, 24))), volume, small_config)
    with pytest.raises(GridSizeMismatchError):
        align(volume, gaussian_blobs(16), small_config)


def test_scaling_a_volume_does_not_move_the_optimum(small_config):
    volume = gaussian_blobs(24, sigmas=[0.15, 0.12, 0.18])
    moved = shift_volume(volume, (1, 0, -1))
    cfg = small_config.model_copy(update={"shift_radius": 1, "shift_step": 1, "max_candidates": 3})
    reference = align(volume, moved, cfg)
    for template_scale, subtomo_scale in [(4.0, 1.0), (1.0, 0.25)]:
        result = align(volume.with_data(template_scale * volume.data), moved.with_data(subtomo_scale * moved.data), cfg)
        assert result.shift == reference.shift
        assert geodesic_degrees(result.rotation, reference.rotation) < 1e-6
        assert_allclose(result.score, reference.score, rtol=1e-9)
        assert_allclose(result.raw_score, template_scale * subtomo_scale * reference.raw_score, rtol=1e-9)


def test_wedge_mask_filters_only_the_subtomogram(small_config):
    volume = gaussian_blobs(24, sigmas=[0.15, 0.12, 0.18])
    subtomo = rotate_volume(volume, Rotation.from_euler_degrees(10.0, 30.0, -20.0))
    mask = build_wedge_mask(24, 60.0)
    masked = align(volume, subtomo, small_config, wedge=mask)
    prefiltered = align(volume, apply_wedge(subtomo, mask), small_config)
    assert masked.rotation.q == prefiltered.rotation.q
    assert masked.score == prefiltered.score
    assert masked_subtomogram(subtomo, None) is subtomo
    assert np.array_equal(masked_subtomogram(subtomo, mask).data, apply_wedge(subtomo, mask).data)


@pytest.mark.slow
def test_align_is_deterministic_across_worker_counts(small_config):
    template, subtomo, _ = make_phantom(PhantomSpec(n=24, sigma_range=(0.12, 0.2), seed=5, true_shift=(1, 0, 0)))
    cfg = small_config.model_copy(update={"shift_radius": 2, "shift_step": 2})
    serial = align(template, subtomo, cfg)
    threaded = align(template, subtomo, cfg.model_copy(update={"workers": 4}))
    assert serial.shift == threaded.shift
    assert serial.rotation.q == threaded.rotation.q
    assert serial.score == threaded.score


@pytest.mark.slow
def test_phantom_pose_is_recovered():
    rotation = Rotation.from_euler_degrees(40.0, 70.0, -110.0)
    spec = PhantomSpec(n=32, seed=11, blobs=6, sigma_range=(0.08, 0.16), true_rotation=rotation, true_shift=(2, -1, 0))
    template, subtomo, truth = make_phantom(spec)
    cfg = OptimizerConfig(l_max=16, fixed_bands=[5, 9, 16], shift_radius=2, shift_step=1, max_candidates=10, workers=2)
    result = align(template, subtomo, cfg)
    assert result.shift == truth.shift
    assert geodesic_degrees(result.rotation, truth.expected_alignment()) < 3.0


@pytest.mark.slow
def test_wedge_phantom_pose_is_recovered():
    rotation = Rotation.from_euler_degrees(40.0, 70.0, -110.0)
    spec = PhantomSpec(n=32, seed=11, blobs=6, sigma_range=(0.08, 0.16), true_rotation=rotation, true_shift=(1, -1, 0), wedge_theta=60.0)
    template, subtomo, truth = make_phantom(spec)
    cfg = OptimizerConfig(l_max=16, fixed_bands=[5, 9, 16], shift_radius=1, shift_step=1, max_candidates=10, workers=2)
    with_mask = align(template, subtomo, cfg, wedge=build_wedge_mask(32, 60.0))
    without_mask = align(template, subtomo, cfg)
    expected = truth.expected_alignment()
    assert with_mask.shift == truth.shift
    error = geodesic_degrees(with_mask.rotation, expected)
    assert error < 8.0
    assert error <= geodesic_degrees(without_mask.rotation, expected) + 0.5


def test_exhaustive_baseline(steered_pair):
    t, f = steered_pair
    xi = xi_coefficients(t, f)
    rotation, score, evaluations = exhaustive_baseline(xi, 5, math.pi / 8)
    assert evaluations == 16 * 9 * 16
    assert_allclose(score, evaluate(xi, rotation, 5), rtol=1e-9)
    # a finer grid can only do at least as well near the true optimum
    assert exhaustive_baseline(xi, 5, math.pi / 16)[1] >= score - 1e-9 * abs(score)


def test_landscape_slice_matches_pointwise_values(small_basis, rng):
    xi = xi_coefficients(random_expansion(small_basis, rng), random_expansion(small_basis, rng))
    gamma = 0.6
    scores, derivative = landscape_slice(xi, 4, gamma, 12, 7)
    alphas = 2.0 * np.pi * np.arange(12) / 12
    betas = np.linspace(0.0, np.pi, 7)
    for b, a in [(1, 0), (3, 5), (5, 11)]:
        value, grad, _ = value_and_derivatives(xi, alphas[a], betas[b], gamma, 4)
        assert_allclose(scores[b, a], value, rtol=1e-9, atol=1e-9)
        assert_allclose(derivative[b, a], grad[0], rtol=1e-9, atol=1e-9)


def test_count_sign_changes_is_periodic():
    alphas = 2.0 * np.pi * np.arange(72) / 72
    rows = np.tile(np.sin(3 * alphas + 0.1), (4, 1))
    assert count_sign_changes(rows) == 24


def test_low_bands_have_few_sign_changes(small_basis, rng):
    xi = xi_coefficients(random_expansion(small_basis, rng), random_expansion(small_basis, rng))
    table, changes = landscape(xi, [1, 6], gamma=0.3, n_alpha=36, n_beta=9)
    assert changes[1] <= 2 * 9
    assert set(table["band"]) == {1, 6}
    assert len(table) == 2 * 36 * 9
    assert list(table.columns) == ["band", "alpha", "beta", "score", "dscore_dalpha"]


@pytest.mark.slow
def test_phantom_landscape_roughens_with_the_band():
    spec = PhantomSpec(n=48, seed=7, true_rotation=Rotation.from_euler_degrees(30.0, 40.0, 50.0))
    template, subtomo, _ = make_phantom(spec)
    basis = basis_for(48, OptimizerConfig(l_max=33, fixed_bands=[7, 12, 33]))
    xi = xi_coefficients(expand(template, basis), expand(subtomo, basis))
    _, changes = landscape(xi, [7, 12, 33], gamma=0.0, n_alpha=144, n_beta=37)
    assert changes[33] > changes[7]
