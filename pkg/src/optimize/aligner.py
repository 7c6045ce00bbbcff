"""
Joint shift and rotation search maximizing the normalized cross-correlation.

Shifts are searched on a coarse integer grid, then with step 1 around the best coarse
shift. For every shift the subtomogram is re-expanded, the kernel xi is built, candidates
are seeded at the lowest band and refined by frequency marching.
"""

import itertools
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from pydantic import BaseModel, ConfigDict

from src.basis.expansion import build_spec, default_lambda_cut, expand, truncated
from src.model.alignment import AlignmentResult, RefinementResult, RotationSearch
from src.model.basis import BallExpansion, BasisSpec
from src.model.correlation import WedgeMask, XiBlocks
from src.model.volume import Volume
from src.settings.settings_model import OptimizerConfig
from src.xcorr.kernel import euler_grid_shape, evaluate, xi_coefficients
from src.xcorr.wedge import GridSizeMismatchError, apply_wedge

from .bands import select_bands
from .newton import NewtonRefiner
from .seeding import seed_candidates

logger = logging.getLogger(__name__)

Shift = tuple[int, int, int]


class DegenerateInputError(ValueError):
    """Raised when the template or the subtomogram carries no signal."""

    pass


class ShiftOutcome(BaseModel):
    """Best rotation found at one shift."""

    shift: Shift
    score: float
    search: RotationSearch | None = None

    model_config = ConfigDict(frozen=True, extra="forbid")


def search_rotation(xi: XiBlocks, bands: list[int], cfg: OptimizerConfig) -> RotationSearch:
    """
    Seed candidates at bands[0] and refine them through the whole schedule.

    With cfg.prune_after_band set, only that many candidates (best at the band just
    finished) continue to the next band.

    Args:
        xi: Kernel at one shift
        bands: Increasing band schedule
        cfg: Optimizer configuration

    Returns:
        The best refined candidate (highest score at the last band, then smallest angle)
    """
    bands = sorted(bands)
    seeds = seed_candidates(xi, bands[0], cfg.seed_grid_step, cfg.max_candidates)
    evaluations = {bands[0]: int(np.prod(euler_grid_shape(cfg.seed_grid_step)))}

    refiner = NewtonRefiner(xi, cfg)
    states = [refiner.start(rotation, bands[-1]) for rotation, _ in seeds]
    for i, band in enumerate(bands):
        states = [state if state.diverged else refiner.refine_band(state, band) for state in states]
        if cfg.prune_after_band is not None and i < len(bands) - 1 and len(states) > cfg.prune_after_band:
            ranked = sorted(states, key=lambda s: -evaluate(xi, s.rotation, band))
            states = ranked[: cfg.prune_after_band]
    finished = [refiner.finish(state, bands[-1]) for state in states]

    for state in finished:
        for band, count in state.evaluations_per_band.items():
            evaluations[band] = evaluations.get(band, 0) + count
    best = min(finished, key=lambda s: (-s.score, s.rotation.angle))
    return RotationSearch(best=best, bands=bands, candidates=len(seeds), evaluations_per_band=evaluations)


def coarse_shifts(radius: int, step: int) -> list[Shift]:
    """Multiples of step within [-radius, radius] per axis, in lexicographic order."""
    offsets = [k * step for k in range(-(radius // step), radius // step + 1)]
    return [tuple(s) for s in itertools.product(offsets, repeat=3)]


def fine_shifts(center: Shift, radius: int, step: int) -> list[Shift]:
    """Unit-step cube of half-width step around center, clipped to [-radius, radius]."""
    ranges = [range(max(-radius, c - step), min(radius, c + step) + 1) for c in center]
    return [tuple(s) for s in itertools.product(*ranges)]


def _ranking_key(outcome: ShiftOutcome) -> tuple:
    angle = outcome.search.best.rotation.angle if outcome.search is not None else np.inf
    return -outcome.score, outcome.shift, angle


class ShiftSearch:
    """
    Evaluates shifts against a fixed template expansion.

    Args:
        template: Template coefficients
        subtomogram: Subtomogram volume, already restricted to its measured Fourier region
        cfg: Optimizer configuration
    """

    def __init__(self, template: BallExpansion, subtomogram: Volume, cfg: OptimizerConfig):
        self.template = template
        self.subtomogram = subtomogram
        self.cfg = cfg
        self.spec: BasisSpec = template.spec

    def kernel(self, shift: Shift) -> XiBlocks:
        f_s = expand(self.subtomogram, self.spec, shift)
        return xi_coefficients(self.template, f_s, shift)

    def bands_for(self, xi: XiBlocks) -> list[int]:
        if self.cfg.fixed_bands is not None:
            return list(self.cfg.fixed_bands)
        return select_bands(xi, self.cfg.band_thresholds)

    def run(self, shift: Shift) -> ShiftOutcome:
        f_s = expand(self.subtomogram, self.spec, shift)
        xi = xi_coefficients(self.template, f_s, shift)
        total = float(np.sum(xi.energy_per_degree()))
        if total <= 0.0:
            logger.debug(f"Shift {shift}: no overlap with the template")
            return ShiftOutcome(shift=shift, score=-np.inf)

        bands = self.bands_for(xi)
        search = search_rotation(xi, bands, self.cfg)
        last = bands[-1]
        norm = truncated(self.template, last).norm() * truncated(f_s, last).norm()
        score = search.best.score / norm if norm > 0 else -np.inf
        logger.debug(f"Shift {shift}: bands {bands}, score {score:.6f}, converged={search.best.converged}")
        return ShiftOutcome(shift=shift, score=score, search=search)

    def run_all(self, shifts: list[Shift], workers: int) -> list[ShiftOutcome]:
        if workers <= 1:
            return [self.run(s) for s in shifts]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(self.run, shifts))


def masked_subtomogram(subtomogram: Volume, wedge: WedgeMask | None) -> Volume:
    """
    Restrict the subtomogram to its measured Fourier region.

    The mask lives in the subtomogram frame and is a self-adjoint projector, so
    <R_g t, W f> = <W R_g t, f>: the rotated template is compared with f only where f
    was measured, for every rotation g.
    """
    if wedge is None:
        return subtomogram
    return apply_wedge(subtomogram, wedge)


def basis_for(n: int, cfg: OptimizerConfig) -> BasisSpec:
    """Basis from the configured cutoff, or the grid's capped Nyquist cutoff."""
    lambda_cut = cfg.lambda_cut if cfg.lambda_cut is not None else default_lambda_cut(n, cfg.l_max, cfg.nyquist_fraction, cfg.max_coefficient_fraction)
    return build_spec(cfg.l_max, lambda_cut)


def align(template: Volume, subtomogram: Volume, cfg: OptimizerConfig, wedge: WedgeMask | None = None, spec: BasisSpec | None = None) -> AlignmentResult:
    """
    Find the integer shift s and rotation g maximizing <t, R_g f_s> / (||t|| ||f_s||).

    Args:
        template: Template volume t
        subtomogram: Subtomogram volume f, same grid size as t
        cfg: Optimizer configuration
        wedge: Missing-wedge mask of the subtomogram; the correlation is restricted to its kept region
        spec: Basis to use; derived from cfg and the grid size when omitted

    Returns:
        AlignmentResult with the best shift and rotation and search diagnostics

    Raises:
        GridSizeMismatchError: If the volumes differ in size
        DegenerateInputError: If either volume (or the masked subtomogram) has zero energy
    """
    started = time.perf_counter()
    timings: dict[str, float] = {}
    if template.n != subtomogram.n:
        raise GridSizeMismatchError(f"template size {template.n} differs from subtomogram size {subtomogram.n}")
    if template.norm() == 0.0 or subtomogram.norm() == 0.0:
        raise DegenerateInputError("template and subtomogram must both carry signal")

    if spec is None:
        spec = basis_for(template.n, cfg)
    tick = time.perf_counter()
    t_hat = expand(template, spec)
    timings["expand_template"] = time.perf_counter() - tick
    if t_hat.norm() == 0.0:
        raise DegenerateInputError("template expansion is zero (signal outside the unit ball)")
    subtomogram = masked_subtomogram(subtomogram, wedge)
    if subtomogram.norm() == 0.0:
        raise DegenerateInputError("the wedge mask removes the whole subtomogram")
    logger.info(f"Template expanded: l_max={spec.l_max}, lambda_cut={spec.lambda_cut:.3f}, {spec.size} coefficients")

    search = ShiftSearch(t_hat, subtomogram, cfg)
    workers = cfg.workers or os.cpu_count() or 1

    tick = time.perf_counter()
    coarse = coarse_shifts(cfg.shift_radius, cfg.shift_step)
    outcomes = {o.shift: o for o in search.run_all(coarse, workers)}
    best = min(outcomes.values(), key=_ranking_key)
    timings["coarse_search"] = time.perf_counter() - tick
    logger.info(f"Coarse shift search over {len(coarse)} shifts: best {best.shift} with score {best.score:.6f}")

    if cfg.shift_step > 1:
        tick = time.perf_counter()
        fine = [s for s in fine_shifts(best.shift, cfg.shift_radius, cfg.shift_step) if s not in outcomes]
        for outcome in search.run_all(fine, workers):
            outcomes[outcome.shift] = outcome
        best = min(outcomes.values(), key=_ranking_key)
        timings["fine_search"] = time.perf_counter() - tick
        logger.info(f"Fine shift search over {len(fine)} new shifts: best {best.shift} with score {best.score:.6f}")

    if best.search is None:
        raise DegenerateInputError("no shift overlaps the template")

    evaluations: dict[int, int] = {}
    for outcome in outcomes.values():
        if outcome.search is not None:
            for band, count in outcome.search.evaluations_per_band.items():
                evaluations[band] = evaluations.get(band, 0) + count

    refined: RefinementResult = best.search.best
    if not refined.converged:
        logger.warning(f"Best candidate at shift {best.shift} did not converge")
    result = AlignmentResult(
        shift=best.shift,
        rotation=refined.rotation,
        score=best.score,
        raw_score=refined.score,
        bands=best.search.bands,
        candidates_evaluated=sum(o.search.candidates for o in outcomes.values() if o.search is not None),
        shifts_evaluated=len(outcomes),
        evaluations_per_band=dict(sorted(evaluations.items())),
        wall_time=time.perf_counter() - started,
        timings=timings,
        converged=refined.converged,
        trace=refined.trace,
    )
    logger.info(f"Best alignment: shift {result.shift}, rotation {np.round(result.rotation.euler_degrees(), 3)} deg, score {result.score:.6f}")
    return result
