"""
Frequency-marching Newton refinement of a candidate rotation.

Each band of the schedule is optimized in ZYZ Euler coordinates with Levenberg-damped
Newton steps. Near beta in {0, pi} the iterate is re-expressed as g = h o Q with a fixed
90 degree rotation Q about x, and h is optimized instead; the kernel is pre-rotated so
that C(h o Q) is again a plain Euler-angle sum.
"""

import logging

import numpy as np

from src.model.alignment import RefinementResult, TraceEntry
from src.model.correlation import XiBlocks
from src.model.rotation import Rotation
from src.settings.settings_model import OptimizerConfig
from src.steer.steering import wigner_D
from src.xcorr.kernel import evaluate, evaluate_euler_complex, value_and_derivatives

logger = logging.getLogger(__name__)

CHART_OFFSET = Rotation.from_axis_angle((1.0, 0.0, 0.0), np.pi / 2)
# beta distance from a pole (radians) at which the other chart is used
CHART_SWITCH = 0.05
MAX_DAMPED_RETRIES = 3
LINE_SEARCH_HALVINGS = 40
# model gains below this fraction of |C| are at the level of rounding error
ROUNDING_GAIN = 1e-13


class NewtonRefiner:
    """
    Band-by-band ascent of C(g) for one correlation kernel.

    Args:
        xi: Kernel at one shift
        cfg: Optimizer configuration (Newton iteration cap, tolerances, damping)
    """

    def __init__(self, xi: XiBlocks, cfg: OptimizerConfig):
        self.xi = xi
        self.cfg = cfg
        self._offset_xi: XiBlocks | None = None

    def _chart_kernel(self, offset: bool) -> XiBlocks:
        if not offset:
            return self.xi
        if self._offset_xi is None:
            stack = wigner_D(self.xi.l_max, CHART_OFFSET)
            blocks = [x @ d.T for x, d in zip(self.xi.blocks, stack.blocks, strict=True)]
            self._offset_xi = XiBlocks(l_max=self.xi.l_max, blocks=blocks, shift=self.xi.shift)
        return self._offset_xi

    @staticmethod
    def _near_pole(beta: float) -> bool:
        return beta < CHART_SWITCH or beta > np.pi - CHART_SWITCH

    def _chart_coordinates(self, g: Rotation, offset: bool) -> np.ndarray:
        h = g.compose(CHART_OFFSET.inverse()) if offset else g
        return np.array(h.euler)

    @staticmethod
    def _from_chart(angles: np.ndarray, offset: bool) -> Rotation:
        h = Rotation.from_euler(*angles)
        return h.compose(CHART_OFFSET) if offset else h

    def start(self, rotation: Rotation, last_band: int) -> RefinementResult:
        """Initial state for a schedule ending at last_band."""
        score = evaluate(self.xi, rotation, last_band)
        return RefinementResult(rotation=rotation, score=score, start=rotation, start_score=score, converged=False)

    def refine_band(self, state: RefinementResult, band: int) -> RefinementResult:
        """
        Run damped Newton ascent of C at one band, starting from the current iterate of state.

        Returns:
            Updated state; converged reflects this band's termination
        """
        evaluations = dict(state.evaluations_per_band)
        count = evaluations.get(band, 0)

        current = state.rotation
        offset = self._near_pole(current.euler[1])
        angles = self._chart_coordinates(current, offset)
        kernel = self._chart_kernel(offset)
        mu = self.cfg.step_damping
        trace = list(state.trace)
        converged = False
        diverged = False
        step_kind = "start"

        for iteration in range(self.cfg.newton_max_iter):
            value, grad, hess = value_and_derivatives(kernel, *angles, band)
            count += 1
            grad_norm = float(np.linalg.norm(grad))
            trace.append(TraceEntry(band=band, iteration=iteration, euler=current.euler, score=value, gradient_norm=grad_norm, step=step_kind))
            scale = max(abs(value), 1e-300)
            if grad_norm <= self.cfg.grad_tol * scale:
                converged = True
                break

            accepted = None
            newton_gain = None
            eigen = np.linalg.eigvalsh(hess)
            hess_scale = max(float(np.max(np.abs(eigen))), 1e-300)
            for _ in range(MAX_DAMPED_RETRIES):
                lam = max(float(eigen[-1]), 0.0) + mu * hess_scale
                step = np.linalg.solve(lam * np.eye(3) - hess, grad)
                norm = float(np.linalg.norm(step))
                if norm > self.cfg.max_step:
                    step *= self.cfg.max_step / norm
                gain = float(grad @ step + 0.5 * step @ hess @ step)
                if newton_gain is None:
                    newton_gain = gain
                trial = angles + step
                trial_value = evaluate_euler_complex(kernel, *trial, band).real
                count += 1
                if trial_value > value or (gain <= ROUNDING_GAIN * scale and trial_value >= value - ROUNDING_GAIN * scale):
                    accepted = (trial, trial_value, "newton")
                    mu = max(mu / 10.0, 1e-12)
                    break
                mu *= 10.0

            if accepted is None:
                direction = grad / grad_norm
                t = self.cfg.max_step
                for _ in range(LINE_SEARCH_HALVINGS):
                    trial = angles + t * direction
                    trial_value = evaluate_euler_complex(kernel, *trial, band).real
                    count += 1
                    if trial_value > value:
                        accepted = (trial, trial_value, "gradient")
                        break
                    t *= 0.5

            if accepted is None and newton_gain is not None and newton_gain <= 10.0 * ROUNDING_GAIN * scale:
                # stationary to working precision
                converged = True
                break

            if accepted is None:
                diverged = True
                logger.warning(f"Refinement at band {band} stalled at score {value:.6e} with gradient norm {grad_norm:.3e}")
                break

            angles, _, step_kind = accepted
            current = self._from_chart(angles, offset)
            if self._near_pole(angles[1]):
                offset = not offset
                logger.debug(f"Band {band}: switching to the {'offset' if offset else 'identity'} Euler chart")
                angles = self._chart_coordinates(current, offset)
                kernel = self._chart_kernel(offset)
        else:
            logger.debug(f"Band {band}: newton_max_iter={self.cfg.newton_max_iter} reached")

        evaluations[band] = count
        return RefinementResult(
            rotation=current,
            score=state.score,
            start=state.start,
            start_score=state.start_score,
            converged=converged and not diverged,
            diverged=diverged,
            trace=trace,
            evaluations_per_band=evaluations,
        )

    def finish(self, state: RefinementResult, last_band: int) -> RefinementResult:
        """Score the final iterate at the last band."""
        return state.model_copy(update={"score": evaluate(self.xi, state.rotation, last_band)})

    def refine(self, start: Rotation, bands: list[int]) -> RefinementResult:
        """Refine start through every band of the schedule in ascending order."""
        if not bands:
            raise ValueError("band schedule must be non-empty")
        state = self.start(start, bands[-1])
        for band in bands:
            state = self.refine_band(state, band)
            if state.diverged:
                break
        return self.finish(state, bands[-1])


def refine(xi: XiBlocks, start: Rotation, bands: list[int], cfg: OptimizerConfig) -> RefinementResult:
    """
    Frequency-marching Newton refinement.

    Args:
        xi: Kernel at one shift
        start: Candidate rotation
        bands: Increasing band schedule
        cfg: Optimizer configuration

    Returns:
        RefinementResult with the final rotation, its score at the last band, the
        per-iteration trace and evaluation counts
    """
    return NewtonRefiner(xi, cfg).refine(start, sorted(bands))
