"""
Implementations of the ballalign sub-commands.

Every command takes the parsed arguments and the loaded settings and returns an exit
code. Reports go to JSON files; standard output carries a short human summary (or CSV).
"""

import argparse
import json
import logging
import math
import sys
import time
from pathlib import Path

import numpy as np
import pandas as pd

from src import __version__
from src.basis.expansion import expand, synthesize
from src.model.basis import BallExpansion, BasisSpec
from src.model.correlation import WedgeMask, XiBlocks
from src.model.phantom import PhantomSpec
from src.model.report import BenchReport, MethodStats, RunReport
from src.model.rotation import Rotation
from src.model.volume import Volume, grid_coordinates
from src.optimize.aligner import ShiftSearch, align, basis_for, masked_subtomogram, search_rotation
from src.optimize.bands import select_bands
from src.optimize.baseline import exhaustive_baseline
from src.optimize.landscape import landscape
from src.settings.settings_model import AppSettings, OptimizerConfig
from src.volio.metrics import geodesic_degrees, shift_error
from src.volio.mrc import read_mrc, write_mrc
from src.volio.phantom import make_phantom, read_truth, write_truth
from src.xcorr.energy import energy_ratios, eval_cost_fraction
from src.xcorr.kernel import xi_coefficients
from src.xcorr.wedge import GridSizeMismatchError, build_wedge_mask

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NOT_CONVERGED = 3


def optimizer_config(args: argparse.Namespace, settings: AppSettings) -> OptimizerConfig:
    """
    Configured optimizer with command-line overrides applied and validated.

    When --lmax drops below the configured band schedule and no --bands are given,
    bands are selected from the energy ratio instead.
    """
    values = settings.optimizer.model_dump()
    lmax = getattr(args, "lmax", None)
    bands = getattr(args, "bands", None)
    if lmax is not None:
        values["l_max"] = lmax
    if bands is not None:
        values["fixed_bands"] = bands
    elif lmax is not None and values["fixed_bands"] and values["fixed_bands"][-1] > lmax:
        logger.warning(f"Configured bands {values['fixed_bands']} exceed --lmax {lmax}; selecting bands from the energy ratio")
        values["fixed_bands"] = None

    overrides = {
        "lambda_cut": getattr(args, "lambda_cut", None),
        "shift_radius": getattr(args, "shift_radius", None),
        "shift_step": getattr(args, "shift_step", None),
        "workers": getattr(args, "threads", None),
    }
    values.update({k: v for k, v in overrides.items() if v is not None})
    return OptimizerConfig.model_validate(values)


def wedge_for(args: argparse.Namespace, settings: AppSettings, n: int) -> tuple[WedgeMask | None, float | None]:
    if getattr(args, "wedge", None) is None:
        return None, None
    theta = settings.wedge.theta_max if args.wedge < 0 else args.wedge
    return build_wedge_mask(n, theta, settings.wedge.tilt_axis), theta


def read_pair(args: argparse.Namespace) -> tuple[Volume, Volume]:
    template = read_mrc(args.template)
    subtomo = read_mrc(args.subtomo)
    if template.n != subtomo.n:
        raise GridSizeMismatchError(f"template is {template.n}^3 but subtomogram is {subtomo.n}^3")
    return template, subtomo


def kernel_at(template: Volume, subtomo: Volume, cfg: OptimizerConfig, wedge: WedgeMask | None, shift: tuple[int, int, int]) -> tuple[XiBlocks, BasisSpec, BallExpansion]:
    """xi at one shift, with the basis and the template expansion it was built from."""
    spec = basis_for(template.n, cfg)
    t_hat = expand(template, spec)
    xi = xi_coefficients(t_hat, expand(masked_subtomogram(subtomo, wedge), spec, shift), shift)
    return xi, spec, t_hat


def _write_json(text: str, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info(f"Wrote {path}")


def cmd_phantom(args: argparse.Namespace, settings: AppSettings) -> int:
    """Write template.mrc, subtomo.mrc and truth.json into --out-dir."""
    defaults = settings.phantom
    spec = PhantomSpec(
        n=args.n,
        blobs=args.blobs if args.blobs is not None else defaults.blobs,
        support_radius=defaults.support_radius,
        sigma_range=defaults.sigma_range,
        amplitude_range=defaults.amplitude_range,
        seed=args.seed,
        snr=args.snr,
        wedge_theta=args.wedge,
        true_rotation=Rotation.from_euler_degrees(*args.rot_euler),
        true_shift=args.shift,
        generator=defaults.generator,
    )
    template, subtomo, truth = make_phantom(spec)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_mrc(template, out_dir / "template.mrc")
    write_mrc(subtomo, out_dir / "subtomo.mrc")
    write_truth(truth, out_dir / "truth.json")
    print(f"phantom n={spec.n} seed={spec.seed} rotation(zyz deg)={np.round(truth.euler_zyz_degrees, 4).tolist()} shift={list(truth.shift)} -> {out_dir}")
    return EXIT_OK


def cmd_align(args: argparse.Namespace, settings: AppSettings) -> int:
    """Run the alignment and write a RunReport; exit 3 when the best candidate did not converge."""
    cfg = optimizer_config(args, settings)
    template, subtomo = read_pair(args)
    wedge, theta = wedge_for(args, settings, template.n)

    result = align(template, subtomo, cfg, wedge=wedge)
    xi, _, _ = kernel_at(template, subtomo, cfg, wedge, result.shift)

    geodesic = None
    shift_err = None
    if args.truth is not None:
        truth = read_truth(args.truth)
        geodesic = geodesic_degrees(result.rotation, truth.expected_alignment())
        shift_err = shift_error(result.shift, truth.shift)

    report = RunReport(
        version=__version__,
        template=str(args.template),
        subtomo=str(args.subtomo),
        config=cfg.model_dump(),
        wedge_theta=theta,
        shift=result.shift,
        quaternion=result.rotation.q,
        euler_zyz_degrees=result.rotation.euler_degrees(),
        score=result.score,
        raw_score=result.raw_score,
        converged=result.converged,
        bands=result.bands,
        candidates_evaluated=result.candidates_evaluated,
        shifts_evaluated=result.shifts_evaluated,
        evaluations_per_band=result.evaluations_per_band,
        energy_ratios=energy_ratios(xi).tolist(),
        timings=result.timings,
        wall_time=result.wall_time,
        trace=result.trace,
        geodesic_error_deg=geodesic,
        shift_error=shift_err,
    )
    _write_json(report.model_dump_json(indent=2), args.report)

    summary = f"shift={list(result.shift)} rotation(zyz deg)={np.round(report.euler_zyz_degrees, 4).tolist()} score={result.score:.6f} converged={result.converged}"
    if geodesic is not None:
        summary += f" geodesic_error={geodesic:.4f} deg shift_error={list(shift_err)}"
    print(summary)

    if not result.converged:
        logger.warning("Alignment did not converge; the best-effort result was written")
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def bandscan_table(xi: XiBlocks) -> pd.DataFrame:
    """Rows (L, energy_ratio, eval_cost_fraction) for L = 0..l_max."""
    degrees = np.arange(xi.l_max + 1)
    return pd.DataFrame(
        {
            "L": degrees,
            "energy_ratio": energy_ratios(xi),
            "eval_cost_fraction": [eval_cost_fraction(int(L), xi.l_max) for L in degrees],
        }
    )


def cmd_bandscan(args: argparse.Namespace, settings: AppSettings) -> int:
    cfg = optimizer_config(args, settings)
    template, subtomo = read_pair(args)
    wedge, _ = wedge_for(args, settings, template.n)
    xi, _, _ = kernel_at(template, subtomo, cfg, wedge, args.shift)

    table = bandscan_table(xi)
    if args.out is None:
        table.to_csv(sys.stdout, index=False)
    else:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        table.to_csv(args.out, index=False)
        logger.info(f"Wrote {args.out}")
    return EXIT_OK


def cmd_bench(args: argparse.Namespace, settings: AppSettings) -> int:
    """
    Evaluation counts and accuracy of the refinement against the exhaustive grid.

    Both methods work on the same kernel xi at one shift and score at the last band.
    """
    cfg = optimizer_config(args, settings)
    template, subtomo = read_pair(args)
    wedge, _ = wedge_for(args, settings, template.n)

    shift = args.shift if args.shift is not None else align(template, subtomo, cfg, wedge=wedge).shift
    spec = basis_for(template.n, cfg)
    search = ShiftSearch(expand(template, spec), masked_subtomogram(subtomo, wedge), cfg)
    xi = search.kernel(shift)
    bands = search.bands_for(xi)

    tick = time.perf_counter()
    ours = search_rotation(xi, bands, cfg)
    ours_time = time.perf_counter() - tick
    ours_evaluations = sum(ours.evaluations_per_band.values())

    tick = time.perf_counter()
    base_rotation, base_score, base_evaluations = exhaustive_baseline(xi, bands[-1], math.radians(args.baseline_step))
    base_time = time.perf_counter() - tick

    ours_error = base_error = None
    if args.truth is not None:
        expected = read_truth(args.truth).expected_alignment()
        ours_error = geodesic_degrees(ours.best.rotation, expected)
        base_error = geodesic_degrees(base_rotation, expected)

    report = BenchReport(
        version=__version__,
        l_max=cfg.l_max,
        l_cut=bands[-1],
        baseline_step_deg=args.baseline_step,
        shift=shift,
        ours=MethodStats(evaluations=ours_evaluations, wall_time=ours_time, quaternion=ours.best.rotation.q, score=ours.best.score, geodesic_error_deg=ours_error),
        baseline=MethodStats(evaluations=base_evaluations, wall_time=base_time, quaternion=base_rotation.q, score=base_score, geodesic_error_deg=base_error),
        evaluation_ratio=base_evaluations / max(ours_evaluations, 1),
        methods_agreement_deg=geodesic_degrees(ours.best.rotation, base_rotation),
    )
    _write_json(report.model_dump_json(indent=2), args.report)
    print(f"evaluations ours={ours_evaluations} baseline={base_evaluations} ratio={report.evaluation_ratio:.2f} agreement={report.methods_agreement_deg:.3f} deg")
    return EXIT_OK if ours.best.converged else EXIT_NOT_CONVERGED


def cmd_expand(args: argparse.Namespace, settings: AppSettings) -> int:
    """Write coefficients to an .npz archive and a JSON summary with per-degree energy."""
    cfg = optimizer_config(args, settings)
    volume = read_mrc(args.input)
    spec = basis_for(volume.n, cfg)
    expansion = expand(volume, spec)

    arrays = {"l_max": np.array(spec.l_max), "lambda_cut": np.array(spec.lambda_cut)}
    for l in range(spec.l_max + 1):
        arrays[f"roots_{l}"] = spec.roots[l]
        arrays[f"coeffs_{l}"] = expansion.blocks[l]
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    np.savez(out, **arrays)
    logger.info(f"Wrote {out}")

    # continuous L2 energy of the voxels inside the unit ball
    n = volume.n
    x, y, z = grid_coordinates(n)
    inside = x**2 + y**2 + z**2 < 1.0
    voxel_energy = float(np.sum(volume.data[inside] ** 2)) * (2.0 / n) ** 3

    summary = {
        "input": str(args.input),
        "n": n,
        "l_max": spec.l_max,
        "lambda_cut": spec.lambda_cut,
        "coefficients": spec.size,
        "norm": expansion.norm(),
        "captured_energy_fraction": expansion.norm() ** 2 / voxel_energy if voxel_energy > 0 else None,
        "energy_per_degree": expansion.energy_per_degree().tolist(),
    }
    text = json.dumps(summary, indent=2)
    if args.summary is None:
        print(text)
    else:
        _write_json(text, args.summary)

    if args.synthesize is not None:
        write_mrc(synthesize(expansion, n, volume.voxel_size), args.synthesize)
        logger.info(f"Wrote band-limited reconstruction to {args.synthesize}")
    return EXIT_OK


def plot_landscape(table: pd.DataFrame, path: str | Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    bands = sorted(table["band"].unique())
    fig, axes = plt.subplots(1, len(bands), figsize=(5 * len(bands), 4), squeeze=False)
    for ax, band in zip(axes[0], bands, strict=True):
        part = table[table["band"] == band]
        grid = part.pivot(index="beta", columns="alpha", values="score")
        ax.imshow(grid.to_numpy(), aspect="auto", origin="upper", extent=(0.0, 360.0, 180.0, 0.0), cmap="viridis")
        ax.set_title(f"L = {band}")
        ax.set_xlabel("alpha (deg)")
        ax.set_ylabel("beta (deg)")
    fig.tight_layout()
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150)
    plt.close(fig)


def cmd_landscape(args: argparse.Namespace, settings: AppSettings) -> int:
    cfg = optimizer_config(args, settings)
    template, subtomo = read_pair(args)
    wedge, _ = wedge_for(args, settings, template.n)
    xi, _, _ = kernel_at(template, subtomo, cfg, wedge, args.shift)
    bands = list(cfg.fixed_bands) if cfg.fixed_bands is not None else select_bands(xi, cfg.band_thresholds)

    table, sign_changes = landscape(xi, bands, math.radians(args.gamma), args.n_alpha, args.n_beta)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(args.out, index=False)
    logger.info(f"Wrote {args.out}")
    if args.plot is not None:
        plot_landscape(table, args.plot)
        logger.info(f"Wrote {args.plot}")

    for band in bands:
        print(f"L={band} sign_changes={sign_changes[band]}")
    return EXIT_OK


COMMANDS = {
    "phantom": cmd_phantom,
    "align": cmd_align,
    "bandscan": cmd_bandscan,
    "bench": cmd_bench,
    "expand": cmd_expand,
    "landscape": cmd_landscape,
}
