"""Experiment facade: single runs, lambda sweeps and temporal convergence studies."""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from ..cases.generators import case_quadrature_order, generate
from ..diagnostics.analysis import SlopeFit, dominant_period, fit_slope, growth_rate, observed_orders
from ..diagnostics.observables import DiagnosticsCollector
from ..discretization.grid import Mesh1D, l2_norm
from ..output.writer import RunWriter, SnapshotRecorder
from ..scheme.integrators import Observer, run
from ..scheme.operators import OperatorCache
from .exceptions import DivergenceError
from .models import (
    CaseId,
    CaseSpec,
    ExperimentConfig,
    HermiteBasisSpec,
    HermiteState,
    RunOutcome,
    RunSummary,
    SchemeConfig,
)

logger = logging.getLogger(__name__)


@dataclass
class ConvergenceRow:
    lam: float
    dt: float
    max_err0: float
    max_err1: float
    outcome: RunOutcome


@dataclass
class ConvergenceResult:
    alpha: float
    rows: list[ConvergenceRow]
    slope_err0: SlopeFit | None
    slope_err1: SlopeFit | None
    output_dir: Path | None = None


@dataclass
class APSweepRow:
    lam: float
    dt: float
    sup_err0: float
    sup_err1: float
    outcome: RunOutcome
    failure: str | None = None

    @property
    def ratio0(self) -> float:
        return self.sup_err0 / self.lam

    @property
    def ratio1(self) -> float:
        return self.sup_err1 / self.lam


@dataclass
class APSweepResult:
    alpha: float
    rows: list[APSweepRow]
    output_dir: Path | None = None

    def ratio_spread(self, lambdas: list[float] | None = None) -> float:
        """max/min of sup E0 / lambda over completed rows (optionally restricted)."""
        ratios = [
            r.ratio0
            for r in self.rows
            if r.outcome is RunOutcome.COMPLETED and (lambdas is None or r.lam in lambdas)
        ]
        if not ratios or min(ratios) <= 0:
            return math.nan
        return max(ratios) / min(ratios)


@dataclass
class TemporalStudyResult:
    reference_dt: float
    dts: list[float]
    errors: list[float]
    orders: list[float] = field(default_factory=list)
    output_dir: Path | None = None

    @property
    def min_order(self) -> float:
        return min((p for p in self.orders if not math.isnan(p)), default=math.nan)


class Experiment:
    """Runs the simulations described by an :class:`ExperimentConfig`."""

    def __init__(self, config: ExperimentConfig):
        """Initialize the experiment.

        Args:
            config: Validated experiment configuration.
        """
        self.config = config
        scheme = config.scheme
        self.mesh = Mesh1D.uniform(*config.case.domain, scheme.n_cells)
        self.mesh.require_odd()
        self.basis = HermiteBasisSpec(T0=scheme.T0, n_hermite=scheme.n_hermite)
        logger.info(
            f"Experiment '{config.name}': case={config.case.id.value}, N_x={self.mesh.n_cells}, "
            f"N_H={self.basis.n_hermite}, h={self.mesh.h:.4g}",
        )

    # ------------------------------------------------------------------
    # building blocks
    # ------------------------------------------------------------------

    def case_spec(self, lam: float | None = None, alpha: float | None = None) -> CaseSpec:
        case = self.config.case
        return CaseSpec(
            case=case.id,
            delta=float(case.delta),
            alpha=case.alpha if alpha is None else alpha,
            k_x=float(case.k_x),
            domain=tuple(case.domain),
            lam=self.config.scheme.lam if lam is None else lam,
            T0=self.basis.T0,
        )

    def scheme_config(
        self,
        lam: float | None = None,
        dt: float | None = None,
        order: int | None = None,
        t_final: float | None = None,
    ) -> SchemeConfig:
        scheme = self.config.scheme
        return SchemeConfig(
            dt=scheme.dt if dt is None else dt,
            t_final=scheme.t_final if t_final is None else t_final,
            order=scheme.order if order is None else order,
            lam=scheme.lam if lam is None else lam,
            mesh=self.mesh,
            basis=self.basis,
        )

    def initial_state(self, spec: CaseSpec) -> HermiteState:
        return generate(spec, self.mesh, self.basis, self.config.scheme.quadrature_order)

    def v_grid(self) -> np.ndarray:
        grid = self.config.output.v_grid
        return np.linspace(grid.v_min, grid.v_max, grid.n)

    # ------------------------------------------------------------------
    # single simulation
    # ------------------------------------------------------------------

    def simulate(
        self,
        lam: float | None = None,
        alpha: float | None = None,
        dt: float | None = None,
        order: int | None = None,
        output_dir: str | Path | None = None,
        write_snapshots: bool = True,
    ) -> tuple[RunSummary, DiagnosticsCollector, HermiteState | None]:
        """Run one simulation and optionally persist its artifacts.

        Divergence is reported through the summary's outcome instead of an
        exception. Returns the summary, the collected diagnostics and the
        final state (``None`` when the run diverged).
        """
        spec = self.case_spec(lam, alpha)
        cfg = self.scheme_config(spec.lam, dt, order)
        initial = self.initial_state(spec)

        collector = DiagnosticsCollector()
        observers: list[Observer] = [collector]
        writer = RunWriter(output_dir) if output_dir is not None else None
        if writer is not None and write_snapshots and self.config.output.snapshot_times:
            observers.append(
                SnapshotRecorder(
                    writer,
                    self.config.output.snapshot_times,
                    cfg.dt,
                    cfg.n_steps,
                    self.v_grid(),
                    deviation=self.config.output.snapshot_deviation,
                ),
            )

        cache = OperatorCache()
        final_state: HermiteState | None = None
        failure: str | None = None
        try:
            trajectory = run(cfg, initial, observers, cache)
            final_state = trajectory.state
            outcome = RunOutcome.COMPLETED
            steps, t_end = trajectory.steps, trajectory.t
        except DivergenceError as e:
            outcome = RunOutcome.DIVERGED
            steps, t_end = e.step - 1, (e.step - 1) * cfg.dt
            failure = str(e)

        summary = self._summarize(spec, cfg, collector, outcome, steps, t_end, failure)
        if writer is not None:
            writer.write_diagnostics(collector.records)
            writer.write_metadata(self._metadata(spec, cfg, summary, len(cache)))
            writer.finalize()
            summary.output_dir = str(writer.directory)
        logger.info(
            f"lambda={spec.lam:g}, dt={cfg.dt:g}: {outcome.value} after {steps} steps "
            f"(max E0 cont={summary.max_err0_cont:.3e})",
        )
        return summary, collector, final_state

    def _summarize(
        self,
        spec: CaseSpec,
        cfg: SchemeConfig,
        collector: DiagnosticsCollector,
        outcome: RunOutcome,
        steps: int,
        t_end: float,
        failure: str | None,
    ) -> RunSummary:
        summary = RunSummary(
            outcome=outcome,
            steps=steps,
            t_end=t_end,
            lam=spec.lam,
            dt=cfg.dt,
            max_err0_cont=collector.max_of("err0_cont"),
            max_err1_cont=collector.max_of("err1_cont"),
            sup_err0_disc=collector.max_of("err0_disc", start=1),
            sup_err1_disc=collector.max_of("err1_disc", start=2),
            max_reformulated_residual=collector.max_of("reformulated_residual"),
            mass_drift=collector.mass_drift(),
            max_abs_flux=collector.max_abs_flux(),
            energy_anomaly=collector.energy_anomaly(),
            failure=failure,
        )
        if summary.energy_anomaly:
            logger.warning("Total energy grew by more than 1% per unit time")
        try:
            summary.oscillation_period = dominant_period(
                collector.times, collector.series("potential_energy"),
            )
        except ValueError as e:
            logger.debug(f"No oscillation period: {e}")
        if spec.case is CaseId.TWO_STREAM:
            try:
                summary.growth_rate = growth_rate(collector.times, collector.series("e_norm"))
            except ValueError as e:
                logger.debug(f"No growth rate: {e}")
        return summary

    def _metadata(
        self, spec: CaseSpec, cfg: SchemeConfig, summary: RunSummary, operators_built: int,
    ) -> dict[str, Any]:
        from .. import __version__

        return {
            "version": __version__,
            "config": self.config.model_dump(mode="json", by_alias=True),
            "resolved": {
                "case": asdict(spec),
                "dt": cfg.dt,
                "t_final": cfg.t_final,
                "order": cfg.order,
                "lambda": cfg.lam,
                "gamma": cfg.gamma,
                "n_steps": cfg.n_steps,
                "n_modes": self.basis.n_modes,
                "T0": self.basis.T0,
                "quadrature_order": case_quadrature_order(
                    self.basis, self.config.scheme.quadrature_order,
                ),
                "operators_built": operators_built,
                "mesh": {
                    "a": self.mesh.a,
                    "b": self.mesh.b,
                    "n_cells": self.mesh.n_cells,
                    "h": self.mesh.h,
                    "regularity": self.mesh.regularity,
                    "uniform": self.mesh.uniform_flag,
                },
            },
            "summary": asdict(summary),
        }

    def run_single(self, output_dir: str | Path | None = None) -> RunSummary:
        """Run the configured simulation and write its artifacts.

        Args:
            output_dir: Target directory; defaults to ``output.directory``.
        """
        target = Path(output_dir or self.config.output.directory)
        summary, _, _ = self.simulate(output_dir=target)
        return summary

    # ------------------------------------------------------------------
    # sweeps
    # ------------------------------------------------------------------

    def convergence_dt(self, lam: float) -> float:
        sweep = self.config.sweep
        return min(sweep.dt_max, lam / sweep.steps_per_lambda)

    def run_convergence_sweep(
        self, output_dir: str | Path | None = None, alpha: float | None = None,
    ) -> ConvergenceResult:
        """Max-in-time continuous error functionals against lambda, with fitted slopes.

        Each lambda runs with dt = min(dt_max, lambda / steps_per_lambda).
        """
        alpha = self.config.case.alpha if alpha is None else alpha
        root = Path(output_dir) if output_dir is not None else None
        writer = RunWriter(root) if root is not None else None
        rows: list[ConvergenceRow] = []
        for lam in sorted(self.config.sweep_lambdas, reverse=True):
            dt = self.convergence_dt(lam)
            point_dir = root / f"lambda_{lam:g}" if root is not None else None
            summary, _, _ = self.simulate(
                lam=lam, alpha=alpha, dt=dt, output_dir=point_dir, write_snapshots=False,
            )
            rows.append(
                ConvergenceRow(lam, dt, summary.max_err0_cont, summary.max_err1_cont, summary.outcome),
            )

        completed = [r for r in rows if r.outcome is RunOutcome.COMPLETED]
        slope0 = slope1 = None
        if len(completed) >= 3:
            lams = [r.lam for r in completed]
            slope0 = fit_slope(lams, [r.max_err0 for r in completed])
            slope1 = fit_slope(lams, [r.max_err1 for r in completed])
            logger.info(f"Fitted slopes: E0 ~ lambda^{slope0.slope:.3f}, E1 ~ lambda^{slope1.slope:.3f}")
        else:
            logger.warning("Fewer than three completed sweep points; no slopes fitted")

        if writer is not None:
            writer.write_table(
                "convergence.csv",
                ("lambda", "dt", "max_err0_cont", "max_err1_cont", "outcome"),
                ((r.lam, r.dt, r.max_err0, r.max_err1, r.outcome.value) for r in rows),
            )
            slope_rows = [
                (name, fit.slope, fit.intercept, fit.r_squared)
                for name, fit in (("err0_cont", slope0), ("err1_cont", slope1))
                if fit is not None
            ]
            writer.write_table("slopes.csv", ("functional", "slope", "intercept", "r_squared"), slope_rows)
            writer.finalize()
        return ConvergenceResult(alpha, rows, slope0, slope1, root)

    def run_convergence_sweeps(self, output_dir: str | Path | None = None) -> list[ConvergenceResult]:
        """One convergence sweep per value of ``sweep.alphas``.

        With several alphas each sweep writes into ``alpha_<value>/`` below
        ``output_dir``.
        """
        alphas = self.config.sweep_alphas
        root = Path(output_dir) if output_dir is not None else None
        results = []
        for alpha in alphas:
            target = root / f"alpha_{alpha:g}" if root is not None and len(alphas) > 1 else root
            logger.info(f"Convergence sweep at alpha={alpha:g}")
            results.append(self.run_convergence_sweep(target, alpha))
        return results

    def run_ap_sweep(
        self, output_dir: str | Path | None = None, alpha: float | None = None,
    ) -> APSweepResult:
        """Discrete error functionals at fixed dt over a downward lambda sweep."""
        alpha = self.config.case.alpha if alpha is None else alpha
        root = Path(output_dir) if output_dir is not None else None
        writer = RunWriter(root) if root is not None else None
        dt = self.config.scheme.dt
        rows: list[APSweepRow] = []
        for lam in sorted(self.config.sweep_lambdas, reverse=True):
            point_dir = root / f"lambda_{lam:g}" if root is not None else None
            summary, _, _ = self.simulate(
                lam=lam, alpha=alpha, dt=dt, output_dir=point_dir, write_snapshots=False,
            )
            rows.append(
                APSweepRow(
                    lam, dt, summary.sup_err0_disc, summary.sup_err1_disc, summary.outcome, summary.failure,
                ),
            )
            if summary.outcome is RunOutcome.DIVERGED:
                logger.warning(f"lambda={lam:g} diverged: {summary.failure}")

        if writer is not None:
            writer.write_table(
                "ap_sweep.csv",
                ("lambda", "dt", "sup_err0_disc", "sup_err1_disc", "err0_over_lambda", "err1_over_lambda", "outcome"),
                ((r.lam, r.dt, r.sup_err0, r.sup_err1, r.ratio0, r.ratio1, r.outcome.value) for r in rows),
            )
            writer.finalize()
        return APSweepResult(alpha, rows, root)

    def run_temporal_study(self, output_dir: str | Path | None = None) -> TemporalStudyResult:
        """Self-convergence in dt against a fine reference run at the configured lambda."""
        sweep = self.config.sweep
        dts = sorted(sweep.dts or [self.config.scheme.dt], reverse=True)
        reference_dt = sweep.reference_dt or min(dts) / 8.0
        t_final = self.config.scheme.t_final

        def final_coeffs(dt: float) -> np.ndarray:
            steps = t_final / dt
            if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
                logger.warning(f"t_final={t_final:g} is not a multiple of dt={dt:g}")
            summary, _, state = self.simulate(dt=dt, write_snapshots=False)
            if state is None:
                raise DivergenceError(summary.steps + 1, summary.t_end, math.inf)
            return state.coeffs

        reference = final_coeffs(reference_dt)
        errors = [
            math.sqrt(sum(l2_norm(row, self.mesh) ** 2 for row in final_coeffs(dt) - reference))
            for dt in dts
        ]
        orders = observed_orders(dts, errors)
        logger.info(f"Observed temporal orders: {', '.join(f'{p:.3f}' for p in orders)}")

        root = Path(output_dir) if output_dir is not None else None
        if root is not None:
            # the order column pairs each dt with the coarser one before it
            writer = RunWriter(root)
            writer.write_table(
                "temporal_order.csv",
                ("dt", "error", "observed_order"),
                zip(dts, errors, [math.nan, *orders], strict=True),
            )
            writer.finalize()
        return TemporalStudyResult(reference_dt, dts, errors, orders, root)
