"""Command-line entry point for heralded states, probabilities, grids and detectors."""

import argparse
import math
import os
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from dotenv import load_dotenv
from scipy.stats import poisson

from config.constants import (
    DEFAULT_COMPARE_TOLERANCE,
    DEFAULT_OUTPUT_DIR,
    EXIT_CONFIG,
    EXIT_DOMAIN,
    EXIT_IMPROBABLE,
    EXIT_OK,
    EXIT_TOLERANCE,
    HUSIMI_COMPARE_TOLERANCE,
    SQUEEZE_TAIL_TOLERANCE,
    TRUNCATION_HEADROOM,
)
from src.catgen.analytic import squeezed_cats
from src.catgen.analytic.squeezed_cats import CatKind, CatParams, PhasePoint
from src.catgen.detection.chopping import (
    ChoppingDetector,
    posterior,
    response_matrix,
)
from src.catgen.detection.mixtures import (
    BinomialSource,
    MixedConditional,
    mixed_added,
    mixed_subtracted,
    subtraction_prior,
)
from src.catgen.optics.beam_splitter import (
    BeamSplitter,
    added_probability,
    photon_added_density,
    photon_subtracted_density,
    subtracted_probability,
)
from src.catgen.phasespace import transforms
from src.catgen.phasespace.grid import eval_grid, quad_slice
from src.catgen.states.fock_space import (
    DensityMatrix,
    FockVector,
    auto_truncation,
    fidelity,
    make_amplitudes,
    make_coherent,
    make_fock,
    make_squeezed_vacuum,
    make_thermal,
    mean_photon_number,
    photon_number_distribution,
)
from src.catgen.tools.scenario import Scenario, parse_scenario, scenario_summary
from src.catgen.utils.artifact_writer import ArtifactWriter
from src.catgen.utils.errors import (
    CatgenError,
    ConfigError,
    ConvergenceError,
    DomainError,
    ImprobableOutcomeError,
    ToleranceError,
    ZeroNormError,
)
from src.catgen.utils.run_log import RunLogger

load_dotenv()

COMMANDS = ("generate", "probability", "grid", "detector", "compare")
ROUTES = ("closed", "ladder", "pipeline")

Representations = Tuple[Callable, Callable, Callable]


class CatgenRunner:
    """Runs one command for one scenario and writes its artifacts."""

    def __init__(
        self,
        scenario: Scenario,
        out_dir: Path,
        numeric: Optional[bool] = None,
        tolerance: Optional[float] = None,
        verbose: bool = False,
        logger: Optional[Callable[[str], None]] = None,
    ):
        """
        Initialize runner.

        Args:
            scenario: Parsed scenario
            out_dir: Directory receiving CSV and JSON artifacts
            numeric: True forces the Fock-space route, False the closed forms,
                None picks closed forms whenever they apply
            tolerance: Override for the compare thresholds
            verbose: Enable verbose logging
            logger: Optional logging function
        """
        self.scenario = scenario
        self.numeric = numeric
        self.tolerance = tolerance
        self.verbose = verbose
        self.logger = logger or (lambda msg: None)
        self.writer = ArtifactWriter(out_dir, verbose=verbose, logger=self.logger)
        self.params = scenario.splitter.params()
        self.splitter = BeamSplitter(self.params, verbose=verbose, logger=self.logger)
        self.summary: Dict[str, Any] = {
            "scenario": scenario_summary(scenario),
            "probabilities": {},
            "deviations": {},
            "diagnostics": {},
        }

    # Scenario interpretation

    @property
    def is_mixture(self) -> bool:
        return (
            self.scenario.detector.kind == "chopping"
            or self.scenario.source.kind == "binomial"
        )

    @property
    def has_closed_form(self) -> bool:
        return self.scenario.input.kind == "squeezed_vacuum" and (
            self.scenario.operation.kind in ("add", "subtract")
        )

    def route(self) -> str:
        """Pick closed forms, ladder operators or the two-mode unitary pipeline."""
        if self.numeric is False:
            if not self.has_closed_form:
                raise ConfigError(
                    "Closed forms need a squeezed vacuum input "
                    "and an add or subtract operation"
                )
            return "closed"
        if self.numeric is None and self.has_closed_form:
            return "closed"
        if self.numeric or self.scenario.operation.kind == "condition":
            return "pipeline"
        return "ladder"

    def _cat_params(self, count: Optional[int] = None) -> CatParams:
        operation = self.scenario.operation
        mode = CatKind.ADDED if operation.kind == "add" else CatKind.SUBTRACTED
        return CatParams(
            self.scenario.effective_kappa(),
            operation.count if count is None else count,
            mode,
        )

    def _headroom(self) -> int:
        n0, m2 = self.scenario.operation.outcome
        return n0 + m2

    def signal_state(self):
        """Input state of mode 1, truncated per scenario or by the tail rules."""
        spec = self.scenario.input
        headroom = self._headroom()
        n_max = spec.n_max
        if spec.kind == "squeezed_vacuum":
            kappa = self.scenario.input_kappa()
            if n_max is None:
                n_max = auto_truncation(kappa, headroom)
            state = make_squeezed_vacuum(kappa, n_max)
        elif spec.kind == "fock":
            if n_max is None:
                n_max = spec.n + headroom + TRUNCATION_HEADROOM
            state = make_fock(spec.n, n_max)
        elif spec.kind == "coherent":
            if n_max is None:
                tail = int(poisson.isf(SQUEEZE_TAIL_TOLERANCE, abs(spec.alpha) ** 2))
                n_max = tail + headroom + TRUNCATION_HEADROOM
            state = make_coherent(spec.alpha, n_max)
        elif spec.kind == "thermal":
            if n_max is None:
                ratio = spec.mean_photons / (1.0 + spec.mean_photons)
                body = 0
                if ratio > 0.0:
                    body = math.ceil(math.log(SQUEEZE_TAIL_TOLERANCE) / math.log(ratio))
                n_max = body + headroom + TRUNCATION_HEADROOM
            state = make_thermal(spec.mean_photons, n_max)
        else:
            state = make_amplitudes(spec.amplitudes)
        self.logger(f"[TRUNCATION] {spec.kind} input at n_max={state.n_max}")
        return state

    def conditional_state(self, route: str):
        """(state, probability) of the single heralded outcome."""
        if route not in ROUTES:
            raise ConfigError(f"Unknown route '{route}'")
        n0, m2 = self.scenario.operation.outcome
        if route == "closed":
            params = self._cat_params()
            kappa = self.scenario.input_kappa()
            t, r = self.params.transmittance, self.params.reflectance
            if params.mode is CatKind.ADDED:
                probability = squeezed_cats.prob_added(n0, kappa, t, r)
            else:
                probability = squeezed_cats.prob_subtracted(m2, kappa, t, r)
            self.logger(
                f"[ANALYTIC] kappa'={params.kappa_prime:.6g} P={probability:.6e}"
            )
            return squeezed_cats.cat_state(params), probability

        signal = self.signal_state()
        kind = self.scenario.operation.kind
        if route == "pipeline":
            result = self.splitter.condition(signal, n0, m2)
        elif isinstance(signal, DensityMatrix) and kind == "add":
            result = photon_added_density(signal, n0, self.params)
        elif isinstance(signal, DensityMatrix):
            result = photon_subtracted_density(signal, m2, self.params)
        elif kind == "add":
            result = self.splitter.add_photons(signal, n0)
        else:
            result = self.splitter.subtract_photons(signal, m2)
        return result.state, result.probability

    def mixture(self) -> MixedConditional:
        scenario = self.scenario
        kappa = scenario.input_kappa()
        if scenario.detector.kind == "chopping":
            det = ChoppingDetector(
                scenario.detector.channels, scenario.detector.efficiency
            )
            mixed = mixed_subtracted(det, scenario.detector.clicks, kappa, self.params)
        else:
            src = BinomialSource(scenario.source.trials, scenario.source.success)
            mixed = mixed_added(src, kappa, self.params, scenario.source.weighting)
        self.logger(
            f"[MIXTURE] {len(mixed.counts)} components, "
            f"P={mixed.detect_probability:.6e}, "
            f"trivial weight={mixed.trivial_weight:.3e}"
        )
        return mixed

    def representations(self, route: str) -> Representations:
        """(quadrature(x, phi), wigner(x, p), husimi(x, p)) for the heralded state."""
        numeric = route != "closed"
        if self.is_mixture:
            mixed = self.mixture()
            return (
                lambda x, phi: mixed.quad_dist(x, phi, numeric),
                lambda x, p: mixed.wigner(x, p, numeric),
                lambda x, p: mixed.husimi(x, p, numeric),
            )
        if not numeric:
            params = self._cat_params()
            return (
                lambda x, phi: squeezed_cats.quad_dist(params, x, phi),
                lambda x, p: squeezed_cats.wigner(params, x, p),
                lambda x, p: squeezed_cats.husimi(params, x, p),
            )
        state, _ = self.conditional_state(route)
        return (
            lambda x, phi: transforms.quad_dist_numeric(state, x, phi),
            lambda x, p: transforms.wigner_numeric(state, x, p),
            lambda x, p: transforms.husimi_numeric(state, x, p),
        )

    # Commands

    def generate(self):
        if self.is_mixture:
            mixed = self.mixture()
            self.writer.write_csv(
                "mixture_weights.csv",
                zip(mixed.counts, mixed.weights),
                header=["count", "weight"],
            )
            for count, component in zip(mixed.counts, mixed.components):
                self._write_state(f"component_{count}.csv", component)
            self.summary["probabilities"]["detect"] = mixed.detect_probability
            diagnostics = self.summary["diagnostics"]
            diagnostics["trivial_weight"] = mixed.trivial_weight
            diagnostics["weights"] = dict(zip(mixed.counts, mixed.weights))
            return

        state, probability = self.conditional_state(self.route())
        self._write_state("state.csv", state)
        self.summary["probabilities"]["outcome"] = probability
        self.summary["diagnostics"].update(
            {
                "n_max": state.n_max,
                "mean_photon_number": mean_photon_number(state),
            }
        )

    def _write_state(self, name: str, state):
        if isinstance(state, FockVector):
            rows = [(n, c.real, c.imag) for n, c in enumerate(state.amplitudes)]
            self.writer.write_csv(name, rows, header=["n", "re", "im"])
        else:
            rows = [
                (i, j, state.entries[i, j].real, state.entries[i, j].imag)
                for i in range(state.dim)
                for j in range(state.dim)
            ]
            self.writer.write_csv(name, rows, header=["row", "col", "re", "im"])

    def probability(self):
        signal = self.signal_state()
        populations = photon_number_distribution(signal)
        operation = self.scenario.operation
        kappa = self.scenario.input_kappa() if self.has_closed_form else None
        t, r = self.params.transmittance, self.params.reflectance
        rows: List[Tuple[Any, ...]] = []
        for count in range(self.scenario.output.max_count + 1):
            closed: Any = ""
            ideal: Any = ""
            if operation.kind == "add":
                if kappa is not None:
                    closed = squeezed_cats.prob_added(count, kappa, t, r)
                ideal = added_probability(populations, count, self.params)
                general = self.splitter.probability(signal, count, 0)
            elif operation.kind == "subtract":
                if kappa is not None:
                    closed = squeezed_cats.prob_subtracted(count, kappa, t, r)
                ideal = subtracted_probability(populations, count, self.params)
                general = self.splitter.probability(signal, 0, count)
            else:
                general = self.splitter.probability(signal, operation.reference, count)
            rows.append((count, closed, ideal, general))
        self.writer.write_csv(
            "probabilities.csv",
            rows,
            header=["count", "closed_form", "ideal_sum", "general_sum"],
        )
        self.summary["probabilities"]["table"] = {
            str(count): {
                "closed_form": closed,
                "ideal_sum": ideal,
                "general_sum": general,
            }
            for count, closed, ideal, general in rows
        }

    def grid(self):
        quadrature, wigner, husimi = self.representations(self.route())
        wigner_grid = eval_grid(wigner, self.scenario.grid)
        husimi_grid = eval_grid(husimi, self.scenario.grid)
        self.writer.write_csv("wigner.csv", wigner_grid.to_rows())
        self.writer.write_csv("husimi.csv", husimi_grid.to_rows())
        self.writer.write_csv(
            "quadrature.csv", self._slice_rows(quadrature), header=["phi", "x", "value"]
        )
        self.logger(f"[GRID] {self.scenario.grid.n_x}x{self.scenario.grid.n_p} points")
        self.summary["diagnostics"].update(
            {
                "wigner_integral": wigner_grid.integral(),
                "husimi_integral": husimi_grid.integral(),
                "wigner_min": float(np.min(wigner_grid.values)),
            }
        )

    def _slice_rows(self, quadrature: Callable) -> List[Tuple[float, float, float]]:
        grid = self.scenario.grid
        points = self.scenario.output.slice_points
        rows = []
        for phi in self.scenario.output.phases:
            sampled = quad_slice(quadrature, phi, grid.x_min, grid.x_max, points)
            rows.extend((phi, x, value) for x, value in sampled)
        return rows

    def detector(self):
        scenario = self.scenario
        if scenario.detector.kind != "chopping":
            raise ConfigError("The detector command needs detector.kind = chopping")
        det = ChoppingDetector(scenario.detector.channels, scenario.detector.efficiency)
        clicks = scenario.detector.clicks
        prior = subtraction_prior(scenario.input_kappa(), self.params)
        response = response_matrix(det, prior.size - 1)
        weights, evidence = posterior(det, clicks, prior)
        n_k, n_m = response.shape
        self.writer.write_csv(
            "response.csv",
            [(k, m, response[k, m]) for k in range(n_k) for m in range(n_m)],
            header=["k", "m", "probability"],
        )
        likelihood = response[clicks]
        self.writer.write_csv(
            "posterior.csv",
            [(m, prior[m], likelihood[m], weights[m]) for m in range(prior.size)],
            header=["m", "prior", "likelihood", "posterior"],
        )
        self.logger(f"[POSTERIOR] k={clicks} evidence={evidence:.6e}")
        self.summary["probabilities"]["evidence"] = evidence
        diagnostics = self.summary["diagnostics"]
        diagnostics["prior_cutoff"] = prior.size - 1
        diagnostics["posterior_mean"] = float(np.dot(np.arange(prior.size), weights))

    def compare(self):
        """Closed forms against the two-mode pipeline; ToleranceError on mismatch."""
        if not self.has_closed_form:
            raise ConfigError(
                "compare needs a squeezed vacuum input and an add or subtract operation"
            )
        base = DEFAULT_COMPARE_TOLERANCE
        husimi_limit = HUSIMI_COMPARE_TOLERANCE
        if self.tolerance is not None:
            base = husimi_limit = self.tolerance
        deviations: Dict[str, float] = {}
        limits: Dict[str, float] = {}

        analytic = self.representations("closed")
        numeric = self.representations("pipeline")
        for name, index, limit in (("wigner", 1, base), ("husimi", 2, husimi_limit)):
            exact = eval_grid(analytic[index], self.scenario.grid)
            approx = eval_grid(numeric[index], self.scenario.grid)
            deviations[name], limits[name] = exact.max_deviation(approx), limit
            residual = np.abs(exact.values - approx.values)
            worst = np.unravel_index(np.argmax(residual), residual.shape)
            point = PhasePoint(
                float(exact.x_axis[worst[0]]), float(exact.p_axis[worst[1]])
            )
            self.summary["diagnostics"][f"{name}_worst_point"] = [point.x, point.p]
        exact_rows = np.array(self._slice_rows(analytic[0]))
        approx_rows = np.array(self._slice_rows(numeric[0]))
        deviations["quadrature"] = float(
            np.max(np.abs(exact_rows[:, 2] - approx_rows[:, 2]))
        )
        limits["quadrature"] = base

        if not self.is_mixture:
            closed_state, closed_p = self.conditional_state("closed")
            pipeline_state, pipeline_p = self.conditional_state("pipeline")
            overlap = fidelity(closed_state, pipeline_state)
            deviations["state_infidelity"] = 1.0 - overlap
            deviations["probability_relative"] = abs(closed_p - pipeline_p) / max(
                closed_p, 1e-300
            )
            limits["state_infidelity"] = base
            limits["probability_relative"] = base

        self.summary["deviations"] = deviations
        self.summary["diagnostics"]["tolerances"] = limits
        failed = {k: v for k, v in deviations.items() if not v <= limits[k]}
        for key, value in sorted(deviations.items()):
            self.logger(f"[COMPARE] {key}: {value:.3e} (limit {limits[key]:.1e})")
        if failed:
            raise ToleranceError(
                "Analytic and numeric results disagree: "
                + ", ".join(f"{k}={v:.3e}" for k, v in sorted(failed.items())),
                failed,
            )

    def run(self, command: str) -> Dict[str, Any]:
        """Execute a command; summary.json is written even when compare fails."""
        if command not in COMMANDS:
            raise ConfigError(f"Unknown command '{command}'")
        self.summary["command"] = command
        try:
            getattr(self, command)()
        finally:
            if command == "compare" or sys.exc_info()[0] is None:
                self.writer.write_json("summary.json", self.summary)
        return self.summary


def _exit_code(error: CatgenError) -> int:
    if isinstance(error, ConfigError):
        return EXIT_CONFIG
    if isinstance(error, ImprobableOutcomeError):
        return EXIT_IMPROBABLE
    if isinstance(error, ToleranceError):
        return EXIT_TOLERANCE
    if isinstance(error, (DomainError, ConvergenceError, ZeroNormError)):
        return EXIT_DOMAIN
    return EXIT_CONFIG


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point."""
    parser = argparse.ArgumentParser(
        description="Photon-added and photon-subtracted squeezed vacuum states",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Heralded state for a scenario
  python -m src.catgen.tools.catgen generate --config config/fig1.cfg

  # Wigner/Husimi grids and quadrature slices from the Fock-space route
  python -m src.catgen.tools.catgen grid --config config/fig2.cfg --numeric

  # Closed forms against the numerical route, exit 4 on disagreement
  python -m src.catgen.tools.catgen compare -c config/fig1.cfg --tolerance 1e-6

Exit codes: 0 ok, 1 usage/config, 2 domain, 3 improbable outcome, 4 tolerance
""",
    )

    parser.add_argument("command", choices=COMMANDS, help="What to compute")

    parser.add_argument(
        "--config",
        "-c",
        required=True,
        help="Scenario file (key = value, see config/fig1.cfg)",
    )

    parser.add_argument(
        "--out",
        "-o",
        help="Output directory (default: $CATGEN_OUTPUT_DIR or output)",
    )

    route = parser.add_mutually_exclusive_group()
    route.add_argument(
        "--numeric",
        dest="numeric",
        action="store_const",
        const=True,
        help="Use the truncated Fock-space route",
    )
    route.add_argument(
        "--analytic",
        dest="numeric",
        action="store_const",
        const=False,
        help="Use the closed forms",
    )

    parser.add_argument(
        "--tolerance",
        "-t",
        type=float,
        help=f"Compare threshold (default: {DEFAULT_COMPARE_TOLERANCE:g}, "
        f"Husimi {HUSIMI_COMPARE_TOLERANCE:g})",
    )

    parser.add_argument(
        "--verbose",
        "-v",
        action="store_true",
        help="Enable verbose logging",
    )

    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_CONFIG

    logger = RunLogger(verbose=args.verbose)
    out_dir = Path(args.out or os.getenv("CATGEN_OUTPUT_DIR", DEFAULT_OUTPUT_DIR))

    try:
        scenario = parse_scenario(Path(args.config))
        logger(f"[RUN] {args.command} {args.config} -> {out_dir}")
        runner = CatgenRunner(
            scenario,
            out_dir,
            numeric=args.numeric,
            tolerance=args.tolerance,
            verbose=args.verbose,
            logger=logger,
        )
        runner.run(args.command)
    except CatgenError as e:
        logger(f"[ERROR] {type(e).__name__}: {e}")
        print(f"ERROR: {e}", file=sys.stderr)
        return _exit_code(e)

    logger(f"[DONE] {args.command}: {', '.join(p.name for p in runner.writer.written)}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
