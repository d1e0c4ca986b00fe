"""
Command-line front end for the BV spectral-triple workbench.

This is the main entry point. It provides commands for:
- Verification suites (--check triple,cme,qme,hochschild,brst,lie)
- Truncated cohomology of the BV, BRST and Hochschild complexes (--cohomology)
- JSON/CSV exports of triples, actions, coalgebra pairs and matrices (--export)

Exit codes: 0 success, 1 verification failure, 2 usage or configuration error.
"""

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from bv_theory import (
    ActionFunctional,
    GaugeFixingFermion,
    MalformedFermion,
    NotInvariant,
    auxiliary_spectrum,
    brst_differential,
    casimir_action,
    check_cme,
    check_qme,
    closed_form_extended_action,
    differential_table,
    extended_action,
    gauge_fix,
    gauge_invariance_residual,
    on_shell_membership,
    spectral_action,
    total_action,
    total_action_from_triple,
)
from complexes import (
    ArithmeticMode,
    TruncationWindow,
    brst_complex,
    bv_complex,
    check_d_squared,
    cohomology_dims,
    differential_increment,
    export_matrices,
    hochschild_conjugacy,
)
from exact_scalars import RadicalScalar
from expressions import ExpressionError, parse_polynomial, parse_scalar, parse_univariate
from graded_poly import GradedPolynomial, bv_laplacian
from hochschild import (
    build_pair,
    check_coalgebra_axioms,
    check_coboundary_square,
    check_phi_square,
    generator_sample,
    hochschild_complex,
    sample_cochains,
)
from lie_structure import verify_lie_axioms
from schemas import (
    CheckReport,
    CohomologyEnvelope,
    ConfigError,
    ModelConfig,
    SuiteResult,
    config_hash,
    load_config,
)
from spectral_triples import (
    BVSpectralTriple,
    FiniteSpectralTriple,
    TotalSpectralTriple,
    build_bv_triple,
    build_total_triple,
    check_real_structure,
)
from utils import LOG_LEVELS, ensure_directory_exists, logger, setup_logging, write_json

CHECKS = ("triple", "cme", "qme", "hochschild", "brst", "lie")
EXPORTS = ("triple", "actions", "pair", "matrices")
RANDOM_COCHAINS = 100


def thread_limit() -> int:
    """Worker threads for matrix assembly, from BVW_THREADS (default 1)."""
    raw = os.environ.get("BVW_THREADS", "1")
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"BVW_THREADS must be a positive integer, got '{raw}'") from None
    if value < 1:
        raise ConfigError(f"BVW_THREADS must be a positive integer, got '{raw}'")
    return value


# Model assembly

@dataclass
class Model:
    config: ModelConfig
    base: FiniteSpectralTriple
    bv: BVSpectralTriple
    total: TotalSpectralTriple
    s0: Optional[ActionFunctional]
    psi: Optional[GaugeFixingFermion]
    window: TruncationWindow
    mode: ArithmeticMode
    threads: int

    def require_action(self) -> ActionFunctional:
        if self.s0 is None:
            raise ConfigError("This command needs one of f, casimir or initial_action in the config")
        return self.s0

    def extended(self) -> ActionFunctional:
        return extended_action(self.bv, self.require_action())

    def fermion(self) -> GaugeFixingFermion:
        return self.psi or GaugeFixingFermion.standard(self.total.variables)


def _real(text, label: str) -> RadicalScalar:
    value = parse_scalar(str(text))
    if not value.is_real():
        raise ConfigError(f"{label} must be real, got {value}")
    return value.re


def dirac_from_config(config: ModelConfig) -> np.ndarray:
    d0 = np.empty((config.n, config.n), dtype=object)
    for j in range(config.n):
        for k in range(config.n):
            d0[j, k] = parse_scalar(str(config.d0[j][k])) if config.d0 else parse_scalar(0)
    return d0


def initial_action_from_config(config: ModelConfig, base: FiniteSpectralTriple,
                               bv: BVSpectralTriple) -> Optional[ActionFunctional]:
    if config.f is not None:
        if isinstance(config.f, str):
            coefficients = parse_univariate(config.f)
        else:
            coefficients = [_real(c, "f coefficients") for c in config.f]
        return spectral_action(base, coefficients, bv.variables)
    if config.casimir is not None:
        g = {int(k): [_real(c, f"g_{k} coefficients") for c in values] for k, values in config.casimir.items()}
        return casimir_action(config.n, g, bv.variables)
    if config.initial_action is not None:
        body = parse_polynomial(config.initial_action, bv.variables)
        if body.has_starred() or any(var.ghost_degree != 0 for var in body.variables()):
            raise ConfigError("initial_action may only contain the fields x1..x_{n^2}")
        return ActionFunctional(body)
    return None


def build_model(config: ModelConfig, config_dir: str = ".", window: Optional[TruncationWindow] = None,
                mode: Optional[str] = None) -> Model:
    """Assemble triples, S_0 and Psi from a validated configuration."""
    base = FiniteSpectralTriple(config.n, dirac_from_config(config))
    bv = build_bv_triple(base)
    total = build_total_triple(bv)
    s0 = initial_action_from_config(config, base, bv)
    psi_text = config.gauge_fixing.text(config_dir)
    psi = GaugeFixingFermion(parse_polynomial(psi_text, total.variables)) if psi_text else None
    if window is None:
        w = config.window
        window = TruncationWindow(w.ghost_min, w.ghost_max, w.poly_max)
    return Model(config, base, bv, total, s0, psi, window, ArithmeticMode(mode or config.mode.value), thread_limit())


# Verification suites

def suite_lie(model: Model) -> SuiteResult:
    report = verify_lie_axioms(model.bv.f, model.bv.basis)
    return SuiteResult(
        name="lie",
        passed=report.passed,
        residuals={
            "antisymmetry_violations": str(len(report.antisymmetry_violations)),
            "jacobi_violations": str(len(report.jacobi_violations)),
            "reconstruction_violations": str(len(report.reconstruction_violations)),
        },
        notes=[f"{len(model.bv.f.table)} nonzero structure constants for n={model.bv.n}"],
    )


def suite_triple(model: Model) -> SuiteResult:
    residuals: Dict[str, str] = {}
    notes: List[str] = []
    passed = True
    for triple in (model.bv, model.total):
        report = check_real_structure(triple)
        notes.extend(report.notes)
        for name, failures in report.checks.items():
            residuals[f"{report.kind}.{name}"] = failures[0] if failures else "0"
        passed = passed and report.passed

    zero = GradedPolynomial()
    ferm = extended_action(model.bv, zero, check_invariance=False).body
    closed = closed_form_extended_action(model.bv, zero).body
    residuals["fermionic_identity"] = str(ferm - closed)
    aux = total_action_from_triple(model.total, zero).body - total_action(closed, model.total).body
    residuals["total_fermionic_identity"] = str(aux)
    passed = passed and (ferm - closed).is_zero() and aux.is_zero()

    spectrum = auxiliary_spectrum(0).families[0]
    degrees = (model.total.variables.B[1].ghost_degree, model.total.variables.h[1].ghost_degree)
    residuals["auxiliary_degrees"] = "0" if degrees == (spectrum.deg_B, spectrum.deg_h) else str(degrees)
    passed = passed and degrees == (spectrum.deg_B, spectrum.deg_h)
    return SuiteResult(name="triple", passed=passed, residuals=residuals, notes=notes)


def suite_cme(model: Model) -> SuiteResult:
    s0 = model.require_action()
    try:
        s_ext = model.extended()
    except NotInvariant:
        residual = gauge_invariance_residual(s0, model.bv)
        return SuiteResult(name="cme", passed=False, residuals={"invariance_residual": str(residual)},
                           notes=["S_0 is not invariant; no extended action exists"])
    cme = check_cme(s_ext)
    closed = closed_form_extended_action(model.bv, s0).body - s_ext.body
    s_t = total_action(s_ext, model.total)
    total_cme = check_cme(s_t)
    return SuiteResult(
        name="cme",
        passed=cme.is_zero() and closed.is_zero() and total_cme.is_zero(),
        residuals={"cme_residual": str(cme), "closed_form": str(closed), "total_cme_residual": str(total_cme)},
    )


def suite_qme(model: Model) -> SuiteResult:
    s_ext = model.extended()
    report = check_qme([s_ext])
    laplacian = bv_laplacian(s_ext.body)
    residuals = {f"order_{m}": str(r) for m, r in enumerate(report.orders)}
    residuals["laplacian"] = str(laplacian)
    return SuiteResult(name="qme", passed=report.passed and laplacian.is_zero(), residuals=residuals)


def suite_hochschild(model: Model) -> SuiteResult:
    s_ext = model.extended()
    residuals: Dict[str, str] = {}
    notes: List[str] = []
    passed = True
    for pair in (build_pair(model.bv, s_ext), build_pair(model.total, total_action(s_ext, model.total))):
        label = pair.kind.value
        axioms = check_coalgebra_axioms(pair)
        residuals[f"{label}.axioms"] = "0" if axioms.passed else json.dumps(axioms.to_dict(), sort_keys=True)
        notes.append(f"{label}: comodule compatibility sign {axioms.comodule_sign}")
        sample = generator_sample(pair) + sample_cochains(pair.variables, RANDOM_COCHAINS, seed=0)
        square = check_phi_square(pair, sample)
        residuals[f"{label}.commuting_square"] = "0" if square.passed else square.failures[0]
        square_failures = check_coboundary_square(pair, model.window)
        residuals[f"{label}.d_H_squared"] = "0" if not square_failures else ", ".join(square_failures[:5])
        passed = passed and axioms.passed and square.passed and not square_failures
    return SuiteResult(name="hochschild", passed=passed, residuals=residuals, notes=notes)


def suite_brst(model: Model) -> SuiteResult:
    notes: List[str] = []
    if model.psi is None:
        notes.append("no gauge-fixing fermion configured; using sum_q B_q x_q")
    psi = model.fermion()
    s_t = total_action(model.extended(), model.total)
    s_gf = gauge_fix(s_t, psi)
    residuals = {"starred_after_gauge_fixing": str(sum(1 for v in s_gf.body.variables() if v.is_starred))}
    passed = not s_gf.body.has_starred()

    ghost_sector = model.total.variables.ghost_sector()
    for var in ghost_sector:
        once = brst_differential(s_t, psi, GradedPolynomial.variable(var))
        twice = brst_differential(s_t, psi, once)
        if twice.is_zero():
            continue
        membership = on_shell_membership(twice, s_gf, ghost_sector, mode=model.mode)
        residuals[f"d2[{var.id}]"] = str(twice) + ("" if membership.in_span else " (off shell)")
        passed = passed and membership.in_span

    pair = build_pair(model.total, s_t, psi)
    square = check_phi_square(pair, generator_sample(pair))
    residuals["gauge_fixed.commuting_square"] = "0" if square.passed else square.failures[0]
    return SuiteResult(name="brst", passed=passed and square.passed, residuals=residuals, notes=notes)


SUITES = {
    "triple": suite_triple,
    "cme": suite_cme,
    "qme": suite_qme,
    "hochschild": suite_hochschild,
    "brst": suite_brst,
    "lie": suite_lie,
}


# Commands

def cmd_check(model: Model, which: Sequence[str], out_dir: str) -> int:
    """Run the selected suites and write check_report.json; returns the exit status."""
    report = CheckReport(config_hash=config_hash(model.config), mode=model.mode.value)
    for name in which:
        logger.info(f"Running {name} suite")
        try:
            result = SUITES[name](model)
        except NotInvariant as exc:
            result = SuiteResult(name=name, passed=False, notes=[f"no extended action: {exc}"])
        if not result.passed:
            logger.warning(f"Suite {name} failed: {result.residuals}")
        report.suites.append(result)
    write_json(os.path.join(out_dir, "check_report.json"), report.to_payload())
    return 0 if report.passed else 1


def cmd_cohomology(model: Model, out_dir: str) -> int:
    """Truncated BV, Hochschild and (with Psi) BRST cohomology."""
    s_ext = model.extended()
    envelope = CohomologyEnvelope(config_hash=config_hash(model.config), mode=model.mode.value)
    bv = bv_complex(s_ext.body, model.bv.variables.all(), model.window, model.mode,
                    model.config.extension_bound, model.threads)
    reports = [cohomology_dims(bv)]
    envelope.d_squared["bv"] = {str(k): v for k, v in check_d_squared(bv).items()}

    pair = build_pair(model.bv, s_ext)
    hoch = hochschild_complex(pair, model.window, model.mode, model.config.extension_bound, model.threads)
    reports.append(cohomology_dims(hoch))
    envelope.conjugacy = hochschild_conjugacy(bv, hoch).to_dict()

    if model.psi is not None:
        s_t = total_action(s_ext, model.total)
        brst = brst_complex(lambda c: brst_differential(s_t, model.psi, c), model.total.variables.ghost_sector(),
                            model.window, differential_increment(s_t.body), model.mode,
                            model.config.extension_bound, model.threads)
        reports.append(cohomology_dims(brst))
        envelope.d_squared["brst"] = {str(k): v for k, v in check_d_squared(brst).items()}

    envelope.sections = {report.name: report.to_dict() for report in reports}
    write_json(os.path.join(out_dir, "cohomology_report.json"), envelope.model_dump(mode="json"))
    with open(os.path.join(out_dir, "cohomology_tables.txt"), "w") as handle:
        for report in reports:
            handle.write(f"[{report.name}] window {report.window.to_dict()} mode {report.mode.value}\n")
            handle.write(report.to_frame().to_string(index=False))
            handle.write("\n\n")
    nonzero = any(v for section in envelope.d_squared.values() for v in section.values())
    return 1 if nonzero or not envelope.conjugacy.get("passed", True) else 0


def cmd_export(model: Model, what: Sequence[str], out_dir: str) -> int:
    """Write the requested JSON/CSV exports with stable ordering; every JSON carries the config hash and mode."""
    stamp = {"config_hash": config_hash(model.config), "mode": model.mode.value}
    for item in what:
        if item == "triple":
            write_json(os.path.join(out_dir, "triple.json"),
                       {"bv": model.bv.to_json(), "total": model.total.to_json()}, stamp)
        elif item == "actions":
            s_ext = model.extended()
            s_t = total_action(s_ext, model.total)
            payload = {
                "S_0": model.s0.to_json(),
                "S~": s_ext.to_json(),
                "S_t": s_t.to_json(),
                "differentials": {k: v.to_json() for k, v in differential_table(s_t, model.total.variables).items()},
                "auxiliary_spectrum": [auxiliary_spectrum(level).to_dict() for level in range(3)],
            }
            if model.psi is not None:
                payload["S_t|Psi"] = gauge_fix(s_t, model.psi).to_json()
            write_json(os.path.join(out_dir, "actions.json"), payload, stamp)
        elif item == "pair":
            s_ext = model.extended()
            s_t = total_action(s_ext, model.total)
            write_json(os.path.join(out_dir, "pair_bv.json"), build_pair(model.bv, s_ext).to_json(), stamp)
            write_json(os.path.join(out_dir, "pair_total.json"), build_pair(model.total, s_t).to_json(), stamp)
            if model.psi is not None:
                write_json(os.path.join(out_dir, "pair_gauge_fixed.json"),
                           build_pair(model.total, s_t, model.psi).to_json(), stamp)
        elif item == "matrices":
            directory = os.path.join(out_dir, "matrices")
            ensure_directory_exists(directory)
            bv = bv_complex(model.extended().body, model.bv.variables.all(), model.window, model.mode,
                            model.config.extension_bound, model.threads)
            export_matrices(bv, directory, stamp)
    return 0


# Argument parsing

def _split_list(text: str, allowed: Sequence[str], flag: str) -> List[str]:
    items = [item.strip() for item in text.split(",") if item.strip()]
    unknown = [item for item in items if item not in allowed]
    if unknown or not items:
        raise argparse.ArgumentTypeError(f"{flag} accepts a comma-separated subset of {', '.join(allowed)}")
    return items


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bv-workbench",
        description="Exact BV/BRST workbench for U(n) finite spectral triples",
    )
    parser.add_argument("--config", required=True, help="Path to the JSON model configuration")
    parser.add_argument("--check", type=lambda s: _split_list(s, CHECKS, "--check"),
                        help=f"Comma-separated suites: {','.join(CHECKS)}")
    parser.add_argument("--cohomology", action="store_true", help="Compute truncated cohomology")
    parser.add_argument("--export", type=lambda s: _split_list(s, EXPORTS, "--export"),
                        help=f"Comma-separated exports: {','.join(EXPORTS)}")
    parser.add_argument("--window", type=TruncationWindow.parse, help="Override the window as kmin:kmax:D")
    parser.add_argument("--mode", choices=[m.value for m in ArithmeticMode], help="Rank arithmetic")
    parser.add_argument("--out", help="Output directory (default: output_dir from the config)")
    parser.add_argument("--log-level", default="INFO", choices=list(LOG_LEVELS))
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    setup_logging(args.log_level)
    if not (args.check or args.cohomology or args.export):
        logger.error("Nothing to do: give --check, --cohomology or --export")
        return 2

    try:
        config = load_config(args.config)
        model = build_model(config, os.path.dirname(os.path.abspath(args.config)), args.window, args.mode)
        out_dir = args.out or config.output_dir
        ensure_directory_exists(out_dir)

        status = 0
        if args.check:
            status = max(status, cmd_check(model, args.check, out_dir))
        if args.cohomology:
            status = max(status, cmd_cohomology(model, out_dir))
        if args.export:
            status = max(status, cmd_export(model, args.export, out_dir))
        return status
    except (ConfigError, ExpressionError, MalformedFermion, NotInvariant) as exc:
        logger.error(f"Configuration error: {exc}")
        return 2
    except ValueError as exc:
        logger.error(f"Invalid input: {exc}")
        return 2
    except Exception as exc:  # noqa: BLE001
        logger.exception(f"Unexpected error: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
