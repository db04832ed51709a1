"""
CLI Entry Point.

Command-line interface for the generalised Jacobi flux reconstruction
toolkit. Handles argument parsing, configuration, running the experiment
subcommands and writing their CSV outputs and run manifest.
"""
import argparse
import logging
import math
import sys
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from src import __version__
from src.config import RunConfig, parse_config
from src.corrections import (
    extract_iota,
    correction_table,
    iota_crit,
    iota_of_sd,
    stability_residual,
)
from src.errors import ConfigError, GjfrError
from src.fr1d import (
    LinearAdvection,
    Mesh1D,
    ViscousBurgers,
    build_operators,
    l2_error,
    physical_points,
    project_initial,
    rhs_advection,
    rhs_burgers,
    total_integral,
)
from src.schemes import SCHEME_DEFINITIONS, correction_pair, resolve_scheme
from src.storage import OutputStore
from src.timeint import advance, get_rk, rk_table, stability_coefficients
from src.turbulence import (
    TurbulenceConfig,
    argmax_initial,
    ensemble_run,
    summary,
    synthesize_initial,
    turbulence_intensity,
)
from src.vonneumann import (
    cfl_limit,
    convergence_rate,
    dispersion_dissipation,
    error_surface,
    sweep,
)

SUBCOMMANDS = (
    "corrections", "vn-converge", "vn-cfl", "vn-dispersion", "vn-error",
    "solve", "burgers-ensemble", "rk-table",
)


def default_sweep_values() -> np.ndarray:
    """alpha = beta grid on [-0.99, 0.5] with log refinement around 0."""
    linear = np.linspace(-0.99, 0.5, 31)
    near_zero = np.logspace(-4, -1, 13)
    values = np.concatenate([linear, near_zero, -near_zero, [0.0]])
    return np.unique(np.round(values, 12))


def sweep_grid(config: RunConfig):
    """(alpha, beta) points for the selected sweep."""
    values = default_sweep_values()
    if config.sweep == "diagonal":
        return [(float(v), float(v)) for v in values]
    if config.sweep == "alpha":
        return [(float(v), config.beta) for v in values]
    return [(config.alpha, float(v)) for v in values]


def _sweep_scheme(config: RunConfig):
    if not SCHEME_DEFINITIONS[config.scheme]["sweepable"]:
        raise ConfigError(f"scheme '{config.scheme}' fixes alpha and beta; sweep qdg, sd or gjfr")
    iota = config.iota if config.scheme == "gjfr" else None

    def make(alpha: float, beta: float):
        return resolve_scheme(config.scheme, config.p, alpha, beta, iota)
    return make


def cmd_corrections(config: RunConfig, store: OutputStore, progress: bool):
    """Correction function samples and modal coefficients."""
    params = config.params
    pair = correction_pair(config.scheme, params, config.c)
    store.write_csv(correction_table(pair, np.linspace(-1.0, 1.0, 201)), "corrections.csv")
    n = params.p + 2
    store.write_csv(pd.DataFrame({
        "i": range(n),
        "h_left": pair.h_left.as_array(n),
        "h_right": pair.h_right.as_array(n),
    }), "modal.csv")
    store.write_csv(pd.DataFrame([{
        "p": params.p,
        "alpha": params.alpha,
        "beta": params.beta,
        "iota": params.iota,
        "iota_extracted": extract_iota(pair),
        "iota_crit": iota_crit(params.p, params.alpha, params.beta),
        "iota_sd": iota_of_sd(params.p, params.alpha, params.beta),
        "stability_residual": stability_residual(pair),
    }]), "scheme.csv")


def cmd_vn_converge(config: RunConfig, store: OutputStore, progress: bool):
    """Convergence rate map over (alpha, beta)."""
    make = _sweep_scheme(config)
    k = config.k if config.k is not None else math.pi / 2.0
    frame = sweep(
        sweep_grid(config),
        lambda a, b: convergence_rate(make(a, b), config.theta, k,
                                      point_rule=config.point_rule, periods=config.periods,
                                      modes=config.error_modes),
        "rate", jobs=config.jobs, progress=progress,
    )
    store.write_csv(frame, "rates.csv")


def cmd_vn_cfl(config: RunConfig, store: OutputStore, progress: bool):
    """CFL limit map over (alpha, beta)."""
    make = _sweep_scheme(config)
    rk = get_rk(config.rk)
    frame = sweep(
        sweep_grid(config),
        lambda a, b: cfl_limit(make(a, b), config.point_rule, rk, config.theta, n_k=config.n_k),
        "cfl", jobs=config.jobs, progress=progress,
    )
    store.write_csv(frame, "cfl.csv")


def cmd_vn_dispersion(config: RunConfig, store: OutputStore, progress: bool):
    """Dispersion and dissipation of the tracked modes."""
    k_hat = np.linspace(math.pi / 128, math.pi, 128)
    frame = dispersion_dissipation(config.params, config.point_rule, config.theta, k_hat)
    store.write_csv(frame, "dispersion.csv")


def cmd_vn_error(config: RunConfig, store: OutputStore, progress: bool):
    """Semi-discrete error surface over wavenumber and time."""
    k_hat = np.linspace(math.pi / 64, math.pi, 64)
    periods = np.logspace(0, math.log10(config.periods), 16)
    frame = error_surface(config.params, config.point_rule, config.theta, k_hat, periods)
    store.write_csv(frame, "error_surface.csv")


def cmd_solve(config: RunConfig, store: OutputStore, progress: bool):
    """Single solve: advection of sin(x), or Burgers from one random field."""
    params = config.params
    ops = build_operators(params, config.point_rule, correction_pair(config.scheme, params, config.c))
    mesh = Mesh1D.uniform(config.elements)
    rk = get_rk(config.rk)
    dx = mesh.length / mesh.n_elements

    if config.equation == "advection":
        flux = LinearAdvection(1.0)
        tau = cfl_limit(params, config.point_rule, rk, config.theta, n_k=min(config.n_k, 64))
        state = project_initial(np.sin, mesh, ops)
        dt0 = config.dt or 0.5 * tau * dx

        def rhs(u):
            return rhs_advection(u, mesh, ops, flux, config.theta)

        def exact(x):
            return np.sin(x - config.t_end)
    else:
        turb = TurbulenceConfig(scheme=params, dof=config.elements * (params.p + 1), mu=config.mu,
                                u_mean=config.u_mean, ensemble=1, seed=config.seed)
        flux = ViscousBurgers(config.mu)
        state = project_initial(synthesize_initial(turb, 0), mesh, ops)
        dt0 = config.dt or config.cfl * dx / max(abs(config.u_mean), 1e-12)
        exact = None

        def rhs(u):
            return rhs_burgers(u, mesh, ops, flux)

    if config.t_end > 0 and dt0 <= 0:
        raise ConfigError("no stable explicit time step for this scheme")
    n_steps = math.ceil(config.t_end / dt0 - 1e-9) if config.t_end > 0 else 0
    dt = config.t_end / n_steps if n_steps else 0.0
    initial_total = total_integral(state, mesh, ops) if ops.weights is not None else float("nan")
    state = advance(rk, rhs, state, dt, n_steps, progress=progress, desc="solve")

    x = physical_points(mesh, ops)
    store.write_csv(pd.DataFrame({"x": x.ravel(), "u": state.ravel()}), "solution.csv")
    row = {"dt": dt, "steps": n_steps, "t_end": config.t_end,
           "integral_drift": (total_integral(state, mesh, ops) - initial_total
                              if ops.weights is not None else float("nan"))}
    if exact is not None:
        row["l2_error"] = l2_error(state, mesh, ops, exact)
    store.write_csv(pd.DataFrame([row]), "solve_summary.csv")


def _turbulence_config(config: RunConfig) -> TurbulenceConfig:
    return TurbulenceConfig(
        scheme=config.params,
        dof=config.dof,
        mu=config.mu,
        u_mean=config.u_mean,
        cfl=config.cfl,
        t_end=config.t_end,
        ensemble=config.ensemble,
        seed=config.seed,
        dt=config.dt,
        rk=config.rk,
        point_rule=config.point_rule,
    )


def cmd_burgers_ensemble(config: RunConfig, store: OutputStore, progress: bool):
    """Ensemble Burgers turbulence spectrum with Q-factor and cut-off."""
    turb = _turbulence_config(config)
    dt, n_steps = turb.time_step()
    print(f"Burgers ensemble: M={turb.ensemble}, dof={turb.dof}, dt={dt:.6g}, steps={n_steps}")
    print(f"Initial turbulence intensity {turbulence_intensity(turb):.5f}, "
          f"E(k,0) peaks at k={argmax_initial(turb)}")
    spectrum = ensemble_run(turb, jobs=config.jobs, progress=progress)
    store.write_csv(spectrum.to_frame(), "spectrum.csv")
    store.write_csv(spectrum.compensated_frame(), "compensated.csv")
    store.write_csv(summary(spectrum), "summary.csv")
    if spectrum.excluded:
        print(f"Excluded {len(spectrum.excluded)} diverged run(s): {' '.join(spectrum.excluded)}")


def cmd_rk_table(config: RunConfig, store: OutputStore, progress: bool):
    """Runge-Kutta coefficient table and stability polynomial."""
    scheme = get_rk(config.rk)
    table = rk_table(scheme)
    store.write_csv(table, "rk_table.csv")
    coeffs = stability_coefficients(scheme)
    store.write_csv(pd.DataFrame({"power": range(coeffs.size), "coefficient": coeffs}),
                    "stability_polynomial.csv")
    print(table.to_string(index=False))


HANDLERS: Dict[str, Callable[[RunConfig, OutputStore, bool], None]] = {
    "corrections": cmd_corrections,
    "vn-converge": cmd_vn_converge,
    "vn-cfl": cmd_vn_cfl,
    "vn-dispersion": cmd_vn_dispersion,
    "vn-error": cmd_vn_error,
    "solve": cmd_solve,
    "burgers-ensemble": cmd_burgers_ensemble,
    "rk-table": cmd_rk_table,
}


def run_subcommand(name: str, config: RunConfig, progress: bool = True) -> List[str]:
    """
    Runs one subcommand and writes its outputs plus manifest.txt.

    Returns:
        list: Names of the written files.
    """
    if name not in HANDLERS:
        raise ConfigError(f"unknown subcommand '{name}'; choose from {', '.join(SUBCOMMANDS)}")
    store = OutputStore(config.out)
    HANDLERS[name](config, store, progress)
    store.write_text(config.manifest_text(), "manifest.txt")
    return store.written


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subparser per subcommand."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None, help="key = value config file")
    common.add_argument("--scheme", type=str, default=None, help="dg | qdg | sd | osfr | gjfr")
    common.add_argument("--p", type=int, default=None, help="Solution degree")
    common.add_argument("--alpha", type=float, default=None, help="Jacobi weight alpha")
    common.add_argument("--beta", type=float, default=None, help="Jacobi weight beta")
    common.add_argument("--iota", type=float, default=None, help="Correction parameter iota")
    common.add_argument("--c", type=float, default=None, help="OSFR parameter c")
    common.add_argument("--point-rule", type=str, default=None, help="Solution point rule")
    common.add_argument("--theta", type=float, default=None, help="Upwind fraction in [0, 1]")
    common.add_argument("--rk", type=str, default=None, help="euler | rk33 | rk44 | ls-rk45")
    common.add_argument("--k", type=float, default=None, help="Wavenumber for vn-converge")
    common.add_argument("--periods", type=float, default=None, help="t/T for vn-converge")
    common.add_argument("--sweep", type=str, default=None, help="diagonal | alpha | beta")
    common.add_argument("--error-modes", type=str, default=None, help="primary | all (vn-converge)")
    common.add_argument("--equation", type=str, default=None, help="advection | burgers (solve)")
    common.add_argument("--dof", type=int, default=None, help="Total degrees of freedom")
    common.add_argument("--elements", type=int, default=None, help="Element count (solve)")
    common.add_argument("--mu", type=float, default=None, help="Burgers diffusivity")
    common.add_argument("--dt", type=float, default=None, help="Explicit time step")
    common.add_argument("--seed", type=int, default=None, help="Master seed")
    common.add_argument("--ensemble", type=int, default=None, help="Ensemble size")
    common.add_argument("--t-end", type=float, default=None, help="Final time")
    common.add_argument("--out", type=str, default=None, help="Output directory")
    common.add_argument("--jobs", type=int, default=None, help="Parallel workers")
    common.add_argument("--verbose", action="store_true", help="Log diagnostics")
    common.add_argument("--quiet", action="store_true", help="Hide progress bars")

    parser = argparse.ArgumentParser(description=f"GJFR toolkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common], help=HANDLERS[name].__doc__)
    return parser


NON_CONFIG_ARGS = ("command", "config", "verbose", "quiet")


def main(argv: Optional[List[str]] = None) -> int:
    """
    Main function for CLI execution.
    Parses arguments, resolves the configuration and runs the subcommand.
    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    overrides = {k: v for k, v in vars(args).items() if k not in NON_CONFIG_ARGS}

    try:
        config = parse_config(args.config, overrides)
        written = run_subcommand(args.command, config, progress=not args.quiet)
    except GjfrError as e:
        print(str(e), file=sys.stderr)
        return 2
    except Exception as e:  # pylint: disable=broad-exception-caught
        print(f"error: {e}", file=sys.stderr)
        return 1

    print(f"{args.command} 完了: {', '.join(written)} -> {config.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
