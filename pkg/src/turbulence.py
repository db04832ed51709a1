"""
Turbulence Module.

Handles the Burgers turbulence experiment: random initial fields with a
prescribed spectrum, ensemble solves with the flux reconstruction solver,
energy spectra and the resonance diagnostics (Q-factor, cut-off
wavenumber, inertial slope).
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np
import pandas as pd

from src.corrections import SchemeParams, iota_of_sd
from src.errors import ConfigError, NoCrossingError, NoPeakError, NoPlateauError, SpectrumError
from src.fr1d import (
    Mesh1D,
    ViscousBurgers,
    build_operators,
    project_initial,
    rhs_burgers,
    sample_solution,
)
from src.job_manager import parallel_map
from src.timeint import advance, get_rk

logger = logging.getLogger(__name__)

HALF_POWER = 10.0 ** (-0.3)


def _default_scheme() -> SchemeParams:
    return SchemeParams(4, 0.0, 0.0, iota_of_sd(4, 0.0, 0.0))


@dataclass(frozen=True)
class TurbulenceConfig:
    """Parameters of one Burgers turbulence experiment."""
    k0: float = 10.0
    amplitude: float = 2.0 / (3.0 * math.sqrt(math.pi))
    kmax: int = 2048
    u_mean: float = 75.0
    mu: float = 2e-4
    dof: int = 1200
    scheme: SchemeParams = field(default_factory=_default_scheme)
    cfl: float = 0.057
    t_end: float = 0.1
    ensemble: int = 100
    seed: int = 0
    dt: Optional[float] = None
    rk: str = "rk44"
    point_rule: str = "gauss-legendre"

    def __post_init__(self):
        n = self.scheme.p + 1
        if self.dof % n != 0:
            raise ConfigError(f"dof={self.dof} must be divisible by p+1={n}", module="turbulence")
        if not self.k0 < self.kmax:
            raise ConfigError(f"require k0 < kmax, got k0={self.k0}, kmax={self.kmax}",
                              module="turbulence")
        if not self.mu >= 0:
            raise ConfigError(f"mu must be >= 0, got {self.mu}", module="turbulence")
        if self.ensemble < 1:
            raise ConfigError(f"ensemble size must be >= 1, got {self.ensemble}",
                              module="turbulence")
        if self.t_end < 0 or (self.dt is not None and not self.dt > 0):
            raise ConfigError("t_end must be >= 0 and dt > 0", module="turbulence")

    @property
    def p(self) -> int:
        """Solution degree."""
        return self.scheme.p

    @property
    def n_elements(self) -> int:
        """Elements on [0, 2 pi]."""
        return self.dof // (self.p + 1)

    def time_step(self) -> Tuple[float, int]:
        """
        Step size and count; the CFL step is shrunk so t_end is hit exactly.

        Returns:
            tuple: (dt, n_steps)
        """
        if self.t_end == 0:
            return 0.0, 0
        dt0 = self.dt
        if dt0 is None:
            dx = 2.0 * math.pi / self.n_elements
            dt0 = self.cfl * dx / self.u_mean
        n_steps = math.ceil(self.t_end / dt0 - 1e-9)
        return self.t_end / n_steps, n_steps


@dataclass(frozen=True, eq=False)
class EnergySpectrum:
    """E(k) at integer wavenumbers k >= 1."""
    k: np.ndarray
    energy: np.ndarray
    time: float = 0.0
    ensemble_size: int = 1
    std_error: Optional[np.ndarray] = None
    excluded: Tuple[str, ...] = ()

    def compensated(self) -> np.ndarray:
        """k^2 E(k)"""
        return self.k ** 2 * self.energy

    def to_frame(self) -> pd.DataFrame:
        """Raw spectrum table."""
        frame = pd.DataFrame({"k": self.k, "E": self.energy})
        if self.std_error is not None:
            frame["std_error"] = self.std_error
        return frame

    def compensated_frame(self) -> pd.DataFrame:
        """Compensated spectrum table."""
        return pd.DataFrame({"k": self.k, "k2E": self.compensated()})


def initial_energy(k, config: TurbulenceConfig):
    """E(k, 0) = A k^4 / k0^5 exp(-(k/k0)^2)"""
    k = np.asarray(k, dtype=float)
    return config.amplitude * k ** 4 / config.k0 ** 5 * np.exp(-(k / config.k0) ** 2)


def argmax_initial(config: TurbulenceConfig) -> int:
    """Integer wavenumber of the largest initial energy."""
    k = np.arange(1, config.kmax + 1)
    return int(k[np.argmax(initial_energy(k, config))])


def turbulence_intensity(config: TurbulenceConfig) -> float:
    """sqrt(sum E(k, 0)) / u_mean, the rms fluctuation over the mean."""
    k = np.arange(1, config.kmax + 1)
    return math.sqrt(float(np.sum(initial_energy(k, config)))) / config.u_mean


def run_generator(master_seed: int, index: int, size: int) -> np.random.Generator:
    """Counter-based generator of ensemble member `index`."""
    child = np.random.SeedSequence(master_seed).spawn(size)[index]
    return np.random.Generator(np.random.Philox(child))


def synthesize_initial(config: TurbulenceConfig, run: int = 0, chunk: int = 256) -> Callable:
    """
    Random velocity field with spectrum E(k, 0).

    u(x) = u_mean + sum_k sqrt(2 E(k,0)) cos(k x + 2 pi phi_k), phi_k in (0, 1].

    Returns:
        callable: u(x) for array x.
    """
    rng = run_generator(config.seed, run, config.ensemble)
    k = np.arange(1, config.kmax + 1, dtype=float)
    phase = 2.0 * math.pi * (1.0 - rng.random(k.size))
    amp = np.sqrt(2.0 * initial_energy(k, config))

    def velocity(x):
        xs = np.asarray(x, dtype=float)
        flat = xs.reshape(-1)
        out = np.full(flat.shape, config.u_mean)
        for start in range(0, k.size, chunk):
            sl = slice(start, start + chunk)
            out += np.cos(np.outer(flat, k[sl]) + phase[sl]) @ amp[sl]
        return out.reshape(xs.shape)

    return velocity


def spectrum_from_samples(samples, length: float = 2.0 * math.pi) -> Tuple[np.ndarray, np.ndarray]:
    """
    One-sided energy spectrum of equispaced periodic samples.

    Normalised so that sum E = mean((u - mean u)^2).
    """
    u = np.asarray(samples, dtype=float)
    S = u.size
    c = np.fft.rfft(u - u.mean()) / S
    energy = 2.0 * np.abs(c[1:]) ** 2
    if S % 2 == 0:
        energy[-1] *= 0.5
    m = np.arange(1, c.size)
    return m * (2.0 * math.pi / length), energy


def compute_spectrum(state: np.ndarray, mesh: Mesh1D, ops, n_samples: Optional[int] = None,
                     time: float = 0.0) -> EnergySpectrum:
    """Spectrum of the piecewise polynomial solution from S = dof samples."""
    S = n_samples or state.size
    x = mesh.boundaries[0] + mesh.length * np.arange(S) / S
    k, energy = spectrum_from_samples(sample_solution(state, mesh, ops, x), mesh.length)
    return EnergySpectrum(k=k, energy=energy, time=time)


def _member(config: TurbulenceConfig, mesh: Mesh1D, ops, flux: ViscousBurgers, run: int):
    dt, n_steps = config.time_step()
    state = project_initial(synthesize_initial(config, run), mesh, ops)
    state = advance(
        get_rk(config.rk),
        lambda u: rhs_burgers(u, mesh, ops, flux),
        state,
        dt,
        n_steps,
        check_every=100,
    )
    if not np.all(np.isfinite(state)):
        raise SpectrumError(f"run {run} (seed {config.seed}:{run}) diverged")
    return compute_spectrum(state, mesh, ops, config.dof, config.t_end).energy


def ensemble_statistics(members) -> Tuple[np.ndarray, np.ndarray]:
    """Per-wavenumber mean and standard error; a single member has zero error."""
    stack = np.vstack(members)
    mean = stack.mean(axis=0)
    if len(stack) < 2:
        return mean, np.zeros_like(mean)
    return mean, stack.std(axis=0, ddof=1) / math.sqrt(len(stack))


def ensemble_run(config: TurbulenceConfig, jobs: int = 1, progress: bool = False) -> EnergySpectrum:
    """
    Ensemble averaged spectrum at t_end.

    Diverged members are excluded and listed by seed; the average is taken
    in member order so it does not depend on `jobs`.
    """
    mesh = Mesh1D.uniform(config.n_elements)
    ops = build_operators(config.scheme, config.point_rule)
    flux = ViscousBurgers(config.mu)
    dt, n_steps = config.time_step()
    logger.info("ensemble of %d runs: dt=%.6g, steps=%d", config.ensemble, dt, n_steps)

    results, failures = parallel_map(
        lambda run: _member(config, mesh, ops, flux, run),
        range(config.ensemble),
        jobs=jobs,
        desc="ensemble",
        progress=progress,
    )
    excluded = []
    for index, error in failures:
        if not isinstance(error, SpectrumError):
            raise error
        logger.warning("%s; excluded", error)
        excluded.append(f"{config.seed}:{index}")
    kept = [r for r in results if r is not None]
    if not kept:
        raise SpectrumError("every ensemble member diverged")

    mean, std_error = ensemble_statistics(kept)
    k = np.arange(1, mean.size + 1, dtype=float)
    return EnergySpectrum(
        k=k,
        energy=mean,
        time=config.t_end,
        ensemble_size=len(kept),
        std_error=std_error,
        excluded=tuple(excluded),
    )


def _log_crossing(k_a, c_a, k_b, c_b, level) -> float:
    """k where log c crosses log level between (k_a, c_a) and (k_b, c_b)."""
    la, lb, lt = math.log(c_a), math.log(c_b), math.log(level)
    if la == lb:
        return float(k_a)
    return float(k_a + (lt - la) / (lb - la) * (k_b - k_a))


def peak_wavenumber(spectrum: EnergySpectrum, k0: float = 10.0) -> int:
    """Index into spectrum.k of the largest k^2 E beyond 6 k0."""
    region = np.nonzero(spectrum.k > 6 * k0)[0]
    if region.size == 0:
        raise NoPeakError("no wavenumbers above the energy containing range")
    comp = spectrum.compensated()
    return int(region[np.argmax(comp[region])])


def q_factor(spectrum: EnergySpectrum, k0: float = 10.0) -> float:
    """
    Resonance sharpness k_peak / (k2 - k1) of k^2 E(k).

    k1 and k2 are the half-power (-3 dB) crossings either side of the peak.
    """
    comp = spectrum.compensated()
    k = spectrum.k
    i_peak = peak_wavenumber(spectrum, k0)
    if i_peak >= k.size - 1:
        raise NoPeakError(f"peak at the spectrum edge k={k[i_peak]:g}")
    level = comp[i_peak] * HALF_POWER
    if not level > 0:
        raise NoPeakError("compensated spectrum vanishes at the peak")

    i = i_peak
    while i > 0 and k[i - 1] > 2 * k0 and comp[i - 1] >= level:
        i -= 1
    if i == 0 or comp[i - 1] >= level or not comp[i - 1] > 0:
        raise NoPeakError("no -3 dB crossing below the peak (prominence < 3 dB)")
    k1 = _log_crossing(k[i - 1], comp[i - 1], k[i], comp[i], level)

    j = i_peak
    while j < k.size - 1 and comp[j + 1] >= level:
        j += 1
    if j == k.size - 1 or not comp[j + 1] > 0:
        raise NoPeakError("no -3 dB crossing above the peak")
    k2 = _log_crossing(k[j], comp[j], k[j + 1], comp[j + 1], level)
    return float(k[i_peak] / (k2 - k1))


def cutoff_wavenumber(spectrum: EnergySpectrum, k0: float = 10.0, run_length: int = 3) -> float:
    """
    Smallest k beyond the plateau where k^2 E stays 3 dB below the plateau
    level for `run_length` consecutive wavenumbers.
    """
    comp = spectrum.compensated()
    k = spectrum.k
    band = (k >= 2 * k0) & (k <= 6 * k0)
    if not np.any(band) or np.any(comp[band] <= 0):
        raise NoPlateauError("plateau band is empty or has no energy")
    spread = 10.0 * math.log10(comp[band].max() / comp[band].min())
    if spread > 6.0:
        raise NoPlateauError(f"plateau spread {spread:.2f} dB exceeds 6 dB")
    level = float(np.median(comp[band])) * HALF_POWER

    below = comp < level
    for i in np.nonzero(k > 6 * k0)[0]:
        if i + run_length > k.size:
            break
        if np.all(below[i:i + run_length]):
            # the crossing sits where the run of low values begins
            j = i
            while j > 0 and below[j - 1]:
                j -= 1
            if j > 0 and comp[j] > 0 and comp[j - 1] > 0:
                return _log_crossing(k[j - 1], comp[j - 1], k[j], comp[j], level)
            return float(k[j])
    raise NoCrossingError("compensated spectrum never drops 3 dB below the plateau")


def inertial_slope(spectrum: EnergySpectrum, kmin: float = 25.0, kmax: float = 70.0) -> float:
    """Least squares slope of log E against log k over [kmin, kmax]."""
    sel = (spectrum.k >= kmin) & (spectrum.k <= kmax) & (spectrum.energy > 0)
    if np.count_nonzero(sel) < 2:
        raise SpectrumError(f"too few points in [{kmin}, {kmax}] for a slope")
    slope, _ = np.polyfit(np.log(spectrum.k[sel]), np.log(spectrum.energy[sel]), 1)
    return float(slope)


def summary(spectrum: EnergySpectrum, k0: float = 10.0) -> pd.DataFrame:
    """One-row table of Q, cut-off, peak and slope; unavailable values are NaN."""
    row = {}
    for name, fn in (
        ("q_factor", lambda: q_factor(spectrum, k0)),
        ("k_cutoff", lambda: cutoff_wavenumber(spectrum, k0)),
        ("k_peak", lambda: float(spectrum.k[peak_wavenumber(spectrum, k0)])),
        ("inertial_slope", lambda: inertial_slope(spectrum)),
    ):
        try:
            row[name] = fn()
        except SpectrumError as e:
            logger.warning("%s unavailable: %s", name, e)
            row[name] = float("nan")
    row["ensemble_size"] = spectrum.ensemble_size
    row["excluded_runs"] = len(spectrum.excluded)
    row["excluded_seeds"] = " ".join(spectrum.excluded)
    return pd.DataFrame([row])
