from collections import Counter
from dataclasses import dataclass, field
from itertools import product
import numpy as np

from .dynamics import S_MINUS, evolve_observable
from .rates import EnsembleConfig, SpinParams, check_density_matrix
from .rates import ensemble_rates
from .spectral import (
    FormFactor, QUAD_EPSABS, QUAD_EPSREL, bath_coulomb_integral,
    decoherence_gamma, lamb_shift_s, spectral_density_slope_zero,
)

# Default parameters.
MAX_ENUMERATED_SPINS = 12

@dataclass(frozen=True, eq=False)
class OracleConfig:
    """Pure-dephasing ensemble: only energy-conserving couplings.

    Spin `j` carries the local coupling `nu_l` and initial state
    `rho0_j`; the other `n_spins - 1` spins enter only through their
    upper-level populations, all equal to `p` unless `populations` lists
    one value per other spin.
    """
    beta: float
    n_spins: int
    p: float
    varkappa_c: float
    nu_l: float
    f_c: FormFactor = field(default_factory=FormFactor)
    f_l: FormFactor = field(default_factory=FormFactor)
    omega: float = 1.
    rho0_j: np.ndarray = field(
        default_factory=lambda: 0.5 * np.ones((2, 2), dtype=complex)
    )
    populations: tuple = None

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError('Inverse temperature must be positive')
        if int(self.n_spins) != self.n_spins or self.n_spins < 1:
            raise ValueError('Number of spins must be a positive integer')
        if not 0. <= self.p <= 1.:
            raise ValueError('Population p must lie in [0, 1]')
        if not self.omega > 0:
            raise ValueError('Spin frequency must be positive')
        if self.populations is not None:
            pops = tuple(float(x) for x in self.populations)
            if len(pops) != self.n_spins - 1:
                raise ValueError('Need {} populations, received {}'
                                 .format(self.n_spins - 1, len(pops)))
            if any(not 0. <= x <= 1. for x in pops):
                raise ValueError('Populations must lie in [0, 1]')
            object.__setattr__(self, 'populations', pops)
        rho = check_density_matrix(self.rho0_j)
        rho.setflags(write=False)
        object.__setattr__(self, 'rho0_j', rho)

    def other_populations(self):
        if self.populations is None:
            return (float(self.p),) * (self.n_spins - 1)
        return self.populations

    @property
    def a(self):
        return -0.5 * self.varkappa_c ** 2 * bath_coulomb_integral(self.f_c)

# (N - 1)-fold product of two-term sums, summed in the log domain.
def _product_factor(populations, theta):
    logs = 0j
    for pop, mult in sorted(Counter(populations).items()):
        w = pop * np.exp(1j * theta) + (1. - pop) * np.exp(-1j * theta)
        if w == 0:
            return 0j
        logs += mult * np.log(w)
    return np.exp(logs)

def _apply(func, t):
    if np.ndim(t) == 0:
        return func(float(t))
    return np.array([ func(float(s)) for s in np.asarray(t) ])

def exact_offdiagonal(cfg, t, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL):
    def single(s):
        if s < 0:
            raise ValueError('Time must be nonnegative')
        loc = decoherence_gamma(cfg.f_l, cfg.beta, s, epsabs=epsabs,
                                epsrel=epsrel)
        coll = decoherence_gamma(cfg.f_c, cfg.beta, s, epsabs=epsabs,
                                 epsrel=epsrel)
        theta = cfg.varkappa_c ** 2 * lamb_shift_s(cfg.f_c, s, epsabs=epsabs,
                                                   epsrel=epsrel)
        envelope = np.exp(-1j * cfg.omega * s - cfg.nu_l ** 2 * loc -
                          cfg.varkappa_c ** 2 * coll)
        return complex(cfg.rho0_j[1, 0] * envelope *
                       _product_factor(cfg.other_populations(), theta))
    return _apply(single, t)

# Configuration sum over the other spins' levels, sigma = +1/2 first;
# level sigma contributes the phase e^{2i sigma theta}.
def exact_offdiagonal_enumerated(cfg, t, epsabs=QUAD_EPSABS,
                                 epsrel=QUAD_EPSREL):
    if cfg.n_spins > MAX_ENUMERATED_SPINS:
        raise ValueError('Enumeration limited to {} spins'
                         .format(MAX_ENUMERATED_SPINS))
    pops = cfg.other_populations()

    def single(s):
        loc = decoherence_gamma(cfg.f_l, cfg.beta, s, epsabs=epsabs,
                                epsrel=epsrel)
        coll = decoherence_gamma(cfg.f_c, cfg.beta, s, epsabs=epsabs,
                                 epsrel=epsrel)
        theta = cfg.varkappa_c ** 2 * lamb_shift_s(cfg.f_c, s, epsabs=epsabs,
                                                   epsrel=epsrel)
        total = 0j
        for sigmas in product((0.5, -0.5), repeat=len(pops)):
            weight = 1.
            for sigma, pop in zip(sigmas, pops):
                weight *= pop if sigma > 0 else 1. - pop
            total += weight * np.exp(2j * sum(sigmas) * theta)
        envelope = np.exp(-1j * cfg.omega * s - cfg.nu_l ** 2 * loc -
                          cfg.varkappa_c ** 2 * coll)
        return complex(cfg.rho0_j[1, 0] * envelope * total)
    return _apply(single, t)

def exact_populations(cfg, t):
    return _apply(lambda s: float(cfg.rho0_j[0, 0].real), t)

def asymptotic_product_factor(cfg, t):
    a = cfg.a
    return _apply(lambda s: complex(_product_factor(cfg.other_populations(),
                                                    a * s)), t)

# Exact formula with the linear large-time forms of the reservoir
# functions substituted.
def substituted_offdiagonal(cfg, t):
    rate = (cfg.nu_l ** 2 * spectral_density_slope_zero(cfg.f_l) +
            cfg.varkappa_c ** 2 * spectral_density_slope_zero(cfg.f_c)
            ) / (2. * cfg.beta)

    def single(s):
        return complex(cfg.rho0_j[1, 0] *
                       np.exp(-1j * cfg.omega * s - rate * s) *
                       _product_factor(cfg.other_populations(), cfg.a * s))
    return _apply(single, t)

def oracle_ensemble(cfg):
    spin_j = SpinParams(omega=cfg.omega, varkappa=cfg.varkappa_c,
                        nu=cfg.nu_l, f_loc=cfg.f_l, rho0=cfg.rho0_j)
    species = [ (1, spin_j) ]
    for pop, mult in sorted(Counter(cfg.other_populations()).items()):
        rho = np.diag([ pop, 1. - pop ]).astype(complex)
        species.append((mult, SpinParams(omega=cfg.omega,
                                         varkappa=cfg.varkappa_c,
                                         f_loc=cfg.f_l, rho0=rho)))
    return EnsembleConfig.from_species(cfg.beta, species, g_c=cfg.f_c,
                                       f_c=cfg.f_c)

def resonance_offdiagonal(cfg, t, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL):
    ens = oracle_ensemble(cfg)
    rates = ensemble_rates(ens, epsabs=epsabs, epsrel=epsrel)
    return evolve_observable(S_MINUS, 0, ens, rates, t)

@dataclass(frozen=True)
class AsymptoticResiduals:
    t: float
    gamma_local: float
    gamma_collective: float
    lamb_shift: float

# Relative deviations of Gamma(t)/t and varkappa^2 S(t)/t from their
# large-time slopes.
def asymptotic_residuals(cfg, t, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL):
    if not t > 0:
        raise ValueError('Residuals need a positive time')

    def gamma_residual(h):
        target = spectral_density_slope_zero(h) / (2. * cfg.beta)
        value = decoherence_gamma(h, cfg.beta, t, epsabs=epsabs,
                                  epsrel=epsrel) / t
        if target == 0:
            return abs(value)
        return abs(value - target) / abs(target)

    s_slope = lamb_shift_s(cfg.f_c, t, epsabs=epsabs, epsrel=epsrel) / t
    target = -0.5 * bath_coulomb_integral(cfg.f_c)
    return AsymptoticResiduals(
        t=float(t),
        gamma_local=float(gamma_residual(cfg.f_l)),
        gamma_collective=float(gamma_residual(cfg.f_c)),
        lamb_shift=float(abs(s_slope - target) / abs(target)),
    )

@dataclass(frozen=True, eq=False)
class OracleReport:
    times: np.ndarray
    exact: np.ndarray
    substituted: np.ndarray
    resonance: np.ndarray
    deviation: np.ndarray
    unsubstituted_deviation: np.ndarray
    max_deviation: float
    residuals: AsymptoticResiduals

def compare_resonance_vs_exact(cfg, grid, epsabs=QUAD_EPSABS,
                               epsrel=QUAD_EPSREL, with_exact=True):
    """Cross-check the resonance expansion against the exact model.

    Parameters
    ----------
    cfg: `OracleConfig`
        Pure-dephasing configuration.
    grid: `numpy.ndarray`
        Nondecreasing nonnegative times.
    with_exact: `bool`, optional (default: `True`)
        Also evaluate the un-substituted exact formula (one set of
        oscillatory quadratures per time point) and the asymptotic
        residuals at the last time.

    Returns
    -------
    report: `OracleReport`
        `deviation` is the modulus difference between the substituted
        exact formula and the resonance expansion, `max_deviation` its
        maximum over the grid.
    """
    times = np.asarray(grid, dtype=float)
    substituted = substituted_offdiagonal(cfg, times)
    resonance = resonance_offdiagonal(cfg, times, epsabs=epsabs,
                                      epsrel=epsrel)
    deviation = np.abs(substituted - resonance)
    if with_exact:
        exact = exact_offdiagonal(cfg, times, epsabs=epsabs, epsrel=epsrel)
        unsubstituted = np.abs(exact - resonance)
        residuals = None
        if times[-1] > 0:
            residuals = asymptotic_residuals(cfg, times[-1], epsabs=epsabs,
                                             epsrel=epsrel)
    else:
        exact = np.full(len(times), np.nan + 0j)
        unsubstituted = np.full(len(times), np.nan)
        residuals = None
    return OracleReport(times, exact, substituted, resonance, deviation,
                        unsubstituted, float(deviation.max()), residuals)
