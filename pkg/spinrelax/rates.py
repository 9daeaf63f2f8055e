from dataclasses import dataclass, field
import numpy as np

from .spectral import (
    FormFactor, QUAD_EPSABS, QUAD_EPSREL, bath_coulomb_integral,
    pv_dispersion_integral, spectral_density, spectral_density_slope_zero,
)
from .utils import SpinRelaxError, coth, quadratic_roots

# Default parameters.
DENSITY_ATOL = 1e-10

PAULI_X = np.array([ [ 0, 1 ], [ 1, 0 ] ], dtype=complex)
PAULI_Y = np.array([ [ 0, -1j ], [ 1j, 0 ] ], dtype=complex)
PAULI_Z = np.array([ [ 1, 0 ], [ 0, -1 ] ], dtype=complex)

def rho_from_bloch(vector):
    x, y, z = (float(v) for v in vector)
    if x * x + y * y + z * z > 1. + DENSITY_ATOL:
        raise ValueError('Bloch vector norm exceeds 1: {}'.format(vector))
    return 0.5 * (np.eye(2, dtype=complex) + x * PAULI_X + y * PAULI_Y +
                  z * PAULI_Z)

def check_density_matrix(rho, atol=DENSITY_ATOL):
    rho = np.array(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError('Density matrix must be 2x2, received shape {}'
                         .format(rho.shape))
    if not np.allclose(rho, rho.conj().T, atol=atol):
        raise ValueError('Density matrix must be Hermitian')
    if abs(np.trace(rho) - 1.) > atol:
        raise ValueError('Density matrix must have unit trace')
    evals = np.linalg.eigvalsh(rho)
    if evals.min() < -atol or evals.max() > 1. + atol:
        raise ValueError('Density matrix eigenvalues must lie in [0, 1]')
    return rho

@dataclass(frozen=True, eq=False)
class SpinParams:
    omega: float
    lam: float = 0.
    varkappa: float = 0.
    mu: float = 0.
    nu: float = 0.
    g_loc: FormFactor = field(default_factory=FormFactor)
    f_loc: FormFactor = field(default_factory=FormFactor)
    rho0: np.ndarray = field(
        default_factory=lambda: np.diag([ 1., 0. ]).astype(complex)
    )

    def __post_init__(self):
        if not (np.isfinite(self.omega) and self.omega > 0):
            raise ValueError('Spin frequency must be positive, received {}'
                             .format(self.omega))
        for name in ('lam', 'varkappa', 'mu', 'nu'):
            if not np.isfinite(getattr(self, name)):
                raise ValueError('Coupling {} must be finite'.format(name))
        rho = check_density_matrix(self.rho0)
        rho.setflags(write=False)
        object.__setattr__(self, 'rho0', rho)

    @property
    def population(self):
        return float(self.rho0[0, 0].real)

@dataclass(frozen=True, eq=False)
class EnsembleConfig:
    """Spins sharing the collective reservoirs at inverse temperature
    `beta`.

    `species_counts`, when set, partitions `spins` into consecutive
    groups of identical spins (one group per species).
    """
    beta: float
    spins: tuple
    g_c: FormFactor = field(default_factory=FormFactor)
    f_c: FormFactor = field(default_factory=FormFactor)
    species_counts: tuple = None

    def __post_init__(self):
        if not (np.isfinite(self.beta) and self.beta > 0):
            raise ValueError('Inverse temperature must be positive, '
                             'received {}'.format(self.beta))
        object.__setattr__(self, 'spins', tuple(self.spins))
        if len(self.spins) < 1:
            raise ValueError('Ensemble needs at least one spin')
        if self.species_counts is not None:
            counts = tuple(int(c) for c in self.species_counts)
            if any(c < 1 for c in counts):
                raise ValueError('Species counts must be positive')
            if sum(counts) != len(self.spins):
                raise ValueError('Species counts sum to {}, expected {}'
                                 .format(sum(counts), len(self.spins)))
            object.__setattr__(self, 'species_counts', counts)

    @classmethod
    def from_species(cls, beta, species, g_c=None, f_c=None):
        spins, counts = [], []
        for count, template in species:
            spins += [ template ] * int(count)
            counts.append(int(count))
        return cls(beta, tuple(spins), g_c or FormFactor(),
                   f_c or FormFactor(), tuple(counts))

    @property
    def n_spins(self):
        return len(self.spins)

    @property
    def omegas(self):
        return np.array([ s.omega for s in self.spins ])

    # (start, count) per group of identical spins.
    def groups(self):
        if self.species_counts is None:
            return [ (i, 1) for i in range(self.n_spins) ]
        groups, start = [], 0
        for count in self.species_counts:
            groups.append((start, count))
            start += count
        return groups

    def group_of(self, j):
        for g, (start, count) in enumerate(self.groups()):
            if start <= j < start + count:
                return g
        raise IndexError('Spin index {} out of range'.format(j))

@dataclass(frozen=True)
class RateSet:
    omega: float
    beta: float
    b: float
    c: float
    z_beta: float
    a: float
    x: float
    y: float
    z_plus: complex
    z_minus: complex
    alpha_plus: complex
    alpha_minus: complex
    gamma_relax: float
    gamma_cons: float
    r: float
    c_alpha_plus: complex = None
    x_abs_error: float = 0.

    @property
    def degenerate(self):
        return self.b == 0

@dataclass(frozen=True)
class DephasingSummary:
    gamma: float
    c_prime: float
    gamma_prime: float
    gamma_deph: float

# Roots z+, z- of z^2 - i b (1 + c) z - a^2 + i a b (1 - c) = 0.
def resonance_roots(a, b, c):
    if b == 0:
        return complex(abs(a)), complex(-abs(a))
    if a == 0:
        return complex(0., b * (1. + c)), 0j
    return quadratic_roots(1j * b * (1. + c),
                           -a * a + 1j * a * b * (1. - c))

def compute_rateset(spin, ens, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL):
    """Resonance data of one spin in an ensemble.

    Parameters
    ----------
    spin: `SpinParams`
        The spin whose rates are computed.
    ens: `EnsembleConfig`
        Supplies the inverse temperature and collective form factors.
    epsabs, epsrel: `float`, optional
        Quadrature tolerances for the dispersion integral.

    Returns
    -------
    rates: `RateSet`
        When both energy-exchange couplings vanish (`b = 0`) the
        `alpha_plus`, `alpha_minus`, `c_alpha_plus` and `r` fields are
        `None`. `alpha_plus` is also `None` when `c_alpha_plus / c` is
        not representable (`c` underflows at large `beta * omega`).
    """
    beta, omega = float(ens.beta), float(spin.omega)
    energy = beta * omega
    c = float(np.exp(-energy))
    exchange = (spin.lam ** 2 * spectral_density(ens.g_c, omega) +
                spin.mu ** 2 * spectral_density(spin.g_loc, omega))
    b = 0.25 * exchange / -np.expm1(-energy)
    z_beta = 2. * np.cosh(0.5 * energy)
    a = -0.5 * spin.varkappa ** 2 * bath_coulomb_integral(ens.f_c)

    dispersion = pv_dispersion_integral(ens.g_c, spin.g_loc, spin.lam,
                                        spin.mu, omega, beta,
                                        epsabs=epsabs, epsrel=epsrel)
    gamma_relax = 0.25 * coth(0.5 * energy) * exchange
    gamma_cons = (
        spin.varkappa ** 2 * spectral_density_slope_zero(ens.f_c) +
        spin.nu ** 2 * spectral_density_slope_zero(spin.f_loc)
    ) / (2. * beta)
    y = 0.5 * gamma_relax + gamma_cons

    z_plus, z_minus = resonance_roots(a, b, c)
    if b > 0:
        # c alpha+ and 1 + c alpha+ = -i (z- + a) / b stay finite when c
        # underflows; alpha+ itself is reported only when representable.
        try:
            c_alpha_plus = c + 1j * (z_plus - a) / b
            alpha_minus = -1j * b / (z_minus + a - 1j * b)
        except (ZeroDivisionError, OverflowError) as e:
            raise SpinRelaxError('Resonance eigenvectors not representable '
                                 'for omega = {}, beta = {}: {}'
                                 .format(omega, beta, e))
        if not (np.isfinite(c_alpha_plus) and
                np.isfinite(c_alpha_plus * c_alpha_plus) and
                np.isfinite(alpha_minus)):
            raise SpinRelaxError('Resonance eigenvectors not representable '
                                 'for omega = {}, beta = {}'
                                 .format(omega, beta))
        if c > 0 and abs(c_alpha_plus) < c * 1e300:
            alpha_plus = c_alpha_plus / c
        else:
            alpha_plus = None
        r = abs(a) / b
    else:
        c_alpha_plus = alpha_plus = alpha_minus = r = None

    return RateSet(omega=omega, beta=beta, b=float(b), c=c,
                   z_beta=float(z_beta), a=float(a), x=dispersion.value,
                   y=float(y), z_plus=z_plus, z_minus=z_minus,
                   alpha_plus=alpha_plus, alpha_minus=alpha_minus,
                   gamma_relax=float(gamma_relax),
                   gamma_cons=float(gamma_cons), r=r,
                   c_alpha_plus=c_alpha_plus,
                   x_abs_error=dispersion.abs_error_estimate)

# One RateSet per spin, computed once per group of identical spins.
def ensemble_rates(ens, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL):
    rates = []
    for start, count in ens.groups():
        rs = compute_rateset(ens.spins[start], ens, epsabs=epsabs,
                             epsrel=epsrel)
        rates += [ rs ] * count
    return rates

# With u = c alpha+: c (1 + u) / (c + u^2), where 1 + u = -i (z- + a) / b.
def zeta(rs):
    u = rs.c_alpha_plus
    return rs.c * (-1j * (rs.z_minus + rs.a) / rs.b) / (rs.c + u * u)

# Amplitude kappa of the e^{itz+} branch of a spin's collective factor.
# With b = 0 the b -> 0+ limit 1 - p is used.
def collective_amplitude(rs, rho0):
    p = float(np.asarray(rho0)[0, 0].real)
    if rs.degenerate:
        return complex(1. - p)
    u = rs.c_alpha_plus
    return (1. + u) * (rs.c * p + (1. - p) * u) / (rs.c + u * u)

def dephasing_summary(ratesets, rho0s, N, j=0):
    if len(ratesets) != len(rho0s):
        raise ValueError('Need one density matrix per rate set')
    gamma = min(min(rs.z_plus.imag, rs.z_minus.imag) for rs in ratesets)
    gamma = max(gamma, 0.)
    c_prime = max(np.log(2. * abs(collective_amplitude(rs, rho)) + 1.)
                  for rs, rho in zip(ratesets, rho0s))
    if N < 2:
        gamma_prime = 0.
    else:
        gamma_prime = gamma / (np.log(2.) / (N - 1) + c_prime)
    rs_j = ratesets[j]
    gamma_deph = 0.5 * rs_j.gamma_relax + rs_j.gamma_cons + gamma_prime
    return DephasingSummary(gamma=float(gamma), c_prime=float(c_prime),
                            gamma_prime=float(gamma_prime),
                            gamma_deph=float(gamma_deph))

# Time by which |C| has decayed to at most half its initial value.
def collective_half_life_bound(summary, N):
    if N < 2 or summary.gamma <= 0:
        return np.inf
    return (np.log(2.) / (N - 1) + summary.c_prime) / summary.gamma

def asymptotic_dephasing_multispecies(species):
    total = sum(count * rs.z_minus.imag for count, rs in species)
    return [ 0.5 * rs.gamma_relax + rs.gamma_cons + total - rs.z_minus.imag
             for count, rs in species ]
