from dataclasses import dataclass
from functools import lru_cache
import math
import numpy as np
from scipy import integrate, optimize, special
import warnings

from .utils import QuadratureError, xcoth

# Default parameters.
CUTOFF_RATIO = 1e-16
QUAD_EPSABS = 1e-10
QUAD_EPSREL = 1e-8
QUAD_LIMIT = 200
QUAD_MAXP1 = 100

@dataclass(frozen=True)
class FormFactor:
    """Radial-angular reservoir coupling `r^p exp(-r^m) h'(Sigma)`.

    Parameters
    ----------
    n: `int`
        Radial exponent offset, `p = -1/2 + n`, must be nonnegative.
    m: `int`
        Cutoff exponent, 1 or 2.
    angular_norm_sq: `float`
        Integral of `|h'|^2` over the unit sphere, must be positive.
    """
    n: int = 0
    m: int = 1
    angular_norm_sq: float = 1.

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise ValueError('Form factor exponent n must be a nonnegative '
                             'integer, received {}'.format(self.n))
        if self.m not in (1, 2):
            raise ValueError('Form factor cutoff exponent m must be 1 or 2, '
                             'received {}'.format(self.m))
        if not (np.isfinite(self.angular_norm_sq) and
                self.angular_norm_sq > 0):
            raise ValueError('Form factor angular norm must be positive, '
                             'received {}'.format(self.angular_norm_sq))
        object.__setattr__(self, 'n', int(self.n))
        object.__setattr__(self, 'angular_norm_sq',
                           float(self.angular_norm_sq))

    @property
    def p(self):
        return -0.5 + self.n

@dataclass(frozen=True)
class SpectralResult:
    value: float
    abs_error_estimate: float = 0.

    def __add__(self, other):
        return SpectralResult(self.value + other.value,
                              self.abs_error_estimate +
                              other.abs_error_estimate)

    def scaled(self, factor):
        return SpectralResult(factor * self.value,
                              abs(factor) * self.abs_error_estimate)

def _scalar_or_array(values, like):
    if np.ndim(like) == 0:
        return float(values)
    return values

def _nonnegative(x, name):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        raise ValueError('{} must be finite and nonnegative'.format(name))
    return x

# J_h(omega) = pi omega^2 * angular integral of |h|^2.
def spectral_density(h, omega):
    w = _nonnegative(omega, 'Frequency')
    values = (np.pi * w ** (1 + 2 * h.n) * np.exp(-2. * w ** h.m) *
              h.angular_norm_sq)
    return _scalar_or_array(values, omega)

def spectral_density_slope_zero(h):
    return np.pi * gamma_plus(h)

def angular_density(h, u):
    u_arr = np.asarray(u, dtype=float)
    if np.any(u_arr <= 0):
        raise ValueError('Radial argument must be positive')
    values = (u_arr ** (2 * h.n - 1) * np.exp(-2. * u_arr ** h.m) *
              h.angular_norm_sq)
    return _scalar_or_array(values, u)

def gamma_plus(h):
    return h.angular_norm_sq if h.n == 0 else 0.

# Closed form of the radial integral of r * G_h(r) over (0, inf).
def bath_coulomb_integral(h):
    k = (2. * h.n + 1.) / h.m
    return h.angular_norm_sq * special.gamma(k) / (h.m * 2. ** k)

# Radius beyond which u^(2n+1) exp(-2 u^m) stays below `ratio` times
# its peak value.
@lru_cache(maxsize=None)
def cutoff_radius(h, ratio=CUTOFF_RATIO):
    power = 2. * h.n + 1.
    u_peak = (power / (2. * h.m)) ** (1. / h.m)
    log_peak = power * np.log(u_peak) - 2. * u_peak ** h.m
    target = log_peak + np.log(ratio)

    def excess(u):
        return power * np.log(u) - 2. * u ** h.m - target

    upper = 2. * u_peak + 1.
    while excess(upper) > 0:
        upper *= 2.
    return optimize.brentq(excess, u_peak, upper, xtol=1e-12)

def quad(func, lo, hi, operation, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL,
         limit=QUAD_LIMIT, **kwargs):
    with warnings.catch_warnings():
        warnings.filterwarnings('error', category=integrate.IntegrationWarning)
        try:
            value, abserr = integrate.quad(func, lo, hi, epsabs=epsabs,
                                           epsrel=epsrel, limit=limit,
                                           **kwargs)
        except integrate.IntegrationWarning as e:
            raise QuadratureError(operation, (lo, hi), str(e).strip())
    if not np.isfinite(value):
        raise QuadratureError(operation, (lo, hi), 'non-finite value')
    return value, abserr

# J_h(|u|) coth(beta |u| / 2), regular at u = 0.
def thermal_kernel(h, beta, u):
    x = abs(u)
    return (np.pi * h.angular_norm_sq * x ** (2 * h.n) *
            math.exp(-2. * x ** h.m) * (2. / beta) * xcoth(0.5 * beta * x))

# (1/8 pi) P.V. of the thermal kernel against 1/(u + omega).
def _dispersion_part(h, omega, beta, epsabs, epsrel, limit):
    U = cutoff_radius(h)
    operation = 'pv_dispersion_integral'

    def kernel(u):
        return thermal_kernel(h, beta, u)

    def regular(u):
        return kernel(u) / (u + omega)

    pieces = []
    if omega >= U:
        pieces.append(quad(regular, -U, 0., operation, epsabs, epsrel, limit))
    else:
        delta = 0.5 * omega
        if -omega - delta > -U:
            pieces.append(quad(regular, -U, -omega - delta, operation,
                               epsabs, epsrel, limit))

        # Odd part over the symmetric window around the pole.
        def window(v):
            return (kernel(-omega + v) - kernel(-omega - v)) / v

        pieces.append(quad(window, 0., delta, operation,
                           epsabs, epsrel, limit))
        pieces.append(quad(regular, -omega + delta, 0., operation,
                           epsabs, epsrel, limit))
    pieces.append(quad(regular, 0., U, operation, epsabs, epsrel, limit))

    value = sum(p[0] for p in pieces) / (8. * np.pi)
    error = sum(p[1] for p in pieces) / (8. * np.pi)
    return SpectralResult(value, error)

def pv_dispersion_integral(gc, gloc, lam, mu, omega, beta,
                           epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL,
                           limit=QUAD_LIMIT):
    """Principal-value dispersion shift of a spin at frequency `omega`.

    Parameters
    ----------
    gc, gloc: `FormFactor`
        Collective and local energy-exchange form factors.
    lam, mu: `float`
        Collective and local energy-exchange couplings.
    omega: `float`
        Spin frequency, positive.
    beta: `float`
        Inverse temperature, positive.

    Returns
    -------
    result: `SpectralResult`
        Value and absolute error estimate of the quadrature.
    """
    if not omega > 0:
        raise ValueError('Frequency must be positive, received {}'
                         .format(omega))
    if not beta > 0:
        raise ValueError('Inverse temperature must be positive, received {}'
                         .format(beta))
    result = SpectralResult(0., 0.)
    for coupling, h in ((lam, gc), (mu, gloc)):
        if coupling == 0:
            continue
        part = _dispersion_part(h, float(omega), float(beta),
                                epsabs, epsrel, limit)
        result = result + part.scaled(coupling ** 2)
    return result

# G_h(r) coth(beta r / 2) times r^2, finite at r = 0.
def _thermal_radial_r2(h, beta, r):
    return (h.angular_norm_sq * r ** (2 * h.n) * math.exp(-2. * r ** h.m) *
            (2. / beta) * xcoth(0.5 * beta * r))

def decoherence_gamma(h, beta, t, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL,
                      limit=QUAD_LIMIT, maxp1=QUAD_MAXP1):
    if not beta > 0:
        raise ValueError('Inverse temperature must be positive')
    if t < 0:
        raise ValueError('Time must be nonnegative')
    if t == 0:
        return 0.
    t = float(t)
    R = cutoff_radius(h)
    r0 = min(np.pi / t, R)
    operation = 'decoherence_gamma'

    # sin(rt/2) / r, finite at r = 0.
    def inner(r):
        s = 0.5 * t if r == 0 else math.sin(0.5 * r * t) / r
        return _thermal_radial_r2(h, beta, r) * s * s

    value, _ = quad(inner, 0., r0, operation, epsabs, epsrel, limit)
    if r0 < R:
        def outer(r):
            return _thermal_radial_r2(h, beta, r) / (r * r)

        flat, _ = quad(outer, r0, R, operation, epsabs, epsrel, limit)
        osc, _ = quad(outer, r0, R, operation, epsabs, epsrel, limit,
                      weight='cos', wvar=t, maxp1=maxp1)
        value += 0.5 * (flat - osc)
    return value

# x - sin(x), series below 1e-2.
def _x_minus_sin(x):
    if abs(x) < 1e-2:
        x2 = x * x
        return x * x2 * (1. / 6. - x2 * (1. / 120. - x2 / 5040.))
    return x - math.sin(x)

def lamb_shift_s(h, t, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL,
                 limit=QUAD_LIMIT, maxp1=QUAD_MAXP1):
    if t < 0:
        raise ValueError('Time must be nonnegative')
    if t == 0:
        return 0.
    t = float(t)
    R = cutoff_radius(h)
    r0 = min(np.pi / t, R)
    operation = 'lamb_shift_s'

    def density(r):
        return (h.angular_norm_sq * r ** (2 * h.n - 1) *
                math.exp(-2. * r ** h.m))

    def inner(r):
        if r == 0:
            return 0.
        return density(r) * _x_minus_sin(r * t)

    value, _ = quad(inner, 0., r0, operation, epsabs, epsrel, limit)
    value *= -0.5
    if r0 < R:
        linear, _ = quad(lambda r: r * density(r), r0, R, operation,
                         epsabs, epsrel, limit)
        osc, _ = quad(density, r0, R, operation, epsabs, epsrel, limit,
                      weight='sin', wvar=t, maxp1=maxp1)
        value += -0.5 * t * linear + 0.5 * osc
    return value
