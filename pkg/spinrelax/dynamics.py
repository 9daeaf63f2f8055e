from dataclasses import dataclass
import numpy as np

from .rates import collective_amplitude
from .utils import LOG_FLOOR, log_abs_floor, wrap_to_pi

# Default parameters.
D_ZERO_THRESHOLD = 1e-12
MAX_UNWRAP_DEPTH = 40
PHASE_STEP_LIMIT = 0.5 * np.pi

S_Z = np.diag([ 0.5, -0.5 ]).astype(complex)
S_MINUS = np.array([ [ 0, 1 ], [ 0, 0 ] ], dtype=complex)

@dataclass(frozen=True)
class DFactor:
    """Single-spin collective factor `kappa e^{itz+} + (1 - kappa) e^{itz-}`.

    Everything is evaluated relative to the slower-decaying branch,
    `D = e^{itz-} g(t)` with `g = kappa w + 1 - kappa` and
    `w = e^{it(z+ - z-)}`, so `|w| <= 1` for all `t >= 0`.
    """
    kappa: complex
    z_plus: complex
    z_minus: complex

    @classmethod
    def from_rates(cls, rs, rho0):
        return cls(complex(collective_amplitude(rs, rho0)),
                   complex(rs.z_plus), complex(rs.z_minus))

    def bracket(self, t):
        t = np.asarray(t, dtype=float)
        w = np.exp(1j * t * (self.z_plus - self.z_minus))
        return 1. + self.kappa * (w - 1.)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.exp(1j * t * self.z_minus) * self.bracket(t)

    def log_derivative(self, t):
        t = np.asarray(t, dtype=float)
        w = np.exp(1j * t * (self.z_plus - self.z_minus))
        num = (1j * self.z_plus * self.kappa * w +
               1j * self.z_minus * (1. - self.kappa))
        return num / (1. + self.kappa * (w - 1.))

    def log_abs(self, t, floor=LOG_FLOOR):
        t = np.asarray(t, dtype=float)
        log_g, clamped = log_abs_floor(self.bracket(t), floor=floor)
        return -t * self.z_minus.imag + log_g, clamped

def d_factor(rs, rho0, t):
    value = DFactor.from_rates(rs, rho0)(t)
    if np.ndim(value) == 0:
        return complex(value)
    return value

# Continuous phase of func along increasing times, starting from the
# principal value at times[0].
def unwrapped_phase(func, times, step_limit=PHASE_STEP_LIMIT,
                    max_depth=MAX_UNWRAP_DEPTH):
    times = np.asarray(times, dtype=float)
    values = np.asarray(func(times))
    steps = wrap_to_pi(np.diff(np.angle(values)))
    unresolved = False

    def refine(t0, t1, v0, v1, depth):
        step = float(wrap_to_pi(np.angle(v1) - np.angle(v0)))
        if abs(step) <= step_limit:
            return step, False
        if depth == 0:
            return step, True
        tm = 0.5 * (t0 + t1)
        vm = complex(func(tm))
        left, bad_left = refine(t0, tm, v0, vm, depth - 1)
        right, bad_right = refine(tm, t1, vm, v1, depth - 1)
        return left + right, bad_left or bad_right

    for k in np.nonzero(np.abs(steps) > step_limit)[0]:
        steps[k], bad = refine(times[k], times[k + 1], values[k],
                               values[k + 1], max_depth)
        unresolved = unresolved or bad
    phase = np.angle(values[0]) + np.concatenate([ [ 0. ], np.cumsum(steps) ])
    return phase, unresolved

@dataclass(frozen=True, eq=False)
class CollectiveFactor:
    times: np.ndarray
    log_abs: np.ndarray
    phase: np.ndarray
    clamped: np.ndarray
    unwrap_unresolved: bool = False

    @property
    def value(self):
        return np.exp(self.log_abs + 1j * self.phase)

def _check_times(times):
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times < 0):
        raise ValueError('Times must be nonnegative')
    if np.any(np.diff(times) < 0):
        raise ValueError('Times must be nondecreasing')
    return times

def _group_factors(ens, rates):
    return [ (start, count,
              DFactor.from_rates(rates[start], ens.spins[start].rho0))
             for start, count in ens.groups() ]

def collective_factor(j, ens, rates, t, floor=LOG_FLOOR):
    """Product of the single-spin factors of every spin but `j`.

    Magnitudes are summed in the log domain, phases are tracked
    continuously from `t = 0` along the (nondecreasing) times.
    """
    times = _check_times(t)
    grid = np.concatenate([ [ 0. ], times ])
    g_j = ens.group_of(j)
    log_abs = np.zeros(len(times))
    phase = np.zeros(len(times))
    clamped = np.zeros(len(times), dtype=bool)
    unresolved = False
    for g, (start, count, factor) in enumerate(_group_factors(ens, rates)):
        mult = count - (1 if g == g_j else 0)
        if mult == 0:
            continue
        log_d, low = factor.log_abs(times, floor=floor)
        arg, bad = unwrapped_phase(factor.bracket, grid)
        log_abs += mult * log_d
        phase += mult * (times * factor.z_minus.real + arg[1:])
        clamped |= low | (log_d < np.log(floor))
        unresolved = unresolved or bad
    return CollectiveFactor(times, log_abs, phase, clamped, unresolved)

def _off_diagonal_exponent(rs, times):
    return 1j * times * (-rs.omega + rs.x) - times * rs.y

def _evolve(a, j, ens, rates, times, cf):
    rs = rates[j]
    rho = ens.spins[j].rho0
    c = rs.c
    w_up, w_down = 1. / (1. + c), c / (1. + c)
    value = (w_up * a[0, 0] + w_down * a[1, 1]) * np.ones(len(times))
    value = value + (np.exp(-times * rs.gamma_relax) *
                     (rho[0, 0] - w_up) * (a[0, 0] - a[1, 1]))
    coherent = np.exp(_off_diagonal_exponent(rs, times) + cf.log_abs +
                      1j * cf.phase)
    value = value + coherent * rho[1, 0] * a[0, 1]
    value = value + coherent.conj() * rho[0, 1] * a[1, 0]
    return value

def evolve_observable(a_matrix, j, ens, rates, t):
    """Expectation of a single-spin observable on spin `j` at time(s) `t`.

    Main term of the resonance expansion: equilibrium, population decay
    and the two off-diagonal resonances. The `e = +omega` resonance is
    the complex conjugate of the `e = -omega` one.
    """
    a = np.asarray(a_matrix, dtype=complex)
    times = _check_times(t)
    cf = collective_factor(j, ens, rates, times)
    value = _evolve(a, j, ens, rates, times, cf)
    if np.ndim(t) == 0:
        return complex(value[0])
    return value

def transverse_components(sminus):
    sminus = np.asarray(sminus)
    return sminus.real, -sminus.imag

@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    sz: np.ndarray
    sminus: np.ndarray
    log_c_magnitude: np.ndarray
    gamma_t: np.ndarray = None
    b_t: np.ndarray = None
    clamped: np.ndarray = None
    unwrap_unresolved: bool = False

    @property
    def sx(self):
        return transverse_components(self.sminus)[0]

    @property
    def sy(self):
        return transverse_components(self.sminus)[1]

def _group_trajectory(g, ens, rates, times, with_bloch=True):
    start, count = ens.groups()[g]
    cf = collective_factor(start, ens, rates, times)
    sz = count * _evolve(S_Z, start, ens, rates, times, cf).real
    sminus = count * _evolve(S_MINUS, start, ens, rates, times, cf)
    gamma_t = b_t = None
    if with_bloch:
        gamma_t, b_t = _bloch_for_group(g, ens, rates, times)
    return Trajectory(times, sz, sminus, cf.log_abs, gamma_t, b_t,
                      cf.clamped, cf.unwrap_unresolved)

def species_trajectories(ens, rates, grid, with_bloch=True):
    times = _check_times(grid)
    return [ _group_trajectory(g, ens, rates, times, with_bloch=with_bloch)
             for g in range(len(ens.groups())) ]

def magnetization_trajectory(ens, rates, grid, j=0, with_bloch=True):
    """Total `<S^z>` and `<S^->` of the ensemble.

    `gamma_t`, `b_t` and `log_c_magnitude` belong to the group of spin
    `j`; they describe the total only for a single group of identical
    spins.
    """
    times = _check_times(grid)
    parts = species_trajectories(ens, rates, times, with_bloch=False)
    g_j = ens.group_of(j)
    gamma_t = b_t = None
    if with_bloch:
        gamma_t, b_t = _bloch_for_group(g_j, ens, rates, times)
    return Trajectory(
        times,
        np.sum([ p.sz for p in parts ], axis=0),
        np.sum([ p.sminus for p in parts ], axis=0),
        parts[g_j].log_c_magnitude, gamma_t, b_t,
        np.any([ p.clamped for p in parts ], axis=0),
        any(p.unwrap_unresolved for p in parts),
    )

def _bloch_for_group(g, ens, rates, times, threshold=D_ZERO_THRESHOLD):
    start, _ = ens.groups()[g]
    rs = rates[start]
    gamma_t = np.full(len(times), 0.5 * rs.gamma_relax + rs.gamma_cons)
    b_t = np.full(len(times), -rs.omega + rs.x)
    undefined = np.zeros(len(times), dtype=bool)
    for h, (h_start, count, factor) in enumerate(_group_factors(ens, rates)):
        mult = count - (1 if h == g else 0)
        if mult == 0:
            continue
        undefined |= np.abs(factor.bracket(times)) < threshold
        with np.errstate(divide='ignore', invalid='ignore'):
            ratio = factor.log_derivative(times)
        gamma_t = gamma_t - mult * ratio.real
        b_t = b_t + mult * ratio.imag
    gamma_t[undefined] = np.nan
    b_t[undefined] = np.nan
    return gamma_t, b_t

def bloch_coefficients(ens, rates, grid, threshold=D_ZERO_THRESHOLD):
    """Time-dependent dephasing rate and field of each group of spins.

    Returns
    -------
    coefficients: `list` of (`numpy.ndarray`, `numpy.ndarray`)
        `(Gamma(t), B(t))` per group, `nan` where a contributing factor
        comes within `threshold` of zero.
    """
    times = _check_times(grid)
    return [ _bloch_for_group(g, ens, rates, times, threshold=threshold)
             for g in range(len(ens.groups())) ]

def bloch_limits(ens, rates):
    out = []
    for g, (start, count) in enumerate(ens.groups()):
        rs = rates[start]
        gamma, field = 0.5 * rs.gamma_relax + rs.gamma_cons, -rs.omega + rs.x
        for h, (h_start, h_count) in enumerate(ens.groups()):
            mult = h_count - (1 if h == g else 0)
            gamma += mult * rates[h_start].z_minus.imag
            field += mult * rates[h_start].z_minus.real
        out.append((gamma, field))
    return out
