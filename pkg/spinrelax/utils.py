import errno
import math
import numpy as np
import os
import sys
import tempfile

# Default parameters.
COTH_SERIES_CUTOFF = 1e-4
LOG_FLOOR = 1e-300

class SpinRelaxError(Exception):
    pass

class QuadratureError(SpinRelaxError):
    def __init__(self, operation, interval, message=''):
        self.operation = operation
        self.interval = tuple(float(x) for x in interval)
        super(QuadratureError, self).__init__(
            '{}: quadrature did not converge on [{:.6g}, {:.6g}]{}'.format(
                operation, self.interval[0], self.interval[1],
                ' ({})'.format(message) if message else ''
            )
        )

class DegenerateSpectrumError(SpinRelaxError):
    pass

class ConfigError(SpinRelaxError):
    def __init__(self, path, message):
        self.path = path
        super(ConfigError, self).__init__('{}: {}'.format(path, message))

def warn(message):
    sys.stderr.write('WARNING: {}\n'.format(message))

def coth(x, cutoff=COTH_SERIES_CUTOFF):
    if np.isscalar(x):
        x = float(x)
        if abs(x) < cutoff:
            return 1. / x + x / 3. if x != 0 else np.inf
        return 1. / math.tanh(x)
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < cutoff
    safe = np.where(small, 1., x)
    out = np.where(small, 0., 1. / np.tanh(safe))
    with np.errstate(divide='ignore'):
        series = 1. / np.where(small, x, 1.) + x / 3.
    out = np.where(small, series, out)
    if out.ndim == 0:
        return float(out)
    return out

# x * coth(x), finite at the origin.
def xcoth(x, cutoff=COTH_SERIES_CUTOFF):
    if np.isscalar(x):
        x = float(x)
        if abs(x) < cutoff:
            return 1. + x * x / 3.
        return x / math.tanh(x)
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < cutoff
    safe = np.where(small, 1., x)
    out = np.where(small, 1. + x * x / 3., safe / np.tanh(safe))
    if out.ndim == 0:
        return float(out)
    return out

def principal_sqrt(z):
    """Square root with the branch cut on the negative real axis.

    A radicand lying on the cut (negative real, either sign of zero
    imaginary part) is mapped to the limit from above, `+i*sqrt(|z|)`.
    """
    z = complex(z)
    if z.imag == 0. and z.real < 0.:
        return complex(0., np.sqrt(-z.real))
    return complex(np.sqrt(z))

# Roots of z**2 - s*z + p = 0, (s + sqrt)/2 first, paired through
# Vieta so that the smaller root keeps full relative precision.
def quadratic_roots(s, p):
    s, p = complex(s), complex(p)
    sq = principal_sqrt(s * s - 4. * p)
    big_plus, big_minus = s + sq, s - sq
    if big_plus == 0 and big_minus == 0:
        return 0j, 0j
    if abs(big_plus) >= abs(big_minus):
        z_plus = big_plus / 2.
        return z_plus, p / z_plus
    z_minus = big_minus / 2.
    return p / z_minus, z_minus

def wrap_to_pi(phase):
    return (np.asarray(phase) + np.pi) % (2 * np.pi) - np.pi

def log_abs_floor(values, floor=LOG_FLOOR):
    ''' Log-magnitude of `values` with zeros and underflowing entries
    clamped at `log(floor)`. Returns the logs and the clamped mask.'''
    values = np.asarray(values)
    mag = np.abs(values)
    clamped = mag < floor
    with np.errstate(divide='ignore'):
        logs = np.log(np.where(clamped, floor, mag))
    return logs, clamped

def mkdir_p(path):
    try:
        os.makedirs(path)
    except OSError as exc:
        if exc.errno == errno.EEXIST and os.path.isdir(path):
            pass
        else:
            raise

def atomic_write(fname, text):
    dirname = os.path.dirname(os.path.abspath(fname))
    mkdir_p(dirname)
    fd, tmp_name = tempfile.mkstemp(dir=dirname, prefix='.tmp_')
    try:
        with os.fdopen(fd, 'w', newline='\n') as of:
            of.write(text)
        os.replace(tmp_name, fname)
    except BaseException:
        if os.path.exists(tmp_name):
            os.remove(tmp_name)
        raise
