from dataclasses import dataclass
from itertools import product
import numpy as np

from .spectral import (
    QUAD_EPSABS, QUAD_EPSREL, bath_coulomb_integral, gamma_plus,
    pv_dispersion_integral, spectral_density,
)
from .utils import DegenerateSpectrumError, coth, quadratic_roots

# Default parameters.
DEGENERACY_RTOL = 1e-12
MAX_ENUMERATED_PATTERNS_N0 = 20
MAX_PROJECTION_N0 = 10

@dataclass(frozen=True)
class EnergyLabel:
    deltas: tuple

    def __post_init__(self):
        deltas = tuple(int(d) for d in self.deltas)
        if any(d not in (-2, 0, 2) for d in deltas):
            raise ValueError('Label entries must be -2, 0 or 2, received {}'
                             .format(self.deltas))
        object.__setattr__(self, 'deltas', deltas)

    @classmethod
    def zero(cls, n_spins):
        return cls((0,) * n_spins)

    @classmethod
    def single_flip(cls, n_spins, index, delta):
        deltas = [ 0 ] * n_spins
        deltas[index] = delta
        return cls(tuple(deltas))

    def energy(self, omegas):
        if len(omegas) != len(self.deltas):
            raise ValueError('Label length {} does not match {} spins'
                             .format(len(self.deltas), len(omegas)))
        return -0.5 * float(np.dot(omegas, self.deltas))

    @property
    def zero_indices(self):
        return [ n for n, d in enumerate(self.deltas) if d == 0 ]

    @property
    def n_zero(self):
        return len(self.zero_indices)

@dataclass(frozen=True, eq=False)
class LevelShiftOperator:
    energy: float
    scalar_part: complex
    blocks: tuple
    block_spins: tuple
    block_c: tuple
    e0: float

def _exchange_block(scale, energy):
    c = np.exp(-energy)
    q = scale / -np.expm1(-energy)
    return 1j * q * np.array([ [ c, -c ], [ -1., 1. ] ], dtype=complex)

def build_level_shift(label, ens, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL):
    spins, beta = ens.spins, float(ens.beta)
    if len(label.deltas) != len(spins):
        raise ValueError('Label length {} does not match {} spins'
                         .format(len(label.deltas), len(spins)))
    e0 = sum(s.varkappa * d for s, d in zip(spins, label.deltas) if d != 0)

    x_e, y_e, y_loc = 0., 0., 0.
    for spin, delta in zip(spins, label.deltas):
        if delta == 0:
            continue
        omega = spin.omega
        x_e += 0.5 * delta * pv_dispersion_integral(
            ens.g_c, spin.g_loc, spin.lam, spin.mu, omega, beta,
            epsabs=epsabs, epsrel=epsrel
        ).value
        exchange = (spin.lam ** 2 * spectral_density(ens.g_c, omega) +
                    spin.mu ** 2 * spectral_density(spin.g_loc, omega))
        y_e += 0.125 * exchange * coth(0.5 * beta * omega)
        y_loc += np.pi / (2. * beta) * spin.nu ** 2 * gamma_plus(spin.f_loc)
    y_coll = np.pi / (8. * beta) * gamma_plus(ens.f_c) * e0 ** 2

    coulomb = bath_coulomb_integral(ens.f_c)
    blocks, block_spins, block_c = [], [], []
    for n in label.zero_indices:
        spin = spins[n]
        energy = beta * spin.omega
        coll = _exchange_block(
            0.25 * spin.lam ** 2 * spectral_density(ens.g_c, spin.omega),
            energy
        )
        loc = _exchange_block(
            0.25 * spin.mu ** 2 * spectral_density(spin.g_loc, spin.omega),
            energy
        )
        r_n = 0.25 * spin.varkappa * e0 * coulomb
        block = coll + loc - r_n * np.diag([ 1., -1. ]).astype(complex)
        block.setflags(write=False)
        blocks.append(block)
        block_spins.append(n)
        block_c.append(float(np.exp(-energy)))

    return LevelShiftOperator(
        energy=label.energy(ens.omegas),
        scalar_part=complex(x_e, y_e + y_loc + y_coll),
        blocks=tuple(blocks), block_spins=tuple(block_spins),
        block_c=tuple(block_c), e0=float(e0),
    )

# Relative size of x - y, small when the difference cancels.
def _separation(x, y):
    scale = max(abs(x), abs(y))
    return abs(x - y) / scale if scale > 0 else 0.

# Right and left eigenvectors of z through z - m00 = m11 - z_other and
# z - m11 = m00 - z_other, taking the row with less cancellation.
def _eigenvectors(m, z, z_other):
    use_first = (_separation(m[1, 1], z_other) >=
                 _separation(m[0, 0], z_other))
    first_right = np.array([ m[0, 1], m[1, 1] - z_other ])
    first_left = np.array([ m[1, 0], m[1, 1] - z_other ])
    second_right = np.array([ m[0, 0] - z_other, m[1, 0] ])
    second_left = np.array([ m[0, 0] - z_other, m[0, 1] ])
    if use_first and np.any(first_right != 0) and np.any(first_left != 0):
        v, w = first_right, first_left
    else:
        v, w = second_right, second_left
    if v[0] != 0:
        v = np.array([ 1., v[1] / v[0] ], dtype=complex)
    else:
        v = v / v[1]
    return v, w

def block_eigensystem(block, c=None, rtol=DEGENERACY_RTOL):
    """Eigenvalues and biorthogonal eigenvectors of a 2x2 level shift block.

    Eigenvalues are ordered so that `Im z_plus >= Im z_minus`. A block
    that annihilates `[1, 1]` (no energy-conserving displacement) lists
    that stationary eigenvalue as `z_plus`. Right vectors have first
    component 1 where possible; left vectors `xi_tilde` satisfy
    `<xi, xi_tilde> = 1` with the inner product antilinear in its first
    argument.

    `c` is accepted for interface symmetry with the closed forms and is
    not needed by the computation.
    """
    m = np.asarray(block, dtype=complex)
    trace = m[0, 0] + m[1, 1]
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    z_plus, z_minus = quadratic_roots(trace, det)
    scale = max(1., abs(z_plus), abs(z_minus), np.abs(m).max())
    if abs(z_plus - z_minus) <= rtol * scale:
        raise DegenerateSpectrumError(
            'Level shift block has a repeated eigenvalue {}; resonance '
            'energies are required to be simple'.format(z_plus)
        )
    if z_plus.imag < z_minus.imag:
        z_plus, z_minus = z_minus, z_plus
    if np.all(m.sum(axis=1) == 0) and z_plus != 0:
        z_plus, z_minus = z_minus, z_plus

    out = [ z_plus, z_minus ]
    rights, tildes = [], []
    for z, z_other in ((z_plus, z_minus), (z_minus, z_plus)):
        xi, w = _eigenvectors(m, z, z_other)
        w = w / (w @ xi)
        rights.append(xi)
        tildes.append(w.conj())
    return tuple(out + rights + tildes)

def block_projector(xi, xi_tilde):
    return np.outer(xi, xi_tilde.conj())

def _all_block_eigensystems(op):
    return [ block_eigensystem(block, c)
             for block, c in zip(op.blocks, op.block_c) ]

def resonance_energies(label, ens, patterns=None,
                       max_n0=MAX_ENUMERATED_PATTERNS_N0,
                       rtol=DEGENERACY_RTOL, epsabs=QUAD_EPSABS,
                       epsrel=QUAD_EPSREL):
    op = build_level_shift(label, ens, epsabs=epsabs, epsrel=epsrel)
    n0 = len(op.blocks)
    if patterns is None:
        if n0 > max_n0:
            raise ValueError('Label has {} unflipped spins, enumerating '
                             '2^{} sign patterns needs an explicit pattern '
                             'list'.format(n0, n0))
        patterns = list(product((1, -1), repeat=n0))
    systems = _all_block_eigensystems(op)
    base = op.energy + op.scalar_part
    energies = []
    for pattern in patterns:
        if len(pattern) != n0:
            raise ValueError('Sign pattern length {} does not match {} '
                             'unflipped spins'.format(len(pattern), n0))
        shift = sum(sys_[0] if sign > 0 else sys_[1]
                    for sign, sys_ in zip(pattern, systems))
        energies.append(complex(base + shift))

    values = np.array(energies)
    if len(values) > 1:
        scale = max(1., np.abs(values).max())
        keys = np.round(np.stack([ values.real, values.imag ], axis=1) /
                        (rtol * scale * 1e2))
        if len(np.unique(keys, axis=0)) < len(values):
            raise DegenerateSpectrumError(
                'Resonance energies of label {} are not distinct'
                .format(label.deltas)
            )
    return energies

# Leading-order eigenprojection of one resonance, a tensor product over
# the unflipped spins.
def eigenprojection(label, ens, pattern, epsabs=QUAD_EPSABS,
                    epsrel=QUAD_EPSREL):
    op = build_level_shift(label, ens, epsabs=epsabs, epsrel=epsrel)
    if len(op.blocks) > MAX_PROJECTION_N0:
        raise ValueError('Eigenprojection limited to {} unflipped spins'
                         .format(MAX_PROJECTION_N0))
    if len(pattern) != len(op.blocks):
        raise ValueError('Sign pattern length {} does not match {} '
                         'unflipped spins'.format(len(pattern),
                                                  len(op.blocks)))
    proj = np.ones((1, 1), dtype=complex)
    for sign, sys_ in zip(pattern, _all_block_eigensystems(op)):
        k = 0 if sign > 0 else 1
        proj = np.kron(proj, block_projector(sys_[2 + k], sys_[4 + k]))
    return proj
