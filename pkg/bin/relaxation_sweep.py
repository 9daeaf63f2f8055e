import numpy as np
import sys

from spinrelax import (
    EnsembleConfig, FormFactor, SpinParams, asymptotic_dephasing_multispecies,
    compute_rateset, rho_from_bloch,
)

# Asymptotic dephasing rate of a homogeneous ensemble against the
# ratio of energy-conserving to energy-exchange coupling.

BETA = 1.
N_SPINS = [ 4, 16, 64 ]
OMEGA = 1.
LAMBDA = 0.05

if __name__ == '__main__':
    f_c = FormFactor(n=0, m=1, angular_norm_sq=1.)
    print('varkappa\tr\t' + '\t'.join('N={}'.format(n) for n in N_SPINS))
    for varkappa in np.linspace(0., 0.05, 11):
        spin = SpinParams(omega=OMEGA, lam=LAMBDA, varkappa=varkappa,
                          rho0=rho_from_bloch([ 1., 0., 0. ]))
        ens = EnsembleConfig.from_species(BETA, [ (1, spin) ], f_c=f_c)
        rs = compute_rateset(spin, ens)
        rates = [ asymptotic_dephasing_multispecies([ (n, rs) ])[0]
                  for n in N_SPINS ]
        sys.stdout.write('{:.4f}\t{:.4g}\t'.format(varkappa, rs.r))
        print('\t'.join('{:.6g}'.format(x) for x in rates))
