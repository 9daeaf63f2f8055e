import numpy as np
import pytest

from spinrelax import EnsembleConfig, FormFactor, SpinParams, rho_from_bloch

COUPLING_RANGE = (1e-3, 1e-1)
OMEGA_RANGE = (0.5, 2.)
BETA_RANGE = (0.1, 10.)

def _random_bloch(rng):
    v = rng.normal(size=3)
    return rng.uniform(0., 1.) * v / np.linalg.norm(v)

def _random_form_factor(rng):
    return FormFactor(n=int(rng.integers(0, 2)), m=int(rng.integers(1, 3)),
                      angular_norm_sq=float(rng.uniform(0.5, 2.)))

@pytest.fixture
def rng():
    return np.random.default_rng(0)

# Factory for single-spin ensembles with couplings, frequency and
# temperature drawn from the ranges above.
@pytest.fixture
def random_single_spin():
    def draw(rng, couplings=COUPLING_RANGE, random_forms=True):
        lam, varkappa, mu, nu = rng.uniform(*couplings, size=4)
        forms = ([ _random_form_factor(rng) for _ in range(4) ]
                 if random_forms else [ FormFactor() ] * 4)
        spin = SpinParams(
            omega=float(rng.uniform(*OMEGA_RANGE)), lam=float(lam),
            varkappa=float(varkappa), mu=float(mu), nu=float(nu),
            g_loc=forms[0], f_loc=forms[1],
            rho0=rho_from_bloch(_random_bloch(rng)),
        )
        ens = EnsembleConfig(float(rng.uniform(*BETA_RANGE)), (spin,),
                             g_c=forms[2], f_c=forms[3])
        return spin, ens
    return draw

# Spins with pairwise distinct frequencies and a common varkappa.
@pytest.fixture
def inhomogeneous_ensemble():
    def build(omegas=(1., 1.13, 1.29), beta=1., lam=0.1, varkappa=0.05,
              mu=0.02, nu=0.01):
        spins = tuple(
            SpinParams(omega=w, lam=lam, varkappa=varkappa, mu=mu, nu=nu,
                       rho0=rho_from_bloch([ 0.6, 0.2, 0.3 ]))
            for w in omegas
        )
        return EnsembleConfig(beta, spins)
    return build

@pytest.fixture
def homogeneous_ensemble():
    def build(n_spins, omega=1., beta=1., lam=0.1, varkappa=0.05, mu=0.,
              nu=0., bloch=(0.6, 0., 0.3), f_c=None):
        spin = SpinParams(omega=omega, lam=lam, varkappa=varkappa, mu=mu,
                          nu=nu, rho0=rho_from_bloch(bloch))
        return EnsembleConfig.from_species(beta, [ (n_spins, spin) ],
                                           f_c=f_c)
    return build
