import numpy as np
from numpy.testing import assert_allclose
import pytest

from spinrelax.dynamics import collective_factor, d_factor
from spinrelax.oracle import (
    OracleConfig, asymptotic_product_factor, asymptotic_residuals,
    compare_resonance_vs_exact, exact_offdiagonal,
    exact_offdiagonal_enumerated, exact_populations, oracle_ensemble,
    resonance_offdiagonal, substituted_offdiagonal,
)
from spinrelax.rates import ensemble_rates, rho_from_bloch
from spinrelax.spectral import FormFactor, decoherence_gamma

RHO_J = rho_from_bloch([ 0.6, -0.5, 0.3 ])

def _config(n_spins=5, p=0.3, varkappa=0.5, **kwargs):
    return OracleConfig(beta=kwargs.pop('beta', 1.), n_spins=n_spins, p=p,
                        varkappa_c=varkappa, nu_l=kwargs.pop('nu', 0.1),
                        f_l=kwargs.pop('f_l', FormFactor(n=0, m=2)),
                        omega=kwargs.pop('omega', 1.), rho0_j=RHO_J,
                        **kwargs)

def test_config_validation():
    with pytest.raises(ValueError):
        _config(p=1.5)
    with pytest.raises(ValueError):
        _config(n_spins=0)
    with pytest.raises(ValueError):
        _config(n_spins=3, populations=(0.2,))
    with pytest.raises(ValueError):
        _config(n_spins=3, populations=(0.2, 1.2))
    cfg = _config(n_spins=3, populations=(0.2, 0.9))
    assert cfg.other_populations() == (0.2, 0.9)
    assert _config(n_spins=3).other_populations() == (0.3, 0.3)
    assert cfg.a == pytest.approx(-0.5 * 0.25 * 0.5)

def test_exact_offdiagonal_at_start():
    cfg = _config()
    assert exact_offdiagonal(cfg, 0.) == pytest.approx(RHO_J[1, 0],
                                                       rel=1e-15)
    assert_allclose(exact_populations(cfg, [ 0., 3., 50. ]),
                    RHO_J[0, 0].real)

def test_single_spin_has_no_product_factor():
    cfg = _config(n_spins=1)
    t = 4.
    envelope = np.exp(-1j * t - 0.01 * decoherence_gamma(cfg.f_l, 1., t) -
                      0.25 * decoherence_gamma(cfg.f_c, 1., t))
    assert exact_offdiagonal(cfg, t) == pytest.approx(RHO_J[1, 0] * envelope,
                                                      rel=1e-13)

def test_enumeration_matches_product_form():
    cfg = _config(n_spins=6, populations=(0.1, 0.3, 0.3, 0.8, 1.))
    t = np.array([ 0.5, 7., 30. ])
    assert_allclose(exact_offdiagonal_enumerated(cfg, t),
                    exact_offdiagonal(cfg, t), rtol=1e-12, atol=1e-15)
    with pytest.raises(ValueError):
        exact_offdiagonal_enumerated(_config(n_spins=20), 1.)

def test_exact_offdiagonal_is_contracting():
    cfg = _config(n_spins=4, p=0.7)
    values = exact_offdiagonal(cfg, np.linspace(0., 60., 13))
    assert np.all(np.abs(values) <= abs(RHO_J[1, 0]) * (1. + 1e-14))

@pytest.mark.parametrize('n_spins', [ 2, 11 ])
@pytest.mark.parametrize('p', [ 0.3, 0.5 ])
def test_recurrences_of_product_factor(n_spins, p):
    cfg = _config(n_spins=n_spins, p=p)
    period = np.pi / abs(cfg.a)
    full = np.array([ 1., 2., 3. ]) * period
    half = (np.array([ 0., 1., 2. ]) + 0.5) * period
    assert_allclose(np.abs(asymptotic_product_factor(cfg, full)), 1.,
                    atol=1e-8)
    assert_allclose(np.abs(asymptotic_product_factor(cfg, half)),
                    abs(1. - 2. * p) ** (n_spins - 1), atol=1e-8)

    # The same recurrences in the collective factor of the resonance
    # expansion.
    ens = oracle_ensemble(cfg)
    rates = ensemble_rates(ens)
    times = np.sort(np.concatenate([ full, half ]))
    cf = collective_factor(0, ens, rates, times)
    expected = np.where(np.isin(times, full), 1.,
                        abs(1. - 2. * p) ** (n_spins - 1))
    assert_allclose(np.abs(cf.value), expected, atol=1e-8)

def test_vanishing_product_factor_at_half_period():
    cfg = _config(n_spins=11, p=0.5)
    t = np.pi / (2. * abs(cfg.a))
    assert abs(asymptotic_product_factor(cfg, t)) < 1e-8

# Upper level sigma = +1/2 of the other spin contributes e^{+i a t}.
def test_product_factor_phase_convention():
    cfg = _config(n_spins=2, p=0.3)
    a = cfg.a
    t = np.array([ 0., 1., 17. ])
    assert_allclose(asymptotic_product_factor(cfg, t),
                    0.3 * np.exp(1j * a * t) + 0.7 * np.exp(-1j * a * t),
                    rtol=1e-13)

def test_degenerate_d_factor_matches_product_factor():
    cfg = _config(n_spins=2, p=0.3)
    ens = oracle_ensemble(cfg)
    rates = ensemble_rates(ens)
    t = np.linspace(0., 100., 201)
    other = ens.spins[1]
    assert_allclose(d_factor(rates[1], other.rho0, t),
                    asymptotic_product_factor(cfg, t), atol=1e-8)

@pytest.mark.parametrize('n_spins', [ 2, 11 ])
@pytest.mark.parametrize('p', [ 0.3, 0.5 ])
def test_substituted_exact_agrees_with_resonance(n_spins, p):
    cfg = _config(n_spins=n_spins, p=p)
    grid = np.linspace(0., 100., 501)
    report = compare_resonance_vs_exact(cfg, grid, with_exact=False)
    assert report.max_deviation < 1e-8
    assert np.all(np.isnan(report.unsubstituted_deviation))
    assert report.residuals is None

def test_per_spin_populations_agree_with_resonance():
    cfg = _config(n_spins=5, populations=(0.1, 0.6, 0.6, 0.95))
    grid = np.linspace(0., 100., 201)
    assert_allclose(resonance_offdiagonal(cfg, grid),
                    substituted_offdiagonal(cfg, grid), atol=1e-8)

def test_unsubstituted_comparison():
    cfg = _config(n_spins=3, p=0.4)
    report = compare_resonance_vs_exact(cfg, [ 0., 2., 20. ])
    assert report.unsubstituted_deviation[0] < 1e-15
    assert report.exact[0] == pytest.approx(RHO_J[1, 0], rel=1e-15)
    assert report.residuals is not None and report.residuals.t == 20.

@pytest.mark.parametrize('m', [ 1, 2 ])
def test_asymptotic_residuals_small_at_late_times(m):
    cfg = _config(f_c=FormFactor(n=0, m=m), f_l=FormFactor(n=0, m=m))
    res = asymptotic_residuals(cfg, 1e3)
    assert res.gamma_local < 0.02
    assert res.gamma_collective < 0.02
    assert res.lamb_shift < 0.01
    with pytest.raises(ValueError):
        asymptotic_residuals(cfg, 0.)

def test_oracle_ensemble_layout():
    cfg = _config(n_spins=6, populations=(0.2, 0.2, 0.7, 0.2, 0.7))
    ens = oracle_ensemble(cfg)
    assert ens.n_spins == 6
    assert ens.species_counts == (1, 3, 2)
    assert ens.spins[0].nu == cfg.nu_l
    assert all(s.lam == 0. and s.mu == 0. for s in ens.spins)
    assert sorted(s.population for s in ens.spins[1:]) == \
        sorted(cfg.other_populations())
