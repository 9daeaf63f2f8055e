import numpy as np
from numpy.testing import assert_allclose
import pytest

from spinrelax.dynamics import (
    DFactor, S_MINUS, S_Z, bloch_coefficients, bloch_limits,
    collective_factor, d_factor, evolve_observable, magnetization_trajectory,
    species_trajectories, transverse_components, unwrapped_phase,
)
from spinrelax.oracle import OracleConfig, asymptotic_product_factor
from spinrelax.rates import (
    EnsembleConfig, SpinParams, asymptotic_dephasing_multispecies,
    dephasing_summary, ensemble_rates, rho_from_bloch,
)

def test_d_factor_starts_at_one(random_single_spin, rng):
    for _ in range(50):
        spin, ens = random_single_spin(rng)
        rs = ensemble_rates(ens)[0]
        assert d_factor(rs, spin.rho0, 0.) == 1.

def test_d_factor_without_collective_dephasing(homogeneous_ensemble):
    ens = homogeneous_ensemble(2, varkappa=0.)
    rs = ensemble_rates(ens)[0]
    values = d_factor(rs, ens.spins[0].rho0, np.linspace(0., 500., 11))
    assert np.all(values == 1.)

def test_d_factor_pure_dephasing_limit(homogeneous_ensemble):
    p = 0.3
    ens = homogeneous_ensemble(2, lam=0., varkappa=0.2,
                               bloch=(0., 0., 2. * p - 1.))
    rs = ensemble_rates(ens)[0]
    a = rs.a
    t = np.linspace(0., 400., 101)
    expected = (1. - p) * np.exp(-1j * a * t) + p * np.exp(1j * a * t)
    assert_allclose(d_factor(rs, ens.spins[0].rho0, t), expected, atol=1e-12)

@pytest.mark.parametrize('lam', [ 1e-5, 1e-7 ])
def test_d_factor_continuous_at_zero_exchange(homogeneous_ensemble, lam):
    bloch = (0., 0., -0.4)
    t = np.linspace(0., 100., 201)
    flat = homogeneous_ensemble(2, lam=0., varkappa=0.2, bloch=bloch)
    weak = homogeneous_ensemble(2, lam=lam, varkappa=0.2, bloch=bloch)
    rs0, rs = ensemble_rates(flat)[0], ensemble_rates(weak)[0]
    assert rs0.degenerate and not rs.degenerate
    expected = d_factor(rs0, flat.spins[0].rho0, t)
    assert_allclose(d_factor(rs, weak.spins[0].rho0, t), expected,
                    atol=1e-6)
    cfg = OracleConfig(beta=1., n_spins=2, p=0.3, varkappa_c=0.2, nu_l=0.)
    assert_allclose(expected, asymptotic_product_factor(cfg, t), atol=1e-12)

def test_d_factor_log_forms_agree(homogeneous_ensemble):
    ens = homogeneous_ensemble(2, lam=0.08, varkappa=0.06)
    rs = ensemble_rates(ens)[0]
    factor = DFactor.from_rates(rs, ens.spins[0].rho0)
    t = np.linspace(0., 300., 31)
    log_abs, clamped = factor.log_abs(t)
    assert not np.any(clamped)
    assert_allclose(log_abs, np.log(np.abs(factor(t))), rtol=1e-12,
                    atol=1e-14)
    h = 1e-4
    numeric = (factor(t + h) - factor(t - h)) / (2. * h) / factor(t)
    assert_allclose(factor.log_derivative(t)[1:], numeric[1:], rtol=1e-6)

def test_unwrapped_phase_follows_fast_rotation():
    times = np.linspace(0., 10., 13)
    phase, unresolved = unwrapped_phase(lambda t: np.exp(5j * t), times)
    assert not unresolved
    assert_allclose(phase, 5. * times, atol=1e-10)

def test_unwrapped_phase_reports_unresolved_steps():
    times = np.linspace(0., 1., 5)
    rotation = lambda t: np.exp(11.2j * np.pi * t)
    _, unresolved = unwrapped_phase(rotation, times, max_depth=2)
    assert unresolved
    phase, unresolved = unwrapped_phase(rotation, times)
    assert not unresolved
    assert_allclose(phase, 11.2 * np.pi * times, atol=1e-10)

def test_collective_factor_is_one_at_start(homogeneous_ensemble):
    ens = homogeneous_ensemble(6, lam=0.05, varkappa=0.08)
    rates = ensemble_rates(ens)
    cf = collective_factor(0, ens, rates, [ 0., 1. ])
    assert cf.value[0] == 1.
    assert cf.log_abs[0] == 0.

@pytest.mark.parametrize('n_spins', [ 2, 16, 64 ])
def test_collective_factor_trivial_without_varkappa(homogeneous_ensemble,
                                                    n_spins):
    ens = homogeneous_ensemble(n_spins, lam=0.07, varkappa=0.)
    rates = ensemble_rates(ens)
    cf = collective_factor(0, ens, rates, np.linspace(0., 100., 201))
    assert np.max(np.abs(cf.value - 1.)) < 1e-10

def test_homogeneous_collective_factor_is_power(homogeneous_ensemble):
    n = 9
    ens = homogeneous_ensemble(n, lam=0.05, varkappa=0.06)
    rates = ensemble_rates(ens)
    t = np.linspace(0., 200., 401)
    cf = collective_factor(3, ens, rates, t)
    power = d_factor(rates[0], ens.spins[0].rho0, t) ** (n - 1)
    assert_allclose(cf.value, power, rtol=1e-10)

def test_inhomogeneous_collective_factor_is_product(inhomogeneous_ensemble):
    ens = inhomogeneous_ensemble(lam=0.06, varkappa=0.07)
    rates = ensemble_rates(ens)
    t = np.linspace(0., 150., 301)
    cf = collective_factor(1, ens, rates, t)
    product = (d_factor(rates[0], ens.spins[0].rho0, t) *
               d_factor(rates[2], ens.spins[2].rho0, t))
    assert_allclose(cf.value, product, rtol=1e-10)

def test_collective_envelope(random_single_spin, rng):
    t = np.linspace(0., 2000., 201)
    for _ in range(20):
        spin, single = random_single_spin(rng, random_forms=False)
        n = int(rng.integers(2, 40))
        ens = EnsembleConfig.from_species(single.beta, [ (n, spin) ])
        rates = ensemble_rates(ens)
        summary = dephasing_summary(rates, [ s.rho0 for s in ens.spins ], n)
        cf = collective_factor(0, ens, rates, t)
        bound = (n - 1) * (-summary.gamma * t + summary.c_prime)
        assert np.all(cf.log_abs <= bound + 1e-9)

@pytest.mark.parametrize('n_spins', [ 2, 8, 32 ])
def test_transverse_magnetization_bound(homogeneous_ensemble, n_spins):
    ens = homogeneous_ensemble(n_spins, lam=0.05, varkappa=0.08, nu=0.01)
    rates = ensemble_rates(ens)
    summary = dephasing_summary(rates, [ s.rho0 for s in ens.spins ],
                                n_spins)
    t = np.linspace(0., 2000., 401)
    sminus = magnetization_trajectory(ens, rates, t, with_bloch=False).sminus
    bound = (abs(sminus[0]) * np.exp(-t * rates[0].y) *
             np.exp((n_spins - 1) * (-summary.gamma * t + summary.c_prime)))
    assert np.all(np.abs(sminus) <= bound * (1. + 1e-12) + 1e-300)

def test_evolve_observable_examples(homogeneous_ensemble):
    ens = homogeneous_ensemble(4, lam=0.05, varkappa=0.03, mu=0.02, nu=0.01)
    rates = ensemble_rates(ens)
    rho = ens.spins[0].rho0
    t = np.linspace(0., 50., 6)
    assert_allclose(evolve_observable(np.eye(2), 0, ens, rates, t), 1.,
                    rtol=1e-14)
    assert evolve_observable(S_MINUS, 0, ens, rates, 0.) == \
        pytest.approx(rho[1, 0], rel=1e-15)
    assert evolve_observable(S_Z, 0, ens, rates, 0.) == \
        pytest.approx(0.5 * (rho[0, 0] - rho[1, 1]).real, rel=1e-14)
    late = evolve_observable(S_Z, 0, ens, rates, 1e6)
    assert late == pytest.approx(0.5 * np.tanh(0.5 * ens.beta), rel=1e-12)

def test_evolve_observable_conjugation_symmetry(inhomogeneous_ensemble):
    ens = inhomogeneous_ensemble()
    rates = ensemble_rates(ens)
    t = np.linspace(0., 80., 41)
    minus = evolve_observable(S_MINUS, 1, ens, rates, t)
    plus = evolve_observable(S_MINUS.T, 1, ens, rates, t)
    assert_allclose(plus, minus.conj(), rtol=1e-14)
    sx_op = np.array([ [ 0., 0.5 ], [ 0.5, 0. ] ])
    sx = evolve_observable(sx_op, 1, ens, rates, t)
    assert_allclose(sx.imag, 0., atol=1e-15)
    assert_allclose(sx.real, 0.5 * transverse_components(
        minus + plus)[0], rtol=1e-14)

def test_trajectory_initial_values(inhomogeneous_ensemble):
    ens = inhomogeneous_ensemble()
    rates = ensemble_rates(ens)
    traj = magnetization_trajectory(ens, rates, np.linspace(0., 10., 5))
    sz0 = sum(0.5 * (s.rho0[0, 0] - s.rho0[1, 1]).real for s in ens.spins)
    sminus0 = sum(s.rho0[1, 0] for s in ens.spins)
    assert traj.sz[0] == pytest.approx(sz0, rel=1e-14)
    assert traj.sminus[0] == pytest.approx(sminus0, rel=1e-14)
    assert traj.log_c_magnitude[0] == 0.
    assert traj.sx[0] == pytest.approx(sminus0.real)
    assert traj.sy[0] == pytest.approx(-sminus0.imag)
    assert np.all(np.abs(traj.sz) <= 0.5 * ens.n_spins)

def test_homogeneous_equilibrium(homogeneous_ensemble):
    ens = homogeneous_ensemble(12, lam=0.08, varkappa=0.02)
    rates = ensemble_rates(ens)
    traj = magnetization_trajectory(ens, rates, [ 0., 1e6 ])
    assert traj.sz[-1] == pytest.approx(6. * np.tanh(0.5 * ens.beta),
                                        rel=1e-12)
    assert abs(traj.sminus[-1]) < 1e-12

def test_split_species_match_single_species():
    spin = SpinParams(omega=1.1, lam=0.05, varkappa=0.04, mu=0.01,
                      rho0=rho_from_bloch([ 0.5, -0.3, 0.2 ]))
    single = EnsembleConfig.from_species(1.3, [ (8, spin) ])
    split = EnsembleConfig.from_species(1.3, [ (3, spin), (5, spin) ])
    t = np.linspace(0., 400., 81)
    one = magnetization_trajectory(single, ensemble_rates(single), t)
    two = magnetization_trajectory(split, ensemble_rates(split), t)
    assert_allclose(two.sz, one.sz, rtol=1e-12)
    assert_allclose(two.sminus, one.sminus, rtol=1e-12, atol=1e-15)
    parts = species_trajectories(split, ensemble_rates(split), t)
    assert_allclose(parts[0].sz + parts[1].sz, one.sz, rtol=1e-12)

def test_longitudinal_bloch_equation(homogeneous_ensemble):
    n = 5
    ens = homogeneous_ensemble(n, lam=0.09, varkappa=0.03, mu=0.04)
    rates = ensemble_rates(ens)
    h = 1e-3
    t = np.linspace(0., 200., 21) + h
    grid = np.sort(np.concatenate([ t - h, t, t + h ]))
    sz = magnetization_trajectory(ens, rates, grid, with_bloch=False).sz
    derivative = (sz[2::3] - sz[0::3]) / (2. * h)
    rhs = -rates[0].gamma_relax * (sz[1::3] - 0.5 * n *
                                   np.tanh(0.5 * ens.beta))
    assert_allclose(derivative, rhs, rtol=1e-6)

def test_transverse_bloch_equation(inhomogeneous_ensemble):
    ens = inhomogeneous_ensemble(lam=0.08, varkappa=0.06)
    rates = ensemble_rates(ens)
    h = 1e-3
    t = np.linspace(0., 300., 31) + h
    grid = np.sort(np.concatenate([ t - h, t, t + h ]))
    for j in range(ens.n_spins):
        sminus = evolve_observable(S_MINUS, j, ens, rates, grid)
        gamma_t, b_t = bloch_coefficients(ens, rates, t)[ens.group_of(j)]
        log_derivative = ((sminus[2::3] - sminus[0::3]) / (2. * h) /
                          sminus[1::3])
        expected = -gamma_t + 1j * b_t
        assert np.max(np.abs(log_derivative - expected) /
                      np.abs(expected)) < 1e-6

def test_bloch_coefficients_without_varkappa(homogeneous_ensemble):
    ens = homogeneous_ensemble(7, lam=0.05, varkappa=0., mu=0.02, nu=0.03)
    rates = ensemble_rates(ens)
    rs = rates[0]
    gamma_t, b_t = bloch_coefficients(ens, rates, np.linspace(0., 90., 10))[0]
    assert np.all(gamma_t == 0.5 * rs.gamma_relax + rs.gamma_cons)
    assert np.all(b_t == -rs.omega + rs.x)

def test_log_derivative_limit(homogeneous_ensemble):
    ens = homogeneous_ensemble(2, lam=0.1, varkappa=0.06)
    rs = ensemble_rates(ens)[0]
    factor = DFactor.from_rates(rs, ens.spins[0].rho0)
    gap = rs.z_plus.imag - rs.z_minus.imag
    assert gap > 0.
    t = np.log(1e8) / gap * 1.01
    assert abs(factor.log_derivative(t) - 1j * rs.z_minus) < 1e-6

def test_asymptotic_bloch_coefficients_single_species(homogeneous_ensemble):
    n = 10
    ens = homogeneous_ensemble(n, lam=0.1, varkappa=0.06, nu=0.02)
    rates = ensemble_rates(ens)
    rs = rates[0]
    t_late = 40. / (rs.z_plus.imag - rs.z_minus.imag)
    gamma_t, b_t = bloch_coefficients(ens, rates, [ t_late ])[0]
    expected = asymptotic_dephasing_multispecies([ (n, rs) ])[0]
    assert gamma_t[0] == pytest.approx(expected, rel=1e-8)
    assert gamma_t[0] - 0.5 * rs.gamma_relax - rs.gamma_cons == \
        pytest.approx((n - 1) * rs.z_minus.imag, rel=1e-8)
    assert (n - 1) * rs.z_minus.imag >= 0.
    limit_gamma, limit_b = bloch_limits(ens, rates)[0]
    assert limit_gamma == pytest.approx(expected, rel=1e-12)
    assert b_t[0] == pytest.approx(limit_b, rel=1e-8)
    assert limit_b == pytest.approx(-rs.omega + rs.x +
                                    (n - 1) * rs.z_minus.real, rel=1e-12)

def test_asymptotic_bloch_coefficients_two_species():
    spin_a = SpinParams(omega=1., lam=0.1, varkappa=0.05,
                        rho0=rho_from_bloch([ 0.8, 0., 0.6 ]))
    spin_b = SpinParams(omega=1.3, lam=0.07, varkappa=0.08, nu=0.01,
                        rho0=rho_from_bloch([ 0., 0., -1. ]))
    ens = EnsembleConfig.from_species(2., [ (3, spin_a), (5, spin_b) ])
    rates = ensemble_rates(ens)
    reps = [ rates[0], rates[3] ]
    slowest = min(rs.z_plus.imag - rs.z_minus.imag for rs in reps)
    t_late = 40. / slowest
    expected = asymptotic_dephasing_multispecies([ (3, reps[0]),
                                                  (5, reps[1]) ])
    coefficients = bloch_coefficients(ens, rates, [ t_late ])
    for (gamma_t, _), value in zip(coefficients, expected):
        assert gamma_t[0] == pytest.approx(value, rel=1e-8)

def test_bloch_coefficients_undefined_at_zeros(homogeneous_ensemble):
    ens = homogeneous_ensemble(3, lam=0., varkappa=0.2, bloch=(1., 0., 0.))
    rates = ensemble_rates(ens)
    a = rates[0].a
    t = np.array([ 0., 0.5 * np.pi / abs(a) - 1., 0.5 * np.pi / abs(a) ])
    gamma_t, b_t = bloch_coefficients(ens, rates, t)[0]
    assert np.all(np.isfinite(gamma_t[:2]))
    assert np.isnan(gamma_t[2]) and np.isnan(b_t[2])
    traj = magnetization_trajectory(ens, rates, t)
    assert np.all(np.isfinite(traj.sminus))
    assert abs(traj.sminus[2]) < 1e-20
    cf = collective_factor(0, ens, rates, t, floor=1e-10)
    assert cf.clamped.tolist() == [ False, False, True ]

def test_times_must_be_ordered(homogeneous_ensemble):
    ens = homogeneous_ensemble(2)
    rates = ensemble_rates(ens)
    with pytest.raises(ValueError):
        collective_factor(0, ens, rates, [ 1., 0.5 ])
    with pytest.raises(ValueError):
        magnetization_trajectory(ens, rates, [ -1., 0. ])
