import numpy as np
import pytest

from spinrelax.rates import EnsembleConfig, SpinParams
from spinrelax.validity import bohr_gap, check_validity, frequencies_distinct

def _ensemble(omegas, **couplings):
    return EnsembleConfig(1., tuple(SpinParams(omega=w, **couplings)
                                    for w in omegas))

def test_bohr_gap_homogeneous():
    assert bohr_gap([ 1.3 ] * 40) == (1.3, True)

def test_bohr_gap_two_frequencies():
    delta, exact = bohr_gap([ 1., 1.1 ])
    assert exact
    assert delta == pytest.approx(0.1, rel=1e-9)

def test_bohr_gap_symmetries():
    omegas = np.array([ 1., 1.13, 1.29 ])
    delta, _ = bohr_gap(omegas)
    assert delta > 0
    assert bohr_gap(omegas[::-1])[0] == pytest.approx(delta, rel=1e-9)
    assert bohr_gap(2. * omegas)[0] == pytest.approx(2. * delta, rel=1e-9)
    # 2 + 2 * 1.29 - 4 * 1.13 bounds the gap from above.
    assert delta <= 0.03 + 1e-9

def test_bohr_gap_large_ensembles_use_bound():
    omegas = np.linspace(1., 1.2, 12)
    delta, exact = bohr_gap(omegas)
    assert not exact
    assert delta == pytest.approx(0.8)
    delta, exact = bohr_gap(np.linspace(1., 3., 12))
    assert delta == 0. and not exact

def test_zero_couplings_pass():
    report = check_validity(_ensemble([ 1., 1.1 ]))
    assert report.ok and report.failures() == []
    assert report.gap_margin == 0. and report.local_margin == 0.
    assert report.collective_margin == 0.

def test_gap_margin_scales_with_n_squared(homogeneous_ensemble):
    report = check_validity(homogeneous_ensemble(4))
    assert report.alpha_max == pytest.approx(0.1)
    assert report.delta == 1.
    assert report.gap_margin == pytest.approx(16. * 0.01)
    assert report.gap_margin_exchange == pytest.approx(16. * 0.01)
    assert report.collective_margin == pytest.approx(0.04)
    assert not report.gap_ok and report.collective_ok and report.local_ok
    assert report.failures() == [ 'gap' ]
    assert not report.ok
    assert check_validity(homogeneous_ensemble(4), threshold=0.2).ok

def test_local_margin(homogeneous_ensemble):
    report = check_validity(homogeneous_ensemble(1, lam=0., varkappa=0.,
                                                 mu=0.3, nu=0.2, omega=2.))
    assert report.local_margin == pytest.approx(0.15)
    assert report.local_cross_margin == pytest.approx(0.03)
    assert report.failures() == [ 'local' ]

def test_report_serialization(homogeneous_ensemble):
    out = check_validity(homogeneous_ensemble(2)).to_dict()
    assert out['ok'] is True
    assert out['threshold'] == 0.1
    assert set([ 'gap_margin', 'delta_exact', 'assumption_a_ok' ]) <= \
        set(out)

def test_frequencies_distinct(homogeneous_ensemble):
    assert frequencies_distinct(_ensemble([ 1., 1.2, 1.4 ]))
    assert not frequencies_distinct(_ensemble([ 1., 1.2, 1. ]))
    assert frequencies_distinct(_ensemble([ 1., 1. ]))
    assert frequencies_distinct(homogeneous_ensemble(5))
    report = check_validity(_ensemble([ 1., 1.2, 1. ]))
    assert not report.assumption_a_ok

def test_frequencies_distinct_across_species():
    spin_a, spin_b = SpinParams(omega=1.), SpinParams(omega=1.2)
    same = SpinParams(omega=1., varkappa=0.02)
    assert frequencies_distinct(EnsembleConfig.from_species(
        1., [ (3, spin_a), (2, spin_b) ]))
    shared = EnsembleConfig.from_species(1., [ (3, spin_a), (2, same) ])
    assert not frequencies_distinct(shared)
    assert not check_validity(shared).assumption_a_ok
