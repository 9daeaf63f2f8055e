import copy
from dataclasses import dataclass
import io
import json
import multiprocessing
import numpy as np
import os
import sys

from .dynamics import bloch_limits, magnetization_trajectory
from .dynamics import species_trajectories
from .lso import EnergyLabel, block_eigensystem, build_level_shift
from .oracle import OracleConfig, compare_resonance_vs_exact
from .rates import (
    EnsembleConfig, SpinParams, asymptotic_dephasing_multispecies,
    collective_amplitude, collective_half_life_bound, dephasing_summary,
    ensemble_rates, rho_from_bloch,
)
from .spectral import (
    FormFactor, QUAD_EPSABS, QUAD_EPSREL, bath_coulomb_integral,
    spectral_density,
)
from .utils import ConfigError, SpinRelaxError, atomic_write, mkdir_p, warn
from .validity import VALIDITY_THRESHOLD, check_validity

# Default parameters.
CSV_FORMAT = '%.17g'
LOG_T_MIN_RATIO = 1e-4
NUM_POINTS = 1024
OUTPUT_DEFAULTS = {
    'trajectory': True,
    'rates': True,
    'bloch_coefficients': True,
    'oracle_check': False,
    'validity': True,
}
VERBOSE = 1

@dataclass(eq=False)
class Scenario:
    ensemble: EnsembleConfig
    names: list
    times: np.ndarray
    outputs: dict
    sweep: dict
    epsabs: float
    epsrel: float
    threshold: float
    raw: dict

# Config parsing.

def _join(path, key):
    return '{}.{}'.format(path, key) if path else str(key)

def _mapping(value, path):
    if not isinstance(value, dict):
        raise ConfigError(path, 'expected an object')
    return value

def _check_keys(d, allowed, path):
    for key in d:
        if key not in allowed:
            raise ConfigError(_join(path, key), 'unknown field')

def _require(d, key, path):
    if key not in d:
        raise ConfigError(_join(path, key), 'missing required field')
    return d[key]

def _number(value, path, positive=False, nonnegative=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, 'expected a number, received {!r}'
                          .format(value))
    value = float(value)
    if not np.isfinite(value):
        raise ConfigError(path, 'must be finite')
    if positive and not value > 0:
        raise ConfigError(path, 'must be positive')
    if nonnegative and value < 0:
        raise ConfigError(path, 'must be nonnegative')
    return value

def _integer(value, path, minimum):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(path, 'expected an integer, received {!r}'
                          .format(value))
    if value < minimum:
        raise ConfigError(path, 'must be at least {}'.format(minimum))
    return value

def _flag(value, path):
    if not isinstance(value, bool):
        raise ConfigError(path, 'expected true or false')
    return value

def _form_factor(value, path):
    d = _mapping(value, path)
    _check_keys(d, ('n', 'm', 'angular_norm_sq'), path)
    try:
        return FormFactor(
            n=_integer(d.get('n', 0), _join(path, 'n'), 0),
            m=_integer(d.get('m', 1), _join(path, 'm'), 1),
            angular_norm_sq=_number(d.get('angular_norm_sq', 1.),
                                    _join(path, 'angular_norm_sq'),
                                    positive=True),
        )
    except ValueError as e:
        raise ConfigError(path, str(e))

SPECIES_KEYS = ('name', 'count', 'omega', 'lambda', 'varkappa', 'mu', 'nu',
                'g_loc', 'f_loc', 'bloch')

def _species(value, index, path):
    path = _join(path, index)
    d = _mapping(value, path)
    _check_keys(d, SPECIES_KEYS, path)
    name = d.get('name', chr(ord('A') + index))
    if not isinstance(name, str) or not name:
        raise ConfigError(_join(path, 'name'), 'expected a nonempty string')
    count = _integer(d.get('count', 1), _join(path, 'count'), 1)
    omega = _number(_require(d, 'omega', path), _join(path, 'omega'),
                    positive=True)
    couplings = { key: _number(d.get(key, 0.), _join(path, key))
                  for key in ('lambda', 'varkappa', 'mu', 'nu') }
    bloch = d.get('bloch', [ 1., 0., 0. ])
    if not isinstance(bloch, list) or len(bloch) != 3:
        raise ConfigError(_join(path, 'bloch'), 'expected three numbers')
    bloch = [ _number(v, _join(_join(path, 'bloch'), k))
              for k, v in enumerate(bloch) ]
    try:
        rho0 = rho_from_bloch(bloch)
    except ValueError as e:
        raise ConfigError(_join(path, 'bloch'), str(e))
    spin = SpinParams(
        omega=omega, lam=couplings['lambda'],
        varkappa=couplings['varkappa'], mu=couplings['mu'],
        nu=couplings['nu'],
        g_loc=_form_factor(d.get('g_loc', {}), _join(path, 'g_loc')),
        f_loc=_form_factor(d.get('f_loc', {}), _join(path, 'f_loc')),
        rho0=rho0,
    )
    return name, count, spin

def _grid(value, path, grid_points=None):
    d = _mapping(value, path)
    _check_keys(d, ('t_max', 'num_points', 'spacing', 't_min'), path)
    t_max = _number(_require(d, 't_max', path), _join(path, 't_max'),
                    positive=True)
    if grid_points is None:
        n = _integer(d.get('num_points', NUM_POINTS),
                     _join(path, 'num_points'), 2)
    else:
        n = _integer(grid_points, '--grid-points', 2)
    spacing = d.get('spacing', 'linear')
    if spacing == 'linear':
        return np.linspace(0., t_max, n)
    if spacing == 'log':
        t_min = _number(d.get('t_min', LOG_T_MIN_RATIO * t_max),
                        _join(path, 't_min'), positive=True)
        if t_min >= t_max:
            raise ConfigError(_join(path, 't_min'), 'must be below t_max')
        return np.concatenate([ [ 0. ], np.geomspace(t_min, t_max, n - 1) ])
    raise ConfigError(_join(path, 'spacing'),
                      "expected 'linear' or 'log', received {!r}"
                      .format(spacing))

def parse_scenario(raw, grid_points=None, tolerance=None):
    """Validate a scenario document and build its `Scenario`.

    Raises `ConfigError` naming the dotted path of the first offending
    field.
    """
    raw = _mapping(raw, '<root>')
    _check_keys(raw, ('ensemble', 'grid', 'outputs', 'sweep', 'numerics',
                      'validity'), '')

    ens_raw = _mapping(_require(raw, 'ensemble', ''), 'ensemble')
    _check_keys(ens_raw, ('beta', 'collective', 'species'), 'ensemble')
    beta = _number(_require(ens_raw, 'beta', 'ensemble'), 'ensemble.beta',
                   positive=True)
    coll = _mapping(ens_raw.get('collective', {}), 'ensemble.collective')
    _check_keys(coll, ('g', 'f'), 'ensemble.collective')
    g_c = _form_factor(coll.get('g', {}), 'ensemble.collective.g')
    f_c = _form_factor(coll.get('f', {}), 'ensemble.collective.f')
    species_raw = _require(ens_raw, 'species', 'ensemble')
    if not isinstance(species_raw, list) or len(species_raw) == 0:
        raise ConfigError('ensemble.species', 'expected a nonempty list')
    species = [ _species(s, i, 'ensemble.species')
                for i, s in enumerate(species_raw) ]
    names = [ name for name, _, _ in species ]
    if len(set(names)) != len(names):
        raise ConfigError('ensemble.species', 'species names must be unique')
    ensemble = EnsembleConfig.from_species(
        beta, [ (count, spin) for _, count, spin in species ],
        g_c=g_c, f_c=f_c
    )

    times = _grid(_require(raw, 'grid', ''), 'grid', grid_points)

    out_raw = _mapping(raw.get('outputs', {}), 'outputs')
    _check_keys(out_raw, tuple(OUTPUT_DEFAULTS), 'outputs')
    outputs = dict(OUTPUT_DEFAULTS)
    for key, value in out_raw.items():
        outputs[key] = _flag(value, _join('outputs', key))

    sweep = None
    if 'sweep' in raw:
        sw = _mapping(raw['sweep'], 'sweep')
        _check_keys(sw, ('parameter', 'values'), 'sweep')
        parameter = _require(sw, 'parameter', 'sweep')
        if not isinstance(parameter, str) or not parameter:
            raise ConfigError('sweep.parameter', 'expected a dotted path')
        values = _require(sw, 'values', 'sweep')
        if not isinstance(values, list) or len(values) == 0:
            raise ConfigError('sweep.values', 'expected a nonempty list')
        sweep = {
            'parameter': parameter,
            'values': [ _number(v, 'sweep.values.{}'.format(k))
                        for k, v in enumerate(values) ],
        }

    num = _mapping(raw.get('numerics', {}), 'numerics')
    _check_keys(num, ('epsabs', 'epsrel'), 'numerics')
    epsabs = _number(num.get('epsabs', QUAD_EPSABS), 'numerics.epsabs',
                     positive=True)
    epsrel = _number(num.get('epsrel', QUAD_EPSREL), 'numerics.epsrel',
                     positive=True)

    val = _mapping(raw.get('validity', {}), 'validity')
    _check_keys(val, ('threshold',), 'validity')
    if tolerance is None:
        threshold = _number(val.get('threshold', VALIDITY_THRESHOLD),
                            'validity.threshold', positive=True)
    else:
        threshold = _number(tolerance, '--tolerance', positive=True)

    return Scenario(ensemble, names, times, outputs, sweep, epsabs, epsrel,
                    threshold, raw)

def load_raw(fname):
    try:
        with open(fname, 'r') as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(fname, 'not valid JSON ({})'.format(e))

def load_scenario(fname, grid_points=None, tolerance=None):
    return parse_scenario(load_raw(fname), grid_points=grid_points,
                          tolerance=tolerance)

# Sweep parameter paths.

def _set_path(raw, path, value):
    keys = path.split('.')
    node = raw
    for depth, key in enumerate(keys[:-1]):
        node = _step(node, key, '.'.join(keys[:depth + 1]))
    last = keys[-1]
    if isinstance(node, list):
        node[_list_index(node, last, path)] = value
    elif isinstance(node, dict):
        node[last] = value
    else:
        raise ConfigError(path, 'does not name a config field')

def _list_index(node, key, path):
    try:
        index = int(key)
    except ValueError:
        raise ConfigError(path, 'expected a list index, received {!r}'
                          .format(key))
    if not 0 <= index < len(node):
        raise ConfigError(path, 'index {} out of range'.format(index))
    return index

def _step(node, key, path):
    if isinstance(node, list):
        return node[_list_index(node, key, path)]
    if isinstance(node, dict):
        if key not in node:
            node[key] = {}
        return node[key]
    raise ConfigError(path, 'does not name a config field')

# `ensemble.species.<i>.r` sets varkappa so that |a| / b equals the value.
def apply_sweep_value(raw, parameter, value):
    raw = copy.deepcopy(raw)
    raw.pop('sweep', None)
    keys = parameter.split('.')
    if keys[-1] != 'r':
        _set_path(raw, parameter, value)
        return raw
    if len(keys) != 4 or keys[:2] != [ 'ensemble', 'species' ]:
        raise ConfigError(parameter, "'r' is only defined per species")
    scenario = parse_scenario(dict(raw, grid={ 't_max': 1., 'num_points': 2 }))
    index = _list_index(raw['ensemble']['species'], keys[2], parameter)
    start, _ = scenario.ensemble.groups()[index]
    spin, ens = scenario.ensemble.spins[start], scenario.ensemble
    energy = ens.beta * spin.omega
    b = 0.25 * (spin.lam ** 2 * spectral_density(ens.g_c, spin.omega) +
                spin.mu ** 2 * spectral_density(spin.g_loc, spin.omega)
                ) / -np.expm1(-energy)
    if b == 0 and value != 0:
        raise ConfigError(parameter, 'undefined without exchange coupling')
    varkappa = np.sqrt(2. * value * b / bath_coulomb_integral(ens.f_c))
    raw['ensemble']['species'][index]['varkappa'] = float(varkappa)
    return raw

# Output writing.

def format_csv(columns, data):
    buf = io.StringIO()
    np.savetxt(buf, np.column_stack(data), fmt=CSV_FORMAT, delimiter=',',
               header=','.join(columns), comments='', newline='\n')
    return buf.getvalue()

def write_csv(fname, columns, data):
    atomic_write(fname, format_csv(columns, data))

def _finite_or_none(x):
    x = float(x)
    return x if np.isfinite(x) else None

def _complex_pair(z):
    if z is None:
        return None
    return [ _finite_or_none(z.real), _finite_or_none(z.imag) ]

def write_json(fname, report):
    atomic_write(fname, json.dumps(report, sort_keys=True, indent=2) + '\n')

def rates_report(scenario, rates, validity=None):
    ens = scenario.ensemble
    groups = ens.groups()
    reps = [ rates[start] for start, _ in groups ]
    gamma_inf = asymptotic_dephasing_multispecies(
        [ (count, rs) for (_, count), rs in zip(groups, reps) ]
    )
    limits = bloch_limits(ens, rates)
    species = []
    for g, (name, (start, count)) in enumerate(zip(scenario.names, groups)):
        rs = rates[start]
        species.append({
            'name': name,
            'count': count,
            'omega': rs.omega,
            'b': rs.b,
            'c': rs.c,
            'Z_beta': rs.z_beta,
            'a': rs.a,
            'X': rs.x,
            'X_abs_error': rs.x_abs_error,
            'Y': rs.y,
            'z_plus': _complex_pair(rs.z_plus),
            'z_minus': _complex_pair(rs.z_minus),
            'alpha_plus': _complex_pair(rs.alpha_plus),
            'c_alpha_plus': _complex_pair(rs.c_alpha_plus),
            'alpha_minus': _complex_pair(rs.alpha_minus),
            'gamma_relax': rs.gamma_relax,
            'gamma_cons': rs.gamma_cons,
            'r': None if rs.r is None else _finite_or_none(rs.r),
            'kappa': _complex_pair(collective_amplitude(
                rs, ens.spins[start].rho0)),
            'Gamma_inf': _finite_or_none(gamma_inf[g]),
            'B_inf': _finite_or_none(limits[g][1]),
        })
    summary = dephasing_summary(rates, [ s.rho0 for s in ens.spins ],
                                ens.n_spins)
    report = {
        'N': ens.n_spins,
        'beta': ens.beta,
        'species': species,
        'dephasing': {
            'gamma': summary.gamma,
            'c_prime': summary.c_prime,
            'gamma_prime': summary.gamma_prime,
            'gamma_deph': summary.gamma_deph,
            'half_life_bound': _finite_or_none(
                collective_half_life_bound(summary, ens.n_spins)),
        },
        'main_term_only': True,
    }
    if validity is not None:
        report['validity'] = { key: (_finite_or_none(v)
                                     if isinstance(v, float) else v)
                               for key, v in validity.to_dict().items() }
    return report

def trajectory_table(scenario, rates, with_bloch=True):
    ens, times = scenario.ensemble, scenario.times
    parts = species_trajectories(ens, rates, times, with_bloch=with_bloch)
    total = magnetization_trajectory(ens, rates, times, with_bloch=False)
    columns = [ 't', 'sz_total', 'sminus_re', 'sminus_im' ]
    data = [ times, total.sz, total.sminus.real, total.sminus.imag ]
    for name, part in zip(scenario.names, parts):
        suffix = '' if len(parts) == 1 else '_{}'.format(name)
        if len(parts) > 1:
            columns += [ 'sz' + suffix, 'sminus_re' + suffix,
                         'sminus_im' + suffix ]
            data += [ part.sz, part.sminus.real, part.sminus.imag ]
        if with_bloch:
            columns += [ 'gamma_t' + suffix, 'b_t' + suffix ]
            data += [ part.gamma_t, part.b_t ]
        columns.append('log_abs_c' + suffix)
        data.append(part.log_c_magnitude)
        if np.any(part.clamped):
            warn('collective factor of species {} underflows on {} grid '
                 'points, log magnitude clamped'.format(
                     name, int(np.sum(part.clamped))))
        if part.unwrap_unresolved:
            warn('phase of the collective factor of species {} unresolved '
                 'between some grid points, refine the time grid'
                 .format(name))
        if with_bloch and np.any(np.isnan(part.gamma_t)):
            warn('Bloch coefficients of species {} undefined on {} grid '
                 'points'.format(name, int(np.sum(np.isnan(part.gamma_t)))))
    return columns, data

# Pure-dephasing oracle for the first spin of the first species, or
# None when an energy-exchange coupling is present.
def oracle_config(scenario):
    ens = scenario.ensemble
    spins = ens.spins
    if any(s.lam != 0 or s.mu != 0 for s in spins):
        return None
    if len(set(s.varkappa for s in spins)) != 1:
        return None
    spin = spins[0]
    return OracleConfig(
        beta=ens.beta, n_spins=ens.n_spins,
        p=spins[1].population if len(spins) > 1 else 0.5,
        varkappa_c=spin.varkappa, nu_l=spin.nu, f_c=ens.f_c,
        f_l=spin.f_loc, omega=spin.omega, rho0_j=spin.rho0,
        populations=tuple(s.population for s in spins[1:]),
    )

ORACLE_COLUMNS = [ 't', 'exact_re', 'exact_im', 'resonance_re',
                   'resonance_im', 'deviation', 'substituted_re',
                   'substituted_im', 'unsubstituted_deviation' ]

def oracle_table(report):
    data = [ report.times, report.exact.real, report.exact.imag,
             report.resonance.real, report.resonance.imag, report.deviation,
             report.substituted.real, report.substituted.imag,
             report.unsubstituted_deviation ]
    return ORACLE_COLUMNS, data

def _run_oracle(scenario, out_dir, verbose):
    cfg = oracle_config(scenario)
    if cfg is None:
        warn('oracle check needs a pure-dephasing scenario (lambda = mu = 0 '
             'and a common varkappa), skipping')
        return None
    if verbose:
        print('Comparing against the exact pure-dephasing model on {} points'
              .format(len(scenario.times)))
    report = compare_resonance_vs_exact(cfg, scenario.times,
                                        epsabs=scenario.epsabs,
                                        epsrel=scenario.epsrel)
    write_csv(os.path.join(out_dir, 'oracle.csv'), *oracle_table(report))
    return report

def _validate(scenario, strict, verbose):
    validity = check_validity(scenario.ensemble, threshold=scenario.threshold)
    if verbose:
        print('Validity: delta = {:.6g}, margins gap {:.3g}, collective '
              '{:.3g}, local {:.3g}'.format(
                  validity.delta, validity.gap_margin,
                  validity.collective_margin, validity.local_margin))
    if not validity.ok:
        message = 'perturbative validity conditions failed: {}'.format(
            ', '.join(validity.failures()))
        if strict:
            sys.stderr.write('ERROR: {}\n'.format(message))
        else:
            warn(message)
    if not validity.assumption_a_ok:
        warn('spin frequencies are not pairwise distinct')
    return validity

def _rates(scenario, verbose):
    if verbose:
        for name, (start, count) in zip(scenario.names,
                                        scenario.ensemble.groups()):
            print('Computing rates for species {} ({} spins)'
                  .format(name, count))
    return ensemble_rates(scenario.ensemble, epsabs=scenario.epsabs,
                          epsrel=scenario.epsrel)

def run_scenario(scenario, out_dir, strict=False, verbose=VERBOSE):
    """Compute and write every output selected in the scenario.

    Returns
    -------
    exit_code: `int`
        0 on success, 2 when `strict` is set and a validity condition
        fails (nothing is computed in that case).
    """
    return _run(scenario, out_dir, strict, verbose)[0]

# Exit code and the rate sets used, None when nothing was computed.
def _run(scenario, out_dir, strict, verbose):
    mkdir_p(out_dir)
    validity = _validate(scenario, strict, verbose)
    if strict and not validity.ok:
        return 2, None
    rates = _rates(scenario, verbose)
    outputs = scenario.outputs
    if outputs['rates']:
        report = rates_report(scenario, rates,
                              validity if outputs['validity'] else None)
        write_json(os.path.join(out_dir, 'rates.json'), report)
    if outputs['trajectory']:
        if verbose:
            print('Evaluating trajectory on {} points'
                  .format(len(scenario.times)))
        columns, data = trajectory_table(
            scenario, rates, with_bloch=outputs['bloch_coefficients']
        )
        write_csv(os.path.join(out_dir, 'trajectory.csv'), columns, data)
    if outputs['oracle_check']:
        _run_oracle(scenario, out_dir, verbose)
    return 0, rates

def rates_only(scenario, out_dir, strict=False, verbose=VERBOSE):
    mkdir_p(out_dir)
    validity = _validate(scenario, strict, verbose)
    if strict and not validity.ok:
        return 2
    rates = _rates(scenario, verbose)
    write_json(os.path.join(out_dir, 'rates.json'),
               rates_report(scenario, rates, validity))
    return 0

# Level shift blocks of the spins sharing the first spin's varkappa,
# against that spin's rate set, for the single-flip label of spin 0.
def _lso_deviation(scenario, rates):
    ens = scenario.ensemble
    if ens.n_spins < 2:
        return None
    label = EnergyLabel.single_flip(ens.n_spins, 0, 2)
    op = build_level_shift(label, ens, epsabs=scenario.epsabs,
                           epsrel=scenario.epsrel)
    worst = 0.
    kappa0 = ens.spins[0].varkappa
    for n, block, c in zip(op.block_spins, op.blocks, op.block_c):
        rs = rates[n]
        if ens.spins[n].varkappa != kappa0 or rs.b == 0 or rs.a == 0:
            continue
        z_plus, z_minus = block_eigensystem(block, c)[:2]
        scale = max(abs(rs.z_plus), abs(rs.z_minus))
        worst = max(worst, abs(z_plus - rs.z_plus) / scale,
                    abs(z_minus - rs.z_minus) / scale)
    return worst

def _identity_residuals(rates):
    worst = { 'gamma_relax': 0., 'alpha_product': 0., 'vieta_sum': 0.,
              'vieta_product': 0. }
    for rs in rates:
        b, c, a = rs.b, rs.c, rs.a
        if rs.gamma_relax > 0:
            worst['gamma_relax'] = max(
                worst['gamma_relax'],
                abs(rs.gamma_relax - b * (1. + c)) / rs.gamma_relax)
        if not rs.degenerate:
            worst['alpha_product'] = max(
                worst['alpha_product'],
                abs(rs.c_alpha_plus * rs.alpha_minus + 1.))
        s = 1j * b * (1. + c)
        p = -a * a + 1j * a * b * (1. - c)
        worst['vieta_sum'] = max(worst['vieta_sum'], abs(
            rs.z_plus + rs.z_minus - s) / max(abs(s), 1e-300))
        worst['vieta_product'] = max(worst['vieta_product'], abs(
            rs.z_plus * rs.z_minus - p) / max(abs(p), 1e-300))
    return worst

def verify_scenario(scenario, out_dir, strict=False, verbose=VERBOSE):
    mkdir_p(out_dir)
    validity = _validate(scenario, strict, verbose)
    if strict and not validity.ok:
        return 2
    rates = _rates(scenario, verbose)
    summary = { 'identities': _identity_residuals(rates) }
    lso = _lso_deviation(scenario, rates)
    summary['level_shift_max_rel_deviation'] = (
        None if lso is None else _finite_or_none(lso))
    report = _run_oracle(scenario, out_dir, verbose)
    if report is not None:
        summary['oracle'] = {
            'max_deviation': report.max_deviation,
            'final_unsubstituted_deviation': _finite_or_none(
                report.unsubstituted_deviation[-1]),
        }
        if report.residuals is not None:
            res = report.residuals
            summary['oracle']['asymptotic_residuals'] = {
                't': res.t, 'gamma_local': res.gamma_local,
                'gamma_collective': res.gamma_collective,
                'lamb_shift': res.lamb_shift,
            }
        if verbose:
            print('Oracle max deviation {:.3g}'.format(report.max_deviation))
    write_json(os.path.join(out_dir, 'verify.json'), summary)
    return 0

def _sweep_point(args):
    raw, parameter, value, point_dir, strict, grid_points, tolerance = args
    scenario = parse_scenario(apply_sweep_value(raw, parameter, value),
                              grid_points=grid_points, tolerance=tolerance)
    code, rates = _run(scenario, point_dir, strict, 0)
    if code != 0:
        return value, None, code
    report = rates_report(scenario, rates)
    row = [ value, report['dephasing']['gamma_prime'] ]
    row += [ s['Gamma_inf'] for s in report['species'] ]
    return value, (scenario.names, row), code

def sweep_scenario(scenario, out_dir, strict=False, jobs=1, grid_points=None,
                   tolerance=None, verbose=VERBOSE):
    if scenario.sweep is None:
        raise ConfigError('sweep', 'scenario has no sweep block')
    parameter = scenario.sweep['parameter']
    values = scenario.sweep['values']
    mkdir_p(out_dir)
    args = [ (scenario.raw, parameter, value,
              os.path.join(out_dir, 'sweep_{:03d}'.format(k)), strict,
              grid_points, tolerance)
             for k, value in enumerate(values) ]
    if verbose:
        print('Sweeping {} over {} values'.format(parameter, len(values)))
    if jobs > 1:
        with multiprocessing.Pool(processes=jobs) as pool:
            results = pool.map(_sweep_point, args)
    else:
        results = [ _sweep_point(a) for a in args ]

    names, rows = scenario.names, []
    for value, payload, code in results:
        if payload is None:
            rows.append([ value, np.nan ] + [ np.nan ] * len(names))
        else:
            rows.append([ np.nan if x is None else x for x in payload[1] ])
    columns = [ 'value', 'gamma_prime' ] + [ 'Gamma_inf_{}'.format(n)
                                             for n in names ]
    write_csv(os.path.join(out_dir, 'sweep.csv'), columns,
              [ np.array(col, dtype=float) for col in zip(*rows) ])
    return max(code for _, _, code in results)
