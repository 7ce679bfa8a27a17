import logging
import os
from dataclasses import fields
from functools import wraps

import click
import numpy as np

from gosszeta.config import Config, RunConfig, ensure_export_dir
from gosszeta.curve import CHAINS, host_construct, weil_zeta_mod_p, zeta_curve
from gosszeta.dwork import char_series_stabilized, profile_for_precision, \
    zeta_np_from_charseries
from gosszeta.exceptions import BudgetError, ConsistencyError, \
    PrecisionError
from gosszeta.ff import field_construct
from gosszeta.minperm import PMAP_INDEX, EnrichedPermutation, \
    brute_force_min, predict_real_parts, predicted_polygon, r_value, \
    sigma_chain, slopes_for_exponent
from gosszeta.padic import decompose, parse_exponent, profile_for_depth, \
    random_exponent
from gosszeta.util import dump_json, format_csv, format_table, parse_poly, \
    read_config_file, save_config_file, split_prime_power, write_csv
from gosszeta.vadic import comparison_check_dv1, vadic_predicted_slopes, \
    vadic_predicted_valuation_slopes, vadic_real_parts, zeta_vadic
from gosszeta.zeta import TrivialZero, special_value_poly, zeta_direct

log = logging.getLogger(__name__)

ROUTES = ('direct', 'fredholm', 'predictor')
MINPERM_HEADER = ('p', 'b', 'y', 'n', 'minimizers', 'r_min',
                  'matches_recurrence', 'unique_minimizer', 'strict_increase',
                  'divisible', 'pmap_index')

_CONFIG_FIELDS = {f.name for f in fields(RunConfig)}


def handle_errors(func):
    """Map library errors to exit codes 1 (consistency), 2 (usage), 3."""
    @wraps(func)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return func(*args, **kwargs)
        except ConsistencyError as err:
            code, message = 1, f'consistency failure: {err}'
        except (PrecisionError, BudgetError) as err:
            code, message = 3, f'{type(err).__name__}: {err}'
        except ValueError as err:
            code, message = 2, f'invalid input: {err}'
        click.echo(message, err=True)
        ctx.exit(code)
    return wrapper


def common_options(func):
    options = [
        click.option('--p', 'p', type=int, help='characteristic'),
        click.option('--b', 'b', type=int, help='q = p^b'),
        click.option('--q', 'q', type=int, help='field order'),
        click.option('--y', 'y', help="exponent: int, 'ratio:a/c' or "
                                      "'digits:p:d0,d1,...'"),
        click.option('--xdeg', type=int, help='x-degree D'),
        click.option('--precision', type=int, help='pi-adic precision N'),
        click.option('--nmax', type=int, help='number of slopes'),
        click.option('--format', 'format',
                     type=click.Choice(['json', 'table', 'csv'])),
        click.option('--seed', type=int),
        click.option('--budget', type=int),
        click.option('--config', 'config_file', type=click.Path(exists=True),
                     help='replay a saved run'),
        click.option('--save-config', 'save_config', type=click.Path(),
                     help='write the run configuration as JSON'),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def build_config(command, config_file=None, save_config=None, **options):
    """
    RunConfig from a saved file or the command-line options, with p and b
    resolved from q when only q is given.

    :rtype: RunConfig
    """
    if config_file:
        cfg = read_config_file(config_file)
        if cfg.command != command:
            raise ValueError(f'{config_file} holds a {cfg.command} run, '
                             f'not {command}')
    else:
        given = {k: v for k, v in options.items() if v is not None}
        extra = {k: given.pop(k) for k in list(given)
                 if k not in _CONFIG_FIELDS}
        cfg = RunConfig(command=command, extra=extra, **given)
    if cfg.q is not None:
        p, b = split_prime_power(cfg.q)
        if cfg.p is not None and cfg.p != p:
            raise ValueError(f'q = {cfg.q} is not a power of p = {cfg.p}')
        if cfg.b not in (1, b):
            raise ValueError(f'q = {cfg.q} is not {p}^{cfg.b}')
        cfg.p, cfg.b = p, b
    if cfg.p is None:
        raise ValueError('one of --p or --q is required')
    cfg.validate()
    if save_config:
        save_config_file(save_config, cfg)
    log.debug('run configuration %s', cfg.to_json())
    return cfg


def emit(cfg, payload, header, rows):
    if cfg.format == 'json':
        click.echo(dump_json(payload))
    elif cfg.format == 'table':
        click.echo(format_table(header, rows))
    else:
        click.echo(format_csv(header, rows), nl=False)


def _exponent(cfg):
    return parse_exponent(cfg.y, cfg.p)


def _valuation_rows(series):
    return [(d, repr(v)) for d, v in enumerate(series.valuations())]


def _first_divergence(a, b, through):
    ea, eb = a.expanded(), b.expanded()
    for k in range(through):
        if ea[k] != eb[k]:
            return k + 1
    return None


@click.group()
@click.option('-v', '--verbose', count=True)
@click.pass_context
def cli(ctx, verbose):
    level = logging.WARNING - 10 * min(verbose, 2)
    logging.basicConfig(level=level,
                        format='%(asctime)s %(name)s %(levelname)s '
                               '%(message)s')
    ctx.ensure_object(dict)


@cli.command('predict')
@common_options
@click.option('--g', type=int, help='genus of the host')
@click.option('--d', type=int, help='degree of the point at infinity')
@handle_errors
def predict(**options):
    """
    Predicted real parts: g-1+d zeros, then every slope nu_i of the
    minimal-permutation chain with multiplicity d.
    """
    cfg = build_config('predict', **options)
    y = _exponent(cfg)
    nu, profile = slopes_for_exponent(y, cfg.p, cfg.b, cfg.nmax)
    real = predict_real_parts(profile, cfg.g, cfg.d, cfg.nmax)
    payload = {'p': cfg.p, 'b': cfg.b, 'y': y.descriptor(),
               'nu': list(nu.nu), 'alpha': nu.alpha,
               'complete': nu.complete, 'q_full': profile.q_full,
               'real_parts': real,
               'polygon': predicted_polygon(profile, cfg.g, cfg.d,
                                            cfg.nmax).to_json()}
    rows = [(i, v, a) for i, (v, a) in enumerate(zip(nu.nu, nu.alpha), 1)]
    emit(cfg, payload, ('i', 'nu', 'alpha'), rows)


@cli.command('zeta-affine')
@common_options
@handle_errors
def zeta_affine(**options):
    """Valuations of the zeta coefficients of F_q[theta] by direct sums."""
    cfg = build_config('zeta-affine', **options)
    field = field_construct(cfg.p, cfg.b)
    zs = zeta_direct(_exponent(cfg), field, cfg.xdeg, cfg.precision)
    rows = _valuation_rows(zs)
    payload = {'q': field.q, 'y': cfg.y, 'precision': cfg.precision,
               'valuations': [v for _, v in rows],
               'polygon': zs.newton_polygon().to_json()}
    emit(cfg, payload, ('d', 'valuation'), rows)


@cli.command('zeta-fredholm')
@common_options
@handle_errors
def zeta_fredholm(**options):
    """det(1 - x Psi) of the Dwork matrix, stabilized over truncations."""
    cfg = build_config('zeta-fredholm', **options)
    profile = profile_for_precision(_exponent(cfg), cfg.p, cfg.b,
                                    cfg.precision)
    cs = char_series_stabilized(profile, cfg.nmax, cfg.precision)
    polygon = zeta_np_from_charseries(cs, cfg.b)
    rows = cs.valuation_rows()
    payload = {'q': profile.q, 'y': cfg.y, 'truncation': cs.truncation,
               'valuations': [v for _, v in rows],
               'polygon': polygon.to_json()}
    emit(cfg, payload, ('n', 'valuation'), rows)


@cli.command('special-value')
@common_options
@click.option('--j', type=int, required=True, help='negative integer')
@handle_errors
def special_value(**options):
    """The polynomial zeta(x, j) at j < 0 and its trivial zero at x = 1."""
    cfg = build_config('special-value', **options)
    q = cfg.p ** cfg.b
    sp = special_value_poly(q, cfg.j)
    zero = TrivialZero('even' if cfg.j % (q - 1) == 0 else 'odd',
                       sp.root_order_at_one())
    rows = [(n, repr(c)) for n, c in enumerate(sp.coeffs)]
    payload = {'q': q, 'j': cfg.j, 'degree': sp.degree,
               'coefficients': [c for _, c in rows],
               'parity': zero.parity, 'zero_order': zero.order}
    emit(cfg, payload, ('n', 'coefficient'), rows)


@cli.command('vadic')
@common_options
@click.option('--f', 'f', help='monic irreducible place, e.g. theta^2+1')
@click.option('--c', 'c', type=int, help='use the place theta - c')
@handle_errors
def vadic(**options):
    """
    v-adic zeta coefficients at a finite place and the predicted slopes.
    With --c the degree-one comparison identity is checked as well.
    """
    cfg = build_config('vadic', **options)
    field = field_construct(cfg.p, cfg.b)
    if (cfg.f is None) == (cfg.c is None):
        raise ValueError('give exactly one of --f or --c')
    y = _exponent(cfg)
    if cfg.c is not None:
        f = parse_poly(f'theta-{cfg.c % cfg.p}', field)
    else:
        f = parse_poly(cfg.f, field)
    if not f.is_monic() or not f.is_irreducible():
        raise ValueError(f'{f!r} is not monic irreducible')
    zs = zeta_vadic(f, y, cfg.xdeg, cfg.precision)
    predicted = vadic_predicted_slopes(f, y, cfg.nmax)
    rows = _valuation_rows(zs)
    polygon = zs.newton_polygon()
    payload = {'q': field.q, 'f': repr(f), 'dv': f.degree, 'y': cfg.y,
               'valuations': [v for _, v in rows],
               'polygon': polygon.to_json(),
               'real_parts': vadic_real_parts(polygon, f).to_json(),
               'predicted': predicted.to_json(),
               'predicted_valuations': vadic_predicted_valuation_slopes(
                   f, y, cfg.nmax).to_json()}
    report = None
    if cfg.c is not None:
        report = comparison_check_dv1(cfg.c % cfg.p, y, cfg.xdeg,
                                      cfg.precision, field)
        payload['comparison'] = report._asdict()
    emit(cfg, payload, ('d', 'valuation'), rows)
    if report is not None and not report.verdict:
        raise ConsistencyError(f'comparison identity fails at '
                               f'x^{report.first_mismatch}')


@cli.command('curve')
@common_options
@click.option('--a4', type=int, required=True)
@click.option('--a6', type=int, required=True)
@click.option('--chain', type=click.Choice(CHAINS))
@click.option('--processes', type=int)
@handle_errors
def curve(**options):
    """Zeta of an ordinary elliptic curve minus a rational point."""
    cfg = build_config('curve', **options)
    if cfg.b != 1:
        raise ValueError('curve hosts live over a prime field')
    host = host_construct(cfg.p, cfg.a4, cfg.a6)
    weil = weil_zeta_mod_p(host, cfg.xdeg)
    payload = {'host': host.to_json(), 'weil_mod_p': weil}
    if not host.ordinary:
        log.warning('supersingular host, no zeta computed')
        emit(cfg, payload, ('d', 'weil_mod_p'), list(enumerate(weil)))
        return
    y = _exponent(cfg)
    zs = zeta_curve(host, y, cfg.xdeg, cfg.precision,
                    chain=cfg.extra.get('chain', 'binary'),
                    processes=cfg.extra.get('processes'))
    reduced = [int(s.coefficient(0)) for s in zs.coeffs]
    nu, profile = slopes_for_exponent(y, cfg.p, 1, cfg.nmax)
    predicted = predict_real_parts(profile, 1, 1, cfg.nmax)
    rows = [(d, repr(v), w) for (d, v), w in zip(_valuation_rows(zs), weil)]
    payload.update({'y': cfg.y, 'valuations': [r[1] for r in rows],
                    'polygon': zs.newton_polygon().to_json(),
                    'predicted': predicted, 'reduction': reduced})
    emit(cfg, payload, ('d', 'valuation', 'weil_mod_p'), rows)
    if reduced != weil:
        raise ConsistencyError(f'zeta mod pi {reduced} differs from the '
                               f'Weil zeta mod p {weil}')


@cli.command('compare')
@common_options
@handle_errors
def compare(**options):
    """
    Zeta polygons by direct sums, by the Fredholm determinant and by the
    minimal-permutation predictor, checked on their jointly certified
    range.
    """
    cfg = build_config('compare', **options)
    field = field_construct(cfg.p, cfg.b)
    y = _exponent(cfg)
    polygons = {}
    polygons['direct'] = zeta_direct(y, field, cfg.xdeg,
                                     cfg.precision).newton_polygon()
    profile = profile_for_precision(y, cfg.p, cfg.b, cfg.precision)
    cs = char_series_stabilized(profile, cfg.nmax, cfg.precision)
    polygons['fredholm'] = zeta_np_from_charseries(cs, cfg.b)
    _, nu_profile = slopes_for_exponent(y, cfg.p, cfg.b, cfg.nmax)
    polygons['predictor'] = predicted_polygon(nu_profile, 0, 1, cfg.nmax)
    failures = []
    rows = []
    for a, b in ((0, 1), (0, 2), (1, 2)):
        left, right = polygons[ROUTES[a]], polygons[ROUTES[b]]
        through = min(left.certified_through, right.certified_through,
                      left.degree, right.degree)
        divergence = _first_divergence(left, right, through)
        tag = f'{ROUTES[a]}/{ROUTES[b]}'
        rows.append((tag, through, 'agree' if divergence is None
                     else f'diverge at {divergence}'))
        if divergence is not None:
            failures.append({'routes': tag, 'slope': divergence})
    payload = {'q': field.q, 'y': y.descriptor(),
               'polygons': {k: v.to_json() for k, v in polygons.items()},
               'comparisons': [{'routes': t, 'through': n, 'result': r}
                               for t, n, r in rows],
               'failures': failures}
    emit(cfg, payload, ('routes', 'through', 'result'), rows)
    if failures:
        raise ConsistencyError('routes disagree: ' + ', '.join(
            f"{f['routes']} at slope {f['slope']}" for f in failures))


def _q_full_exponent(cfg, rng):
    while True:
        y = random_exponent(cfg.p, Config.DEFAULT_DIGITS, rng)
        if decompose(y, cfg.p, cfg.b, Config.DEFAULT_DIGITS // cfg.b).q_full:
            return y


def minperm_rows(cfg, rng):
    """One row per (sample, n): brute force against the chain recurrence."""
    rows = []
    q = cfg.p ** cfg.b
    for _ in range(cfg.samples):
        y = _q_full_exponent(cfg, rng)
        profile = profile_for_depth(y, cfg.p, cfg.b,
                                    2 * cfg.p * (cfg.nmax + 2))
        previous_r, previous_nu = 0, None
        for n in range(1, cfg.nmax + 1):
            key = (cfg.p, cfg.b, y.descriptor(), n)
            chain = sigma_chain(profile, n)
            chain_r = r_value(profile, chain)
            nu = chain_r - previous_r
            strict = previous_nu is None or nu > previous_nu
            divisible = nu % (q - 1) == 0
            previous_r, previous_nu = chain_r, nu
            try:
                brute = brute_force_min(profile, n, cfg.p * (n + 2),
                                        cfg.budget)
            except BudgetError as err:
                log.info('skipping n = %d: %s', n, err)
                rows.append(key + ('skipped',) * 4
                            + (strict, divisible, PMAP_INDEX))
                continue
            unique = brute.count == 1 and \
                brute.minimizers == [EnrichedPermutation.from_cycles(
                    chain, cfg.b)]
            rows.append(key + (brute.count, brute.r_min,
                               brute.r_min == chain_r, unique, strict,
                               divisible, PMAP_INDEX))
    return rows


@cli.command('verify-minperm')
@common_options
@click.option('--samples', type=int, help='random exponents to draw')
@click.option('--out', help='also write the rows as CSV under exports/')
@handle_errors
def verify_minperm(**options):
    """
    Random q-full exponents: exhaustive minimal R-value against the value
    of the minimal-permutation chain.
    """
    cfg = build_config('verify-minperm', **options)
    rng = np.random.default_rng(cfg.seed)
    rows = minperm_rows(cfg, rng)
    if cfg.extra.get('out'):
        path = os.path.join(ensure_export_dir(), cfg.extra['out'])
        write_csv(path, MINPERM_HEADER, rows)
        log.info('wrote %d rows to %s', len(rows), path)
    payload = {'rows': [dict(zip(MINPERM_HEADER, r)) for r in rows]}
    emit(cfg, payload, MINPERM_HEADER, rows)
    bad = [r for r in rows
           if not all(c for c in r[6:10] if c != 'skipped')]
    if bad:
        raise ConsistencyError(f'{len(bad)} rows break the chain '
                               f'recurrence')


def run():
    cli(obj={})
