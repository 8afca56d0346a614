"""Command-line front end: ``rglt <subcommand> [--config cfg.json] [--set key=value ...]``.

Every run writes ``<out>/<name>/config.json`` (the resolved configuration),
one or more CSV tables, optional Matrix Market dumps and ``summary.txt``.
Exit codes: 0 ok, 2 configuration or I/O error, 3 numerical error,
4 invariant violation. Failures print a single line starting with ``error:``.
"""
import argparse
import copy
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .distribution import (EIGEN, SINGULAR, EmpiricalSpectrum, default_family, discrepancy_sweep,
                           make_test_family, symbol_values, acs_split)
from .errors import ArgumentError, DomainError, InvariantViolation, NumericalError
from .extension import identity_suite
from .fem import (FEProblem, assemble, block_symbol, normalized_block_matrix, schur_complement,
                  toeplitz_equality_check)
from .generators import diag_sampling, glt9_approximant, random_zero_distributed, toeplitz
from .linalg import is_hermitian, multi_index, n_total
from .mmio import read_matrix_market, write_matrix_market
from .symbol import (CoefficientFunction, TrigPolySymbol,
                     fourier_coeffs_from_samples, sample_symbol, schur_symbol, symbol_from_json)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_INVARIANT = 0, 2, 3, 4

_FAMILY = {'range': None, 'count': 9}

DEFAULTS = {
    'toeplitz': {
        'symbol': 'laplacian', 'n_list': [32, 64, 128], 'grid': [8, 512], 'mode': SINGULAR,
        'family': _FAMILY, 'perturbation': {'rank_fraction': 0.0, 'norm_eps': 0.0}, 'seed': 0,
    },
    'diag': {
        'a': 'x1', 'd': 1, 'n_list': [32, 64, 128], 'grid': [512, 8], 'mode': EIGEN,
        'family': _FAMILY,
    },
    'fem': {
        'p': 1, 'k': 0, 'q': 1, 'l': 0, 'a': '1', 'rho': 0.0, 'm': None,
        'n_list': [32, 64, 128], 'grid': [64, 512],
        'block_family': _FAMILY, 'schur_family': _FAMILY, 'dump_mtx': True,
    },
    'acs': {
        'symbol': 'abs_theta', 'n': 256, 'levels': [1, 2, 3, 4, 5], 'threshold': 'auto',
        'fine_grid': 8192,
    },
    'ext-check': {
        'instances': 100, 'seed': 0, 'max_n': 4, 'max_block': 3, 'max_t': 5, 'tol': 1e-12,
    },
    'spectrum': {
        'symbol': 'laplacian', 'matrix': None, 'n': 64, 'dump_mtx': True,
    },
}

# symbols that can be named instead of spelled out as JSON
PRESETS = {
    'laplacian': lambda: TrigPolySymbol({(0,): 2.0, (1,): -1.0, (-1,): -1.0}),
    'shift_pair': lambda: TrigPolySymbol({(0,): [[1.0, 0.0]], (-1,): [[0.0, 1.0]]}),
}


class ConfigError(ArgumentError):
    pass


def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_override(cfg, assignment):
    """Apply one ``key=value`` override; dotted keys reach into nested tables."""
    if '=' not in assignment:
        raise ConfigError(f"--set expects key=value, got {assignment!r}")
    key, value = assignment.split('=', 1)
    *path, last = key.strip().split('.')
    node = cfg
    for part in path:
        if not isinstance(node.get(part), dict):
            raise ConfigError(f"unknown config table {part!r} in {key!r}")
        node = node[part]
    if last not in node:
        raise ConfigError(f"unknown config key {key!r}")
    node[last] = _parse_value(value)


def _merge(base, update, where=''):
    for key, value in update.items():
        if key not in base:
            raise ConfigError(f"unknown config key {where + key!r}")
        if isinstance(base[key], dict) and isinstance(value, dict):
            _merge(base[key], value, where + key + '.')
        else:
            base[key] = value


def resolve_config(command, config_path=None, overrides=(), seed=None):
    """Defaults, then the JSON file, then ``--set`` overrides, then ``--seed``."""
    cfg = copy.deepcopy(DEFAULTS[command])
    cfg['name'] = command
    if config_path:
        try:
            with open(config_path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {config_path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        _merge(cfg, data)
    for assignment in overrides:
        apply_override(cfg, assignment)
    if seed is not None:
        if 'seed' not in cfg:
            raise ConfigError(f"subcommand {command!r} takes no seed")
        cfg['seed'] = seed
    if not str(cfg['name']).strip():
        raise ConfigError("name must be nonempty")
    return cfg


def _n_list(values):
    if not isinstance(values, list) or not values:
        raise ConfigError("n_list must be a nonempty list")
    try:
        ns = [multi_index(v) for v in values]
    except (ArgumentError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad n_list entry: {exc}") from None
    totals = [n_total(n) for n in ns]
    if any(b <= a for a, b in zip(totals, totals[1:])):
        raise ConfigError("n_list must be strictly increasing")
    return [n if len(n) > 1 else n[0] for n in ns]


def _grid(values, d):
    if not isinstance(values, list) or len(values) != 2 * d:
        raise ConfigError(f"grid needs {2 * d} axis counts")
    if any(int(c) < 8 for c in values):
        raise ConfigError("grid counts must be >= 8")
    return [int(c) for c in values]


def _mode(value):
    if value not in (SINGULAR, EIGEN):
        raise ConfigError(f"mode must be {SINGULAR!r} or {EIGEN!r}")
    return value


def _load_symbol(spec):
    if isinstance(spec, str):
        if spec not in PRESETS:
            raise ConfigError(f"unknown symbol preset {spec!r}; known: {sorted(PRESETS)}")
        return PRESETS[spec]()
    if not isinstance(spec, dict):
        raise ConfigError("symbol must be a preset name or a JSON object")
    try:
        return symbol_from_json(spec)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid symbol JSON: {exc}") from None


def _family(spec, values):
    count = int(spec.get('count', 9))
    if spec.get('range') is None:
        return default_family(values, count)
    return make_test_family(spec['range'], count)


def _fmt(v):
    return '%.12g' % v


def _write_rows(path, header, rows):
    with open(path, 'w', newline='') as fh:
        writer = csv.writer(fh, lineterminator='\n')
        writer.writerow(header)
        writer.writerows(rows)


def _write_spectrum(path, A, hermitian):
    sv = EmpiricalSpectrum.of(A, SINGULAR).values
    if hermitian:
        ev = EmpiricalSpectrum.of(A, EIGEN).values
        rows = [(i + 1, _fmt(e), _fmt(s)) for i, (e, s) in enumerate(zip(ev, sv))]
        _write_rows(path, ['i', 'eigenvalue', 'singular_value'], rows)
    else:
        _write_rows(path, ['i', 'singular_value'], [(i + 1, _fmt(s)) for i, s in enumerate(sv)])


def _label(n):
    return str(n) if np.isscalar(n) else 'x'.join(str(v) for v in n)


class Run:
    """Output directory and summary lines of one experiment."""

    def __init__(self, out, cfg, threads):
        self.dir = Path(out) / str(cfg['name'])
        self.cfg = cfg
        self.threads = threads
        self.summary = []
        self.failed = []
        try:
            self.dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"cannot create output directory {self.dir}: {exc}") from None
        with open(self.dir / 'config.json', 'w', newline='\n') as fh:
            json.dump(cfg, fh, indent=2, sort_keys=True)
            fh.write('\n')

    def map(self, fn, items):
        """Ordered map, concurrent when more than one thread is allowed."""
        items = list(items)
        if self.threads <= 1 or len(items) <= 1:
            return [fn(x) for x in items]
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            return list(pool.map(fn, items))

    def note(self, key, value):
        self.summary.append(f"{key}: {value}")

    def finish(self):
        self.note('status', 'FAIL' if self.failed else 'ok')
        with open(self.dir / 'summary.txt', 'w', newline='\n') as fh:
            fh.write('\n'.join(self.summary) + '\n')
        if self.failed:
            raise InvariantViolation('; '.join(self.failed))


def _note_deltas(run, table, prefix='delta'):
    for n in table.sizes:
        run.note(f"{prefix}(n={_label(n)})", _fmt(table.delta(n)))


def run_toeplitz(cfg, run):
    """Discrepancy sweep of ``sum_i D_n(a_i) T_n(f_i)`` (plus an optional zero-distributed term)."""
    symbol = _load_symbol(cfg['symbol'])
    ns = _n_list(cfg['n_list'])
    grid = _grid(cfg['grid'], symbol.d)
    mode = _mode(cfg['mode'])
    pert = cfg['perturbation']
    c, eps = float(pert.get('rank_fraction', 0.0)), float(pert.get('norm_eps', 0.0))

    def build(n):
        A = glt9_approximant(n, symbol)
        if c or eps:
            A = A + random_zero_distributed(n, symbol.r, symbol.s, cfg['seed'], c, eps)
        return n, EmpiricalSpectrum.of(A, mode)

    spectra = run.map(build, ns)
    g = sample_symbol(symbol, grid)
    family = _family(cfg['family'], symbol_values(g, mode))
    table = discrepancy_sweep(spectra, g, family, mode)
    table.to_csv(run.dir / 'sweep.csv')
    _note_deltas(run, table)
    return table


def run_diag(cfg, run):
    """Discrepancy sweep of ``D_n(a)`` against the symbol ``a(x)``."""
    d = int(cfg['d'])
    a = cfg['a']
    cf = CoefficientFunction(a, d) if isinstance(a, list) else CoefficientFunction.scalar(a, d)
    ns = _n_list(cfg['n_list'])
    grid = _grid(cfg['grid'], d)
    mode = _mode(cfg['mode'])
    spectra = run.map(lambda n: (n, EmpiricalSpectrum.of(diag_sampling(n, cf), mode)), ns)

    def values(xs, ths):
        av = cf.evaluate(xs)
        return np.broadcast_to(av[:, None], (xs.shape[0], ths.shape[0]) + av.shape[1:])

    g = sample_symbol(values, grid, d)
    family = _family(cfg['family'], symbol_values(g, mode))
    table = discrepancy_sweep(spectra, g, family, mode)
    table.to_csv(run.dir / 'sweep.csv')
    _note_deltas(run, table)
    return table


def run_fem(cfg, run):
    """FE saddle-point matrices: spectra and sweeps for the block matrix and ``n S_n``."""
    ns = _n_list(cfg['n_list'])
    grid = _grid(cfg['grid'], 1)
    params = {key: cfg[key] for key in ('p', 'k', 'q', 'l', 'a', 'rho', 'm')}
    probs = [FEProblem(n=n, **params) for n in ns]
    run.note('m', probs[0].m)

    def build(prob):
        A11, A12, A22 = assemble(prob)
        S = schur_complement(prob, A11, A12, A22)
        return prob, (A11, A12, A22), normalized_block_matrix(prob, A11, A12, A22), prob.n * S

    results = run.map(build, probs)
    block_spectra, schur_spectra = [], []
    for prob, _, Ablk, nS in results:
        _write_spectrum(run.dir / f'spectrum_block_n{prob.n}.csv', Ablk, True)
        _write_spectrum(run.dir / f'spectrum_schur_n{prob.n}.csv', nS, True)
        block_spectra.append((prob.n, EmpiricalSpectrum.of(Ablk, EIGEN)))
        schur_spectra.append((prob.n, EmpiricalSpectrum.of(nS, EIGEN)))

    g_block = sample_symbol(block_symbol(probs[0]), grid)
    fam = _family(cfg['block_family'], symbol_values(g_block, EIGEN))
    table = discrepancy_sweep(block_spectra, g_block, fam, EIGEN)
    table.to_csv(run.dir / 'fem_block.csv')
    _note_deltas(run, table, 'block_delta')

    p = probs[0]
    g_schur = schur_symbol(p.p, p.k, p.q, p.l, p.a, p.rho, grid)
    fam = _family(cfg['schur_family'], symbol_values(g_schur, EIGEN))
    table_s = discrepancy_sweep(schur_spectra, g_schur, fam, EIGEN)
    table_s.to_csv(run.dir / 'fem_schur.csv')
    _note_deltas(run, table_s, 'schur_delta')

    if cfg['dump_mtx']:
        prob, (A11, A12, A22), _, nS = results[-1]
        for name, X in (('A11', A11), ('A12', A12), ('A22', A22), ('nS', nS)):
            write_matrix_market(run.dir / f'{name}_n{prob.n}.mtx', X)
    big = probs[-1]
    if big.n > 2 * big.m + 4:
        report = toeplitz_equality_check(big)
        run.note('toeplitz_interior_dev', _fmt(report.max_interior_dev))
        run.note('toeplitz_rank', f"{report.rank_remainder} (bound {report.rank_bound})")
        if not report.rank_ok:
            run.failed.append(f"remainder rank {report.rank_remainder} exceeds {report.rank_bound}")
    return table, table_s


def _truncate(f, level):
    return TrigPolySymbol({j: c for j, c in f.coeffs.items() if max(abs(v) for v in j) <= level},
                          f.d, f.r, f.s)


def _abs_theta(n):
    return fourier_coeffs_from_samples(np.abs, n - 1, 16 * n)


def run_acs(cfg, run):
    """a.c.s. splitting of ``T_n(f)`` against ``T_n(f_m)``, ``f_m`` the degree-``m`` truncation."""
    n = int(cfg['n'])
    if n < 1:
        raise ConfigError("n must be >= 1")
    levels = [int(m) for m in cfg['levels']]
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ConfigError("levels must be strictly increasing")
    f = _abs_theta(n) if cfg['symbol'] == 'abs_theta' else _load_symbol(cfg['symbol'])
    if f.d != 1 and cfg['threshold'] == 'auto':
        raise ConfigError("threshold 'auto' supports d = 1 symbols only")
    A = toeplitz((n,) * f.d, f)
    theta = np.linspace(-np.pi, np.pi, int(cfg['fine_grid']) + 1)[:, None]
    rows = []

    def one(m):
        fm = _truncate(f, m)
        if cfg['threshold'] == 'auto':
            diff = f.evaluate(theta) - fm.evaluate(theta)
            omega = float(np.linalg.norm(diff, 2, axis=(-2, -1)).max())
        else:
            omega = float(cfg['threshold'])
        return acs_split(A, toeplitz((n,) * f.d, fm), omega, level=m)

    for e in run.map(one, levels):
        rows.append((e.level, n, e.rank, _fmt(e.rank_fraction), _fmt(e.norm_bound), _fmt(e.threshold)))
        run.note(f"c(m={e.level})", _fmt(e.rank_fraction))
        run.note(f"omega(m={e.level})", _fmt(e.threshold))
    _write_rows(run.dir / 'acs.csv', ['level', 'n', 'rank', 'rank_fraction', 'norm_bound', 'threshold'], rows)
    return rows


def run_extension_checks(cfg, run):
    """Extension-operator identity suite; any deviation above ``tol`` fails the run."""
    worst = identity_suite(int(cfg['instances']), int(cfg['seed']), int(cfg['max_n']),
                           int(cfg['max_block']), int(cfg['max_t']))
    tol = float(cfg['tol'])
    rows = []
    for name, dev in worst.items():
        ok = dev == 0.0 if name == 'permutation_form' else dev <= tol
        rows.append((name, _fmt(dev), _fmt(tol), 'pass' if ok else 'FAIL'))
        run.note(name, f"{'pass' if ok else 'FAIL'} (worst {_fmt(dev)})")
        if not ok:
            run.failed.append(f"identity {name} deviates by {dev:.3g}")
    _write_rows(run.dir / 'ext_check.csv', ['identity', 'worst_dev', 'tol', 'status'], rows)
    return worst


def run_spectrum(cfg, run):
    """Singular values (and eigenvalues when Hermitian) of one matrix."""
    if cfg['matrix']:
        try:
            A = read_matrix_market(cfg['matrix'])
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read matrix {cfg['matrix']}: {exc}") from None
    else:
        symbol = _load_symbol(cfg['symbol'])
        A = glt9_approximant(cfg['n'], symbol)
        if cfg['dump_mtx']:
            write_matrix_market(run.dir / 'matrix.mtx', A)
    herm = A.shape[0] == A.shape[1] and is_hermitian(A)
    _write_spectrum(run.dir / 'spectrum.csv', A, herm)
    run.note('shape', f"{A.shape[0]}x{A.shape[1]}")
    run.note('hermitian', herm)
    return A


RUNNERS = {
    'toeplitz': run_toeplitz, 'diag': run_diag, 'fem': run_fem, 'acs': run_acs,
    'ext-check': run_extension_checks, 'spectrum': run_spectrum,
}


def _threads(value):
    if value == 'auto':
        return os.cpu_count() or 1
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError("expected a positive integer or 'auto'") from None
    if n < 1:
        raise argparse.ArgumentTypeError("expected a positive integer or 'auto'")
    return n


def _seed(value):
    n = int(value)
    if not 0 <= n < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return n


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(f"error: usage: {message}", file=sys.stderr)
        sys.exit(EXIT_CONFIG)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='JSON experiment configuration')
    common.add_argument('--out', default='out', help='output root directory (default: out)')
    common.add_argument('--set', dest='overrides', action='append', default=[], metavar='KEY=VALUE',
                        help='override a config entry (dotted keys for nested tables); repeatable')
    common.add_argument('--seed', type=_seed, help='seed for randomized subcommands')
    common.add_argument('--threads', type=_threads, default=1, metavar='N|auto',
                        help='worker threads for independent n entries')
    parser = _Parser(prog='rglt', description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest='command', required=True, parser_class=_Parser)
    for name, fn in RUNNERS.items():
        sub.add_parser(name, parents=[common], help=fn.__doc__.splitlines()[0])
    return parser


def _one_line(exc):
    return ' '.join(str(exc).split())


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args.command, args.config, args.overrides, args.seed)
        run = Run(args.out, cfg, args.threads)
        RUNNERS[args.command](cfg, run)
        run.finish()
    except InvariantViolation as exc:
        print(f"error: invariant: {_one_line(exc)}", file=sys.stderr)
        return EXIT_INVARIANT
    except (NumericalError, DomainError) as exc:
        print(f"error: numerical: {_one_line(exc)}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ArgumentError, OSError, KeyError, TypeError, ValueError) as exc:
        print(f"error: config: {_one_line(exc)}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"wrote {run.dir}")
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
