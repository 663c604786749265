"""Subcommands of the cantor-ei command line"""

import argparse
from pathlib import Path
from typing import Callable, Dict, List, Optional

from dotenv import dotenv_values
from pydantic import ValidationError

from ..dynamics.maps import get_map
from ..estimation.sweep import stability_region
from ..exact.interval_set import format_rational
from ..models.schemas import CountsRow, RunConfig, TheoryResult
from ..services.repro_presets import EXACT_FIGURES, FIGURES, SWEEP_FIGURES, exact_figure_lines, run_sweep_figure
from ..services.simulation_service import SimulationService, resolve_burn_in
from ..theory.cantor_theory import (
    covering_counts, dim_estimate_from_counts, exceedance_cluster_set, obrien_theta, schedule,
)
from ..theory.digraph import build_Mqk, build_Nq, dim_bound, mcclure_vertices, spectral_radius
from ..theory.ifs_cantor import general_theta, ifs_limit_theta, load_ifs, similarity_dimension
from ..utils.error_handler import ConfigException
from ..utils.export import (
    format_decimal, header_lines, open_output, plateau_lines, write_counts_csv, write_lines,
    write_sweep_csv, write_text_file, write_theory_csv,
)
from ..utils.logging_config import get_logger
from ..utils.resource_manager import current_budget, resource_limits

logger = get_logger('cli')

FLAG_NAMES = {
    'map_id': '--map', 'burn_in': '--burnin', 'q_list': '--q', 'spec_path': '--spec',
    'u_min': '--u-min', 'u_max': '--u-max',
}


def _flag(field: str) -> str:
    return FLAG_NAMES.get(field, '--' + field.replace('_', '-'))


def _require(run: RunConfig, *fields: str):
    missing = [_flag(name) for name in fields if getattr(run, name) is None]
    if missing:
        raise ConfigException(f"{run.command} requires {', '.join(missing)}", "MISSING_FLAG", {'missing': missing})


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument('--config', dest='config_file', help='key=value file of RunConfig fields')
    parser.add_argument('--output', '-o', help='output file (default: stdout)')
    parser.add_argument('--threads', type=int, help='worker threads')
    parser.add_argument('--quiet', action='store_true', default=argparse.SUPPRESS, help='only warnings and errors on stderr')
    parser.add_argument('--log-level', dest='log_level')
    parser.add_argument('--max-depth', type=int, help='Cantor depth cap')
    parser.add_argument('--max-denominator-bits', type=int, help='rational denominator cap in bits')
    parser.add_argument('--max-matrix-rows', type=int, help='substitution matrix size cap')
    parser.add_argument('--max-operations', type=int, help='interval-merge budget for exact computations')


def _add_simulation(parser: argparse.ArgumentParser):
    parser.add_argument('--map', dest='map_id', help='map id, e.g. mx_mod1:3, mixed_linear, gauss')
    parser.add_argument('--observable', choices=['ladder', 'escape'])
    parser.add_argument('--n', type=int, help='orbit length')
    parser.add_argument('--ell', type=int, help='number of orbits')
    parser.add_argument('--seed', type=int)
    parser.add_argument('--burnin', dest='burn_in', type=int, help='unrecorded initial steps')
    parser.add_argument('--cap', type=int, help='observable cap')


def setup_cli_commands(subparsers):
    """Register every subcommand on an argparse subparsers object"""

    simulate = subparsers.add_parser('simulate', help='simulate observable series')
    _add_simulation(simulate)
    simulate.add_argument('--dump-dir', dest='dump_dir', help='write one series file per orbit')
    _add_common(simulate)

    sweep = subparsers.add_parser('sweep', help='runs-estimator sweep over thresholds and run lengths')
    _add_simulation(sweep)
    sweep.add_argument('--u-min', dest='u_min', type=int)
    sweep.add_argument('--u-max', dest='u_max', type=int)
    sweep.add_argument('--q', dest='q_list', help='comma separated run lengths, e.g. 1,5,10')
    sweep.add_argument('--plateau-window', dest='plateau_window', type=int)
    sweep.add_argument('--plateau-eps', dest='plateau_eps', type=float)
    _add_common(sweep)

    theta = subparsers.add_parser('theta-exact', help='exact extremal index by interval algebra')
    theta.add_argument('--map', dest='map_id')
    theta.add_argument('--level', type=int, help='threshold level L (schedule index n with --gaps auto)')
    theta.add_argument('--level-max', dest='level_max', type=int, help='last level of a range')
    theta.add_argument('--gaps', help="run length q, or 'auto' for the schedule")
    theta.add_argument('--tau', help='window constant for the reported w_n')
    theta.add_argument('--dump-set', dest='dump_set', help='write A_{q,L} as interval text')
    _add_common(theta)

    digraph = subparsers.add_parser('digraph', help='substitution matrix and dimension bound')
    digraph.add_argument('--m', type=int)
    digraph.add_argument('--q', type=int)
    digraph.add_argument('--k', type=int, help='seed offset for the McClure vertex set')
    digraph.add_argument('--depth', type=int, help='Cantor depth of the vertex filter')
    digraph.add_argument('--dump-matrix', dest='dump_matrix', action='store_true', default=argparse.SUPPRESS)
    _add_common(digraph)

    ifs = subparsers.add_parser('ifs-theta', help='exact extremal index for an affine IFS')
    ifs.add_argument('--spec', dest='spec_path')
    ifs.add_argument('--k', type=int)
    ifs.add_argument('--n', type=int)
    _add_common(ifs)

    counts = subparsers.add_parser('counts', help='covering counts of C_n with T^-q(C_n)')
    counts.add_argument('--m', type=int)
    counts.add_argument('--q', type=int)
    counts.add_argument('--n-min', dest='n_min', type=int)
    counts.add_argument('--n-max', dest='n_max', type=int)
    counts.add_argument('--refine', type=int, help='extra depth for the refined count')
    _add_common(counts)

    repro = subparsers.add_parser('repro', help='reproduce a figure preset')
    repro.add_argument('figure', choices=FIGURES)
    _add_simulation(repro)
    repro.add_argument('--scale', type=float, help='multiply preset n and ell')
    _add_common(repro)

    for parser in (simulate, sweep, theta, digraph, ifs, counts, repro):
        for action in parser._actions:
            if action.dest != 'help' and action.default is None and not action.required:
                action.default = argparse.SUPPRESS


def build_run_config(command: str, explicit: Dict[str, object]) -> RunConfig:
    """Merge a --config file with explicit flags; flags win"""
    values: Dict[str, object] = {}
    config_file = explicit.get('config_file')
    if config_file:
        path = Path(str(config_file))
        if not path.is_file():
            raise ConfigException(f"Config file {path} not found", "CONFIG_NOT_FOUND")
        known = set(RunConfig.model_fields)
        for key, value in dotenv_values(path).items():
            if key not in known or key == 'command':
                raise ConfigException(f"{path}: unknown key {key!r}", "UNKNOWN_CONFIG_KEY", {'key': key})
            if value is not None:
                values[key] = value
    values.update(explicit)
    values['command'] = command
    try:
        return RunConfig(**values)
    except ValidationError as e:
        problems = '; '.join(
            f"{_flag(str(error['loc'][0])) if error['loc'] else 'config'}: {error['msg']}"
            for error in e.errors()
        )
        raise ConfigException(f"Invalid configuration: {problems}", "INVALID_CONFIG") from e


# -- handlers ----------------------------------------------------------------

def _service(run: RunConfig) -> SimulationService:
    return SimulationService(max_workers=run.threads)


def run_simulate(run: RunConfig) -> int:
    _require(run, 'map_id', 'n', 'ell')
    pmap = get_map(run.map_id)
    series = _service(run).simulate(pmap, run.observable, run.n, run.ell, run.seed, run.cap, run.burn_in)
    extra = {
        'map': pmap.map_id, 'observable': run.observable, 'n': str(run.n), 'ell': str(run.ell),
        'cap': str(run.cap), 'burn_in': str(resolve_burn_in(pmap, run.burn_in)),
    }
    header = header_lines(run, extra)
    if run.dump_dir:
        directory = Path(run.dump_dir)
        for item in series:
            write_text_file(
                directory / f"orbit_{item.index:05d}.txt",
                header + [
                    f"# orbit: {item.index}", f"# stream: {item.map_id} seed={item.seed}",
                    f"# x0: {format_decimal(item.origin)}",
                ],
                item.to_text(),
            )
        logger.info(f"Wrote {len(series)} series to {directory}")
    with open_output(run.output) as sink:
        write_lines(sink, header)
        write_lines(sink, ['orbit,x0,mean_level,max_level,cap_hits'])
        for item in series:
            levels = item.levels
            write_lines(sink, [
                f"{item.index},{format_decimal(item.origin)},{format_decimal(float(levels.mean()) if len(item) else None)},"
                f"{int(levels.max()) if len(item) else ''},{int((levels == run.cap).sum())}"
            ])
    return 0


def run_sweep(run: RunConfig) -> int:
    _require(run, 'map_id', 'n', 'ell')
    pmap = get_map(run.map_id)
    table = _service(run).sweep(
        pmap, run.observable, run.n, run.ell, run.seed, run.cap, (run.u_min, run.u_max), run.q_list, run.burn_in
    )
    plateaus = stability_region(table, run.plateau_window, run.plateau_eps)
    extra = {
        'burn_in': table.metadata['burn_in'],
        'cap': str(run.cap),
        'undefined': 'estimates with no exceedance are excluded from mean_theta and sd_theta',
        'plateau_rule': f"window={run.plateau_window} eps={format_decimal(run.plateau_eps)}",
    }
    with open_output(run.output) as sink:
        write_lines(sink, header_lines(run, extra))
        write_lines(sink, plateau_lines(pmap.map_id, plateaus))
        write_sweep_csv(sink, [table])
    return 0


def _theory_plan(run: RunConfig, level: int):
    """(L, q) for a requested level"""
    if run.gaps != 'auto':
        return level, run.gaps
    name, _, argument = run.map_id.partition(':')
    if name == 'mx_mod1' and argument.isdigit():
        plan = schedule(int(argument), max(level, 1), run.tau)
        return plan.level, plan.q_n
    return level, level


def run_theta_exact(run: RunConfig) -> int:
    _require(run, 'map_id', 'level')
    pmap = get_map(run.map_id)
    last = run.level_max if run.level_max is not None else run.level
    if run.dump_set and last != run.level:
        raise ConfigException("--dump-set needs a single --level", "INVALID_FLAGS")
    results: List[TheoryResult] = []
    for requested in range(run.level, last + 1):
        level, q = _theory_plan(run, requested)
        results.append(obrien_theta(pmap, level, q))
    if run.dump_set:
        result = results[0]
        cluster = exceedance_cluster_set(pmap, result.level, result.q)
        write_text_file(
            Path(run.dump_set),
            header_lines(run, {'set': f"A_(q={result.q},L={result.level})", 'map': pmap.map_id}),
            cluster.to_text(),
        )
    with open_output(run.output) as sink:
        if len(results) == 1:
            result = results[0]
            extra = {
                'map': pmap.map_id, 'level': str(result.level), 'q': str(result.q),
                'mu_U': format_rational(result.mu_u), 'mu_A': format_rational(result.mu_a),
                'components': str(result.components),
            }
            write_lines(sink, header_lines(run, extra))
            write_lines(sink, [format_rational(result.theta_exact), format_decimal(result.theta)])
        else:
            write_lines(sink, header_lines(run, {'map': pmap.map_id}))
            write_theory_csv(sink, results)
    return 0


def run_digraph(run: RunConfig) -> int:
    _require(run, 'm', 'q')
    matrix = build_Nq(run.m, run.q)
    rho = spectral_radius(matrix)
    histogram = ' '.join(f"{total}={count}" for total, count in matrix.row_sum_histogram().items())
    summary = {
        'dim': str(matrix.dim),
        'row_sums': histogram,
        'spectral_radius': format_decimal(rho),
        'dim_bound': format_decimal(dim_bound(run.m, run.q)),
    }
    if run.k is not None:
        depth = run.depth if run.depth is not None else 8
        vertices = mcclure_vertices(run.m, run.q, run.k, depth)
        reduced = build_Mqk(vertices, run.m, run.q)
        summary['mcclure_vertices'] = ' '.join(str(vertex.label) for vertex in vertices) or '-'
        summary['mcclure_depth'] = str(depth)
        summary['mcclure_spectral_radius'] = format_decimal(spectral_radius(reduced))
    with open_output(run.output) as sink:
        if run.dump_matrix:
            write_lines(sink, header_lines(run, summary))
            write_lines(sink, [f"{row} {col}" for row, col in matrix.entries()])
        else:
            write_lines(sink, header_lines(run))
            write_lines(sink, [f"{key}: {value}" for key, value in summary.items()])
    return 0


def run_ifs_theta(run: RunConfig) -> int:
    _require(run, 'spec_path', 'k', 'n')
    ifs = load_ifs(run.spec_path)
    result = general_theta(ifs, run.k, run.n)
    extra = {
        'ifs': ifs.name,
        'contractions': ' '.join(f"{format_rational(c.ratio)}@{format_rational(c.offset)}" for c in ifs.contractions),
        'level': str(result.level),
        'limit_theta': format_rational(ifs_limit_theta(ifs, run.k)),
        'similarity_dimension': format_decimal(similarity_dimension(ifs)),
    }
    with open_output(run.output) as sink:
        write_lines(sink, header_lines(run, extra))
        write_lines(sink, [format_rational(result.theta_exact), format_decimal(result.theta)])
    return 0


def run_counts(run: RunConfig) -> int:
    _require(run, 'm', 'q')
    last = run.n_max if run.n_max is not None else run.n_min
    rows = []
    for n in range(run.n_min, last + 1):
        depth = n + run.refine
        n_star, n_refined = covering_counts(run.m, run.q, n, depth)
        rows.append(CountsRow(n=n, depth=depth, n_star=n_star, n_refined=n_refined))
    extra = {'m': str(run.m), 'q': str(run.q), 'dim_bound': format_decimal(dim_bound(run.m, run.q))}
    if len(rows) >= 2:
        extra['dim_estimate_star'] = format_decimal(dim_estimate_from_counts([(r.n, r.n_star) for r in rows]))
        extra['dim_estimate_refined'] = format_decimal(dim_estimate_from_counts([(r.n, r.n_refined) for r in rows]))
    with open_output(run.output) as sink:
        write_lines(sink, header_lines(run, extra))
        write_counts_csv(sink, rows)
    return 0


def run_repro(run: RunConfig) -> int:
    _require(run, 'figure')
    if run.figure in EXACT_FIGURES:
        with open_output(run.output) as sink:
            write_lines(sink, header_lines(run, {'figure': f"{run.figure} ({EXACT_FIGURES[run.figure]})"}))
            write_lines(sink, exact_figure_lines(run.figure, run.cap))
        return 0
    results = run_sweep_figure(
        run.figure, _service(run), run.seed, run.cap, run.n, run.ell, run.scale, run.burn_in
    )
    extra = {'figure': f"{run.figure} ({SWEEP_FIGURES[run.figure].description})"}
    lines = []
    for index, (panel, table) in enumerate(results, 1):
        label = f"{index}:{panel.map_id}:{panel.observable}:n={panel.n}:ell={panel.ell}"
        if panel.expected is not None:
            lines.append(f"# expected[{label}]: {format_decimal(panel.expected)}")
        lines.extend(plateau_lines(label, stability_region(table, run.plateau_window, run.plateau_eps)))
    with open_output(run.output) as sink:
        write_lines(sink, header_lines(run, extra))
        write_lines(sink, lines)
        write_sweep_csv(sink, [table for _, table in results])
    return 0


COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    'simulate': run_simulate,
    'sweep': run_sweep,
    'theta-exact': run_theta_exact,
    'digraph': run_digraph,
    'ifs-theta': run_ifs_theta,
    'counts': run_counts,
    'repro': run_repro,
}


def run(run_config: RunConfig) -> int:
    """Execute one configured command under its resource caps"""
    with resource_limits(
        max_depth=run_config.max_depth,
        max_denominator_bits=run_config.max_denominator_bits,
        max_matrix_rows=run_config.max_matrix_rows,
        max_operations=run_config.max_operations,
    ):
        code = COMMANDS[run_config.command](run_config)
        logger.debug(f"Operation budget: {current_budget().get_stats()}")
        return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='cantor-ei',
        description='Extreme-value statistics of interval-map orbits with Cantor-set observables',
    )
    subparsers = parser.add_subparsers(dest='command', required=True)
    setup_cli_commands(subparsers)
    return parser


def parse_args(argv: Optional[List[str]] = None) -> RunConfig:
    """Parse argv into a validated RunConfig"""
    parser = build_parser()
    namespace = vars(parser.parse_args(argv))
    command = namespace.pop('command')
    return build_run_config(command, namespace)
