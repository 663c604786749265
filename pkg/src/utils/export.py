"""
Output writers: header block, CSV tables and text dumps
"""

import csv
import io
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, TextIO

from .. import __version__, config
from ..exact.interval_set import format_rational
from ..models.schemas import CountsRow, Plateau, RunConfig, SweepTable, TheoryResult
from .error_handler import OutputException

SWEEP_COLUMNS = ['map', 'observable', 'n', 'ell', 'seed', 'u', 'q', 'mean_theta', 'sd_theta', 'defined_count']
THEORY_COLUMNS = ['level', 'q', 'mu_U', 'mu_A', 'theta']
COUNTS_COLUMNS = ['n', 'depth', 'N_star', 'N_refined']


def format_decimal(value: Optional[float]) -> str:
    """12 significant digits; empty for undefined values"""
    if value is None:
        return ''
    return format(float(value), '.12g')


def header_lines(run: RunConfig, extra: Optional[Dict[str, str]] = None) -> List[str]:
    lines = [
        f"# {config.ARTIFACT_NAME} {__version__}",
        f"# command: {run.command}",
        f"# config_hash: {run.config_hash()}",
        f"# seed: {run.seed}",
    ]
    for key, value in (extra or {}).items():
        lines.append(f"# {key}: {value}")
    return lines


@contextmanager
def open_output(path: Optional[str]) -> Iterator[TextIO]:
    """Text sink for a path, or stdout when path is None or '-'"""
    if path in (None, '-'):
        yield sys.stdout
        sys.stdout.flush()
        return
    target = Path(path)
    buffer = io.StringIO()
    yield buffer
    try:
        if target.parent and not target.parent.exists():
            target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(buffer.getvalue(), encoding='utf-8', newline='')
    except OSError as e:
        raise OutputException(f"Cannot write {target}: {e}", "OUTPUT_ERROR", {'path': str(target)}) from e


def write_lines(sink: TextIO, lines: Iterable[str]):
    for line in lines:
        sink.write(line + '\n')


def write_sweep_csv(sink: TextIO, tables: Iterable[SweepTable]):
    writer = csv.writer(sink, lineterminator='\n')
    writer.writerow(SWEEP_COLUMNS)
    for table in tables:
        meta = table.metadata
        for row in table.rows:
            writer.writerow([
                meta.get('map', ''), meta.get('observable', ''), meta.get('n', ''),
                meta.get('ell', ''), meta.get('seed', ''), row.u, row.q,
                format_decimal(row.mean_theta), format_decimal(row.sd_theta), row.defined_count,
            ])


def plateau_lines(label: str, plateaus: List[Plateau]) -> List[str]:
    if not plateaus:
        return [f"# plateau[{label}]: none"]
    return [
        f"# plateau[{label}]: u={p.u_lo}..{p.u_hi} value={format_decimal(p.value)}"
        for p in plateaus
    ]


def write_theory_csv(sink: TextIO, results: Iterable[TheoryResult]):
    writer = csv.writer(sink, lineterminator='\n')
    writer.writerow(THEORY_COLUMNS)
    for result in results:
        writer.writerow([
            result.level, result.q, format_rational(result.mu_u),
            format_rational(result.mu_a), format_rational(result.theta_exact),
        ])


def write_counts_csv(sink: TextIO, rows: Iterable[CountsRow]):
    writer = csv.writer(sink, lineterminator='\n')
    writer.writerow(COUNTS_COLUMNS)
    for row in rows:
        writer.writerow([row.n, row.depth, row.n_star, row.n_refined])


def write_text_file(path: Path, header: List[str], body: str):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text('\n'.join(header) + '\n' + body, encoding='utf-8', newline='')
    except OSError as e:
        raise OutputException(f"Cannot write {path}: {e}", "OUTPUT_ERROR", {'path': str(path)}) from e
