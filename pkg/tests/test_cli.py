import logging

import pytest

from src.cli.commands import parse_args, run


@pytest.fixture(autouse=True)
def _restore_root_logging():
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


def _invoke(capsys, *argv):
    code = run(parse_args(list(argv)))
    out = capsys.readouterr().out
    return code, out


def _data_lines(out):
    return [line for line in out.splitlines() if not line.startswith('#')]


def test_theta_exact_tripling(capsys):
    code, out = _invoke(capsys, 'theta-exact', '--map', 'mx_mod1:3', '--level', '3')
    assert code == 0
    assert _data_lines(out) == ['1/3', '0.333333333333']
    assert out.startswith('# cantor-ei ')
    assert '# config_hash: ' in out


def test_theta_exact_level_range_and_dump(capsys, tmp_path):
    code, out = _invoke(capsys, 'theta-exact', '--map', 'mx_mod1:9', '--level', '1', '--level-max', '3')
    assert code == 0
    rows = _data_lines(out)
    assert rows[0] == 'level,q,mu_U,mu_A,theta'
    assert [row.split(',')[-1] for row in rows[1:]] == ['5/9', '5/9', '5/9']

    dump = tmp_path / 'cluster.txt'
    _invoke(capsys, 'theta-exact', '--map', 'mx_mod1:3', '--level', '2', '--gaps', '2', '--dump-set', str(dump))
    assert _data_lines(dump.read_text()) == ['1/27 2/27', '7/27 8/27', '19/27 20/27', '25/27 26/27']


def test_digraph_matrix_dump(capsys):
    code, out = _invoke(capsys, 'digraph', '--m', '3', '--q', '1', '--dump-matrix')
    assert code == 0
    assert _data_lines(out) == ['1 1', '2 2', '2 4', '3 1', '3 5', '4 2', '4 4', '5 5']


def test_digraph_summary(capsys):
    _, out = _invoke(capsys, 'digraph', '--m', '3', '--q', '1', '--k', '0', '--depth', '5')
    lines = _data_lines(out)
    assert 'dim: 5' in lines
    assert 'row_sums: 1=2 2=3' in lines
    assert 'spectral_radius: 2' in lines
    assert 'dim_bound: 0.630929753571' in lines
    assert any(line.startswith('mcclure_spectral_radius: ') for line in lines)


def test_counts_csv(capsys):
    _, out = _invoke(capsys, 'counts', '--m', '3', '--q', '1', '--n-min', '1', '--n-max', '3')
    assert _data_lines(out) == ['n,depth,N_star,N_refined', '1,5,2,2', '2,6,4,4', '3,7,8,8']
    assert '# dim_estimate_star: 0.630929753571' in out


def test_ifs_theta(capsys, tmp_path):
    ifs_file = tmp_path / 'ternary.txt'
    ifs_file.write_text('1/3 0\n1/3 2/3\n')
    _, out = _invoke(capsys, 'ifs-theta', '--spec', str(ifs_file), '--k', '2', '--n', '3')
    assert _data_lines(out) == ['5/9', '0.555555555556']
    assert '# limit_theta: 5/9' in out


def test_sweep_output_independent_of_threads(capsys):
    argv = ['sweep', '--map', 'mx_mod1:3', '--n', '2000', '--ell', '6', '--u-min', '5', '--u-max', '8',
            '--q', '1,2', '--seed', '3']
    _, serial = _invoke(capsys, *argv, '--threads', '1')
    _, threaded = _invoke(capsys, *argv, '--threads', '3')
    assert serial == threaded
    rows = _data_lines(serial)
    assert rows[0] == 'map,observable,n,ell,seed,u,q,mean_theta,sd_theta,defined_count'
    assert len(rows) == 1 + 4 * 2
    assert rows[1].startswith('mx_mod1:3,ladder,2000,6,3,5,1,')
    assert '# plateau[mx_mod1:3]: ' in serial


def test_simulate_dump_dir(capsys, tmp_path):
    dump = tmp_path / 'series'
    _, out = _invoke(capsys, 'simulate', '--map', 'mx_mod1:3', '--n', '50', '--ell', '3', '--cap', '20',
                     '--seed', '11', '--dump-dir', str(dump))
    assert sorted(p.name for p in dump.iterdir()) == ['orbit_00000.txt', 'orbit_00001.txt', 'orbit_00002.txt']
    text = (dump / 'orbit_00001.txt').read_text()
    assert '# orbit: 1' in text
    assert '# stream: mx_mod1:3 seed=11' in text
    levels = _data_lines(text)
    assert len(levels) == 50
    assert all(1 <= int(level) <= 20 for level in levels)
    assert _data_lines(out)[0] == 'orbit,x0,mean_level,max_level,cap_hits'


def test_repro_cantor_construction(capsys):
    _, out = _invoke(capsys, 'repro', 'fig1')
    assert '# C_5: 32 intervals, measure 32/243' in out
    assert '0 1/243' in _data_lines(out)


def test_output_file(capsys, tmp_path):
    target = tmp_path / 'nested' / 'theta.txt'
    _invoke(capsys, 'theta-exact', '--map', 'mx_mod1:3', '--level', '2', '--output', str(target))
    assert _data_lines(target.read_text()) == ['1/3', '0.333333333333']


def test_exit_codes(tmp_path):
    from main import main

    assert main(['sweep']) == 2
    assert main(['sweep', '--n', '0']) == 2
    assert main(['theta-exact', '--map', 'gauss', '--level', '2']) == 2
    assert main(['theta-exact', '--map', 'mx_mod1:3', '--level', '5', '--gaps', '1', '--max-depth', '3']) == 3
    assert main(['theta-exact', '--map', 'mx_mod1:3', '--level', '2', '--output', str(tmp_path)]) == 5
    assert main(['theta-exact', '--map', 'mx_mod1:3', '--level', '2', '--quiet']) == 0
    with pytest.raises(SystemExit) as raised:
        main(['sweep', '--no-such-flag'])
    assert raised.value.code == 2
