""" Tests for configuration parsing, the command line and the file
    readers and writers
"""

import json
import argparse
import numpy
import pytest
import yaml
from prunelib.errors import ConfigError
from prunelib.errors import DigestError
from prunelib.errors import ValidationError
from prunelib.prune_io import printer
from prunelib.prune_io import reader
from prunelib.prune_io import writer
from prunelib.prune_io._path import preset_path
from prunelib.prune_io._path import table_name
from prunelib.prune_io._path import output_path
from prunelib.prune_io.parser import args
from prunelib.prune_io.parser import config


ARCH = {
    'n_blocks': 4, 'embed_dim': 8, 'n_heads': 2, 'image_size': 8,
    'patch_size': 2, 'n_classes': 3}
DIGEST = 'ab' * 32


def test__read_config():
    """ test config.read_config on the presets
    """
    cfg = config.read_config('toy')
    assert set(cfg) == {'arch', 'train', 'data', 'schedule'}
    assert cfg['arch']['attn_dim'] == 16
    assert cfg['arch']['fc_dim'] == 16
    assert cfg['arch']['package_policy'] == 'concat_per_phase'
    assert cfg['train']['momentum'] == 0.9
    assert cfg['train']['lr_selector'] == 5.0e-3
    assert cfg['train']['warmup_epochs'] == 15
    assert cfg['train']['lr_warmup'] == 5.0e-3
    assert cfg['train']['calibrate'] is True
    assert cfg['schedule']['grouping'] == 'phase_head'
    assert cfg['schedule']['max_rate'] == 0.5

    for name in ('deit_t', 'deit_s'):
        cfg = config.read_config(name)
        assert cfg['arch']['selector_positions'] == [3, 6, 9]
        assert cfg['arch']['n_blocks'] == 12

    cfg = config.read_config(preset_path('deit_s', 'yaml'))
    assert cfg['arch']['phase_rates'] == [0.2, 0.4, 0.5]

    with pytest.raises(ConfigError):
        config.read_config('resnet')


def test__config_errors():
    """ test that invalid configurations name the offending keyword
    """
    _raises('arch.n_heads', arch=dict(ARCH, embed_dim=10, n_heads=3))
    _raises('arch.patch_size', arch=dict(ARCH, patch_size=3))
    _raises('arch.selector_positions',
            arch=dict(ARCH, selector_positions=[0], phase_rates=[0.2]))
    _raises('arch.selector_positions',
            arch=dict(ARCH, selector_positions=[2, 1],
                      phase_rates=[0.2, 0.3]))
    _raises('arch.phase_rates',
            arch=dict(ARCH, selector_positions=[1, 2],
                      phase_rates=[0.4, 0.3]))
    _raises('arch.phase_rates',
            arch=dict(ARCH, selector_positions=[1], phase_rates=[1.0]))
    _raises('arch.phase_rates',
            arch=dict(ARCH, selector_positions=[1, 2], phase_rates=[0.3]))
    _raises('arch.package_policy', arch=dict(ARCH, package_policy='drop'))
    _raises('train.epochs', arch=ARCH, train={'epochs': 2.5})
    _raises('arch.n_blocks', arch=dict(ARCH, n_blocks=0))
    _raises('arch', arch=dict(ARCH, depth=12))
    _raises('n_classes', arch={key: val for key, val in ARCH.items()
                               if key != 'n_classes'})
    _raises('model', arch=ARCH, model={})

    for section, key, val in (
            ('train', 'epochs', -1), ('train', 'warmup_epochs', -2),
            ('train', 'batch_size', 0), ('train', 'batch_size', -4),
            ('train', 'lr_selector', -1.0e-3),
            ('train', 'lr_backbone', -1.0e-6), ('train', 'lr_warmup', -0.1),
            ('train', 'momentum', 1.0), ('train', 'lambda_ratio', -2.0),
            ('train', 'kl_temperature', 0.0), ('train', 'probe_coords', 0),
            ('data', 'n_train', 0), ('data', 'n_val', -5),
            ('data', 'noise', -0.1), ('schedule', 'grid_step', 0.0),
            ('schedule', 'grid_step', 1.0), ('schedule', 'max_rate', 1.0),
            ('schedule', 'acc_tol', -0.5),
            ('schedule', 'finetune_epochs', -1)):
        _raises('{}.{}'.format(section, key), arch=ARCH,
                **{section: {key: val}})
    _raises('train.baselines', arch=ARCH, train={'baselines': ['channel']})
    _raises('train.baselines', arch=ARCH,
            train={'baselines': ['random', 'random']})

    cfg = _cfg(arch=ARCH, train={'epochs': 0, 'lr_selector': 0.0,
                                 'lr_backbone': 2.0e-3})
    assert cfg['train']['epochs'] == 0
    assert cfg['train']['lr_warmup'] == 2.0e-3
    assert cfg['train']['baselines'] == []
    cfg = _cfg(arch=dict(ARCH, package_policy='none'),
               train={'baselines': ['structure', 'random']})
    assert cfg['arch']['package_policy'] == 'none'
    assert cfg['train']['baselines'] == ['structure', 'random']

    with pytest.raises(ConfigError):
        config.config_dictionary('[1, 2]')
    with pytest.raises(ConfigError):
        config.config_dictionary('arch: {n_blocks: [')


def test__config_digest():
    """ test config.config_digest
    """
    cfg = _cfg(arch=ARCH)
    digest = config.config_digest(cfg)
    assert len(digest) == 64
    assert config.config_digest(_cfg(arch=ARCH)) == digest

    again = config.config_dictionary(config.config_string(cfg))
    assert again == cfg
    assert config.config_digest(again) == digest

    other = config.with_plan(cfg, [1], [0.3])
    assert other['arch']['selector_positions'] == [1]
    assert config.config_digest(other) != digest
    narrow = config.with_widths(other, 4, 4, 6)
    assert narrow['arch']['embed_dim'] == 4
    assert narrow['arch']['fc_dim'] == 6
    assert narrow['arch']['selector_positions'] == []
    assert other['arch']['embed_dim'] == 8
    with pytest.raises(ConfigError):
        config.with_widths(cfg, 5, 4, 4)


def test__command_line():
    """ test args.command_line
    """
    nspc = args.command_line(['plan', '--budget-ms', '6.1', '--positions',
                              '0,3'])
    assert nspc.command == 'plan'
    assert nspc.budget_ms == 6.1
    assert nspc.positions == [0, 3]
    assert nspc.config == 'deit_t'
    assert nspc.seed is None
    assert not nspc.progressive

    nspc = args.command_line(['run', '--weights', 'w.bin', '--config', 'toy',
                              '--policy', 'merge_single'])
    assert nspc.mode == 'infer'
    assert nspc.policy == 'merge_single'

    with pytest.raises(SystemExit):
        args.command_line(['plan'])
    with pytest.raises(SystemExit):
        args.command_line(['train', '--weights', 'w.bin', '--policy', 'x'])
    nspc = args.command_line(['train', '--weights', 'w.bin', '--policy',
                              'none', '--baselines', 'structure,random'])
    assert nspc.policy == 'none'
    assert nspc.baselines == ['structure', 'random']
    assert not nspc.no_control
    assert args.command_line(
        ['train', '--weights', 'w.bin', '--no-control']).baselines is None

    with pytest.raises(argparse.ArgumentTypeError):
        args.position_list('3,six')
    with pytest.raises(argparse.ArgumentTypeError):
        args.baseline_list('random,channel')


def test__weights(tmp_path):
    """ test writer.write_weights and reader.read_weights
    """
    path = str(tmp_path / 'model.bin')
    params = {'blk0.q_w': numpy.arange(6.0).reshape(2, 3),
              'head_b': numpy.array([-1.5, 2.25]),
              'scale': numpy.array(3.0)}
    writer.write_weights(path, params, DIGEST)

    out, digest = reader.read_weights(path, DIGEST)
    assert digest == DIGEST
    assert set(out) == set(params)
    assert all(numpy.array_equal(out[key], params[key]) for key in params)
    assert out['scale'].shape == ()

    with pytest.raises(DigestError):
        reader.read_weights(path, 'cd' * 32)

    with open(path, 'rb') as wfile:
        buf = wfile.read()
    short = str(tmp_path / 'short.bin')
    with open(short, 'wb') as wfile:
        wfile.write(buf[:-5])
    with pytest.raises(ValidationError):
        reader.read_weights(short)

    bad = str(tmp_path / 'bad.bin')
    with open(bad, 'wb') as wfile:
        wfile.write(b'XXXX' + buf[4:])
    with pytest.raises(ValidationError):
        reader.read_weights(bad)


def test__pgm(tmp_path):
    """ test reader.read_pgm and the keep-mask writers
    """
    mask = numpy.array([1.0, 0.0, 0.0, 1.0])
    assert writer.mask_grid(mask, 2) == '#.\n.#'

    path = str(tmp_path / 'mask.pgm')
    writer.write_mask_pgm(path, mask, 2, scale=2)
    img = reader.read_pgm(path)
    assert img.shape == (4, 4, 1)
    assert numpy.array_equal(img[:2, :2, 0], numpy.ones((2, 2)))
    assert numpy.array_equal(img[2:, :2, 0], numpy.zeros((2, 2)))

    paths = writer.write_masks(str(tmp_path / 'dump'), [mask, 1.0 - mask], 2)
    assert [p.split('/')[-1] for p in paths] == ['phase0.pgm', 'phase1.pgm']
    assert reader.read_pgm(paths[1]).shape == (8, 8, 1)

    path = str(tmp_path / 'bin.pgm')
    with open(path, 'wb') as pgm_file:
        pgm_file.write(b'P5\n# two by two\n2 2\n255\n' +
                       bytes([0, 51, 204, 255]))
    img = reader.read_pgm(path)
    assert numpy.allclose(img[..., 0], [[0.0, 0.2], [0.8, 1.0]])

    path = str(tmp_path / 'png.pgm')
    with open(path, 'wb') as pgm_file:
        pgm_file.write(b'\x89PNG')
    with pytest.raises(ValidationError):
        reader.read_pgm(path)

    path = str(tmp_path / 'short.pgm')
    with open(path, 'w') as pgm_file:
        pgm_file.write('P2\n2 2\n255\n0 255 0\n')
    with pytest.raises(ValidationError):
        reader.read_pgm(path)


def test__report(tmp_path, capsys):
    """ test the JSON report writers
    """
    rep = writer.report('analyze', DIGEST,
                        {'total': numpy.int64(12), 'kept': numpy.ones(2)},
                        seed=3, wall_time=0.5)
    writer.write_report(rep)
    out = json.loads(capsys.readouterr().out)
    assert out['outputs'] == {'total': 12, 'kept': [1.0, 1.0]}
    assert out['config_digest'] == DIGEST
    assert out['seed'] == 3

    path = str(tmp_path / 'report.json')
    writer.write_report(rep, path)
    with open(path, 'r') as rep_file:
        assert json.load(rep_file)['command'] == 'analyze'

    hist = str(tmp_path / 'hist.jsonl')
    writer.append_history(hist, {'block': 3, 'rate': numpy.float64(0.2)})
    writer.append_history(hist, {'block': 2, 'rate': 0.1})
    with open(hist, 'r') as hist_file:
        lines = [json.loads(line) for line in hist_file]
    assert lines == [{'block': 3, 'rate': 0.2}, {'block': 2, 'rate': 0.1}]


def test__printer_format():
    """ test the number and table formatting of the printer
    """
    assert printer.format_count(4540695552) == '4.541G'
    assert printer.format_count(181744320) == '181.744M'
    assert printer.format_count(14) == '14'

    table = printer.format_table(('rate', 'ms'), ((0.5, 1.121),), width=8)
    assert table.splitlines() == ['    rate      ms', '  0.5000  1.1210']


def test__paths(tmp_path, capsys):
    """ test the preset path helpers
    """
    assert table_name('deit_s') == 'deit_s_zcu102'
    assert table_name('configs/toy.yaml') == 'toy_zcu102'
    assert preset_path('toy_zcu102', 'csv').endswith('toy_zcu102.csv')
    with pytest.raises(ConfigError):
        preset_path('toy_gpu', 'csv')

    path = output_path('masks', prefix=str(tmp_path))
    assert path == str(tmp_path / 'masks')
    assert (tmp_path / 'masks').is_dir()
    assert output_path('other', make_path=False, prefix=str(tmp_path)) == (
        str(tmp_path / 'other'))
    assert not (tmp_path / 'other').exists()
    assert capsys.readouterr().out == ''


# Helpers
def _cfg(**sections):
    return config.config_dictionary(yaml.safe_dump(sections))


def _raises(label, **sections):
    with pytest.raises(ConfigError) as err:
        _cfg(**sections)
    assert label in str(err.value)


if __name__ == '__main__':
    test__read_config()
    test__config_errors()
    test__config_digest()
