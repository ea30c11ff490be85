""" Parses the YAML configuration of a pruned vision transformer.

    The file holds up to four sections:
        (1) `arch`: backbone extents, selector positions and phase rates
        (2) `train`: optimizer, learning rates and loss weights
        (3) `data`: synthetic data set sizes, noise and seed
        (4) `schedule`: thresholds of the progressive insertion search

    Each section is built in three stages:
        (1) filled with user-specified options
        (2) default values not defined by the user are added, and
        (3) assessed that all keywords and values are supported by the code.
    The arch section then goes through checks that span several keywords.
"""

import os
import json
import hashlib
import yaml
from prunelib.errors import ConfigError
from prunelib.prune_io import _path
from prunelib.prune_io.parser._keywrd import defaults_from_val_dct
from prunelib.prune_io.parser._keywrd import right_update
from prunelib.prune_io.parser._keywrd import check_dct1


# DICTIONARIES OF DEFAULTS #
NUM = (float, int)
SEQ = (list, tuple)

ARCH_REQ = (
    'n_blocks', 'embed_dim', 'n_heads', 'image_size', 'patch_size',
    'n_classes')
ARCH_VAL_DCT = {
    'n_blocks': ((int,), (), None),
    'embed_dim': ((int,), (), None),
    'n_heads': ((int,), (), None),
    'attn_dim': ((int,), (), None),
    'fc_dim': ((int,), (), None),
    'image_size': ((int,), (), None),
    'patch_size': ((int,), (), None),
    'in_chans': ((int,), (), 3),
    'n_classes': ((int,), (), None),
    'use_cls_token': ((bool,), (True, False), True),
    'selector_positions': (SEQ, (), ()),
    'phase_rates': (SEQ, (), ()),
    'package_policy': (
        (str,), ('concat_per_phase', 'merge_single', 'none'),
        'concat_per_phase'),
    'gumbel_tau': (NUM, (), 0.5),
    'selector_ms': (NUM, (), 0.0),
}

TRAIN_REQ = ()
TRAIN_VAL_DCT = {
    'epochs': ((int,), (), 5),
    'warmup_epochs': ((int,), (), 0),
    'batch_size': ((int,), (), 32),
    'optimizer': ((str,), ('adam', 'sgd'), 'adam'),
    'lr_selector': (NUM, (), 5.0e-4),
    'lr_backbone': (NUM, (), 5.0e-6),
    'lr_warmup': (NUM, (), None),
    'momentum': (NUM, (), 0.9),
    'lambda_kl': (NUM, (), 0.5),
    'lambda_distill': (NUM, (), 0.5),
    'lambda_ratio': (NUM, (), 2.0),
    'kl_temperature': (NUM, (), 1.0),
    'count_package': ((bool,), (True, False), False),
    'grad_probe': ((bool,), (True, False), True),
    'probe_coords': ((int,), (), 24),
    'calibrate': ((bool,), (True, False), True),
    'baselines': (SEQ, (), ()),
    'seed': ((int,), (), 0),
}

DATA_REQ = ()
DATA_VAL_DCT = {
    'n_train': ((int,), (), 512),
    'n_val': ((int,), (), 2000),
    'noise': (NUM, (), 0.3),
    'seed': ((int,), (), 0),
}

SCHED_REQ = ()
SCHED_VAL_DCT = {
    'acc_tol': (NUM, (), 0.5),
    'rate_tol': (NUM, (), 0.085),
    'grid_step': (NUM, (), 0.05),
    'max_rate': (NUM, (), None),
    'finetune_epochs': ((int,), (), 2),
    'grouping': ((str,), ('phase_head', 'adjacent'), 'phase_head'),
}

SECTION_DCT = {
    'arch': (ARCH_VAL_DCT, ARCH_REQ),
    'train': (TRAIN_VAL_DCT, TRAIN_REQ),
    'data': (DATA_VAL_DCT, DATA_REQ),
    'schedule': (SCHED_VAL_DCT, SCHED_REQ),
}

# Numeric ranges: (lower, upper, lower inclusive); None leaves a side open
RANGE_DCT = {
    'train': {
        'epochs': (0, None, True),
        'warmup_epochs': (0, None, True),
        'batch_size': (0, None, False),
        'lr_selector': (0.0, None, True),
        'lr_backbone': (0.0, None, True),
        'lr_warmup': (0.0, None, True),
        'momentum': (0.0, 1.0, True),
        'lambda_kl': (0.0, None, True),
        'lambda_distill': (0.0, None, True),
        'lambda_ratio': (0.0, None, True),
        'kl_temperature': (0.0, None, False),
        'probe_coords': (0, None, False),
    },
    'data': {
        'n_train': (0, None, False),
        'n_val': (0, None, False),
        'noise': (0.0, None, True),
    },
    'schedule': {
        'acc_tol': (0.0, None, True),
        'rate_tol': (0.0, None, True),
        'grid_step': (0.0, 1.0, False),
        'max_rate': (0.0, 1.0, False),
        'finetune_epochs': (0, None, True),
    },
}
BASELINES = ('random', 'structure')


# MAIN CALLABLES
def read_config(name):
    """ Read a configuration from a file path or the name of a preset

        :param name: path to a YAML file or one of the preset names
        :type name: str
        :rtype: dict[str: dict]
    """

    if os.path.exists(name):
        path = name
    else:
        path = _path.preset_path(name, 'yaml')
    with open(path, 'r') as cfg_file:
        cfg_str = cfg_file.read()

    return config_dictionary(cfg_str)


def config_dictionary(cfg_str):
    """ Build the full configuration dictionary from a YAML string

        :param cfg_str: YAML text of the configuration
        :type cfg_str: str
        :rtype: dict[str: dict]
    """

    try:
        inp_dct = yaml.safe_load(cfg_str)
    except yaml.YAMLError as err:
        raise ConfigError('Configuration is not valid YAML: {}'.format(err))
    if not isinstance(inp_dct, dict):
        raise ConfigError('Configuration must be a mapping of sections')

    unknown = set(inp_dct) - set(SECTION_DCT)
    if unknown:
        raise ConfigError(
            'Unsupported sections: {}'.format(','.join(sorted(unknown))))

    cfg = {}
    for section, (val_dct, req_lst) in SECTION_DCT.items():
        sec_dct = inp_dct.get(section) or {}
        if not isinstance(sec_dct, dict):
            raise ConfigError('Section {} must be a mapping'.format(section))
        check_dct1(sec_dct, val_dct, req_lst, section)
        sec_dct = right_update(defaults_from_val_dct(val_dct), sec_dct)
        cfg[section] = _normalize(sec_dct, val_dct)

    cfg['arch'] = check_arch(cfg['arch'])
    check_ranges(cfg)
    cfg['train'] = check_train(cfg['train'])

    return cfg


def check_arch(arch_dct):
    """ Checks of the arch section that involve several keywords.
        Fills the attention and FFN extents with the embedding width
        when they are not given.

        :param arch_dct: arch section with defaults applied
        :type arch_dct: dict[str: obj]
        :rtype: dict[str: obj]
    """

    arch_dct = dict(arch_dct)
    for key in ('attn_dim', 'fc_dim'):
        if arch_dct[key] is None:
            arch_dct[key] = arch_dct['embed_dim']

    for key in ('n_blocks', 'embed_dim', 'n_heads', 'attn_dim', 'fc_dim',
                'image_size', 'patch_size', 'in_chans', 'n_classes'):
        if arch_dct[key] <= 0:
            raise ConfigError(
                'arch.{} must be positive, got {}'.format(key, arch_dct[key]))

    if arch_dct['embed_dim'] % arch_dct['n_heads']:
        raise ConfigError(
            'arch.n_heads: embed_dim {} not divisible by {} heads'.format(
                arch_dct['embed_dim'], arch_dct['n_heads']))
    if arch_dct['attn_dim'] % arch_dct['n_heads']:
        raise ConfigError(
            'arch.attn_dim: {} not divisible by {} heads'.format(
                arch_dct['attn_dim'], arch_dct['n_heads']))
    if arch_dct['image_size'] % arch_dct['patch_size']:
        raise ConfigError(
            'arch.patch_size: {} does not divide image_size {}'.format(
                arch_dct['patch_size'], arch_dct['image_size']))
    if arch_dct['gumbel_tau'] <= 0.0:
        raise ConfigError('arch.gumbel_tau must be positive')
    if arch_dct['selector_ms'] < 0.0:
        raise ConfigError('arch.selector_ms must not be negative')

    positions = arch_dct['selector_positions']
    rates = arch_dct['phase_rates']
    if len(positions) != len(rates):
        raise ConfigError(
            'arch.phase_rates: {} rates given for {} selectors'.format(
                len(rates), len(positions)))
    check_positions(positions, arch_dct['n_blocks'], first=1)
    check_rates(rates)
    arch_dct['phase_rates'] = [float(rate) for rate in rates]
    arch_dct['selector_positions'] = list(positions)

    head_dim = arch_dct['embed_dim'] // arch_dct['n_heads']
    if positions and head_dim % 4:
        raise ConfigError(
            'arch.n_heads: selector head width {} must be a multiple '
            'of 4'.format(head_dim))

    return arch_dct


def check_ranges(cfg):
    """ Numeric keywords must lie in the ranges of RANGE_DCT
    """
    for section, rng_dct in RANGE_DCT.items():
        for key, (lower, upper, closed) in rng_dct.items():
            val = cfg[section][key]
            if val is None:
                continue
            low_ok = val >= lower if closed else val > lower
            if not low_ok or (upper is not None and val >= upper):
                raise ConfigError(
                    '{}.{}: {} outside {}{}, {})'.format(
                        section, key, val, '[' if closed else '(', lower,
                        'inf' if upper is None else upper))


def check_train(train_dct):
    """ Fills the warmup learning rate with the backbone rate and checks
        the names of the baselines
    """
    train_dct = dict(train_dct)
    if train_dct['lr_warmup'] is None:
        train_dct['lr_warmup'] = train_dct['lr_backbone']
    for name in train_dct['baselines']:
        if name not in BASELINES:
            raise ConfigError(
                'train.baselines: {} not in {}'.format(name, BASELINES))
    if len(set(train_dct['baselines'])) != len(train_dct['baselines']):
        raise ConfigError('train.baselines: repeated names')
    train_dct['baselines'] = list(train_dct['baselines'])
    return train_dct


def check_positions(positions, n_blocks, first=1):
    """ Selector positions must be strictly increasing block indices
        in [first, n_blocks - 1]
    """
    for pos in positions:
        if type(pos) is not int:
            raise ConfigError(
                'arch.selector_positions: {} is not an integer'.format(pos))
        if not first <= pos <= n_blocks - 1:
            raise ConfigError(
                'arch.selector_positions: {} outside [{}, {}]'.format(
                    pos, first, n_blocks - 1))
    if any(nxt <= prev for prev, nxt in zip(positions, positions[1:])):
        raise ConfigError(
            'arch.selector_positions must be strictly increasing: {}'.format(
                list(positions)))


def check_rates(rates):
    """ Phase rates are cumulative pruned fractions: each in [0, 1) and
        nondecreasing from phase to phase
    """
    for rate in rates:
        if type(rate) not in NUM or not 0.0 <= rate < 1.0:
            raise ConfigError(
                'arch.phase_rates: {} not in [0, 1)'.format(rate))
    if any(nxt < prev for prev, nxt in zip(rates, rates[1:])):
        raise ConfigError(
            'arch.phase_rates must be nondecreasing: {}'.format(list(rates)))


def config_digest(cfg):
    """ SHA-256 of the canonical JSON form of a configuration
    """
    canon = json.dumps(cfg, sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(canon.encode('utf-8')).hexdigest()


def config_string(cfg):
    """ Write a configuration back to YAML text
    """
    return yaml.safe_dump(cfg, default_flow_style=None, sort_keys=True)


def with_plan(cfg, positions, rates):
    """ Copy of a configuration with its selector positions and
        phase rates replaced
    """
    arch_dct = right_update(
        cfg['arch'],
        {'selector_positions': list(positions),
         'phase_rates': [float(rate) for rate in rates]})
    return right_update(cfg, {'arch': check_arch(arch_dct)})


def with_widths(cfg, embed_dim, attn_dim, fc_dim):
    """ Copy of a configuration without selectors and with the token,
        attention and FFN widths replaced
    """
    arch_dct = right_update(
        cfg['arch'],
        {'embed_dim': embed_dim, 'attn_dim': attn_dim, 'fc_dim': fc_dim,
         'selector_positions': [], 'phase_rates': []})
    return right_update(cfg, {'arch': check_arch(arch_dct)})


def _normalize(sec_dct, val_dct):
    """ Cast numbers of float keywords to float and sequences to lists
    """
    out_dct = {}
    for key, val in sec_dct.items():
        typs = val_dct[key][0]
        if val is not None and typs == NUM:
            val = float(val)
        elif val is not None and typs == SEQ:
            val = list(val)
        out_dct[key] = val
    return out_dct
