""" Adam and SGD with separate learning rates for the selector and the
    backbone parameters
"""

import numpy
from prunelib.errors import ConfigError
from pruneroutines.backbone import param_group


OPTIMIZERS = ('adam', 'sgd')
ADAM_BETAS = (0.9, 0.999)
ADAM_EPS = 1.0e-8


def init_optimizer(params, kind='adam', lr_selector=5.0e-4,
                   lr_backbone=5.0e-6, momentum=0.9):
    """ Fresh optimizer state for a parameter dictionary

        :rtype: dict
    """
    if kind not in OPTIMIZERS:
        raise ConfigError('Unknown optimizer {}; supported: {}'.format(
            kind, OPTIMIZERS))
    zeros = {name: numpy.zeros_like(val) for name, val in params.items()}
    return {
        'kind': kind,
        'lr': {'selector': float(lr_selector), 'backbone': float(lr_backbone)},
        'momentum': float(momentum),
        'step': 0,
        'm': zeros,
        'v': {name: numpy.zeros_like(val) for name, val in params.items()},
    }


def optimizer_from_config(params, train_dct):
    """ Optimizer state built from the train section of a configuration
    """
    return init_optimizer(
        params, kind=train_dct['optimizer'],
        lr_selector=train_dct['lr_selector'],
        lr_backbone=train_dct['lr_backbone'],
        momentum=train_dct['momentum'])


def apply_update(params, grads, opt):
    """ One optimizer step; the inputs are left unchanged

        :rtype: (dict, dict) new parameters and optimizer state
    """

    step = opt['step'] + 1
    new_params, new_m, new_v = {}, {}, {}
    for name, val in params.items():
        grad = grads[name]
        lrate = opt['lr'][param_group(name)]
        if opt['kind'] == 'adam':
            beta1, beta2 = ADAM_BETAS
            mom = beta1 * opt['m'][name] + (1.0 - beta1) * grad
            sec = beta2 * opt['v'][name] + (1.0 - beta2) * grad**2
            mhat = mom / (1.0 - beta1**step)
            vhat = sec / (1.0 - beta2**step)
            new_params[name] = val - lrate * mhat / (
                numpy.sqrt(vhat) + ADAM_EPS)
            new_m[name], new_v[name] = mom, sec
        else:
            mom = opt['momentum'] * opt['m'][name] + grad
            new_params[name] = val - lrate * mom
            new_m[name], new_v[name] = mom, opt['v'][name]

    new_opt = dict(opt)
    new_opt.update({'step': step, 'm': new_m, 'v': new_v})
    return new_params, new_opt
