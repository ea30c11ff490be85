""" Parameter initialization and grouping of the toy vision transformer.

    Names of the flat parameter dictionary:
        embed.w, embed.b, pos, cls          patch embedding
        blk{i}.ln1_g ... blk{i}.fc2_b       transformer block i
        norm_g, norm_b, head_w, head_b      classification head
        sel{p}.*                            selector run before block p
"""

import numpy
from pruneroutines.selector import init_selector_params


INIT_STD = 0.02
BLOCK_KEYS = (
    'ln1_g', 'ln1_b', 'q_w', 'q_b', 'k_w', 'k_b', 'v_w', 'v_b',
    'proj_w', 'proj_b', 'ln2_g', 'ln2_b', 'fc1_w', 'fc1_b', 'fc2_w', 'fc2_b')


def token_counts(arch):
    """ Number of patch tokens, of class tokens and of all initial tokens
    """
    n_pat = (arch['image_size'] // arch['patch_size'])**2
    n_cls = 1 if arch['use_cls_token'] else 0
    return n_pat, n_cls, n_pat + n_cls


def selector_prefix(position):
    """ Name prefix of the selector that runs before block `position`
    """
    return 'sel{}'.format(position)


def param_group(name):
    """ Learning-rate group of a parameter: selector or backbone
    """
    return 'selector' if name.startswith('sel') else 'backbone'


def init_params(arch, seed=0):
    """ Seeded initial parameters: normal weights, zero biases, unit
        layernorm scales. The backbone draws from one stream and every
        selector from a stream of its own, so adding or removing a
        selector leaves all other parameters unchanged.

        :param arch: arch section of a configuration
        :type arch: dict[str: obj]
        :param seed: seed of the parameter streams
        :type seed: int
        :rtype: dict[str: numpy.ndarray]
    """

    rng = numpy.random.default_rng(seed)
    chans, attn, hid = arch['embed_dim'], arch['attn_dim'], 4 * arch['fc_dim']
    patch_dim = arch['patch_size']**2 * arch['in_chans']
    _, n_cls, n_tok = token_counts(arch)

    def _normal(*shape):
        return rng.normal(0.0, INIT_STD, size=shape)

    params = {
        'embed.w': _normal(patch_dim, chans),
        'embed.b': numpy.zeros(chans),
        'pos': _normal(n_tok, chans),
    }
    if n_cls:
        params['cls'] = _normal(chans)

    for blk in range(arch['n_blocks']):
        pre = 'blk{}.'.format(blk)
        params.update({
            pre + 'ln1_g': numpy.ones(chans),
            pre + 'ln1_b': numpy.zeros(chans),
            pre + 'q_w': _normal(chans, attn),
            pre + 'q_b': numpy.zeros(attn),
            pre + 'k_w': _normal(chans, attn),
            pre + 'k_b': numpy.zeros(attn),
            pre + 'v_w': _normal(chans, attn),
            pre + 'v_b': numpy.zeros(attn),
            pre + 'proj_w': _normal(attn, chans),
            pre + 'proj_b': numpy.zeros(chans),
            pre + 'ln2_g': numpy.ones(chans),
            pre + 'ln2_b': numpy.zeros(chans),
            pre + 'fc1_w': _normal(chans, hid),
            pre + 'fc1_b': numpy.zeros(hid),
            pre + 'fc2_w': _normal(hid, chans),
            pre + 'fc2_b': numpy.zeros(chans),
        })

    params.update({
        'norm_g': numpy.ones(chans),
        'norm_b': numpy.zeros(chans),
        'head_w': _normal(chans, arch['n_classes']),
        'head_b': numpy.zeros(arch['n_classes']),
    })

    return add_selectors(params, arch, seed)


def add_selectors(params, arch, seed=0):
    """ Copy of the parameters with freshly initialized weights for every
        configured selector that has none yet
    """
    params = dict(params)
    for pos in arch['selector_positions']:
        prefix = selector_prefix(pos)
        if not any(name.startswith(prefix + '.') for name in params):
            rng = numpy.random.default_rng((seed, pos))
            params.update(init_selector_params(
                prefix, arch['embed_dim'], arch['n_heads'], rng))
    return params
