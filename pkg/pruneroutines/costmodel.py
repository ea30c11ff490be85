""" Closed-form multiply-accumulate counts of transformer blocks, of
    whole models under a pruning plan, and of the selectors.

    Counts are multiply-accumulates of the matrix products. Softmax,
    layernorm and GELU element costs and the patch embedding and head are
    reported on their own and left out of the totals.
"""

import math
import scipy.optimize
from prunelib.errors import ConfigError
from pruneroutines.backbone import token_counts
from pruneroutines.latency import make_plan


ROW_LABELS = ('qkv_linear', 'q_kt', 'attn_v', 'projection', 'fc1', 'fc2')


def block_flops(n_tok, d_ch, d_attn, d_fc):
    """ Per-row and total counts of one block

        :param n_tok: number of tokens N
        :param d_ch: token width D_ch
        :param d_attn: attention width D_attn
        :param d_fc: FFN width D_fc; the hidden layer has 4 D_fc units
        :rtype: dict with 'rows' (label: count) and 'total'
    """

    for name, val in (('N', n_tok), ('D_ch', d_ch), ('D_attn', d_attn),
                      ('D_fc', d_fc)):
        if not isinstance(val, int) or isinstance(val, bool) or val <= 0:
            raise ConfigError(
                'block_flops needs a positive integer {}, got {}'.format(
                    name, val))

    rows = dict(zip(ROW_LABELS, (
        3 * n_tok * d_ch * d_attn,
        n_tok * n_tok * d_attn,
        n_tok * n_tok * d_attn,
        n_tok * d_attn * d_ch,
        4 * n_tok * d_ch * d_fc,
        4 * n_tok * d_fc * d_ch)))

    return {'rows': rows, 'total': sum(rows.values())}


def elementwise_flops(n_tok, d_ch, d_fc, n_heads):
    """ Element counts of the softmax, the two layernorms and the GELU of
        one block
    """
    return {
        'softmax': n_heads * n_tok * n_tok,
        'layernorm': 2 * n_tok * d_ch,
        'gelu': 4 * n_tok * d_fc,
    }


def selector_flops(n_tok, d_ch, n_heads):
    """ Counts of one selector scoring `n_tok` tokens, including the
        weighted sum that forms the package token
    """
    head_dim = d_ch // n_heads
    half = max(1, n_heads // 2)
    per_head = (head_dim * (head_dim // 2) +
                head_dim * (head_dim // 2) +
                (head_dim // 2) * (head_dim // 4) +
                (head_dim // 4) * 2)
    return n_tok * (n_heads * per_head + 2 * n_heads * half + d_ch)


def plan_tokens(arch, plan):
    """ Effective token count of every block under a plan: class token,
        kept patch tokens (rounded up) and the package tokens present.
        A selector adds a package token only where the kept count drops,
        which is where an image that meets the plan prunes something.
    """

    n_pat, n_cls, _ = token_counts(arch)
    policy = arch['package_policy']
    positions = tuple(plan['positions'])

    tokens, n_pkg, prev = [], 0, n_pat
    for blk, rate in enumerate(plan['rates']):
        if not 0.0 <= rate < 1.0:
            raise ConfigError(
                'Pruning rate {} of block {} not in [0, 1)'.format(
                    rate, blk))
        n_kept = kept_patches(n_pat, rate)
        if blk in positions and n_kept < prev and policy != 'none':
            n_pkg = 1 if policy == 'merge_single' else n_pkg + 1
        prev = n_kept if blk in positions else prev
        tokens.append(n_cls + n_kept + n_pkg)

    return tokens


def model_flops(arch, plan=None):
    """ Counts of the whole model under a pruning plan

        :param arch: arch section of a configuration
        :param plan: pruning plan from latency.make_plan; the plan of the
            configuration if None
        :rtype: dict
    """

    if plan is None:
        plan = make_plan(arch['n_blocks'], arch['selector_positions'],
                         arch['phase_rates'])
    if len(plan['rates']) != arch['n_blocks']:
        raise ConfigError('Plan covers {} blocks, model has {}'.format(
            len(plan['rates']), arch['n_blocks']))

    dims = (arch['embed_dim'], arch['attn_dim'], arch['fc_dim'])
    n_pat, _, n_tok = token_counts(arch)
    tokens = plan_tokens(arch, plan)
    blocks = [block_flops(ntok, *dims)['total'] for ntok in tokens]

    sel = 0
    for phase, pos in enumerate(plan['positions']):
        before = plan['phase_rates'][phase - 1] if phase else 0.0
        sel += selector_flops(kept_patches(n_pat, before), arch['embed_dim'],
                              arch['n_heads'])

    elem = sum(sum(elementwise_flops(
        ntok, arch['embed_dim'], arch['fc_dim'], arch['n_heads']).values())
        for ntok in tokens)
    embed_head = (n_pat * arch['patch_size']**2 * arch['in_chans'] *
                  arch['embed_dim'] + arch['embed_dim'] * arch['n_classes'])

    baseline = arch['n_blocks'] * block_flops(n_tok, *dims)['total']
    backbone = sum(blocks)
    total = backbone + sel

    return {
        'tokens': tokens,
        'blocks': blocks,
        'backbone': backbone,
        'selector': sel,
        'total': total,
        'baseline': baseline,
        'reduction': 1.0 - total / baseline,
        'selector_share': sel / total,
        'elementwise': elem,
        'embed_head': embed_head,
    }


def compare_strategies(arch, rate):
    """ Relative reduction of one block's count when a fraction `rate` of
        the tokens, of the input channels of the QKV transform, or of the
        attention heads is pruned. Extents are scaled continuously.

        :param arch: arch section of a configuration
        :param rate: pruning ratio in [0, 1)
        :rtype: dict[str: float]
    """

    if not 0.0 <= rate < 1.0:
        raise ConfigError('Pruning ratio {} not in [0, 1)'.format(rate))
    _, _, n_tok = token_counts(arch)
    d_ch, d_attn, d_fc = arch['embed_dim'], arch['attn_dim'], arch['fc_dim']
    keep = 1.0 - rate

    full = _block_total(n_tok, d_ch, d_attn, d_fc)
    token = _block_total(n_tok * keep, d_ch, d_attn, d_fc)
    head = _block_total(n_tok, d_ch, d_attn * keep, d_fc)
    channel = full - 3.0 * n_tok * d_ch * d_attn * rate

    return {
        'token': 1.0 - token / full,
        'channel': 1.0 - channel / full,
        'head': 1.0 - head / full,
        'head_share': (4.0 * n_tok * d_ch * d_attn +
                       2.0 * n_tok**2 * d_attn) / full,
    }


def rates_for_reduction(arch, reduction, positions=None):
    """ Phase rates under which the model count drops by `reduction`.
        Phase k keeps a fraction kappa**(k+1) of the patch tokens, a
        geometric hierarchy, and kappa is solved for.

        :param arch: arch section of a configuration
        :param reduction: target relative reduction of the total count
        :param positions: selector positions; those of `arch` if None
        :rtype: dict (pruning plan)
    """

    if positions is None:
        positions = arch['selector_positions']
    if not positions:
        raise ConfigError('A reduction target needs selector positions')

    def _plan(kappa):
        rates = [1.0 - kappa**(idx + 1) for idx in range(len(positions))]
        return make_plan(arch['n_blocks'], positions, rates)

    def _gap(kappa):
        return model_flops(arch, _plan(kappa))['reduction'] - reduction

    lo, hi = 1.0e-3, 1.0
    if _gap(hi) > 0.0 or _gap(lo) < 0.0:
        raise ConfigError(
            'Reduction {} not reachable with selectors at {}'.format(
                reduction, list(positions)))
    kappa = scipy.optimize.brentq(_gap, lo, hi, xtol=1.0e-10)

    return _plan(kappa)


def structure_widths(arch, plan=None):
    """ Widths of a plain model, every block keeping all tokens, whose
        count does not exceed that of `arch` under a token pruning plan.
        The token, attention and FFN widths shrink by one common factor on
        the grid of whole heads; the widest such model is returned, the
        one-channel-per-head model when none fits.

        :param arch: arch section of a configuration
        :param plan: pruning plan; the plan of the configuration if None
        :rtype: dict with 'embed_dim', 'attn_dim', 'fc_dim', 'total' and
            'target'
    """

    target = model_flops(arch, plan)['total']
    _, _, n_tok = token_counts(arch)
    n_heads = arch['n_heads']

    best = None
    for per_head in range(1, arch['embed_dim'] // n_heads + 1):
        d_ch = n_heads * per_head
        scale = d_ch / arch['embed_dim']
        d_attn = n_heads * max(1, int(round(
            arch['attn_dim'] * scale / n_heads)))
        d_fc = max(1, int(round(arch['fc_dim'] * scale)))
        total = arch['n_blocks'] * block_flops(n_tok, d_ch, d_attn,
                                               d_fc)['total']
        if best is None or total <= target:
            best = {'embed_dim': d_ch, 'attn_dim': d_attn, 'fc_dim': d_fc,
                    'total': total, 'target': target}

    return best


def kept_patches(n_pat, rate):
    """ Patch tokens left at a cumulative pruning rate, rounded up
    """
    return int(math.ceil(round(n_pat * (1.0 - rate), 9)))


def _block_total(n_tok, d_ch, d_attn, d_fc):
    return (4.0 * n_tok * d_ch * d_attn + 2.0 * n_tok**2 * d_attn +
            8.0 * n_tok * d_ch * d_fc)
