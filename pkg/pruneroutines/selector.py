""" Multi-head token selector.

    Each selector splits the patch tokens into H channel heads and scores
    every token per head from its own features and the mean of the
    currently kept tokens. A side branch weights the heads per token and
    the weighted head scores give one keep/prune distribution per token,
    from which a Gumbel-Softmax decision is drawn.

    Parameters live in the flat model dictionary under a selector prefix:
        {prefix}.h{i}.ln_g, .ln_b      layernorm of head i
        {prefix}.h{i}.loc_w, .loc_b    Linear(d, d/2)
        {prefix}.h{i}.s1_w ... s3_b    Linear(d, d/2), (d/2, d/4), (d/4, 2)
        {prefix}.att1_w ... att2_b     Linear(H, H/2), Linear(H/2, H)
"""

import numpy
from prunelib.errors import ConfigError
from prunelib.errors import DimensionError
from prunelib.errors import DegenerateWeightsError
from pruneroutines import numcore as nc


DECISION_MODES = ('train', 'infer', 'soft', 'random')
GUMBEL_EPS = 1.0e-20
KEEP_ALL_BIAS = 50.0


# Parameters
def init_selector_params(prefix, embed_dim, n_heads, rng, std=0.02):
    """ Initial parameters of one selector

        :param prefix: name prefix of the selector
        :type prefix: str
        :param embed_dim: token width C
        :type embed_dim: int
        :param n_heads: number of heads H
        :type n_heads: int
        :param rng: random generator
        :type rng: numpy.random.Generator
        :rtype: dict[str: numpy.ndarray]
    """

    head_dim = _head_dim(embed_dim, n_heads)
    if head_dim % 4:
        raise ConfigError(
            'Selector head width {} is not a multiple of 4'.format(head_dim))

    def _lin(n_in, n_out):
        return (rng.normal(0.0, std, size=(n_in, n_out)),
                numpy.zeros(n_out))

    params = {}
    for idx in range(n_heads):
        hpre = '{}.h{}'.format(prefix, idx)
        params[hpre + '.ln_g'] = numpy.ones(head_dim)
        params[hpre + '.ln_b'] = numpy.zeros(head_dim)
        params[hpre + '.loc_w'], params[hpre + '.loc_b'] = _lin(
            head_dim, head_dim // 2)
        params[hpre + '.s1_w'], params[hpre + '.s1_b'] = _lin(
            head_dim, head_dim // 2)
        params[hpre + '.s2_w'], params[hpre + '.s2_b'] = _lin(
            head_dim // 2, head_dim // 4)
        params[hpre + '.s3_w'], params[hpre + '.s3_b'] = _lin(
            head_dim // 4, 2)

    half = max(1, n_heads // 2)
    params[prefix + '.att1_w'], params[prefix + '.att1_b'] = _lin(
        n_heads, half)
    params[prefix + '.att2_w'], params[prefix + '.att2_b'] = _lin(
        half, n_heads)

    return params


def clamp_keep_all(params, prefix, n_heads):
    """ Copy of the parameters in which the selector keeps every token:
        the last scoring layer of every head ignores its input and puts a
        large margin on the keep logit.
    """
    params = dict(params)
    for idx in range(n_heads):
        hpre = '{}.h{}'.format(prefix, idx)
        params[hpre + '.s3_w'] = numpy.zeros_like(params[hpre + '.s3_w'])
        params[hpre + '.s3_b'] = numpy.array([KEEP_ALL_BIAS, -KEEP_ALL_BIAS])
    return params


def shift_keep_margin(params, prefix, n_heads, shift):
    """ Copy of the parameters with the keep logit of every head raised
        by shift / 2 and the prune logit lowered by as much. The keep
        probability of every token then grows monotonically with `shift`.
    """
    params = dict(params)
    delta = numpy.array([0.5 * shift, -0.5 * shift])
    for idx in range(n_heads):
        key = '{}.h{}.s3_b'.format(prefix, idx)
        params[key] = numpy.asarray(params[key], dtype=numpy.float64) + delta
    return params


# Scoring
def split_heads(x, n_heads):
    """ Split tokens into channel-contiguous heads

        :param x: tokens [B, N, C]
        :param n_heads: number of heads H
        :rtype: list of [B, N, C/H]
    """
    chans = nc.value(x).shape[-1]
    head_dim = _head_dim(chans, n_heads)
    return [nc.take(x, slice(idx * head_dim, (idx + 1) * head_dim), -1)
            for idx in range(n_heads)]


def local_features(x_i, params, hpre):
    """ LayerNorm -> Linear(d, d/2) -> GELU per token of one head
    """
    head_dim = nc.value(x_i).shape[-1]
    if head_dim % 2:
        raise ConfigError('Head width {} is odd'.format(head_dim))
    feat = nc.layernorm(x_i, params[hpre + '.ln_g'], params[hpre + '.ln_b'])
    feat = nc.linear(feat, params[hpre + '.loc_w'], params[hpre + '.loc_b'])
    return nc.activation(feat, 'gelu')


def global_features(local, keep_mask, allow_empty=False):
    """ Mean of the local features over the currently kept tokens

        :param local: local features [B, N, d/2]
        :param keep_mask: keep mask [B, N]
        :param allow_empty: zero vector for an image that keeps no token
        :rtype: [B, 1, d/2]
    """
    return nc.weighted_mean(local, keep_mask, allow_empty=allow_empty)


def head_token_scores(feat, params, hpre):
    """ Keep/prune distribution per token from the concatenated local
        and global features of one head; column 0 is the keep probability

        :param feat: [B, N, d]
        :rtype: [B, N, 2]
    """
    head_dim = nc.value(feat).shape[-1]
    if head_dim % 4:
        raise ConfigError(
            'Head width {} is not a multiple of 4'.format(head_dim))
    out = nc.activation(
        nc.linear(feat, params[hpre + '.s1_w'], params[hpre + '.s1_b']),
        'gelu')
    out = nc.activation(
        nc.linear(out, params[hpre + '.s2_w'], params[hpre + '.s2_b']),
        'gelu')
    out = nc.linear(out, params[hpre + '.s3_w'], params[hpre + '.s3_b'])
    return nc.softmax(out, axis=-1)


def head_attention(x, params, prefix, n_heads):
    """ Per-token weight of every head in (0, 1): channel mean of each
        head, then Linear -> GELU -> Linear -> Sigmoid

        :param x: tokens [B, N, C]
        :rtype: [B, N, H]
    """
    bsz, ntok, chans = nc.value(x).shape
    head_dim = _head_dim(chans, n_heads)
    stat = nc.mean(nc.reshape(x, (bsz, ntok, n_heads, head_dim)), axis=-1)
    out = nc.activation(
        nc.linear(stat, params[prefix + '.att1_w'],
                  params[prefix + '.att1_b']), 'gelu')
    out = nc.linear(out, params[prefix + '.att2_w'],
                    params[prefix + '.att2_b'])
    return nc.activation(out, 'sigmoid')


def aggregate_scores(t_lst, weights):
    """ Per-token convex combination of the head scores

        :param t_lst: H head scores, each [B, N, 2]
        :param weights: head weights [B, N, H], positive
        :rtype: [B, N, 2]
    """
    wval = nc.value(weights)
    if wval.shape[-1] != len(t_lst):
        raise DimensionError(
            '{} head scores with weights for {} heads'.format(
                len(t_lst), wval.shape[-1]))
    if numpy.any(wval.sum(axis=-1) <= 0.0):
        raise DegenerateWeightsError('Head weights sum to zero')

    num = None
    for idx, t_i in enumerate(t_lst):
        term = nc.mul(t_i, nc.take(weights, [idx], -1))
        num = term if num is None else nc.add(num, term)
    return nc.div(num, nc.sum_(weights, axis=-1, keepdims=True))


def score_tokens(x, keep_mask, params, prefix, n_heads, allow_empty=False):
    """ Run the whole scoring pipeline of one selector

        :param x: tokens to score [B, N, C]
        :param keep_mask: current keep mask of those tokens [B, N]
        :rtype: dict with 'heads' (list of [B, N, 2]), 'weights' [B, N, H]
            and 'agg' [B, N, 2]
    """
    t_lst = []
    ntok = nc.value(x).shape[1]
    for idx, x_i in enumerate(split_heads(x, n_heads)):
        hpre = '{}.h{}'.format(prefix, idx)
        loc = local_features(x_i, params, hpre)
        glb = global_features(loc, keep_mask, allow_empty=allow_empty)
        glb = nc.expand(glb, nc.value(loc).shape[:1] + (ntok,) +
                        nc.value(loc).shape[2:])
        t_lst.append(head_token_scores(nc.concat([loc, glb], -1),
                                       params, hpre))
    weights = head_attention(x, params, prefix, n_heads)
    return {'heads': t_lst, 'weights': weights,
            'agg': aggregate_scores(t_lst, weights)}


# Decisions
def keep_decision(mask, protected=(), package=()):
    """ Build a keep decision

        :param mask: keep mask [B, N]; array or tape variable
        :param protected: token indices that are never pruned
        :param package: indices of the package slots among `protected`
        :rtype: dict
    """
    return {'mask': mask,
            'protected': tuple(sorted(set(protected))),
            'package': tuple(sorted(set(package)))}


def gumbel_decision(scores, mode, tau=0.5, seed=0, protected=(), rate=0.0):
    """ Keep/prune decision from aggregate scores.

        train: hard argmax of the Gumbel-perturbed log-probabilities in the
            forward pass, gradient of their temperature softmax backward
        infer: keep where keep probability >= prune probability
        soft: the relaxed keep probabilities themselves
        random: keep each token with probability 1 - rate, ignoring scores

        :param scores: aggregate scores [B, N, 2]
        :param mode: one of train, infer, soft, random
        :param tau: temperature of the relaxation
        :param seed: seed of the noise stream; a tuple is allowed
        :param protected: indices forced to 1
        :param rate: pruning probability of the random mode
        :rtype: dict (keep decision)
    """

    if tau <= 0.0:
        raise ConfigError('Gumbel temperature must be positive, got {}'.format(
            tau))
    if mode not in DECISION_MODES:
        raise ConfigError('Unknown decision mode {}; supported: {}'.format(
            mode, DECISION_MODES))

    sval = nc.value(scores)
    keep_p = sval[..., 0]
    if mode == 'infer':
        mask = (keep_p >= sval[..., 1]).astype(numpy.float64)
    elif mode == 'random':
        rng = numpy.random.default_rng(seed)
        mask = (rng.random(keep_p.shape) >= rate).astype(numpy.float64)
    else:
        rng = numpy.random.default_rng(seed)
        unif = rng.random(sval.shape)
        gumbel = -numpy.log(-numpy.log(unif + GUMBEL_EPS) + GUMBEL_EPS)
        logits = nc.log(nc.add(scores, GUMBEL_EPS))
        relaxed = nc.softmax(nc.mul(nc.add(logits, gumbel), 1.0 / tau), -1)
        soft = nc.reshape(nc.take(relaxed, [0], -1), keep_p.shape)
        if mode == 'soft':
            mask = soft
        else:
            rval = nc.value(relaxed)
            hard = (rval[..., 0] >= rval[..., 1]).astype(numpy.float64)
            mask = nc.straight_through(hard, soft)

    if protected:
        mask = _force_keep(mask, protected)

    return keep_decision(mask, protected)


def update_decision(old, new):
    """ Hadamard product of two keep decisions; protected sets are joined
    """
    oval, nval = nc.value(old['mask']), nc.value(new['mask'])
    if oval.shape != nval.shape:
        raise DimensionError(
            'Keep decisions of shapes {} and {}'.format(oval.shape,
                                                        nval.shape))
    return keep_decision(
        nc.mul(old['mask'], new['mask']),
        protected=old['protected'] + new['protected'],
        package=old.get('package', ()) + new.get('package', ()))


def kept_count(decision):
    """ Number of kept tokens per image, protected ones included
    """
    return nc.value(decision['mask']).sum(axis=-1)


def _force_keep(mask, protected):
    """ Replace the protected columns of a mask by ones
    """
    ntok = nc.value(mask).shape[-1]
    prot = set(protected)
    free = [idx for idx in range(ntok) if idx not in prot]
    ones = numpy.ones(nc.value(mask).shape[:-1] + (ntok,))
    keep = nc.take(ones, sorted(prot), -1)
    rest = nc.take(mask, free, -1)
    parts = nc.concat([keep, rest], -1)
    order = numpy.argsort(sorted(prot) + free)
    return nc.take(parts, order, -1)


def _head_dim(chans, n_heads):
    if n_heads <= 0 or chans % n_heads:
        raise ConfigError(
            'Width {} is not divisible by {} heads'.format(chans, n_heads))
    return chans // n_heads
