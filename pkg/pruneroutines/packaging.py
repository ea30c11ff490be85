""" Token packaging.

    Tokens pruned by a selector are not discarded: their average, weighted
    by each token's keep probability, becomes one package token that takes
    part in every later block.

    Two layouts are handled. In the pruned layout every image carries only
    its kept tokens and a package token is appended when the phase pruned
    something. In the masked layout all tokens stay in place and each
    phase reserves one slot at the end of the sequence; an image that
    pruned nothing in a phase gets a zero vector with mask 0 there, so an
    empty slot is inactive padding and the protected-token rule applies
    to the active positions only.

    The none policy discards pruned tokens outright and adds no slot.
"""

import numpy
from prunelib.errors import ConfigError
from prunelib.errors import EmptyPoolError
from prunelib.errors import DegenerateWeightsError
from pruneroutines import numcore as nc


PACKAGE_POLICIES = ('concat_per_phase', 'merge_single', 'none')


def build_package(pruned, scores, phase=0):
    """ Package token of the tokens pruned from one image in one phase

        :param pruned: pruned tokens [Q, C]
        :param scores: their aggregate scores [Q, 2]; column 0 is the keep
            probability used as weight
        :param phase: index of the pruning phase
        :type phase: int
        :rtype: dict with 'vec' [C], 'count' and 'phase'
    """

    pval = nc.value(pruned)
    if pval.shape[0] == 0:
        raise EmptyPoolError('No pruned tokens to package')
    weights = nc.take(scores, [0], -1)
    if numpy.sum(nc.value(weights)) <= 0.0:
        raise DegenerateWeightsError('Package weights sum to zero')

    vec = nc.weighted_mean(
        nc.reshape(pruned, (1,) + pval.shape),
        nc.reshape(weights, (1, pval.shape[0])))
    return {'vec': nc.reshape(vec, pval.shape[1:]),
            'count': int(pval.shape[0]),
            'phase': phase}


def package_weights(old_mask, new_mask, keep_prob):
    """ Weights of the tokens that were kept before this phase and are
        pruned now, each scaled by its keep probability

        :param old_mask: keep mask before the phase [B, N]
        :param new_mask: decision of this phase [B, N]
        :param keep_prob: keep probability [B, N]
        :rtype: [B, N]
    """
    return nc.mul(nc.mul(old_mask, nc.sub(1.0, new_mask)), keep_prob)


def attach_package(tokens, pkg, policy, slots=()):
    """ Add a package token to the tokens of one image (pruned layout)

        :param tokens: [1, N', C]
        :param pkg: package token from build_package
        :param policy: concat_per_phase, merge_single or none
        :param slots: sequence indices of the package tokens already present
        :rtype: (tokens, slots)
    """

    _check_policy(policy)
    if policy == 'none':
        return tokens, tuple(slots)
    ntok, chans = nc.value(tokens).shape[1:]
    vec = nc.reshape(pkg['vec'], (1, 1, chans))

    if policy == 'merge_single' and slots:
        slot = slots[0]
        merged = nc.add(nc.take(tokens, slice(slot, slot + 1), 1), vec)
        tokens = nc.concat(
            [nc.take(tokens, slice(0, slot), 1), merged,
             nc.take(tokens, slice(slot + 1, ntok), 1)], 1)
        return tokens, tuple(slots)

    return nc.concat([tokens, vec], 1), tuple(slots) + (ntok,)


def attach_package_masked(x, decision, pkg_vec, has, policy):
    """ Write the package tokens of a batch into the masked layout

        :param x: tokens [B, N, C]
        :param decision: keep decision over the N tokens
        :param pkg_vec: package tokens [B, 1, C]; zero for images that
            pruned nothing
        :param has: whether each image pruned something this phase [B]
        :param policy: concat_per_phase, merge_single or none
        :rtype: (tokens, keep decision)
    """

    _check_policy(policy)
    if policy == 'none':
        return x, decision
    bsz, ntok, _ = nc.value(x).shape
    has = numpy.asarray(has, dtype=numpy.float64).reshape(bsz, 1)
    mask = decision['mask']
    slots = decision.get('package', ())

    if policy == 'merge_single' and slots:
        slot = slots[0]
        assert slot == ntok - 1, (
            'merged package slot {} is not the last token'.format(slot))
        x = nc.concat(
            [nc.take(x, slice(0, slot), 1),
             nc.add(nc.take(x, slice(slot, ntok), 1), pkg_vec)], 1)
        old = nc.value(mask)[:, slot:]
        mask = nc.concat(
            [nc.take(mask, slice(0, slot), 1), numpy.maximum(old, has)], 1)
        return x, {'mask': mask, 'protected': decision['protected'],
                   'package': tuple(slots)}

    x = nc.concat([x, pkg_vec], 1)
    mask = nc.concat([mask, has], 1)
    assert nc.value(mask).shape == (bsz, ntok + 1)
    return x, {'mask': mask,
               'protected': tuple(decision['protected']) + (ntok,),
               'package': tuple(slots) + (ntok,)}


def _check_policy(policy):
    if policy not in PACKAGE_POLICIES:
        raise ConfigError('Unknown package policy {}; supported: {}'.format(
            policy, PACKAGE_POLICIES))
