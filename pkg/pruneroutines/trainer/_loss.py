""" Training objective: classification, self-distillation against the
    unpruned forward of the same model, an optional external reference
    model and the latency-aware sparsity term.
"""

import numpy
from prunelib.errors import DimensionError
from prunelib.errors import ValidationError
from pruneroutines import numcore as nc
from pruneroutines.latency import sparsity_loss


LOSS_WEIGHTS = {
    'lambda_kl': 0.5,
    'lambda_distill': 0.5,
    'lambda_ratio': 2.0,
}


def loss_weights(train_dct=None):
    """ Loss weights from the train section of a configuration
    """
    if train_dct is None:
        return dict(LOSS_WEIGHTS)
    return {key: float(train_dct[key]) for key in LOSS_WEIGHTS}


def cross_entropy(logits, labels):
    """ Mean negative log-likelihood of the labels
    """
    bsz, ncls = nc.value(logits).shape
    labels = numpy.asarray(labels)
    if labels.shape != (bsz,):
        raise DimensionError('{} labels for a batch of {}'.format(
            labels.shape, bsz))
    if numpy.any(labels < 0) or numpy.any(labels >= ncls):
        raise ValidationError('Labels must lie in [0, {})'.format(ncls))
    onehot = numpy.eye(ncls)[labels]
    picked = nc.sum_(nc.mul(nc.log_softmax(logits, -1), onehot), axis=-1)
    return nc.mul(nc.mean(picked), -1.0)


def kl_divergence(logits, ref_logits, temperature=1.0):
    """ Batch mean of KL(p || q) with p the softened distribution of
        `logits` and q that of the fixed reference logits
    """
    ref = nc.value(ref_logits)
    if ref.shape != nc.value(logits).shape:
        raise DimensionError('Logits {} and reference logits {}'.format(
            nc.value(logits).shape, ref.shape))
    logp = nc.log_softmax(nc.mul(logits, 1.0 / temperature), -1)
    logq = nc.value(nc.log_softmax(ref / temperature, -1))
    prob = nc.softmax(nc.mul(logits, 1.0 / temperature), -1)
    return nc.mean(nc.sum_(nc.mul(prob, nc.sub(logp, logq)), axis=-1))


def total_loss(logits, labels, ref_logits, decisions, rates, weights=None,
               distill_logits=None, temperature=1.0, count_package=False):
    """ Weighted sum of the training terms

        :param logits: logits of the pruned forward [B, K]
        :param labels: class indices [B]
        :param ref_logits: logits of the unpruned forward [B, K]
        :param decisions: per-block keep decisions (None before the first
            selector)
        :param rates: per-block target rates
        :param weights: loss weights; the defaults if None
        :param distill_logits: logits of an external reference model; the
            term is zero without one
        :param temperature: softening temperature of the KL terms
        :param count_package: count package slots in the kept fraction
        :rtype: (scalar, dict[str: float])
    """

    if weights is None:
        weights = LOSS_WEIGHTS
    cls = cross_entropy(logits, labels)
    klt = kl_divergence(logits, ref_logits, temperature)
    if distill_logits is None:
        dst = numpy.zeros(())
    else:
        dst = kl_divergence(logits, distill_logits, temperature)
    ratio = sparsity_loss(decisions, rates, count_package)

    total = nc.add(
        nc.add(cls, nc.mul(klt, weights['lambda_kl'])),
        nc.add(nc.mul(dst, weights['lambda_distill']),
               nc.mul(ratio, weights['lambda_ratio'])))

    parts = {'cls': cls, 'kl': klt, 'distill': dst, 'ratio': ratio,
             'total': total}
    return total, {key: float(nc.value(val)) for key, val in parts.items()}
