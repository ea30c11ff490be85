""" Linear centered kernel alignment between feature sets
"""

import numpy
from prunelib.errors import DimensionError
from prunelib.errors import UndefinedSimilarityError


def cka(feat_a, feat_b):
    """ Linear CKA of two feature matrices over the same n samples:
        ||B^T A||_F^2 / (||A^T A||_F ||B^T B||_F) on column-centered A, B

        :param feat_a: [n, p]
        :param feat_b: [n, q]
        :rtype: float in [0, 1]
    """

    feat_a = numpy.asarray(feat_a, dtype=numpy.float64)
    feat_b = numpy.asarray(feat_b, dtype=numpy.float64)
    if feat_a.ndim != 2 or feat_b.ndim != 2:
        raise DimensionError('CKA needs two matrices, got {} and {}'.format(
            feat_a.shape, feat_b.shape))
    if feat_a.shape[0] != feat_b.shape[0]:
        raise DimensionError('CKA of {} and {} samples'.format(
            feat_a.shape[0], feat_b.shape[0]))
    if feat_a.shape[0] < 2:
        raise DimensionError('CKA needs at least 2 samples')

    cen_a = _center(feat_a)
    cen_b = _center(feat_b)

    cross = numpy.linalg.norm(cen_b.T @ cen_a, 'fro')**2
    self_a = numpy.linalg.norm(cen_a.T @ cen_a, 'fro')
    self_b = numpy.linalg.norm(cen_b.T @ cen_b, 'fro')
    return float(cross / (self_a * self_b))


def block_cls_similarity(features, use_cls_token=True):
    """ CKA between the token-mean of every block's output and the final
        class token (the final token mean without a class token)

        :param features: per-block tokens [B, N, C], as captured by
            model_forward
        :rtype: list(float)
    """
    final = features[-1]
    target = final[:, 0, :] if use_cls_token else final.mean(axis=1)
    return [cka(feat.mean(axis=1), target) for feat in features]


def _center(feat):
    """ Remove column means; raise when nothing is left
    """
    cen = feat - feat.mean(axis=0, keepdims=True)
    scale = max(1.0, numpy.abs(feat).max())
    if numpy.abs(cen).max() <= 1.0e-12 * scale:
        raise UndefinedSimilarityError('Feature set has zero variance')
    return cen
