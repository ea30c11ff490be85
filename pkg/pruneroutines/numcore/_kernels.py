""" Differentiable array kernels.

    Each kernel takes numpy arrays or tape variables. When any input is a
    variable the output is recorded on its tape together with the local
    derivative; otherwise the kernel returns a plain array.
"""

import numpy
import scipy.special
from prunelib.errors import DimensionError
from prunelib.errors import ConfigError
from prunelib.errors import EmptyPoolError
from prunelib.errors import EmptyAttentionError
from pruneroutines.numcore._tape import value
from pruneroutines.numcore._tape import record


ACTIVATIONS = ('gelu', 'sigmoid')


def _unbroadcast(grad, shape):
    """ Sum a gradient over the axes that broadcasting added or stretched
    """
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, ext in enumerate(shape):
        if ext == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _check_axis(arr, axis):
    if not -arr.ndim <= axis < arr.ndim:
        raise DimensionError(
            'axis {} out of range for {} axes'.format(axis, arr.ndim))
    return axis % arr.ndim


# Elementwise arithmetic
def add(a, b):
    """ a + b with broadcasting """
    av, bv = value(a), value(b)
    out = av + bv

    def _back(grad):
        return (_unbroadcast(grad, av.shape), _unbroadcast(grad, bv.shape))

    return record(out, (a, b), _back)


def sub(a, b):
    """ a - b with broadcasting """
    av, bv = value(a), value(b)
    out = av - bv

    def _back(grad):
        return (_unbroadcast(grad, av.shape), _unbroadcast(-grad, bv.shape))

    return record(out, (a, b), _back)


def mul(a, b):
    """ a * b with broadcasting """
    av, bv = value(a), value(b)
    out = av * bv

    def _back(grad):
        return (_unbroadcast(grad * bv, av.shape),
                _unbroadcast(grad * av, bv.shape))

    return record(out, (a, b), _back)


def div(a, b):
    """ a / b with broadcasting """
    av, bv = value(a), value(b)
    out = av / bv

    def _back(grad):
        return (_unbroadcast(grad / bv, av.shape),
                _unbroadcast(-grad * av / bv**2, bv.shape))

    return record(out, (a, b), _back)


def log(x):
    """ natural logarithm """
    xv = value(x)
    out = numpy.log(xv)

    def _back(grad):
        return (grad / xv,)

    return record(out, (x,), _back)


def square(x):
    """ x**2 """
    xv = value(x)

    def _back(grad):
        return (2.0 * xv * grad,)

    return record(xv**2, (x,), _back)


# Reductions and reshaping
def sum_(x, axis=None, keepdims=False):
    """ Sum over one axis, or over all of them """
    xv = value(x)
    if axis is not None:
        axis = _check_axis(xv, axis)
    out = numpy.sum(xv, axis=axis, keepdims=keepdims)

    def _back(grad):
        if axis is not None and not keepdims:
            grad = numpy.expand_dims(grad, axis)
        return (numpy.array(numpy.broadcast_to(grad, xv.shape)),)

    return record(out, (x,), _back)


def mean(x, axis=None, keepdims=False):
    """ Mean over one axis, or over all of them """
    xv = value(x)
    count = xv.size if axis is None else xv.shape[_check_axis(xv, axis)]
    return mul(sum_(x, axis=axis, keepdims=keepdims), 1.0 / count)


def reshape(x, shape):
    """ Same values, new extents """
    xv = value(x)
    try:
        out = xv.reshape(shape)
    except ValueError as err:
        raise DimensionError(str(err))

    def _back(grad):
        return (grad.reshape(xv.shape),)

    return record(out, (x,), _back)


def transpose(x, axes):
    """ Permute axes """
    xv = value(x)
    out = numpy.transpose(xv, axes)
    inv = numpy.argsort(axes)

    def _back(grad):
        return (numpy.transpose(grad, inv),)

    return record(out, (x,), _back)


def concat(xs, axis):
    """ Join arrays along an existing axis """
    vals = [value(x) for x in xs]
    try:
        out = numpy.concatenate(vals, axis=axis)
    except ValueError as err:
        raise DimensionError(str(err))
    axis = axis % out.ndim
    bounds = numpy.cumsum([val.shape[axis] for val in vals])[:-1]

    def _back(grad):
        return tuple(numpy.split(grad, bounds, axis=axis))

    return record(out, tuple(xs), _back)


def take(x, index, axis):
    """ Select entries along one axis by a slice or by integer indices.
        Integer indices keep the axis, even when there is only one.
    """
    xv = value(x)
    axis = _check_axis(xv, axis)
    sel = [slice(None)] * xv.ndim
    if isinstance(index, slice):
        sel[axis] = index
    else:
        sel[axis] = numpy.asarray(index, dtype=numpy.int64).reshape(-1)
    sel = tuple(sel)
    out = xv[sel]

    def _back(grad):
        gx = numpy.zeros_like(xv)
        numpy.add.at(gx, sel, grad)
        return (gx,)

    return record(out, (x,), _back)


def expand(x, shape):
    """ Broadcast to larger extents """
    xv = value(x)
    try:
        out = numpy.array(numpy.broadcast_to(xv, shape))
    except ValueError as err:
        raise DimensionError(str(err))

    def _back(grad):
        return (_unbroadcast(grad, xv.shape),)

    return record(out, (x,), _back)


# Linear algebra and normalization
def matmul(a, b):
    """ Batched matrix product over the last two axes of each operand;
        leading axes broadcast.

        :param a: [..., m, k]
        :param b: [..., k, n]
        :rtype: [..., m, n]
    """
    av, bv = value(a), value(b)
    if av.ndim < 2 or bv.ndim < 2:
        raise DimensionError(
            'matmul needs at least 2 axes per operand, got {} and {}'.format(
                av.shape, bv.shape))
    if av.shape[-1] != bv.shape[-2]:
        raise DimensionError(
            'matmul inner extents differ: {} and {}'.format(
                av.shape, bv.shape))
    out = numpy.matmul(av, bv)

    def _back(grad):
        ga = numpy.matmul(grad, numpy.swapaxes(bv, -1, -2))
        gb = numpy.matmul(numpy.swapaxes(av, -1, -2), grad)
        return (_unbroadcast(ga, av.shape), _unbroadcast(gb, bv.shape))

    return record(out, (a, b), _back)


def layernorm(x, gamma, beta, eps=1.0e-5):
    """ Normalize over the last axis, then scale and shift.

        :param x: [..., C]
        :param gamma: [C]
        :param beta: [C]
        :param eps: variance floor, must be positive
    """
    if eps <= 0.0:
        raise ConfigError('layernorm eps must be positive, got {}'.format(eps))
    xv, gv, bv = value(x), value(gamma), value(beta)
    if gv.shape != xv.shape[-1:] or bv.shape != xv.shape[-1:]:
        raise DimensionError(
            'layernorm of {} with scale {} and shift {}'.format(
                xv.shape, gv.shape, bv.shape))

    cent = xv - xv.mean(axis=-1, keepdims=True)
    inv = 1.0 / numpy.sqrt((cent**2).mean(axis=-1, keepdims=True) + eps)
    xhat = cent * inv
    out = xhat * gv + bv

    def _back(grad):
        ghat = grad * gv
        gx = inv * (ghat - ghat.mean(axis=-1, keepdims=True) -
                    xhat * (ghat * xhat).mean(axis=-1, keepdims=True))
        chans = xv.shape[-1]
        ggamma = (grad * xhat).reshape(-1, chans).sum(axis=0)
        gbeta = grad.reshape(-1, chans).sum(axis=0)
        return (gx, ggamma, gbeta)

    return record(out, (x, gamma, beta), _back)


def activation(x, kind):
    """ Elementwise nonlinearity: 'gelu' (exact, erf form) or 'sigmoid'
    """
    xv = value(x)
    if kind == 'gelu':
        cdf = 0.5 * (1.0 + scipy.special.erf(xv / numpy.sqrt(2.0)))
        out = xv * cdf
        deriv = cdf + xv * numpy.exp(-0.5 * xv**2) / numpy.sqrt(2.0 * numpy.pi)
    elif kind == 'sigmoid':
        out = scipy.special.expit(xv)
        deriv = out * (1.0 - out)
    else:
        raise ConfigError(
            'Unknown activation {}; supported: {}'.format(kind, ACTIVATIONS))

    def _back(grad):
        return (grad * deriv,)

    return record(out, (x,), _back)


def linear(x, weight, bias):
    """ x @ weight + bias """
    return add(matmul(x, weight), bias)


# Softmax family
def softmax(x, axis=-1):
    """ Numerically stable softmax along one axis """
    xv = value(x)
    axis = _check_axis(xv, axis)
    out = scipy.special.softmax(xv, axis=axis)

    def _back(grad):
        return (out * (grad - (out * grad).sum(axis=axis, keepdims=True)),)

    return record(out, (x,), _back)


def log_softmax(x, axis=-1):
    """ Numerically stable log of the softmax along one axis """
    xv = value(x)
    axis = _check_axis(xv, axis)
    out = scipy.special.log_softmax(xv, axis=axis)

    def _back(grad):
        return (grad - numpy.exp(out) * grad.sum(axis=axis, keepdims=True),)

    return record(out, (x,), _back)


def masked_softmax(x, weights, axis=-1):
    """ Softmax with nonnegative per-entry weights on the exponentials:
        y = w exp(x) / sum(w exp(x)). Binary weights give the softmax over
        the unmasked entries with exact zeros elsewhere; fractional weights
        keep the output differentiable in the weights.

        :param x: logits
        :param weights: nonnegative weights broadcastable to x
        :raises EmptyAttentionError: a row has no positive weight
    """
    xv = value(x)
    axis = _check_axis(xv, axis)
    try:
        wv = numpy.broadcast_to(value(weights), xv.shape)
    except ValueError:
        raise DimensionError(
            'masked_softmax weights {} do not broadcast to {}'.format(
                value(weights).shape, xv.shape))

    live = wv > 0.0
    if not numpy.all(live.any(axis=axis)):
        raise EmptyAttentionError(
            'masked_softmax row with every entry masked')
    top = numpy.max(numpy.where(live, xv, -numpy.inf), axis=axis,
                    keepdims=True)
    expv = numpy.exp(numpy.minimum(xv - top, 700.0))
    norm = (wv * expv).sum(axis=axis, keepdims=True)
    out = wv * expv / norm
    wshape = value(weights).shape

    def _back(grad):
        inner = grad - (out * grad).sum(axis=axis, keepdims=True)
        gw = _unbroadcast(expv / norm * inner, wshape)
        return (out * inner, gw)

    return record(out, (x, weights), _back)


# Pooling
def weighted_mean(x, weights, allow_empty=False):
    """ Weighted mean over the token axis.

        :param x: [B, N, C]
        :param weights: nonnegative [B, N]
        :param allow_empty: rows whose weights sum to zero give a zero
            vector with zero gradient instead of an error
        :rtype: [B, 1, C]
    """
    xv, wv = value(x), value(weights)
    if xv.ndim != 3 or wv.shape != xv.shape[:2]:
        raise DimensionError(
            'weighted_mean of {} with weights {}'.format(xv.shape, wv.shape))

    den = wv.sum(axis=1)
    empty = den <= 0.0
    if numpy.any(empty) and not allow_empty:
        raise EmptyPoolError('mean over zero tokens')
    safe = numpy.where(empty, 1.0, den)
    out = (numpy.einsum('bn,bnc->bc', wv, xv) / safe[:, None])
    out[empty] = 0.0
    out = out[:, None, :]

    def _back(grad):
        grad = grad[:, 0, :]
        gx = wv[:, :, None] / safe[:, None, None] * grad[:, None, :]
        gw = numpy.einsum(
            'bnc,bc->bn', xv - out, grad) / safe[:, None]
        gx[empty] = 0.0
        gw[empty] = 0.0
        return (gx, gw)

    return record(out, (x, weights), _back)


def masked_mean(x, mask):
    """ Mean of the tokens whose mask entry is set.

        :param x: [B, N, C]
        :param mask: [B, N] keep mask
        :raises EmptyPoolError: a row keeps no token
        :rtype: [B, 1, C]
    """
    return weighted_mean(x, mask, allow_empty=False)


def straight_through(hard, soft):
    """ Value of `hard` with the gradient routed to `soft` unchanged
    """
    hv, sv = value(hard), value(soft)
    if hv.shape != sv.shape:
        raise DimensionError(
            'straight_through of {} and {}'.format(hv.shape, sv.shape))

    def _back(grad):
        return (grad,)

    return record(numpy.array(hv), (soft,), _back)
