""" Tests for the differentiable array kernels
"""

import math
import numpy
import pytest
from prunelib.errors import ContractError
from prunelib.errors import DimensionError
from prunelib.errors import ConfigError
from prunelib.errors import EmptyPoolError
from prunelib.errors import EmptyAttentionError
from pruneroutines import numcore as nc


RNG = numpy.random.default_rng(7)
X3 = RNG.uniform(-2.0, 2.0, size=(2, 4, 6))
W3 = RNG.uniform(-2.0, 2.0, size=(2, 4, 6))
KEEP = numpy.array([[1.0, 0.0, 1.0, 1.0],
                    [0.0, 1.0, 1.0, 0.0]])
SMOOTH_TOL = 1.0e-6


def test__matmul():
    """ test numcore.matmul
    """
    mat = RNG.normal(size=(3, 3))
    assert numpy.allclose(nc.matmul(numpy.eye(3), mat), mat)

    out = nc.matmul(numpy.array([[1.0, 2.0], [3.0, 4.0]]),
                    numpy.array([[1.0], [1.0]]))
    assert numpy.array_equal(out, [[3.0], [7.0]])

    with pytest.raises(DimensionError):
        nc.matmul(numpy.ones((2, 3)), numpy.ones((2, 3)))


def test__layernorm():
    """ test numcore.layernorm
    """
    gamma, beta = numpy.ones(4), numpy.zeros(4)
    out = nc.layernorm(numpy.full((1, 4), 3.5), gamma, beta)
    assert numpy.array_equal(out, numpy.zeros((1, 4)))

    out = nc.layernorm(numpy.array([[1.0, 3.0]]), numpy.ones(2),
                       numpy.zeros(2), eps=1.0e-14)
    assert numpy.allclose(out, [[-1.0, 1.0]], atol=1.0e-9)

    beta = RNG.normal(size=6)
    out = nc.layernorm(X3, numpy.ones(6), beta)
    assert numpy.allclose(out.mean(axis=-1), beta.mean(), atol=1.0e-12)

    with pytest.raises(ConfigError):
        nc.layernorm(X3, numpy.ones(6), numpy.zeros(6), eps=0.0)
    with pytest.raises(DimensionError):
        nc.layernorm(X3, numpy.ones(5), numpy.zeros(5))


def test__activation():
    """ test numcore.activation
    """
    assert nc.activation(numpy.array(0.0), 'gelu') == 0.0
    assert nc.activation(numpy.array(0.0), 'sigmoid') == 0.5

    ref = 0.5 * (1.0 + math.erf(1.0 / math.sqrt(2.0)))
    assert nc.activation(numpy.array(1.0), 'gelu') == pytest.approx(
        ref, abs=1.0e-12)

    with pytest.raises(ConfigError):
        nc.activation(X3, 'relu')


def test__softmax():
    """ test numcore.softmax
    """
    assert numpy.allclose(nc.softmax(numpy.zeros(2)), [0.5, 0.5])
    assert numpy.allclose(
        nc.softmax(numpy.array([0.0, math.log(3.0)])), [0.25, 0.75])

    out = nc.softmax(numpy.array([1000.0, 0.0]))
    assert numpy.all(numpy.isfinite(out))
    assert out[0] == pytest.approx(1.0)
    assert out[1] < 1.0e-300

    out = nc.softmax(X3, axis=1)
    assert numpy.allclose(out.sum(axis=1), 1.0, atol=1.0e-12)
    assert numpy.allclose(nc.softmax(X3 + 5.0, axis=1), out, atol=1.0e-12)


def test__masked_softmax():
    """ test numcore.masked_softmax
    """
    logits = X3[0]
    out = nc.masked_softmax(logits, KEEP[0][:, None], axis=0)
    kept = KEEP[0] > 0.0
    assert numpy.all(out[~kept] == 0.0)
    assert numpy.allclose(out[kept], nc.softmax(logits[kept], axis=0),
                          atol=1.0e-12)

    with pytest.raises(EmptyAttentionError):
        nc.masked_softmax(logits, numpy.zeros((4, 1)), axis=0)


def test__masked_mean():
    """ test numcore.masked_mean
    """
    out = nc.masked_mean(X3, numpy.ones((2, 4)))
    assert out.shape == (2, 1, 6)
    assert numpy.allclose(out[:, 0], X3.mean(axis=1), atol=1.0e-12)

    single = numpy.zeros((2, 4))
    single[:, 2] = 1.0
    assert numpy.allclose(nc.masked_mean(X3, single)[:, 0], X3[:, 2])

    rows = numpy.array([[[1.0, 5.0], [3.0, 7.0]]])
    assert nc.masked_mean(rows, numpy.ones((1, 2)))[0, 0, 0] == 2.0

    with pytest.raises(EmptyPoolError):
        nc.masked_mean(X3, KEEP * numpy.array([[1.0], [0.0]]))

    out = nc.weighted_mean(X3, KEEP * numpy.array([[1.0], [0.0]]),
                           allow_empty=True)
    assert numpy.array_equal(out[1], numpy.zeros((1, 6)))


def test__tape():
    """ test numcore.GradTape
    """
    tape = nc.GradTape()
    xvar = tape.leaf([1.0, -2.0, 3.0])
    out = nc.sum_(nc.mul(xvar, xvar))
    tape.backward(out)
    assert numpy.array_equal(xvar.grad, [2.0, -4.0, 6.0])

    tape = nc.GradTape()
    xvar = tape.leaf(X3)
    with pytest.raises(ContractError):
        tape.backward(nc.square(xvar))

    other = nc.GradTape().leaf(X3)
    with pytest.raises(ContractError):
        nc.add(xvar, other)

    assert not nc.is_var(nc.add(X3, W3))


def test__straight_through():
    """ test numcore.straight_through
    """
    tape = nc.GradTape()
    soft = tape.leaf([0.2, 0.7])
    hard = numpy.array([0.0, 1.0])
    out = nc.straight_through(hard, soft)
    assert numpy.array_equal(nc.value(out), hard)
    tape.backward(nc.sum_(nc.mul(out, numpy.array([3.0, 5.0]))))
    assert numpy.array_equal(soft.grad, [3.0, 5.0])


def test__grad_check():
    """ test numcore.grad_check
    """
    assert nc.grad_check(nc.sum_, X3) < 1.0e-8

    point = {'x': X3[0], 'w': RNG.normal(size=(6, 3)),
             'g': RNG.normal(size=6), 'b': RNG.normal(size=6)}

    def _chain(pdct):
        hid = nc.layernorm(pdct['x'], pdct['g'], pdct['b'])
        return nc.sum_(nc.square(nc.matmul(hid, pdct['w'])))

    assert nc.grad_check(_chain, point) < SMOOTH_TOL

    with pytest.raises(ContractError):
        nc.grad_check(nc.square, X3)


def test__kernel_gradients():
    """ test the backward transform of every kernel against central
        differences
    """

    cases = (
        lambda x: nc.div(nc.add(x, 3.0), nc.sub(5.0, x)),
        lambda x: nc.log(nc.add(nc.square(x), 1.0)),
        lambda x: nc.mean(x, axis=1, keepdims=True),
        lambda x: nc.transpose(nc.reshape(x, (2, 24)), (1, 0)),
        lambda x: nc.concat([x, nc.take(x, [0, 0, 3], 1)], 1),
        lambda x: nc.take(x, slice(1, 3), -1),
        lambda x: nc.expand(nc.take(x, [1], 1), (2, 4, 6)),
        lambda x: nc.activation(x, 'gelu'),
        lambda x: nc.activation(x, 'sigmoid'),
        lambda x: nc.softmax(x, axis=1),
        lambda x: nc.log_softmax(x, axis=-1),
        lambda x: nc.masked_softmax(x, KEEP[:, :, None], axis=1),
        lambda x: nc.weighted_mean(x, KEEP),
        lambda x: nc.masked_softmax(
            x, nc.activation(nc.take(x, [0], -1), 'sigmoid'), axis=1),
        lambda x: nc.weighted_mean(
            x, nc.reshape(nc.activation(nc.take(x, [2], -1), 'sigmoid'),
                          (2, 4))),
    )

    for kernel in cases:
        def _scalar(x, kernel=kernel):
            out = kernel(x)
            wgt = numpy.linspace(-1.0, 1.0, nc.value(out).size).reshape(
                nc.value(out).shape)
            return nc.sum_(nc.mul(out, wgt))

        assert nc.grad_check(_scalar, X3) < 1.0e-4


def test__determinism():
    """ test that kernels give bit-identical outputs on identical inputs
    """
    out1 = nc.layernorm(nc.softmax(X3, 1), numpy.ones(6), numpy.zeros(6))
    out2 = nc.layernorm(nc.softmax(X3, 1), numpy.ones(6), numpy.zeros(6))
    assert numpy.array_equal(out1, out2)


if __name__ == '__main__':
    test__matmul()
    test__layernorm()
    test__softmax()
    test__grad_check()
