""" Tests for token packaging
"""

import numpy
import pytest
from prunelib.errors import ConfigError
from prunelib.errors import EmptyPoolError
from prunelib.errors import DegenerateWeightsError
from pruneroutines import numcore as nc
from pruneroutines import packaging as pkg
from pruneroutines import selector as sel


RNG = numpy.random.default_rng(3)
TOKENS = RNG.normal(size=(1, 6, 4))


def test__build_package():
    """ test packaging.build_package
    """
    row = numpy.array([[1.5, -2.0, 0.5]])
    out = pkg.build_package(row, numpy.array([[0.3, 0.7]]), phase=2)
    assert numpy.allclose(out['vec'], row[0])
    assert out['count'] == 1
    assert out['phase'] == 2

    pruned = RNG.normal(size=(5, 3))
    out = pkg.build_package(pruned, numpy.full((5, 2), 0.5))
    assert numpy.allclose(out['vec'], pruned.mean(axis=0), atol=1.0e-12)

    out = pkg.build_package(numpy.array([[1.0, 0.0], [3.0, 2.0]]),
                            numpy.array([[0.2, 0.8], [0.6, 0.4]]))
    assert numpy.allclose(out['vec'], [2.5, 1.5])

    with pytest.raises(EmptyPoolError):
        pkg.build_package(numpy.zeros((0, 3)), numpy.zeros((0, 2)))
    with pytest.raises(DegenerateWeightsError):
        pkg.build_package(pruned, numpy.tile([0.0, 1.0], (5, 1)))


def test__package_properties():
    """ test convex-hull containment and permutation invariance of the
        package token
    """
    rng = numpy.random.default_rng(17)
    for _ in range(1000):
        count = rng.integers(1, 9)
        pruned = rng.normal(size=(count, 5))
        keep = rng.uniform(0.01, 1.0, size=count)
        scores = numpy.stack([keep, 1.0 - keep], axis=1)
        vec = pkg.build_package(pruned, scores)['vec']
        assert numpy.all(vec >= pruned.min(axis=0) - 1.0e-12)
        assert numpy.all(vec <= pruned.max(axis=0) + 1.0e-12)

        perm = rng.permutation(count)
        assert numpy.allclose(
            pkg.build_package(pruned[perm], scores[perm])['vec'], vec,
            atol=1.0e-12)


def test__attach_package():
    """ test packaging.attach_package for both policies over 3 phases
    """
    tokens, slots = TOKENS, ()
    for phase in range(3):
        package = pkg.build_package(RNG.normal(size=(2, 4)),
                                    numpy.full((2, 2), 0.5), phase)
        tokens, slots = pkg.attach_package(
            tokens, package, 'concat_per_phase', slots)
        assert nc.value(tokens).shape == (1, 7 + phase, 4)
    assert slots == (6, 7, 8)

    tokens, slots = TOKENS, ()
    total = numpy.zeros(4)
    for phase in range(3):
        package = pkg.build_package(RNG.normal(size=(2, 4)),
                                    numpy.full((2, 2), 0.5), phase)
        total = total + package['vec']
        tokens, slots = pkg.attach_package(
            tokens, package, 'merge_single', slots)
    assert nc.value(tokens).shape == (1, 7, 4)
    assert slots == (6,)
    assert numpy.allclose(tokens[0, 6], total)
    assert numpy.array_equal(tokens[0, :6], TOKENS[0])

    with pytest.raises(ConfigError):
        pkg.attach_package(TOKENS, package, 'drop')


def test__package_weights():
    """ test packaging.package_weights
    """
    old = numpy.array([[1.0, 1.0, 0.0, 1.0]])
    new = numpy.array([[1.0, 0.0, 0.0, 0.0]])
    keep = numpy.array([[0.9, 0.4, 0.3, 0.2]])
    assert numpy.allclose(pkg.package_weights(old, new, keep),
                          [[0.0, 0.4, 0.0, 0.2]])


def test__attach_package_masked():
    """ test packaging.attach_package_masked
    """
    x = RNG.normal(size=(2, 5, 4))
    dec = sel.keep_decision(numpy.ones((2, 5)), (0,))
    vec = RNG.normal(size=(2, 1, 4))
    vec[1] = 0.0
    has = numpy.array([True, False])

    x1, dec1 = pkg.attach_package_masked(x, dec, vec, has,
                                         'concat_per_phase')
    assert nc.value(x1).shape == (2, 6, 4)
    assert numpy.array_equal(dec1['mask'][:, 5], [1.0, 0.0])
    assert dec1['protected'] == (0, 5)
    assert dec1['package'] == (5,)

    x2, dec2 = pkg.attach_package_masked(x1, dec1, vec, ~has,
                                         'concat_per_phase')
    assert nc.value(x2).shape == (2, 7, 4)
    assert dec2['package'] == (5, 6)

    x2, dec2 = pkg.attach_package_masked(x1, dec1, vec, ~has,
                                         'merge_single')
    assert nc.value(x2).shape == (2, 6, 4)
    assert numpy.array_equal(dec2['mask'][:, 5], [1.0, 1.0])
    assert numpy.allclose(x2[0, 5], 2.0 * vec[0, 0])
    assert dec2['package'] == (5,)


if __name__ == '__main__':
    test__build_package()
    test__attach_package()
