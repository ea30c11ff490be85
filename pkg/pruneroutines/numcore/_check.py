""" Finite-difference check of tape gradients
"""

import numpy
from prunelib.errors import ContractError
from pruneroutines.numcore._tape import GradTape
from pruneroutines.numcore._tape import value


def grad_check(fn, point, seed=0, step=1.0e-5, max_coords=None):
    """ Compare the tape gradient of a scalar function with central
        differences.

        The function is called once with tape variables to get the
        analytic gradient and then twice per probed coordinate with plain
        arrays. The relative error is
            max|analytic - numeric| / max(max|analytic|, max|numeric|)
        over the probed coordinates.

        :param fn: maps an array (or a dict of arrays) to a scalar
        :type fn: callable
        :param point: where to evaluate; array or dict of arrays
        :type point: numpy.ndarray or dict[str: numpy.ndarray]
        :param seed: seed for choosing the probed coordinates
        :type seed: int
        :param step: finite-difference step
        :type step: float
        :param max_coords: probe at most this many coordinates, all if None
        :type max_coords: int
        :rtype: float
    """

    as_dct = isinstance(point, dict)
    arr_dct = point if as_dct else {None: point}
    arr_dct = {key: numpy.array(val, dtype=numpy.float64)
               for key, val in arr_dct.items()}

    def _call(inp_dct):
        return fn(inp_dct if as_dct else inp_dct[None])

    tape = GradTape()
    leaf_dct = tape.leaves(arr_dct)
    out = _call(leaf_dct)
    if value(out).size != 1:
        raise ContractError(
            'grad_check needs a scalar function, output has shape {}'.format(
                value(out).shape))
    if getattr(out, 'tape', None) is tape:
        tape.backward(out)
    analytic = {
        key: (leaf.grad if leaf.grad is not None
              else numpy.zeros_like(leaf.val))
        for key, leaf in leaf_dct.items()}

    coords = [(key, idx) for key in sorted(arr_dct, key=str)
              for idx in range(arr_dct[key].size)]
    if max_coords is not None and max_coords < len(coords):
        rng = numpy.random.default_rng(seed)
        pick = numpy.sort(rng.choice(len(coords), size=max_coords,
                                     replace=False))
        coords = [coords[idx] for idx in pick]

    ana_lst, num_lst = [], []
    for key, idx in coords:
        shifted = []
        for sign in (1.0, -1.0):
            inp_dct = {k: v.copy() for k, v in arr_dct.items()}
            inp_dct[key].reshape(-1)[idx] += sign * step
            shifted.append(float(value(_call(inp_dct)).reshape(-1)[0]))
        num_lst.append((shifted[0] - shifted[1]) / (2.0 * step))
        ana_lst.append(analytic[key].reshape(-1)[idx])

    ana, num = numpy.array(ana_lst), numpy.array(num_lst)
    scale = max(numpy.max(numpy.abs(ana), initial=0.0),
                numpy.max(numpy.abs(num), initial=0.0))
    if scale == 0.0:
        return 0.0
    return float(numpy.max(numpy.abs(ana - num)) / scale)
