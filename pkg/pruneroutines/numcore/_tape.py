""" Gradient tape.

    A tape records every kernel applied to its variables in execution
    order. `backward` replays the record in reverse and accumulates the
    gradient of a scalar output into each recorded variable, so that each
    kernel's local derivative is applied exactly once.
"""

import numpy
from prunelib.errors import ContractError


class Var():
    """ Array value that lives on a gradient tape
    """

    __slots__ = ('val', 'grad', 'tape', 'parents', 'backward_fn')

    def __init__(self, val, tape, parents=(), backward_fn=None):
        self.val = val
        self.grad = None
        self.tape = tape
        self.parents = parents
        self.backward_fn = backward_fn

    @property
    def shape(self):
        """ extents of the value """
        return self.val.shape

    @property
    def ndim(self):
        """ number of axes of the value """
        return self.val.ndim

    def __repr__(self):
        return 'Var(shape={})'.format(self.val.shape)


class GradTape():
    """ Record of executed kernels for one forward pass
    """

    def __init__(self):
        self.ops = []

    def leaf(self, val):
        """ Start a differentiable variable from an array
        """
        return Var(numpy.array(val, dtype=numpy.float64), self)

    def leaves(self, arr_dct):
        """ Differentiable variables for every array of a dictionary
        """
        return {key: self.leaf(val) for key, val in arr_dct.items()}

    def record(self, val, parents, backward_fn):
        """ Append the output of a kernel to the tape
        """
        var = Var(val, self, parents, backward_fn)
        self.ops.append(var)
        return var

    def backward(self, out, seed_grad=None):
        """ Propagate the gradient of `out` to every variable it depends on

            :param out: variable recorded on this tape
            :type out: Var
            :param seed_grad: gradient of the final objective w.r.t. `out`;
                ones if None, which requires `out` to be a scalar
            :type seed_grad: numpy.ndarray
        """

        if out.tape is not self:
            raise ContractError('Output was not recorded on this tape')
        if seed_grad is None:
            if out.val.size != 1:
                raise ContractError(
                    'backward of a non-scalar output of shape {} needs a '
                    'seed gradient'.format(out.val.shape))
            seed_grad = numpy.ones_like(out.val)
        out.grad = numpy.asarray(seed_grad, dtype=numpy.float64)

        for var in reversed(self.ops):
            if var.grad is None:
                continue
            pgrads = var.backward_fn(var.grad)
            for parent, pgrad in zip(var.parents, pgrads):
                if not isinstance(parent, Var) or pgrad is None:
                    continue
                if parent.grad is None:
                    parent.grad = pgrad
                else:
                    parent.grad = parent.grad + pgrad


def is_var(obj):
    """ True for a tape variable
    """
    return isinstance(obj, Var)


def value(obj):
    """ The array behind a variable, or the input as a float array
    """
    if isinstance(obj, Var):
        return obj.val
    return numpy.asarray(obj, dtype=numpy.float64)


def tape_of(*objs):
    """ The tape shared by the variables among the inputs, None if there
        are no variables
    """
    tape = None
    for obj in objs:
        if isinstance(obj, Var):
            if tape is None:
                tape = obj.tape
            elif obj.tape is not tape:
                raise ContractError('Inputs belong to different tapes')
    return tape


def record(val, parents, backward_fn):
    """ Record a kernel output if any parent is a variable; otherwise
        return the plain array and skip differentiation
    """
    tape = tape_of(*parents)
    if tape is None:
        return val
    return tape.record(val, parents, backward_fn)
