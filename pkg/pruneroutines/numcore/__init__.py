""" Array kernels with reverse-mode differentiation on a gradient tape
"""

from pruneroutines.numcore._tape import Var
from pruneroutines.numcore._tape import GradTape
from pruneroutines.numcore._tape import is_var
from pruneroutines.numcore._tape import value
from pruneroutines.numcore._kernels import add
from pruneroutines.numcore._kernels import sub
from pruneroutines.numcore._kernels import mul
from pruneroutines.numcore._kernels import div
from pruneroutines.numcore._kernels import log
from pruneroutines.numcore._kernels import square
from pruneroutines.numcore._kernels import sum_
from pruneroutines.numcore._kernels import mean
from pruneroutines.numcore._kernels import reshape
from pruneroutines.numcore._kernels import transpose
from pruneroutines.numcore._kernels import concat
from pruneroutines.numcore._kernels import take
from pruneroutines.numcore._kernels import expand
from pruneroutines.numcore._kernels import matmul
from pruneroutines.numcore._kernels import linear
from pruneroutines.numcore._kernels import layernorm
from pruneroutines.numcore._kernels import activation
from pruneroutines.numcore._kernels import softmax
from pruneroutines.numcore._kernels import log_softmax
from pruneroutines.numcore._kernels import masked_softmax
from pruneroutines.numcore._kernels import weighted_mean
from pruneroutines.numcore._kernels import masked_mean
from pruneroutines.numcore._kernels import straight_through
from pruneroutines.numcore._check import grad_check


__all__ = [
    'Var',
    'GradTape',
    'is_var',
    'value',
    'add',
    'sub',
    'mul',
    'div',
    'log',
    'square',
    'sum_',
    'mean',
    'reshape',
    'transpose',
    'concat',
    'take',
    'expand',
    'matmul',
    'linear',
    'layernorm',
    'activation',
    'softmax',
    'log_softmax',
    'masked_softmax',
    'weighted_mean',
    'masked_mean',
    'straight_through',
    'grad_check'
]
