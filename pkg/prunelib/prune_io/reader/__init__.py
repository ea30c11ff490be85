""" Readers for weight files and input images
"""

from prunelib.prune_io.reader.weights import read_weights
from prunelib.prune_io.reader.image import read_pgm


__all__ = [
    'read_weights',
    'read_pgm'
]
