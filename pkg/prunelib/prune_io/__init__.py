""" Libraries of functions that handle input-output for autoprune
"""

from prunelib.prune_io import printer
from prunelib.prune_io import parser
from prunelib.prune_io import reader
from prunelib.prune_io import writer
from prunelib.prune_io import _path


__all__ = [
    'printer',
    'parser',
    'reader',
    'writer',
    '_path'
]
