""" Parsers for the configuration file and the command line
"""

from prunelib.prune_io.parser import config
from prunelib.prune_io.parser import args


__all__ = [
    'config',
    'args'
]
