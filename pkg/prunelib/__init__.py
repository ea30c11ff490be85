"""
  Input/output, error types and synthetic data used by the pruning drivers
"""

from prunelib import errors
from prunelib import synth
from prunelib import prune_io


__all__ = [
    'errors',
    'synth',
    'prune_io'
]
