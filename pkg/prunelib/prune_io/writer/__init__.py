""" Writers for weight files, reports and keep masks
"""

from prunelib.prune_io.writer.weights import write_weights
from prunelib.prune_io.writer.report import report
from prunelib.prune_io.writer.report import report_string
from prunelib.prune_io.writer.report import write_report
from prunelib.prune_io.writer.report import append_history
from prunelib.prune_io.writer.mask import mask_grid
from prunelib.prune_io.writer.mask import write_mask_pgm
from prunelib.prune_io.writer.mask import write_masks


__all__ = [
    'write_weights',
    'report',
    'report_string',
    'write_report',
    'append_history',
    'mask_grid',
    'write_mask_pgm',
    'write_masks'
]
