""" Libraries of functions that print run-time messages for autoprune
"""

from prunelib.prune_io.printer._lib import obj
from prunelib.prune_io.printer._format import format_message
from prunelib.prune_io.printer._format import format_count
from prunelib.prune_io.printer._format import format_table

from prunelib.prune_io.printer._print import message
from prunelib.prune_io.printer._print import debug_message
from prunelib.prune_io.printer._print import info_message
from prunelib.prune_io.printer._print import error_message
from prunelib.prune_io.printer._print import warning_message
from prunelib.prune_io.printer._print import set_debug

# General Runtime Messages
from prunelib.prune_io.printer._mdriver import program_header
from prunelib.prune_io.printer._mdriver import program_exit
from prunelib.prune_io.printer._mdriver import driver_tasks
from prunelib.prune_io.printer._host import host_name

# Training Messages
from prunelib.prune_io.printer import _train as train

# Cost, Latency and Schedule Messages
from prunelib.prune_io.printer import _plan as plan

from prunelib.prune_io.printer._errors import pruning_error


__all__ = [

    'obj',
    'format_message',
    'format_count',
    'format_table',

    'message',
    'debug_message',
    'info_message',
    'error_message',
    'warning_message',
    'set_debug',

    # General Runtime Messages
    'program_header',
    'program_exit',
    'driver_tasks',
    'host_name',

    'train',
    'plan',

    'pruning_error'
]
