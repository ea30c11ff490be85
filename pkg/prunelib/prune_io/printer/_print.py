"""
  Various status messages

  All messages go to standard error; standard output is reserved for
  the JSON report of a command.
"""

import sys
from prunelib.prune_io.printer._format import format_message


PRINT_DEBUG = {'on': False}


def set_debug(print_debug):
    """ Switch debug messages on or off for the rest of the process
    """
    PRINT_DEBUG['on'] = bool(print_debug)


def _emit(*parts):
    print(*parts, file=sys.stderr)


def message(message_label, *args, newline=None, indent=None):
    """ Print a general message to output.
    """
    _emit(format_message(message_label, newline, indent), *args)


def debug_message(message_label, *args,
                  newline=None, indent=None, print_debug=None):
    """ Print a debug message to output.
    """
    if print_debug is None:
        print_debug = PRINT_DEBUG['on']
    if print_debug:
        _emit('Debug: ', format_message(message_label, newline, indent),
              *args)


def info_message(message_label, *args, newline=None, indent=None):
    """ Print an info message to output.
    """
    _emit(format_message(message_label, newline, indent), *args)


def error_message(message_label, *args, newline=None, indent=None):
    """ Print an error message to output.
    """
    _emit('ERROR: ', format_message(message_label, newline, indent), *args)


def warning_message(message_label, *args, newline=None, indent=None):
    """ Print a warning message to output.
    """
    _emit('WARNING: ', format_message(message_label, newline, indent), *args)
