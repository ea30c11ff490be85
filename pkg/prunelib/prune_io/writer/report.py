""" Build and write the JSON report every command produces
"""

import sys
import json
import numpy


def report(command, config_digest, outputs, seed, wall_time):
    """ Assemble the report of one command

        :param command: command name
        :type command: str
        :param config_digest: hex digest of the configuration
        :type config_digest: str
        :param outputs: command results
        :type outputs: dict[str: obj]
        :param seed: seed used by the command
        :type seed: int
        :param wall_time: elapsed time in seconds
        :type wall_time: float
        :rtype: dict[str: obj]
    """
    return {
        'command': command,
        'config_digest': config_digest,
        'outputs': outputs,
        'seed': seed,
        'wall_time': wall_time,
    }


def report_string(rep_dct):
    """ JSON text of a report with sorted keys
    """
    return json.dumps(rep_dct, indent=2, sort_keys=True, default=_jsonable)


def write_report(rep_dct, path=None):
    """ Write a report to a file, or to standard output if no path
    """
    rep_str = report_string(rep_dct)
    if path is None:
        sys.stdout.write(rep_str + '\n')
    else:
        with open(path, 'w') as rep_file:
            rep_file.write(rep_str + '\n')


def append_history(path, record):
    """ Append one record to a JSON-lines history file
    """
    with open(path, 'a') as hist_file:
        hist_file.write(json.dumps(record, sort_keys=True,
                                   default=_jsonable) + '\n')


def _jsonable(obj):
    """ Convert numpy scalars and arrays for json
    """
    if isinstance(obj, numpy.ndarray):
        return obj.tolist()
    if isinstance(obj, numpy.generic):
        return obj.item()
    raise TypeError('{} is not JSON serializable'.format(type(obj)))
