"""
Error prints
"""

from prunelib.prune_io.printer._print import error_message


def pruning_error(err):
    """ Print the message of an error that ends the command, with its
        type and the exit code the process returns.
    """
    error_message('{}: {}'.format(type(err).__name__, err))
    error_message('Exiting with code {}'.format(err.exit_code), indent=1)
    min_lat = getattr(err, 'min_latency', None)
    if min_lat is not None:
        error_message(
            'Smallest reachable latency: {:.4f} ms'.format(min_lat), indent=1)
