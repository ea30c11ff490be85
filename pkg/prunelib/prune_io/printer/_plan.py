"""
  Cost model, latency and schedule messages
"""

from prunelib.prune_io.printer._print import info_message
from prunelib.prune_io.printer._format import format_count
from prunelib.prune_io.printer._format import format_table


def flops_table(cost_dct):
    """ Print the per-row counts of one transformer block
    """
    rows = tuple((label, format_count(cnt))
                 for label, cnt in cost_dct['rows'].items())
    rows += (('total', format_count(cost_dct['total'])),)
    info_message(format_table(('operation', 'mul-adds'), rows), newline=1)


def model_cost(model_dct):
    """ Print the totals of a whole-model count
    """
    info_message(
        'Backbone {} + selectors {} = {} ({:.2f}% reduction)'.format(
            format_count(model_dct['backbone']),
            format_count(model_dct['selector']),
            format_count(model_dct['total']),
            100.0 * model_dct['reduction']), newline=1)


def latency(plan, lat_ms):
    """ Print the estimated latency of a plan
    """
    info_message(
        'Phase rates {} at blocks {}: {:.4f} ms'.format(
            list(plan['phase_rates']), list(plan['positions']), lat_ms),
        indent=1)


def insertion(block_idx, rate, acc, ref_acc, accepted):
    """ Print one candidate of the progressive insertion search
    """
    info_message(
        'block {:>2d} rate {:.3f} acc {:.2f}% (ref {:.2f}%) {}'.format(
            block_idx, rate, acc, ref_acc,
            'accepted' if accepted else 'rejected'), indent=1)


def grouping(phases):
    """ Print the phases found by grouping adjacent selectors
    """
    for idx, phase in enumerate(phases):
        info_message(
            'phase {}: blocks {} rate {:.3f}'.format(
                idx, list(phase['blocks']), phase['rate']), indent=1)
