""" Driver for estimating the latency of a pruning plan from a
    latency-sparsity table
"""

from prunelib.prune_io import printer as ioprinter
from pruneroutines import latency


def run(cfg, table, selector_ms=0.0, rate=None):
    """ main driver for the latency estimate

        :param cfg: configuration
        :type cfg: dict[str: dict]
        :param table: latency table
        :type table: dict
        :param selector_ms: fixed delay per selector
        :type selector_ms: float
        :param rate: single-block rate to look up as well
        :type rate: float
        :rtype: dict[str: obj]
    """

    arch = cfg['arch']
    plan = latency.make_plan(
        arch['n_blocks'], arch['selector_positions'], arch['phase_rates'])
    zero = latency.make_plan(arch['n_blocks'], (), ())

    lat = latency.plan_latency(table, plan, selector_ms)
    base = latency.plan_latency(table, zero)
    ioprinter.info_message('Device: {}'.format(table['device']))
    ioprinter.plan.latency(zero, base)
    ioprinter.plan.latency(plan, lat)

    outputs = {
        'device': table['device'],
        'positions': list(plan['positions']),
        'phase_rates': list(plan['phase_rates']),
        'latency_ms': lat,
        'unpruned_ms': base,
        'speedup': base / lat,
    }
    if rate is not None:
        outputs['block_ms'] = latency.block_lat(table, rate)
        ioprinter.info_message(
            'One block at rate {}: {:.4f} ms'.format(
                rate, outputs['block_ms']), indent=1)

    return outputs
