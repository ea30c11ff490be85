""" Driver for counting the multiply-accumulates of a configuration.

    Main Workflow:
        (1) Counts of one unpruned block, row by row
        (2) Counts of the whole model under the configured pruning plan
        (3) Phase rates for a target reduction, if requested
        (4) Token, channel and head pruning compared at one ratio,
            if requested
"""

from prunelib.prune_io import printer as ioprinter
from pruneroutines import costmodel
from pruneroutines.backbone import token_counts


def run(cfg, strategy_compare=False, rate=0.5, reduction=None):
    """ main driver for the cost analysis

        :param cfg: configuration
        :type cfg: dict[str: dict]
        :param strategy_compare: compare pruning strategies at `rate`
        :type strategy_compare: bool
        :param rate: pruning ratio of the comparison
        :type rate: float
        :param reduction: target relative reduction for a geometric plan
        :type reduction: float
        :rtype: dict[str: obj]
    """

    arch = cfg['arch']
    _, _, n_tok = token_counts(arch)

    # ---------------------------- #
    # COUNT THE BLOCK AND THE MODEL #
    # ---------------------------- #

    block = costmodel.block_flops(
        n_tok, arch['embed_dim'], arch['attn_dim'], arch['fc_dim'])
    ioprinter.plan.flops_table(block)

    model = costmodel.model_flops(arch)
    ioprinter.plan.model_cost(model)

    outputs = {'tokens': n_tok, 'block': block, 'model': model}

    # -------------------- #
    # OPTIONAL COMPARISONS #
    # -------------------- #

    if reduction is not None:
        plan = costmodel.rates_for_reduction(arch, reduction)
        red_model = costmodel.model_flops(arch, plan)
        ioprinter.info_message(
            'Geometric phase rates for {:.2f}% reduction:'.format(
                100.0 * reduction), newline=1)
        ioprinter.plan.model_cost(red_model)
        outputs['reduction_plan'] = {
            'positions': list(plan['positions']),
            'phase_rates': list(plan['phase_rates']),
            'model': red_model}

    if strategy_compare:
        cmp_dct = costmodel.compare_strategies(arch, rate)
        ioprinter.info_message(ioprinter.format_table(
            ('strategy', 'reduction %'),
            tuple((key, 100.0 * cmp_dct[key])
                  for key in ('token', 'channel', 'head'))), newline=1)
        ioprinter.info_message(
            'Head-dependent share of the block: {:.2f}%'.format(
                100.0 * cmp_dct['head_share']))
        outputs['strategies'] = dict(cmp_dct, rate=rate)

    return outputs
