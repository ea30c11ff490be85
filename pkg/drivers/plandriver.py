""" Driver for choosing phase rates under a latency budget.

    Main Workflow:
        (1) Exhaustive grid search for the least pruning within budget
        (2) Optionally, the progressive search on the toy model:
            (1) Train the unpruned model on synthetic data
            (2) Insert selectors from the last block to the first,
                finetuning and validating every candidate rate
            (3) Group blocks into phases and fit the plan to the budget
"""

from prunelib import synth
from prunelib.prune_io import printer as ioprinter
from pruneroutines import latency
from pruneroutines import trainer
from pruneroutines.backbone import init_params


def run(cfg, table, budget_ms, seed=0, positions=None, grid_step=None,
        selector_ms=0.0, progressive=False, history_path=None):
    """ main driver for the plan search

        :param cfg: configuration
        :type cfg: dict[str: dict]
        :param table: latency table
        :type table: dict
        :param budget_ms: latency budget in ms
        :type budget_ms: float
        :param positions: phase start blocks; the configured ones if None
        :type positions: list(int)
        :rtype: dict[str: obj]
    """

    arch, sched = cfg['arch'], cfg['schedule']
    if positions is None:
        positions = arch['selector_positions']
    if grid_step is None:
        grid_step = sched['grid_step']

    # ------------------ #
    # GRID SEARCH SOLVER #
    # ------------------ #

    plan = latency.solve_budget(
        table, arch['n_blocks'], positions, budget_ms, grid_step=grid_step,
        selector_ms=selector_ms, max_rate=sched['max_rate'])
    ioprinter.info_message(
        'Least pruning within {:.4f} ms:'.format(budget_ms), newline=1)
    ioprinter.plan.latency(plan, plan['latency_ms'])

    outputs = {
        'device': table['device'],
        'budget_ms': budget_ms,
        'positions': list(plan['positions']),
        'phase_rates': list(plan['phase_rates']),
        'rates': list(plan['rates']),
        'latency_ms': plan['latency_ms'],
    }

    # ------------------------------ #
    # PROGRESSIVE SEARCH, IF ASKED   #
    # ------------------------------ #

    if progressive:
        outputs['progressive'] = _progressive(
            cfg, table, budget_ms, seed, grid_step, selector_ms, history_path)

    return outputs


def _progressive(cfg, table, budget_ms, seed, grid_step, selector_ms,
                 history_path):
    """ Train the unpruned model and run the progressive schedule on it
    """

    arch, sched = cfg['arch'], cfg['schedule']
    train_set, val_set = synth.train_validation_sets(
        cfg['data'], arch['n_classes'], arch['image_size'], arch['in_chans'])

    base_cfg = dict(cfg, arch=dict(arch, selector_positions=[],
                                   phase_rates=[]))
    ioprinter.info_message('Training the unpruned model', newline=1)
    params, _ = trainer.fit(base_cfg, init_params(base_cfg['arch'], seed),
                            train_set, seed=seed)

    evaluate_fn = trainer.model_evaluator(
        cfg, params, train_set, val_set, seed=seed)
    state = trainer.progressive_schedule(
        evaluate_fn, arch['n_blocks'], table=table, budget_ms=budget_ms,
        acc_tol=sched['acc_tol'], rate_tol=sched['rate_tol'],
        grid_step=grid_step, max_rate=sched['max_rate'],
        grouping=sched['grouping'], selector_ms=selector_ms,
        history_path=history_path)

    if not state['budget_met']:
        ioprinter.warning_message(
            'Progressive plan needs {:.4f} ms, over the budget'.format(
                state['latency_ms']))

    plan = state['plan']
    return {
        'block_rates': {str(blk): rate
                        for blk, rate in sorted(state['block_rates'].items())},
        'phases': [{'start': phase['start'], 'blocks': list(phase['blocks']),
                    'rate': phase['rate']} for phase in state['phases']],
        'positions': list(plan['positions']),
        'phase_rates': list(plan['phase_rates']),
        'latency_ms': state['latency_ms'],
        'budget_met': state['budget_met'],
        'start_accuracy': state['start_accuracy'],
        'final_accuracy': state['final_accuracy'],
        'history': state['history'],
    }


