""" Progressive placement of selectors from the last block to the first,
    grouping of blocks into phases and fitting of the plan to a latency
    budget.
"""

from prunelib.errors import ConfigError
from prunelib.prune_io import printer
from prunelib.prune_io import writer
from prunelib.prune_io.parser.config import with_plan
from pruneroutines.backbone import add_selectors
from pruneroutines.latency import make_plan
from pruneroutines.latency import plan_latency
from pruneroutines.latency import rate_grid
from pruneroutines.trainer._step import fit
from pruneroutines.trainer._step import evaluate


GROUPINGS = ('phase_head', 'adjacent')


def phase_grouping(rates, tol=0.085, compare='phase_head'):
    """ Split a run of per-block rates into phases, left to right.

        A block opens a new phase when its rate differs by tol or more
        from the rate of the first block of the current phase (or, with
        compare='adjacent', from the block before it). A phase takes the
        rate of its first block.

        :param rates: per-block rates
        :type rates: list(float)
        :rtype: list of dict with 'start', 'blocks' and 'rate'
    """

    if compare not in GROUPINGS:
        raise ConfigError('Unknown grouping {}; supported: {}'.format(
            compare, GROUPINGS))
    if not rates:
        return []

    starts = [0]
    for idx in range(1, len(rates)):
        ref = rates[starts[-1]] if compare == 'phase_head' else rates[idx - 1]
        if abs(rates[idx] - ref) >= tol:
            starts.append(idx)

    bounds = starts + [len(rates)]
    return [{'start': start,
             'blocks': tuple(range(start, bounds[num + 1])),
             'rate': rates[start]}
            for num, start in enumerate(starts)]


def progressive_schedule(evaluate_fn, n_blocks, table=None, budget_ms=None,
                         acc_tol=0.5, rate_tol=0.085, grid_step=0.05,
                         max_rate=None, grouping='phase_head',
                         selector_ms=0.0, history_path=None):
    """ Insert selectors from block L-1 down to block 1.

        For each block the rate grows along the grid until the accuracy
        drops more than acc_tol points below the accuracy reached after the
        previous insertion; the last rate that passed is kept. A block's
        rate never exceeds the rate of a later block. The per-block rates
        are then grouped into phases, one selector per phase, and if a
        latency budget is given the phase rates are lowered, first phase
        first, as long as the plan stays within budget.

        :param evaluate_fn: accuracy in percent of a {block: rate} dict
        :type evaluate_fn: callable
        :param n_blocks: number of blocks L
        :param table: latency table; needed for a budget
        :param budget_ms: latency budget, or None
        :rtype: dict
    """

    if table is not None:
        grid = rate_grid(table, grid_step, max_rate)
    else:
        top = 0.5 if max_rate is None else max_rate
        grid = tuple(round(grid_step * idx, 10)
                     for idx in range(int(top / grid_step + 1.0e-9) + 1))

    accepted = {}
    ref_acc = evaluate_fn(dict(accepted))
    start_acc = ref_acc
    history = []
    cap = grid[-1]
    for blk in range(n_blocks - 1, 0, -1):
        best_rate, best_acc, trajectory = 0.0, ref_acc, []
        for rate in grid:
            if rate <= 0.0:
                continue
            if rate > cap:
                break
            cand = dict(accepted)
            cand[blk] = rate
            acc = evaluate_fn(cand)
            passed = acc >= ref_acc - acc_tol
            printer.plan.insertion(blk, rate, acc, ref_acc, passed)
            trajectory.append([rate, acc])
            if not passed:
                break
            best_rate, best_acc = rate, acc
        record = {'block': blk, 'rate': best_rate, 'accuracy': best_acc,
                  'reference': ref_acc, 'trajectory': trajectory}
        history.append(record)
        if history_path is not None:
            writer.append_history(history_path, record)
        cap = min(cap, best_rate)
        if best_rate > 0.0:
            accepted[blk] = best_rate
            ref_acc = best_acc

    block_rates = [accepted.get(blk, 0.0) for blk in range(1, n_blocks)]
    phases = [
        dict(phase, blocks=tuple(idx + 1 for idx in phase['blocks']),
             start=phase['start'] + 1)
        for phase in phase_grouping(block_rates, rate_tol, grouping)]
    phases = [phase for phase in phases if phase['rate'] > 0.0]
    printer.plan.grouping(phases)

    positions = [phase['start'] for phase in phases]
    rates = [phase['rate'] for phase in phases]
    state = {'block_rates': accepted, 'history': history, 'phases': phases,
             'start_accuracy': start_acc, 'final_accuracy': ref_acc,
             'latency_ms': None, 'budget_met': None}

    if table is not None and budget_ms is not None:
        rates = _fit_budget(table, n_blocks, positions, rates, budget_ms,
                            grid, selector_ms)
        plan = make_plan(n_blocks, positions, rates)
        state['latency_ms'] = plan_latency(table, plan, selector_ms)
        state['budget_met'] = state['latency_ms'] <= budget_ms + 1.0e-9

    keep = [idx for idx, rate in enumerate(rates) if rate > 0.0]
    state['plan'] = make_plan(
        n_blocks, [positions[idx] for idx in keep],
        [rates[idx] for idx in keep])
    return state


def _fit_budget(table, n_blocks, positions, rates, budget_ms, grid,
                selector_ms):
    """ Lower phase rates along the grid, first phase first, while the plan
        stays within budget and the rates stay nondecreasing
    """
    rates = list(rates)
    for idx in range(len(rates)):
        while True:
            lower = [rate for rate in grid if rate < rates[idx] - 1.0e-12]
            if not lower:
                break
            trial = list(rates)
            trial[idx] = lower[-1]
            if idx and trial[idx] < trial[idx - 1]:
                break
            lat = plan_latency(table, make_plan(n_blocks, positions, trial),
                               selector_ms)
            if lat > budget_ms + 1.0e-9:
                break
            rates = trial
    return rates


def model_evaluator(cfg, base_params, train_set, val_set, seed=0,
                    epochs=None):
    """ Accuracy oracle for progressive_schedule backed by the toy model.

        Each candidate is finetuned from the parameters of the candidate it
        extends, the accepted selectors without the newly inserted block,
        with selectors added where missing, and scored on the validation
        set.

        :rtype: callable
    """

    sched = cfg['schedule']
    epochs = sched['finetune_epochs'] if epochs is None else epochs
    tuned = {(): base_params}
    probe_off = dict(cfg, train=dict(cfg['train'], grad_probe=False))

    def _evaluate(rates_dct):
        key = tuple(sorted(rates_dct.items()))
        positions = [blk for blk, _ in key]
        cand_cfg = with_plan(probe_off, positions,
                             [rate for _, rate in key])
        if key not in tuned:
            parent = key[1:]
            params = add_selectors(tuned.get(parent, base_params),
                                   cand_cfg['arch'], seed)
            params, _ = fit(cand_cfg, params, train_set, seed=seed,
                            epochs=epochs)
            tuned[key] = params
        return evaluate(cand_cfg, tuned[key], val_set)['accuracy']

    return _evaluate
