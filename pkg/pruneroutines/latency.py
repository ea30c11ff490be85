""" Latency-sparsity lookup, pruning plans under a latency budget and the
    latency-aware sparsity loss.

    A latency table maps a per-block pruning rate to the measured latency
    of one block on a device. A pruning plan assigns every block the
    cumulative pruned fraction of the patch tokens of its phase: zero
    before the first selector, then the rate of the last selector run.
"""

import os
import itertools
import numpy
import pandas
from prunelib.errors import ConfigError
from prunelib.errors import ValidationError
from prunelib.errors import RangeError
from prunelib.errors import InfeasibleBudgetError
from pruneroutines import numcore as nc


TABLE_COLUMNS = ['rate', 'latency_ms']
LAT_TOL = 1.0e-9
RATE_TOL = 1.0e-12


# Tables
def load_table(path, device=None):
    """ Read and validate a latency table

        :param path: CSV file with header rate,latency_ms
        :type path: str
        :param device: device name; the file stem if None
        :type device: str
        :rtype: dict with 'device', 'rates' and 'latency_ms'
    """

    try:
        frame = pandas.read_csv(path, skipinitialspace=True, comment='#',
                                dtype=str)
    except (pandas.errors.ParserError, pandas.errors.EmptyDataError) as err:
        raise ValidationError(
            'Latency table {} is malformed: {}'.format(path, err))

    if list(frame.columns) != TABLE_COLUMNS:
        raise ValidationError(
            'Latency table {} must have header {}, found {}'.format(
                path, ','.join(TABLE_COLUMNS), ','.join(frame.columns)))
    if len(frame) < 2:
        raise ValidationError(
            'Latency table {} needs at least 2 rows'.format(path))

    vals = {}
    for col in TABLE_COLUMNS:
        vals[col] = pandas.to_numeric(frame[col], errors='coerce').to_numpy()
        bad = numpy.flatnonzero(~numpy.isfinite(vals[col]))
        if bad.size:
            raise ValidationError(
                'Latency table {} row {}: {} is not a number'.format(
                    path, bad[0] + 1, frame[col].iloc[bad[0]]))

    if device is None:
        device = os.path.splitext(os.path.basename(path))[0]

    return make_table(device, vals['rate'], vals['latency_ms'])


def make_table(device, rates, latency_ms):
    """ Validated latency table from two sequences

        :raises ValidationError: naming the first offending row (1-based)
    """

    rates = numpy.asarray(rates, dtype=numpy.float64)
    lats = numpy.asarray(latency_ms, dtype=numpy.float64)
    if rates.shape != lats.shape or rates.ndim != 1 or rates.size < 2:
        raise ValidationError('Latency table needs two equal columns of at '
                              'least 2 rows')
    for idx, (rate, lat) in enumerate(zip(rates, lats)):
        row = idx + 1
        if not 0.0 <= rate < 1.0:
            raise ValidationError(
                'Latency table row {}: rate {} not in [0, 1)'.format(
                    row, rate))
        if lat <= 0.0:
            raise ValidationError(
                'Latency table row {}: latency {} not positive'.format(
                    row, lat))
        if idx and rate <= rates[idx - 1]:
            raise ValidationError(
                'Latency table row {}: rates must strictly increase'.format(
                    row))
        if idx and lat >= lats[idx - 1]:
            raise ValidationError(
                'Latency table row {}: latencies must strictly '
                'decrease'.format(row))

    return {'device': device, 'rates': rates, 'latency_ms': lats}


def write_table(table, path):
    """ Write a latency table as CSV
    """
    frame = pandas.DataFrame({'rate': table['rates'],
                              'latency_ms': table['latency_ms']})
    frame.to_csv(path, index=False, columns=TABLE_COLUMNS)


def block_lat(table, rate):
    """ Latency of one block at a pruning rate; exact at table points and
        linearly interpolated between them

        :raises RangeError: rate outside the measured range
    """
    rates = table['rates']
    if rate < rates[0] - RATE_TOL or rate > rates[-1] + RATE_TOL:
        raise RangeError(
            'Rate {} outside the table range [{}, {}]'.format(
                rate, rates[0], rates[-1]))
    return float(numpy.interp(rate, rates, table['latency_ms']))


# Plans
def make_plan(n_blocks, positions, phase_rates):
    """ Pruning plan: per-block rates from selector positions and the
        cumulative rate of every phase

        :param n_blocks: number of blocks L
        :param positions: block index at which each phase starts
        :param phase_rates: cumulative pruned fraction of each phase
        :rtype: dict with 'positions', 'phase_rates' and per-block 'rates'
    """

    positions, phase_rates = tuple(positions), tuple(phase_rates)
    if len(positions) != len(phase_rates):
        raise ConfigError('{} phase rates for {} selectors'.format(
            len(phase_rates), len(positions)))
    check_plan_positions(n_blocks, positions)
    if any(not 0.0 <= rate < 1.0 for rate in phase_rates):
        raise ConfigError('Phase rates {} not in [0, 1)'.format(
            list(phase_rates)))
    if any(nxt < prev for prev, nxt in zip(phase_rates, phase_rates[1:])):
        raise ConfigError('Phase rates {} decrease'.format(list(phase_rates)))

    rates, cur = [], 0.0
    for blk in range(n_blocks):
        if blk in positions:
            cur = phase_rates[positions.index(blk)]
        rates.append(cur)

    return {'positions': positions,
            'phase_rates': tuple(float(rate) for rate in phase_rates),
            'rates': tuple(rates)}


def check_plan_positions(n_blocks, positions):
    """ Selector positions must be strictly increasing integer block
        indices in [0, n_blocks - 1]
    """
    if isinstance(n_blocks, bool) or not isinstance(n_blocks, int) or (
            n_blocks <= 0):
        raise ConfigError('Block count must be a positive integer, got '
                          '{}'.format(n_blocks))
    for pos in positions:
        if isinstance(pos, bool) or not isinstance(pos, (int, numpy.integer)):
            raise ConfigError(
                'Selector position {} is not an integer'.format(pos))
    if any(not 0 <= pos < n_blocks for pos in positions):
        raise ConfigError('Selector positions {} outside [0, {}]'.format(
            list(positions), n_blocks - 1))
    if any(nxt <= prev for prev, nxt in zip(positions, positions[1:])):
        raise ConfigError('Selector positions {} not increasing'.format(
            list(positions)))


def plan_latency(table, plan, selector_ms=0.0):
    """ Sum of the block latencies of a plan, plus a fixed delay per
        selector
    """
    lat = sum(block_lat(table, rate) for rate in plan['rates'])
    return lat + selector_ms * len(plan['positions'])


def rate_grid(table, grid_step=0.05, max_rate=None):
    """ Rates from the first table rate to the last (or to max_rate) in
        steps of grid_step, rounded to 10 decimals
    """
    if grid_step <= 0.0:
        raise ConfigError('Grid step must be positive')
    top = table['rates'][-1] if max_rate is None else min(
        max_rate, table['rates'][-1])
    nsteps = int(numpy.floor((top - table['rates'][0]) / grid_step + 1.0e-9))
    return tuple(round(table['rates'][0] + grid_step * idx, 10)
                 for idx in range(nsteps + 1))


def solve_budget(table, n_blocks, positions, budget_ms, grid_step=0.05,
                 selector_ms=0.0, max_rate=None):
    """ Least pruning that meets a latency budget.

        Every nondecreasing assignment of grid rates to the phases is
        checked; among those within budget the one with the smallest sum
        of per-block rates is returned, and among equal sums the one with
        the lowest rates in the earliest phases.

        :param table: latency table
        :param n_blocks: number of blocks L
        :param positions: block index at which each phase starts
        :param budget_ms: latency budget
        :param grid_step: step of the rate grid
        :param selector_ms: fixed delay per selector
        :param max_rate: highest rate tried; the last table rate if None
        :rtype: dict (pruning plan) with 'latency_ms' added
        :raises InfeasibleBudgetError: carrying the smallest reachable
            latency
    """

    positions = tuple(positions)
    check_plan_positions(n_blocks, positions)
    grid = rate_grid(table, grid_step, max_rate)
    bounds = positions + (n_blocks,)
    counts = [bounds[idx + 1] - bounds[idx] for idx in range(len(positions))]
    n_pre = positions[0] if positions else n_blocks
    lat_dct = {rate: block_lat(table, rate) for rate in grid}
    base = n_pre * block_lat(table, 0.0) + selector_ms * len(positions)

    best, best_key, min_lat = None, None, None
    for rates in itertools.combinations_with_replacement(grid, len(positions)):
        lat = base + sum(cnt * lat_dct[rate]
                         for cnt, rate in zip(counts, rates))
        min_lat = lat if min_lat is None else min(min_lat, lat)
        if lat > budget_ms + LAT_TOL:
            continue
        key = (round(sum(cnt * rate for cnt, rate in zip(counts, rates)), 10),
               rates)
        if best_key is None or key < best_key:
            best, best_key = rates, key

    if best is None:
        raise InfeasibleBudgetError(
            'No plan meets the budget of {:.4f} ms; the smallest reachable '
            'latency is {:.4f} ms'.format(budget_ms, min_lat), min_lat)

    plan = make_plan(n_blocks, positions, best)
    plan['latency_ms'] = plan_latency(table, plan, selector_ms)
    return plan


# Sparsity loss
def block_decisions(decisions, positions, n_blocks):
    """ Per-block list of the decisions in force; None before the first
        selector
    """
    out, cur = [], None
    for blk in range(n_blocks):
        if blk in positions:
            cur = decisions[list(positions).index(blk)]
        out.append(cur)
    return out


def kept_fraction(decision, count_package=False):
    """ Per-image kept fraction of the prunable tokens of a decision;
        package slots count as prunable when count_package is set

        :rtype: [B]
    """
    mask = decision['mask']
    ntok = nc.value(mask).shape[-1]
    skip = set(decision['protected'])
    if count_package:
        skip -= set(decision.get('package', ()))
    cols = [idx for idx in range(ntok) if idx not in skip]
    return nc.mul(nc.sum_(nc.take(mask, cols, -1), axis=-1), 1.0 / len(cols))


def sparsity_loss(decisions, rates, count_package=False):
    """ Sum over blocks of the squared gap between the target keep ratio
        1 - rate and the batch-mean kept fraction

        :param decisions: per-block keep decisions; None means nothing
            was pruned yet
        :param rates: per-block target rates
        :rtype: scalar (tape variable if any mask is one)
    """
    if len(decisions) != len(rates):
        raise ConfigError('{} decisions for {} rates'.format(
            len(decisions), len(rates)))

    loss = numpy.zeros(())
    for decision, rate in zip(decisions, rates):
        if decision is None:
            kept = numpy.ones(())
        else:
            kept = nc.mean(kept_fraction(decision, count_package))
        loss = nc.add(loss, nc.square(nc.sub(1.0 - rate, kept)))
    return loss
