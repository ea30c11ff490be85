""" Central execution script of autoprune. Parses the command line and
    the configuration, then launches the driver of the requested command:

        analyze   mul-add counts of the model and its pruning plan
        latency   latency of the plan from a latency-sparsity table
        plan      phase rates under a latency budget
        train     selector and backbone training on synthetic data
        run       pruned inference of trained weights on one image

    Messages go to standard error and the JSON report of the command to
    standard output (or to --out). The process returns 0 on success and
    the exit code of the error otherwise.
"""

import os
import sys
import time
from prunelib.errors import PruneError
from prunelib.prune_io import _path
from prunelib.prune_io import parser as ioparser
from prunelib.prune_io import printer as ioprinter
from prunelib.prune_io import writer
from pruneroutines import latency
from drivers import analyzedriver
from drivers import latdriver
from drivers import plandriver
from drivers import traindriver
from drivers import rundriver


def main(argv=None):
    """ Run one command and return the process exit code
    """

    args = ioparser.args.command_line(argv)
    ioprinter.set_debug(args.debug)

    # Print the header message and host name
    ioprinter.program_header('autoprune')
    ioprinter.host_name()

    try:
        _run_command(args)
    except PruneError as err:
        ioprinter.pruning_error(err)
        return err.exit_code

    ioprinter.obj('vspace')
    ioprinter.program_exit('autoprune')
    return 0


def _run_command(args):
    """ Parse the configuration, dispatch to the driver and write the
        report
    """

    cfg = ioparser.config.read_config(args.config)
    if args.policy is not None:
        cfg['arch']['package_policy'] = args.policy
    digest = ioparser.config.config_digest(cfg)
    seed = cfg['train']['seed'] if args.seed is None else args.seed
    ioprinter.driver_tasks(args.command, args.config, digest)

    start = time.perf_counter()
    ioprinter.program_header(args.command)

    if args.command == 'analyze':
        outputs = analyzedriver.run(
            cfg, strategy_compare=args.strategy_compare, rate=args.rate,
            reduction=args.reduction)
    elif args.command == 'latency':
        outputs = latdriver.run(
            cfg, _table(args), selector_ms=_selector_ms(args, cfg),
            rate=args.rate)
    elif args.command == 'plan':
        outputs = plandriver.run(
            cfg, _table(args), args.budget_ms, seed=seed,
            positions=args.positions, grid_step=args.grid_step,
            selector_ms=_selector_ms(args, cfg),
            progressive=args.progressive, history_path=args.history)
    elif args.command == 'train':
        outputs = traindriver.run(
            cfg, args.weights, digest, seed=seed, epochs=args.epochs,
            cka=args.cka, control=not args.no_control,
            baselines=args.baselines)
    else:
        outputs = rundriver.run(
            cfg, args.weights, digest, seed=seed, input_path=args.input,
            mode=args.mode, dump_dir=args.dump_dir)

    ioprinter.program_exit(args.command)

    rep = writer.report(args.command, digest, outputs, seed,
                        time.perf_counter() - start)
    writer.write_report(rep, args.out)


def _table(args):
    """ Latency table named on the command line, or the one that goes
        with the configuration preset
    """
    name = args.table if args.table is not None else _path.table_name(
        args.config)
    path = name if os.path.exists(name) else _path.preset_path(name, 'csv')
    return latency.load_table(path, device=args.device)


def _selector_ms(args, cfg):
    if args.selector_ms is not None:
        return args.selector_ms
    return cfg['arch']['selector_ms']


if __name__ == '__main__':
    sys.exit(main())
