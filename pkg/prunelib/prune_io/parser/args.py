""" Command-line surface of bin/autoprune.py

    Every subcommand shares --config, --seed, --out, --policy and --debug;
    the command-specific options follow.
"""

import argparse


COMMANDS = ('analyze', 'latency', 'plan', 'train', 'run')
BASELINES = ('random', 'structure')


def command_line(argv=None):
    """ Parse the command line into a namespace

        :param argv: arguments after the program name; sys.argv if None
        :type argv: list(str)
        :rtype: argparse.Namespace
    """
    return _parser().parse_args(argv)


def position_list(pos_str):
    """ Comma-separated block indices, as given to --positions
    """
    try:
        return [int(pos) for pos in pos_str.split(',') if pos.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            'positions must be comma-separated integers: {}'.format(pos_str))


def baseline_list(name_str):
    """ Comma-separated baseline names, as given to --baselines
    """
    names = [name.strip() for name in name_str.split(',') if name.strip()]
    for name in names:
        if name not in BASELINES:
            raise argparse.ArgumentTypeError(
                'unknown baseline {}; choose from {}'.format(
                    name, ', '.join(BASELINES)))
    return list(dict.fromkeys(names))


def _parser():
    """ Build the parser with one subparser per command
    """

    parser = argparse.ArgumentParser(
        prog='autoprune',
        description='Latency-aware soft token pruning for vision '
                    'transformers')
    subparsers = parser.add_subparsers(dest='command')
    subparsers.required = True

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        '--config', default='deit_t',
        help='YAML configuration file or preset name (deit_t, deit_s, toy)')
    common.add_argument(
        '--seed', type=int, default=None,
        help='seed of every random stream; train.seed when omitted')
    common.add_argument(
        '--out', default=None,
        help='write the JSON report here instead of standard output')
    common.add_argument(
        '--policy', default=None,
        choices=('concat_per_phase', 'merge_single', 'none'),
        help='override arch.package_policy')
    common.add_argument(
        '--debug', action='store_true',
        help='print debug messages')

    table = argparse.ArgumentParser(add_help=False)
    table.add_argument(
        '--table', default=None,
        help='latency table CSV or preset name; <config>_zcu102 when '
             'omitted')
    table.add_argument(
        '--device', default=None,
        help='device name reported for the table; the file stem when '
             'omitted')
    table.add_argument(
        '--selector-ms', type=float, default=None,
        help='fixed delay per selector; arch.selector_ms when omitted')

    sub = subparsers.add_parser(
        'analyze', parents=[common],
        help='count mul-adds of a configuration and its pruning plan')
    sub.add_argument('--strategy-compare', action='store_true',
                     help='compare token, channel and head pruning')
    sub.add_argument('--rate', type=float, default=0.5,
                     help='pruning ratio of the strategy comparison')
    sub.add_argument('--reduction', type=float, default=None,
                     help='solve geometric phase rates for this relative '
                          'reduction of mul-adds')

    sub = subparsers.add_parser(
        'latency', parents=[common, table],
        help='estimate the latency of the configured plan')
    sub.add_argument('--rate', type=float, default=None,
                     help='also look up one block at this rate')

    sub = subparsers.add_parser(
        'plan', parents=[common, table],
        help='solve for phase rates under a latency budget')
    sub.add_argument('--budget-ms', type=float, required=True,
                     help='latency budget in ms')
    sub.add_argument('--positions', type=position_list, default=None,
                     help='phase start blocks, such as 0 or 3,6,9; '
                          'arch.selector_positions when omitted')
    sub.add_argument('--grid-step', type=float, default=None,
                     help='step of the rate grid; schedule.grid_step when '
                          'omitted')
    sub.add_argument('--progressive', action='store_true',
                     help='run the progressive insertion search with the '
                          'toy model as evaluator')
    sub.add_argument('--history', default=None,
                     help='JSON-lines file for the progressive search '
                          'history')

    sub = subparsers.add_parser(
        'train', parents=[common],
        help='train selectors and backbone on synthetic data')
    sub.add_argument('--weights', required=True,
                     help='where to write the trained weights')
    sub.add_argument('--epochs', type=int, default=None,
                     help='override train.epochs')
    sub.add_argument('--cka', action='store_true',
                     help='report the CKA of every block with the final '
                          'class token')
    sub.add_argument('--no-control', action='store_true',
                     help='skip training the unpruned control')
    sub.add_argument('--baselines', type=baseline_list, default=None,
                     help='comma-separated baselines to train (random, '
                          'structure); train.baselines when omitted')

    sub = subparsers.add_parser(
        'run', parents=[common],
        help='run the pruned model on one image')
    sub.add_argument('--weights', required=True,
                     help='weight file written by the train command')
    sub.add_argument('--input', default=None,
                     help='PGM image; a synthetic sample when omitted')
    sub.add_argument('--mode', default='infer', choices=('train', 'infer'),
                     help='deterministic (infer) or sampled (train) '
                          'decisions')
    sub.add_argument('--dump-dir', default=None,
                     help='write the keep mask of each phase as PGM here')

    return parser
