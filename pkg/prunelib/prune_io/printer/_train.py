"""
  Training progress messages
"""

from prunelib.prune_io.printer._print import info_message
from prunelib.prune_io.printer._print import warning_message
from prunelib.prune_io.printer._print import debug_message


def epoch(epoch_idx, n_epochs, loss_dct, kept_frac):
    """ Print the running loss components at the end of an epoch
    """
    info_message(
        'Epoch {:>3d}/{:<3d} loss {:.5f} (cls {:.5f} kl {:.5f} '
        'ratio {:.5f}) kept {}'.format(
            epoch_idx + 1, n_epochs, loss_dct['total'], loss_dct['cls'],
            loss_dct['kl'], loss_dct['ratio'],
            ' '.join('{:.3f}'.format(frac) for frac in kept_frac)),
        indent=1)


def probe_check(rel_err, tol):
    """ Print the result of the gradient probe run before training
    """
    if rel_err <= tol:
        info_message(
            'Gradient probe relative error {:.2e} (tol {:.0e})'.format(
                rel_err, tol), indent=1)
    else:
        warning_message(
            'Gradient probe relative error {:.2e} exceeds {:.0e}'.format(
                rel_err, tol), indent=1)


def step(step_idx, components):
    """ Print one optimizer step, only in debug mode
    """
    debug_message(
        'step {} '.format(step_idx) +
        ' '.join('{}={:.6f}'.format(key, val)
                 for key, val in sorted(components.items())))


def accuracy(label, acc):
    """ Print an accuracy in percent
    """
    info_message('{} accuracy: {:.2f}%'.format(label, acc), indent=1)


def calibration(phase, shift, kept, target):
    """ Print the keep threshold chosen for one selector
    """
    info_message(
        'Selector {} margin shift {:+.4f}: kept {:.3f} '
        '(target {:.3f})'.format(phase, shift, kept, target), indent=1)


def control(label, acc, ref_acc):
    """ Print an accuracy next to that of the unpruned control
    """
    info_message('{} accuracy: {:.2f}% ({:+.2f} against the unpruned '
                 'control)'.format(label, acc, acc - ref_acc), indent=1)
