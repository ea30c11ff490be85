""" Keep threshold of trained selectors.

    Sampled decisions let a selector meet its keep ratio on average while
    its keep probabilities sit on one side of 1/2, and the deterministic
    decision of inference then keeps or drops nearly everything. Each
    selector, first phase first, gets one shift of the keep-minus-prune
    logit of all its heads, found by bisection, so that the deterministic
    kept fraction on the calibration images comes closest to its target.
"""

import numpy
from prunelib.prune_io import printer
from pruneroutines.selector import shift_keep_margin
from pruneroutines.backbone import model_forward
from pruneroutines.backbone import selector_prefix


SHIFT_SPAN = 40.0
SHIFT_ITERS = 48
EVAL_BATCH = 500


def calibrate_selectors(cfg, params, images):
    """ Parameters whose selectors keep, in infer mode, the fraction of
        patch tokens closest to 1 - rate of their phase

        :param cfg: configuration
        :param params: trained parameters
        :param images: calibration images [B, Hpx, Wpx, ch]
        :rtype: dict
    """

    arch = cfg['arch']
    params = dict(params)
    for phase, pos in enumerate(arch['selector_positions']):
        target = 1.0 - arch['phase_rates'][phase]
        prefix = selector_prefix(pos)
        shift, kept = _search_shift(arch, params, images, prefix, phase,
                                    target)
        params = shift_keep_margin(params, prefix, arch['n_heads'], shift)
        printer.train.calibration(phase, shift, kept, target)

    return params


def infer_kept(arch, params, images):
    """ Mean kept fraction of the patch tokens per phase under
        deterministic decisions

        :rtype: numpy.ndarray [phases + 1]
    """
    kept = []
    for start in range(0, len(images), EVAL_BATCH):
        _, _, frac = model_forward(images[start:start + EVAL_BATCH], arch,
                                   params, mode='infer', layout='masked')
        kept.append(frac)
    return numpy.concatenate(kept, axis=1).mean(axis=1)


def _search_shift(arch, params, images, prefix, phase, target):
    """ Bisection on the shift with kept(lo) < target <= kept(hi)
    """

    def _kept(shift):
        trial = shift_keep_margin(params, prefix, arch['n_heads'], shift)
        return float(infer_kept(arch, trial, images)[phase + 1])

    lo, hi = -SHIFT_SPAN, SHIFT_SPAN
    k_lo, k_hi = _kept(lo), _kept(hi)
    if k_hi <= target:
        return hi, k_hi
    if k_lo >= target:
        return lo, k_lo

    for _ in range(SHIFT_ITERS):
        mid = 0.5 * (lo + hi)
        k_mid = _kept(mid)
        if k_mid >= target:
            hi, k_hi = mid, k_mid
        else:
            lo, k_lo = mid, k_mid

    if k_hi - target <= target - k_lo:
        return hi, k_hi
    return lo, k_lo
