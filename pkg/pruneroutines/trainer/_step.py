""" Training step, training loop and evaluation of the toy model
"""

import numpy
from prunelib.errors import DivergenceError
from prunelib.prune_io import printer
from prunelib.prune_io.parser.config import with_plan
from pruneroutines import numcore as nc
from pruneroutines.backbone import model_forward
from pruneroutines.latency import make_plan
from pruneroutines.latency import block_decisions
from pruneroutines.trainer._loss import total_loss
from pruneroutines.trainer._loss import loss_weights
from pruneroutines.trainer._optim import apply_update
from pruneroutines.trainer._optim import optimizer_from_config
from pruneroutines.trainer._calibrate import calibrate_selectors


PROBE_TOL = 1.0e-4
PROBE_SIZE = 2
EVAL_BATCH = 500


def model_loss(images, labels, cfg, params, seed=0, mode='train'):
    """ Training loss of a batch: the pruned forward against the unpruned
        forward of the same parameters as reference

        :param images: [B, Hpx, Wpx, ch]
        :param labels: [B]
        :param cfg: configuration
        :param params: parameters; tape variables for a differentiable loss
        :param seed: seed of the decision noise
        :param mode: decision mode, train, soft or random
        :rtype: (scalar, dict[str: float], numpy.ndarray)
    """

    arch, train_dct = cfg['arch'], cfg['train']
    frozen = {name: nc.value(val) for name, val in params.items()}
    ref_logits, _, _ = model_forward(
        images, arch, frozen, mode='infer', layout='masked',
        use_selectors=False)

    logits, decisions, kept = model_forward(
        images, arch, params, mode=mode, layout='masked', seed=seed)
    positions = arch['selector_positions']
    plan = make_plan(arch['n_blocks'], positions, arch['phase_rates'])

    loss, parts = total_loss(
        logits, labels, ref_logits,
        block_decisions(decisions, positions, arch['n_blocks']),
        plan['rates'], loss_weights(train_dct),
        temperature=train_dct['kl_temperature'],
        count_package=train_dct['count_package'])

    return loss, parts, kept


def train_step(batch, state, opt_state, cfg, seed=0, mode='train'):
    """ One gradient step on a batch

        :param batch: (images, labels)
        :param state: {'params': dict, 'step': int}
        :param opt_state: optimizer state
        :param cfg: configuration
        :param seed: seed of the decision noise of this step
        :param mode: decision mode of the selectors
        :rtype: (dict, dict, dict) new state, new optimizer state, record
        :raises DivergenceError: non-finite loss or gradient; carries the
            unchanged input state
    """

    images, labels = batch
    tape = nc.GradTape()
    leaves = tape.leaves(state['params'])
    loss, parts, kept = model_loss(images, labels, cfg, leaves, seed=seed,
                                   mode=mode)
    if not numpy.isfinite(parts['total']):
        raise DivergenceError(
            'Loss is {} at step {}'.format(parts['total'], state['step']),
            state=state)

    tape.backward(loss)
    grads = {name: (leaf.grad if leaf.grad is not None
                    else numpy.zeros_like(leaf.val))
             for name, leaf in leaves.items()}
    for name, grad in grads.items():
        if not numpy.all(numpy.isfinite(grad)):
            raise DivergenceError(
                'Gradient of {} is not finite at step {}'.format(
                    name, state['step']), state=state)

    params, opt_state = apply_update(state['params'], grads, opt_state)
    record = dict(parts)
    record['step'] = state['step']
    record['kept'] = kept.mean(axis=1).tolist()

    return {'params': params, 'step': state['step'] + 1}, opt_state, record


def probe_gradients(cfg, params, images, labels, seed=0, max_coords=None):
    """ Relative error of the tape gradient of the loss against central
        differences, on the soft relaxation of the decisions
    """
    def _loss(pdct):
        return model_loss(images, labels, cfg, pdct, seed=seed,
                          mode='soft')[0]

    return nc.grad_check(_loss, params, seed=seed, max_coords=max_coords)


def fit(cfg, params, train_set, seed=0, epochs=None, mode='train'):
    """ Train for a number of epochs over seeded shuffles of a data set.
        Selectors trained with sampled decisions get their keep threshold
        calibrated on the training images afterwards when train.calibrate
        is set.

        :param cfg: configuration
        :param params: initial parameters
        :param train_set: (images, labels)
        :param seed: seed of the shuffles and the decision noise
        :param epochs: number of epochs; train.epochs if None
        :param mode: decision mode of the selectors during training
        :rtype: (dict, list) final parameters and per-epoch records
    """

    train_dct = cfg['train']
    epochs = train_dct['epochs'] if epochs is None else epochs
    images, labels = train_set
    nsamp, bsz = len(labels), train_dct['batch_size']

    if train_dct['grad_probe'] and epochs > 0 and mode == 'train':
        rel_err = probe_gradients(
            cfg, params, images[:PROBE_SIZE], labels[:PROBE_SIZE], seed=seed,
            max_coords=train_dct['probe_coords'])
        printer.train.probe_check(rel_err, PROBE_TOL)

    state = {'params': params, 'step': 0}
    opt_state = optimizer_from_config(params, train_dct)
    rng = numpy.random.default_rng(seed)
    history = []
    for epoch in range(epochs):
        order = rng.permutation(nsamp)
        recs = []
        for start in range(0, nsamp, bsz):
            idx = order[start:start + bsz]
            state, opt_state, rec = train_step(
                (images[idx], labels[idx]), state, opt_state, cfg,
                seed=step_seed(seed, state['step']), mode=mode)
            printer.train.step(rec['step'], {
                key: rec[key] for key in ('total', 'cls', 'kl', 'ratio')})
            recs.append(rec)
        summary = {key: float(numpy.mean([rec[key] for rec in recs]))
                   for key in ('total', 'cls', 'kl', 'distill', 'ratio')}
        summary['kept'] = numpy.mean(
            [rec['kept'] for rec in recs], axis=0).tolist()
        summary['epoch'] = epoch
        printer.train.epoch(epoch, epochs, summary, summary['kept'][1:])
        history.append(summary)

    params = state['params']
    if (train_dct['calibrate'] and mode == 'train' and epochs > 0 and
            cfg['arch']['selector_positions']):
        params = calibrate_selectors(cfg, params, images)

    return params, history


def warmup(cfg, params, train_set, seed=0, epochs=None):
    """ Train the backbone alone, selectors off, at the warmup learning
        rate; the starting point shared by a pruned model and its
        unpruned control

        :param epochs: number of epochs; train.warmup_epochs if None
        :rtype: (dict, list) parameters and per-epoch records
    """
    train_dct = cfg['train']
    epochs = train_dct['warmup_epochs'] if epochs is None else epochs
    plain = with_plan(cfg, [], [])
    plain['train'] = dict(train_dct, lr_backbone=train_dct['lr_warmup'],
                          grad_probe=False)
    return fit(plain, params, train_set, seed=seed, epochs=epochs)


def evaluate(cfg, params, data_set, use_selectors=True, mode='infer',
             seed=0):
    """ Accuracy in percent and mean kept fraction per phase in the
        batched masked layout, with deterministic decisions unless another
        mode is given

        :rtype: dict
    """
    images, labels = data_set
    correct, kept = 0, []
    for start in range(0, len(labels), EVAL_BATCH):
        stop = start + EVAL_BATCH
        logits, _, frac = model_forward(
            images[start:stop], cfg['arch'], params, mode=mode,
            layout='masked', use_selectors=use_selectors,
            seed=step_seed(seed, start))
        correct += int(numpy.sum(numpy.argmax(logits, axis=-1) ==
                                 labels[start:stop]))
        kept.append(frac)
    kept = numpy.concatenate(kept, axis=1)
    return {'accuracy': 100.0 * correct / len(labels),
            'kept': kept.mean(axis=1).tolist()}


def step_seed(seed, step):
    """ Integer seed of the decision noise of one step
    """
    return int(numpy.random.default_rng((seed, step)).integers(2**31 - 1))
