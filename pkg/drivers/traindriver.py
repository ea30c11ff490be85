""" Driver for training token selectors and backbone on synthetic data.

    Main Workflow:
        (1) Build the training and validation sets
        (2) Initialize the backbone and one selector per phase
        (3) Warm up the backbone alone at the warmup learning rate
        (4) From the warm backbone, train the pruned model with the
            classification, distillation and ratio losses, and the
            unpruned control under the same seed and schedule
        (5) Train the requested baselines: random token dropping at the
            same rates, and a narrower plain model at the same count
        (6) Score everything on validation data
        (7) Write the pruned weights tagged with the configuration digest
"""

from prunelib import synth
from prunelib.prune_io import printer as ioprinter
from prunelib.prune_io import writer
from prunelib.prune_io.parser.config import with_plan
from prunelib.prune_io.parser.config import with_widths
from pruneroutines import trainer
from pruneroutines import costmodel
from pruneroutines.backbone import init_params
from pruneroutines.backbone import model_forward


def run(cfg, weights_path, digest, seed=0, epochs=None, cka=False,
        control=True, baselines=None):
    """ main driver for training

        :param cfg: configuration
        :type cfg: dict[str: dict]
        :param weights_path: weight file to write
        :type weights_path: str
        :param digest: configuration digest stored with the weights
        :type digest: str
        :param seed: seed of the initialization and the training noise
        :type seed: int
        :param epochs: number of epochs after warmup; train.epochs if None
        :type epochs: int
        :param cka: report block similarities with the final class token
        :type cka: bool
        :param control: train the unpruned control
        :type control: bool
        :param baselines: baselines to train; train.baselines if None
        :type baselines: list(str)
        :rtype: dict[str: obj]
    """

    arch = cfg['arch']
    if baselines is None:
        baselines = cfg['train']['baselines']

    # ------------- #
    # DATA AND INIT #
    # ------------- #

    train_set, val_set = synth.train_validation_sets(
        cfg['data'], arch['n_classes'], arch['image_size'], arch['in_chans'])
    params = init_params(arch, seed)
    ioprinter.info_message(
        'Training on {} images, validating on {}'.format(
            len(train_set[1]), len(val_set[1])), newline=1)

    # ------ #
    # WARMUP #
    # ------ #

    if cfg['train']['warmup_epochs']:
        ioprinter.info_message('Warming up the backbone', newline=1)
    warm, warm_history = trainer.warmup(cfg, params, train_set, seed=seed)

    # -------------------- #
    # TRAIN AND VALIDATE   #
    # -------------------- #

    ioprinter.info_message('Training the pruned model', newline=1)
    params, history = trainer.fit(cfg, warm, train_set, seed=seed,
                                  epochs=epochs)
    pruned = trainer.evaluate(cfg, params, val_set)
    ioprinter.train.accuracy('Pruned', pruned['accuracy'])

    writer.write_weights(weights_path, params, digest)
    ioprinter.info_message(
        'Weights written to {}'.format(weights_path), newline=1)

    outputs = {
        'weights': weights_path,
        'warmup_epochs': len(warm_history),
        'epochs': len(history),
        'history': history,
        'accuracy': pruned['accuracy'],
        'kept': pruned['kept'],
        'train_kept': history[-1]['kept'] if history else None,
        'flops': costmodel.model_flops(arch)['total'],
    }

    # ---------------- #
    # UNPRUNED CONTROL #
    # ---------------- #

    if control:
        ioprinter.info_message('Training the unpruned control', newline=1)
        plain_cfg = with_plan(cfg, [], [])
        plain, _ = trainer.fit(plain_cfg, warm, train_set, seed=seed,
                               epochs=epochs)
        ctrl = trainer.evaluate(plain_cfg, plain, val_set)
        ioprinter.train.control('Pruned', pruned['accuracy'],
                                ctrl['accuracy'])
        outputs['control'] = {
            'accuracy': ctrl['accuracy'],
            'gap': ctrl['accuracy'] - pruned['accuracy'],
            'flops': costmodel.model_flops(plain_cfg['arch'])['total'],
        }

    # --------- #
    # BASELINES #
    # --------- #

    if baselines:
        outputs['baselines'] = {}
    if 'random' in baselines:
        outputs['baselines']['random'] = _random_baseline(
            cfg, warm, train_set, val_set, seed, epochs)
    if 'structure' in baselines:
        outputs['baselines']['structure'] = _structure_baseline(
            cfg, train_set, val_set, seed, epochs)

    # ------------------ #
    # BLOCK SIMILARITIES #
    # ------------------ #

    if cka:
        features = []
        model_forward(val_set[0], arch, params, mode='infer',
                      layout='masked', use_selectors=False,
                      features=features)
        sims = trainer.block_cls_similarity(
            features, arch['use_cls_token'])
        for blk, sim in enumerate(sims):
            ioprinter.info_message(
                'block {:>2d} CKA {:.4f}'.format(blk, sim), indent=1)
        outputs['cka'] = sims

    return outputs


def _random_baseline(cfg, warm, train_set, val_set, seed, epochs):
    """ Same rates, tokens dropped at random whatever their content
    """
    ioprinter.info_message('Training the random-dropping baseline',
                           newline=1)
    params, _ = trainer.fit(cfg, warm, train_set, seed=seed, epochs=epochs,
                            mode='random')
    out = trainer.evaluate(cfg, params, val_set, mode='random', seed=seed)
    ioprinter.train.accuracy('Random dropping', out['accuracy'])
    return {'accuracy': out['accuracy'], 'kept': out['kept'],
            'flops': costmodel.model_flops(cfg['arch'])['total']}


def _structure_baseline(cfg, train_set, val_set, seed, epochs):
    """ Plain model narrowed to the count of the pruned one, trained from
        its own initialization under the same warmup and schedule
    """
    widths = costmodel.structure_widths(cfg['arch'])
    narrow_cfg = with_widths(cfg, widths['embed_dim'], widths['attn_dim'],
                             widths['fc_dim'])
    ioprinter.info_message(
        'Training the structure baseline: width {}, attention {}, '
        'FFN {}'.format(widths['embed_dim'], widths['attn_dim'],
                        widths['fc_dim']), newline=1)
    params = init_params(narrow_cfg['arch'], seed)
    params, _ = trainer.warmup(narrow_cfg, params, train_set, seed=seed)
    params, _ = trainer.fit(narrow_cfg, params, train_set, seed=seed,
                            epochs=epochs)
    out = trainer.evaluate(narrow_cfg, params, val_set)
    ioprinter.train.accuracy('Structure pruning', out['accuracy'])
    return {'accuracy': out['accuracy'], 'flops': widths['total'],
            'embed_dim': widths['embed_dim'],
            'attn_dim': widths['attn_dim'], 'fc_dim': widths['fc_dim']}
