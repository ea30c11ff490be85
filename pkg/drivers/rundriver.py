""" Driver for running trained weights on one image in the pruned layout
"""

import numpy
from prunelib import synth
from prunelib.errors import DimensionError
from prunelib.prune_io import printer as ioprinter
from prunelib.prune_io import reader
from prunelib.prune_io import writer
from prunelib.prune_io._path import output_path
from pruneroutines.backbone import model_forward
from pruneroutines.backbone import token_counts


def run(cfg, weights_path, digest, seed=0, input_path=None, mode='infer',
        dump_dir=None):
    """ main driver for single-image inference

        :param cfg: configuration
        :type cfg: dict[str: dict]
        :param weights_path: weight file written by the train driver
        :type weights_path: str
        :param digest: digest the weights must carry
        :type digest: str
        :param input_path: PGM image; a synthetic sample if None
        :type input_path: str
        :param mode: infer for deterministic decisions, train to sample
        :type mode: str
        :param dump_dir: directory for the keep mask graymaps, or None
        :type dump_dir: str
        :rtype: dict[str: obj]
    """

    arch = cfg['arch']
    params, _ = reader.read_weights(weights_path, digest=digest)
    image, label = _input_image(cfg, input_path, seed)

    logits, decisions, kept = model_forward(
        image[None], arch, params, mode=mode, layout='pruned', seed=seed)

    n_pat, n_cls, _ = token_counts(arch)
    side = arch['image_size'] // arch['patch_size']
    phase_masks = [dec['mask'][0, n_cls:n_cls + n_pat] for dec in decisions]
    for phase, (pos, mask) in enumerate(
            zip(arch['selector_positions'], phase_masks)):
        ioprinter.info_message(
            'Phase {} (block {}), kept {} of {} patches:'.format(
                phase, pos, int(mask.sum()), n_pat), newline=1)
        ioprinter.info_message(writer.mask_grid(mask, side))

    outputs = {
        'input': input_path,
        'label': label,
        'prediction': int(numpy.argmax(logits[0])),
        'logits': logits[0].tolist(),
        'kept': kept[:, 0].tolist(),
        'masks': [mask.astype(int).tolist() for mask in phase_masks],
    }
    if dump_dir is not None:
        outputs['mask_files'] = writer.write_masks(
            output_path(dump_dir), phase_masks, side)
    ioprinter.info_message(
        'Prediction: class {}'.format(outputs['prediction']), newline=1)

    return outputs


def _input_image(cfg, input_path, seed):
    """ Image from a graymap file, or one synthetic sample and its label
    """
    arch = cfg['arch']
    if input_path is None:
        images, labels = synth.blob_dataset(
            1, arch['n_classes'], arch['image_size'], arch['in_chans'],
            noise=cfg['data']['noise'], seed=seed)
        return images[0], int(labels[0])

    image = reader.read_pgm(input_path)
    if image.shape[:2] != (arch['image_size'], arch['image_size']):
        raise DimensionError(
            'Image {} is {}x{}, the model takes {}x{}'.format(
                input_path, image.shape[0], image.shape[1],
                arch['image_size'], arch['image_size']))
    return numpy.repeat(image, arch['in_chans'], axis=2), None
