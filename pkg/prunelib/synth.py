""" Synthetic image classification data.

    Each class owns a Gaussian blob whose center sits on a circle around
    the image center; a sample is the class blob, jittered, on top of
    white noise.
"""

import numpy


def blob_dataset(n_samples, n_classes, image_size, in_chans=1,
                 noise=0.3, seed=0):
    """ Build a labeled set of blob images.

        :param n_samples: number of images
        :type n_samples: int
        :param n_classes: number of classes
        :type n_classes: int
        :param image_size: side length of the square images in pixels
        :type image_size: int
        :param in_chans: number of channels
        :type in_chans: int
        :param noise: standard deviation of the additive pixel noise
        :type noise: float
        :param seed: seed of the generator
        :type seed: int
        :rtype: (numpy.ndarray, numpy.ndarray)
    """

    rng = numpy.random.default_rng(seed)
    labels = rng.integers(0, n_classes, size=n_samples)

    half = (image_size - 1) / 2.0
    radius = image_size / 4.0
    angles = 2.0 * numpy.pi * numpy.arange(n_classes) / n_classes
    centers = numpy.stack(
        [half + radius * numpy.cos(angles),
         half + radius * numpy.sin(angles)], axis=1)

    jitter = rng.normal(0.0, 0.5, size=(n_samples, 2))
    rows, cols = numpy.meshgrid(
        numpy.arange(image_size), numpy.arange(image_size), indexing='ij')

    ctr = centers[labels] + jitter
    dist2 = ((rows[None] - ctr[:, 0, None, None])**2 +
             (cols[None] - ctr[:, 1, None, None])**2)
    width = max(image_size / 8.0, 0.75)
    blobs = numpy.exp(-dist2 / (2.0 * width**2))

    images = numpy.repeat(blobs[..., None], in_chans, axis=3)
    images = images + rng.normal(0.0, noise, size=images.shape)

    return images, labels


def train_validation_sets(data_dct, n_classes, image_size, in_chans=1):
    """ Build the training and validation sets named by the data section
        of a configuration; the two use independent streams of one seed.

        :param data_dct: data section of the configuration
        :type data_dct: dict[str: obj]
        :rtype: ((numpy.ndarray, numpy.ndarray),
                 (numpy.ndarray, numpy.ndarray))
    """

    seed = data_dct['seed']
    train = blob_dataset(
        data_dct['n_train'], n_classes, image_size,
        in_chans=in_chans, noise=data_dct['noise'], seed=seed)
    valid = blob_dataset(
        data_dct['n_val'], n_classes, image_size,
        in_chans=in_chans, noise=data_dct['noise'], seed=seed + 1)

    return train, valid
