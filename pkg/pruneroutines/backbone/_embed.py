""" Patch embedding
"""

import numpy
from prunelib.errors import ConfigError
from prunelib.errors import DimensionError
from pruneroutines import numcore as nc


def patchify(images, patch_size):
    """ Non-overlapping patches of channel-last images, flattened in
        raster order

        :param images: [B, Hpx, Wpx, ch]
        :param patch_size: side of the square patches
        :type patch_size: int
        :rtype: [B, (Hpx/p)(Wpx/p), p*p*ch]
    """
    images = numpy.asarray(images, dtype=numpy.float64)
    if images.ndim != 4:
        raise DimensionError(
            'Images must be [B, H, W, ch], got shape {}'.format(images.shape))
    bsz, hpx, wpx, chans = images.shape
    if hpx % patch_size or wpx % patch_size:
        raise ConfigError(
            'Image extents {}x{} are not divisible by patch size {}'.format(
                hpx, wpx, patch_size))
    hgrid, wgrid = hpx // patch_size, wpx // patch_size
    patches = images.reshape(
        bsz, hgrid, patch_size, wgrid, patch_size, chans)
    patches = patches.transpose(0, 1, 3, 2, 4, 5)
    return patches.reshape(bsz, hgrid * wgrid, patch_size**2 * chans)


def patch_embed(images, arch, params):
    """ Tokens of a batch of images: projected patches, a prepended class
        token when the architecture uses one, plus position embeddings

        :rtype: [B, N, C]
    """
    if numpy.asarray(images).shape[-1] != arch['in_chans']:
        raise DimensionError(
            'Images have {} channels, configuration expects {}'.format(
                numpy.asarray(images).shape[-1], arch['in_chans']))
    patches = patchify(images, arch['patch_size'])
    tok = nc.linear(patches, params['embed.w'], params['embed.b'])
    if arch['use_cls_token']:
        bsz, chans = patches.shape[0], arch['embed_dim']
        cls = nc.expand(nc.reshape(params['cls'], (1, 1, chans)),
                        (bsz, 1, chans))
        tok = nc.concat([cls, tok], 1)
    if nc.value(params['pos']).shape[0] != nc.value(tok).shape[1]:
        raise DimensionError(
            'Position embedding for {} tokens, sequence has {}'.format(
                nc.value(params['pos']).shape[0], nc.value(tok).shape[1]))
    return nc.add(tok, params['pos'])
