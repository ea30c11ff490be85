""" Render token keep masks as text grids and graymap images
"""

import os
import numpy


def mask_grid(patch_mask, grid_side):
    """ Text grid of a patch keep mask: '#' kept, '.' pruned

        :param patch_mask: 0/1 values of the patch tokens in raster order
        :type patch_mask: numpy.ndarray
        :param grid_side: number of patches along one image side
        :type grid_side: int
        :rtype: str
    """
    grid = numpy.asarray(patch_mask).reshape(grid_side, grid_side)
    return '\n'.join(
        ''.join('#' if val > 0.5 else '.' for val in row) for row in grid)


def write_mask_pgm(path, patch_mask, grid_side, scale=1):
    """ Write a patch keep mask as a P2 graymap, 255 kept and 0 pruned,
        with every patch drawn as a scale x scale square
    """
    grid = (numpy.asarray(patch_mask).reshape(grid_side, grid_side) > 0.5)
    grid = numpy.kron(grid.astype(int) * 255,
                      numpy.ones((scale, scale), dtype=int))
    lines = ['P2', '{} {}'.format(grid.shape[1], grid.shape[0]), '255']
    lines += [' '.join(str(val) for val in row) for row in grid]
    with open(path, 'w') as pgm_file:
        pgm_file.write('\n'.join(lines) + '\n')


def write_masks(dump_dir, phase_masks, grid_side, scale=4):
    """ Write one graymap per phase into a directory; returns the paths
    """
    if not os.path.exists(dump_dir):
        os.makedirs(dump_dir)
    paths = []
    for idx, patch_mask in enumerate(phase_masks):
        path = os.path.join(dump_dir, 'phase{}.pgm'.format(idx))
        write_mask_pgm(path, patch_mask, grid_side, scale=scale)
        paths.append(path)
    return paths
