""" Library to build paths for presets shipped with the package and for
    files written by the drivers.
"""

import os
from prunelib.errors import ConfigError


PRESET_DIR = os.path.join(
    os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'presets')


def preset_path(name, ext):
    """ Path of a preset file shipped with the package

        :param name: preset name, such as deit_t or deit_t_zcu102
        :type name: str
        :param ext: file extension without the dot
        :type ext: str
        :rtype: str
    """
    path = os.path.join(PRESET_DIR, '{}.{}'.format(name, ext))
    if not os.path.exists(path):
        avail = sorted(
            os.path.splitext(fname)[0] for fname in os.listdir(PRESET_DIR)
            if fname.endswith('.' + ext))
        raise ConfigError(
            'No file or preset named {}; presets: {}'.format(
                name, ', '.join(avail)))
    return path


def table_name(cfg_name):
    """ Name of the latency table preset that belongs to a config preset
    """
    base = os.path.splitext(os.path.basename(cfg_name))[0]
    return '{}_zcu102'.format(base)


def output_path(dat, make_path=True, prefix=None):
    """ Create the path for a sub-directory of the directory autoprune
        was launched from, or of a given prefix.

        :param make_path: physically create directory for path during function
        :type make_path: bool
        :param prefix: prefix for directory to be built
        :type prefix: str
        :rtype: str
    """

    starting_path = prefix if prefix is not None else os.getcwd()
    path = os.path.join(starting_path, dat)
    if make_path and not os.path.exists(path):
        os.makedirs(path)

    return path
