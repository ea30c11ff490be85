""" Write named parameter blocks to a binary weight file.

    Layout, little endian:
        magic b'PDWT', uint32 version, 64 ascii bytes of config digest,
        uint32 block count, then per block (sorted by name):
        uint16 name length, utf-8 name, uint8 ndim, uint32 extents,
        float64 values in C order
"""

import struct
import numpy


MAGIC = b'PDWT'
VERSION = 1


def write_weights(path, params, digest):
    """ Write parameters tagged with the digest of their configuration

        :param path: file to write
        :type path: str
        :param params: parameter arrays by name
        :type params: dict[str: numpy.ndarray]
        :param digest: hex SHA-256 of the configuration
        :type digest: str
    """

    assert len(digest) == 64, (
        'digest must be 64 hex characters: {}'.format(digest)
    )

    parts = [MAGIC, struct.pack('<I', VERSION), digest.encode('ascii'),
             struct.pack('<I', len(params))]
    for name in sorted(params):
        arr = numpy.asarray(params[name], dtype='<f8', order='C')
        name_b = name.encode('utf-8')
        parts.append(struct.pack('<H', len(name_b)))
        parts.append(name_b)
        parts.append(struct.pack('<B', arr.ndim))
        parts.append(struct.pack('<{}I'.format(arr.ndim), *arr.shape))
        parts.append(arr.tobytes())

    with open(path, 'wb') as wfile:
        wfile.write(b''.join(parts))
