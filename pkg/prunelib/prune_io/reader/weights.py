""" Read the weight files written by prune_io.writer.weights
"""

import struct
import numpy
from prunelib.errors import ValidationError
from prunelib.errors import DigestError
from prunelib.prune_io.writer.weights import MAGIC
from prunelib.prune_io.writer.weights import VERSION


def read_weights(path, digest=None):
    """ Read named parameter blocks from a weight file.

        :param path: file to read
        :type path: str
        :param digest: config digest the file must carry; not checked if None
        :type digest: str
        :rtype: (dict[str: numpy.ndarray], str)
    """

    with open(path, 'rb') as wfile:
        buf = wfile.read()

    try:
        params, file_digest = _parse(buf)
    except struct.error as err:
        raise ValidationError(
            'Weight file {} is truncated: {}'.format(path, err))

    if digest is not None and digest != file_digest:
        raise DigestError(
            'Weight file {} was written for config {}, not {}'.format(
                path, file_digest[:16], digest[:16]))

    return params, file_digest


def _parse(buf):
    """ Parse the bytes of a weight file
    """

    if buf[:4] != MAGIC:
        raise ValidationError('Not a weight file: bad magic number')
    pos = 4
    version, = struct.unpack_from('<I', buf, pos)
    pos += 4
    if version != VERSION:
        raise ValidationError(
            'Weight file version {} not supported'.format(version))
    digest = buf[pos:pos + 64].decode('ascii')
    pos += 64
    nblocks, = struct.unpack_from('<I', buf, pos)
    pos += 4

    params = {}
    for _ in range(nblocks):
        name_len, = struct.unpack_from('<H', buf, pos)
        pos += 2
        name = buf[pos:pos + name_len].decode('utf-8')
        pos += name_len
        ndim, = struct.unpack_from('<B', buf, pos)
        pos += 1
        shape = struct.unpack_from('<{}I'.format(ndim), buf, pos)
        pos += 4 * ndim
        size = int(numpy.prod(shape, dtype=numpy.int64))
        if pos + 8 * size > len(buf):
            raise ValidationError(
                'Weight file is truncated in block {}'.format(name))
        params[name] = numpy.frombuffer(
            buf, dtype='<f8', count=size, offset=pos).reshape(shape).copy()
        pos += 8 * size

    return params, digest
