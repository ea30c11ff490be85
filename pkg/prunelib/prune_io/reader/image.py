""" Read grayscale images in the portable graymap (PGM) format
"""

import numpy
from prunelib.errors import ValidationError


def read_pgm(path):
    """ Read a P2 (text) or P5 (binary) graymap into an array scaled
        to [0, 1], with a trailing channel axis of extent 1.

        :param path: file to read
        :type path: str
        :rtype: numpy.ndarray
    """

    with open(path, 'rb') as img_file:
        buf = img_file.read()

    magic = buf[:2]
    if magic not in (b'P2', b'P5'):
        raise ValidationError('{} is not a PGM file'.format(path))

    header, pos = _header_fields(buf, 3)
    width, height, maxval = header
    if maxval <= 0 or maxval > 65535:
        raise ValidationError('PGM maxval {} not supported'.format(maxval))

    if magic == b'P2':
        vals = buf[pos:].split()
        pix = numpy.array([int(val) for val in vals[:width * height]],
                          dtype=numpy.float64)
    else:
        dtype = numpy.dtype('>u2') if maxval > 255 else numpy.uint8
        pix = numpy.frombuffer(
            buf, dtype=dtype, count=width * height, offset=pos + 1)
        pix = pix.astype(numpy.float64)
    if pix.size != width * height:
        raise ValidationError(
            'PGM {} holds {} pixels, expected {}'.format(
                path, pix.size, width * height))

    return (pix / maxval).reshape(height, width, 1)


def _header_fields(buf, nfields):
    """ Read the first integer fields after the magic number, skipping
        comments; return them with the offset just past the last one
    """
    fields = []
    pos = 2
    while len(fields) < nfields:
        while pos < len(buf) and buf[pos:pos + 1].isspace():
            pos += 1
        if buf[pos:pos + 1] == b'#':
            while pos < len(buf) and buf[pos:pos + 1] != b'\n':
                pos += 1
            continue
        start = pos
        while pos < len(buf) and buf[pos:pos + 1].isdigit():
            pos += 1
        if start == pos:
            raise ValidationError('PGM header is malformed')
        fields.append(int(buf[start:pos]))
    return fields, pos
