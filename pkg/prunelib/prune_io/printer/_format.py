"""
Format strings and numbers for the run log
"""


def _indent(message, number):
    message = '\t'.expandtabs(int(number * 8)) + message
    return message


def _newline(message, number):
    message = '\n' * number + message
    return message


def format_message(message, newline, indent):
    """ Format a message string
    """
    if newline:
        message = _newline(message, newline)
    if indent:
        message = _indent(message, indent)
    return message


def format_count(count):
    """ Format an operation count with a G/M/K suffix
    """
    for scale, suffix in ((1.0e9, 'G'), (1.0e6, 'M'), (1.0e3, 'K')):
        if abs(count) >= scale:
            return '{:.3f}{}'.format(count / scale, suffix)
    return '{}'.format(count)


def format_table(headers, rows, width=14):
    """ Format rows of values into a fixed-width table string

        :param headers: column titles
        :type headers: tuple(str)
        :param rows: rows of values; floats are printed with 4 decimals
        :type rows: tuple(tuple(obj))
        :rtype: str
    """

    def _cell(val):
        if isinstance(val, float):
            return '{:>{w}.4f}'.format(val, w=width)
        return '{:>{w}}'.format(str(val), w=width)

    lines = [''.join('{:>{w}}'.format(hdr, w=width) for hdr in headers)]
    for row in rows:
        lines.append(''.join(_cell(val) for val in row))

    return '\n'.join(lines)
