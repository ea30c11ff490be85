""" Libraries of supported keywords and their corresponding values

    Also includes functionalities for constructing dictionaries
    of default values as well as assessing the validity of user input.
"""

from prunelib.errors import ConfigError


# Default Dictionary Builders
def defaults_from_val_dct(dct):
    """ Build the dictionary of default values from a keyword table
        of the form {keyword: ((types,), (allowed values,), default)}
    """
    supp_keywrds = tuple(dct.keys())
    default_dct = dict(
        zip(supp_keywrds, (dct[key][2] for key in supp_keywrds)))

    return default_dct


def right_update(dct1, dct2):
    """ Update the first dictionary with the second; values of the second
        take precedence and neither input is changed
    """
    dct = dict(dct1)
    dct.update(dct2)
    return dct


# Dictionary Checkers
def check_dct1(inp_dct, val_dct, req_lst, section):
    """ Check all of the facets of a dictionary

        :param inp_dct: input dictionary to assess
        :type inp_dct: dict[str: obj]
        :param val_dct: keyword table of the section
        :type val_dct: dict[str: tuple]
        :param req_lst: keywords that must be given a value
        :type req_lst: tuple(str)
        :param section: label of the section, used in error messages
        :type section: str
    """
    _check_required_keys(inp_dct, req_lst, section)
    _check_supported_keys(inp_dct, val_dct, section)
    _check_supported_vals(inp_dct, val_dct, req_lst, section)


def _check_supported_keys(inp_dct, val_dct, section):
    """ Check if all keywords supplied in an input dictionary are known
    """

    inp_keys = set(inp_dct.keys())
    chk_keys = set(val_dct.keys())
    unsupported_keys = inp_keys - chk_keys

    if unsupported_keys:
        raise ConfigError(
            'Unsupported keywords in {}: {}. Accepted keywords: {}'.format(
                section, ','.join(sorted(unsupported_keys)),
                ','.join(sorted(chk_keys))))


def _check_supported_vals(inp_dct, val_dct, req_lst, section):
    """ Check the type and, where the table restricts them, the value of
        every keyword
    """

    for key, val in inp_dct.items():
        allowed_typs, allowed_vals, _ = val_dct[key]

        if val is not None:
            if type(val) not in allowed_typs:
                raise ConfigError(
                    '{}.{}: val {} must be type {}'.format(
                        section, key, val,
                        tuple(typ.__name__ for typ in allowed_typs)))
            if allowed_vals:
                if val not in allowed_vals:
                    raise ConfigError(
                        '{}.{}: val is {}, must be {}'.format(
                            section, key, val, allowed_vals))
        else:
            if key in req_lst:
                raise ConfigError(
                    '{}.{}: key has no value defined even though it is '
                    'required'.format(section, key))


def _check_required_keys(inp_dct, req_lst, section):
    """ Check if required keys are in the input dict
    """

    inp_keys = set(inp_dct.keys())
    req_keys = set(req_lst)
    undefined_required_keys = req_keys - inp_keys

    if undefined_required_keys:
        raise ConfigError(
            'Required keywords have not been defined in {}: {}'.format(
                section, ','.join(sorted(undefined_required_keys))))
