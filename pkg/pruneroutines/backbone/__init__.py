""" Toy vision transformer with token selectors and package tokens
"""

from pruneroutines.backbone._params import init_params
from pruneroutines.backbone._params import add_selectors
from pruneroutines.backbone._params import token_counts
from pruneroutines.backbone._params import selector_prefix
from pruneroutines.backbone._params import param_group
from pruneroutines.backbone._embed import patchify
from pruneroutines.backbone._embed import patch_embed
from pruneroutines.backbone._block import msa_forward
from pruneroutines.backbone._block import ffn_forward
from pruneroutines.backbone._block import block_forward
from pruneroutines.backbone._model import LAYOUTS
from pruneroutines.backbone._model import model_forward
from pruneroutines.backbone._model import classify
from pruneroutines.backbone._model import phase_drop_rate


__all__ = [
    'init_params',
    'add_selectors',
    'token_counts',
    'selector_prefix',
    'param_group',
    'patchify',
    'patch_embed',
    'msa_forward',
    'ffn_forward',
    'block_forward',
    'LAYOUTS',
    'model_forward',
    'classify',
    'phase_drop_rate'
]
