""" Training objective, optimizers, training loop, progressive selector
    schedule and representation similarity
"""

from pruneroutines.trainer._loss import LOSS_WEIGHTS
from pruneroutines.trainer._loss import loss_weights
from pruneroutines.trainer._loss import cross_entropy
from pruneroutines.trainer._loss import kl_divergence
from pruneroutines.trainer._loss import total_loss
from pruneroutines.trainer._optim import init_optimizer
from pruneroutines.trainer._optim import optimizer_from_config
from pruneroutines.trainer._optim import apply_update
from pruneroutines.trainer._step import model_loss
from pruneroutines.trainer._step import train_step
from pruneroutines.trainer._step import probe_gradients
from pruneroutines.trainer._step import fit
from pruneroutines.trainer._step import warmup
from pruneroutines.trainer._step import evaluate
from pruneroutines.trainer._step import step_seed
from pruneroutines.trainer._calibrate import calibrate_selectors
from pruneroutines.trainer._calibrate import infer_kept
from pruneroutines.trainer._schedule import phase_grouping
from pruneroutines.trainer._schedule import progressive_schedule
from pruneroutines.trainer._schedule import model_evaluator
from pruneroutines.trainer._cka import cka
from pruneroutines.trainer._cka import block_cls_similarity


__all__ = [
    'LOSS_WEIGHTS',
    'loss_weights',
    'cross_entropy',
    'kl_divergence',
    'total_loss',
    'init_optimizer',
    'optimizer_from_config',
    'apply_update',
    'model_loss',
    'train_step',
    'probe_gradients',
    'fit',
    'warmup',
    'evaluate',
    'step_seed',
    'calibrate_selectors',
    'infer_kept',
    'phase_grouping',
    'progressive_schedule',
    'model_evaluator',
    'cka',
    'block_cls_similarity'
]
