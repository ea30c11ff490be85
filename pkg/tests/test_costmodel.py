""" Tests for the multiply-accumulate cost model
"""

import numpy
import pytest
import yaml
from prunelib.errors import ConfigError
from prunelib.prune_io.parser.config import read_config
from prunelib.prune_io.parser.config import config_dictionary
from pruneroutines import numcore as nc
from pruneroutines import selector as sel
from pruneroutines import backbone
from pruneroutines import costmodel
from pruneroutines.backbone import _model
from pruneroutines.latency import make_plan


DEIT_T = read_config('deit_t')['arch']
DEIT_S = read_config('deit_s')['arch']
DEIT_T_BLOCK = 102049152
DEIT_S_BLOCK = 378391296
DIMS = (64, 128, 256, 512)
RATES = tuple(round(0.1 * idx, 1) for idx in range(1, 10))
SMALL_ARCH = {
    'n_blocks': 5, 'embed_dim': 8, 'n_heads': 2, 'image_size': 8,
    'patch_size': 2, 'in_chans': 1, 'n_classes': 2}
POLICIES = ('concat_per_phase', 'merge_single', 'none')
RUNTIME_RATES = (0.0, 0.05, 0.25, 0.3, 0.31, 0.5, 0.52, 0.75, 0.9)


def test__block_flops():
    """ test costmodel.block_flops
    """
    out = costmodel.block_flops(1, 1, 1, 1)
    assert out['total'] == 14
    assert tuple(out['rows']) == costmodel.ROW_LABELS

    assert costmodel.block_flops(197, 384, 384, 384)['total'] == DEIT_S_BLOCK
    assert costmodel.block_flops(197, 192, 192, 192)['total'] == DEIT_T_BLOCK
    assert 12 * DEIT_S_BLOCK == pytest.approx(4.54e9, rel=1.0e-3)
    assert 12 * DEIT_T_BLOCK == pytest.approx(1.2246e9, rel=1.0e-3)

    args = (10, 16, 24, 32)
    base = costmodel.block_flops(*args)['total']
    for idx in range(4):
        bigger = list(args)
        bigger[idx] += 1
        assert costmodel.block_flops(*bigger)['total'] > base

    with pytest.raises(ConfigError):
        costmodel.block_flops(0, 1, 1, 1)
    with pytest.raises(ConfigError):
        costmodel.block_flops(1, 1.5, 1, 1)


def test__model_flops():
    """ test costmodel.model_flops
    """
    zero = make_plan(12, (), ())
    out = costmodel.model_flops(DEIT_T, zero)
    assert out['backbone'] == 12 * DEIT_T_BLOCK
    assert out['total'] == out['baseline']
    assert out['reduction'] == 0.0
    assert out['selector'] == 0

    out = costmodel.model_flops(DEIT_T)
    assert out['tokens'][:3] == [197, 197, 197]
    assert out['tokens'][3] == 1 + 138 + 1
    assert out['tokens'][6] == 1 + 118 + 2
    assert out['tokens'][9] == 1 + 98 + 3
    assert out['total'] == out['backbone'] + out['selector']

    merged = dict(DEIT_T, package_policy='merge_single')
    assert costmodel.model_flops(merged)['tokens'][9] == 1 + 98 + 1
    bare = dict(DEIT_T, package_policy='none')
    assert costmodel.model_flops(bare)['tokens'][9] == 1 + 98

    for arch in (DEIT_T, DEIT_S):
        assert costmodel.model_flops(arch)['selector_share'] < 0.01

    with pytest.raises(ConfigError):
        costmodel.model_flops(DEIT_T, make_plan(6, (), ()))


def test__plan_tokens():
    """ test that a selector adds a package only where the kept count drops
    """
    arch = _small_arch([1, 2, 3], [0.3, 0.31, 0.5])
    plan = make_plan(5, (1, 2, 3), (0.3, 0.31, 0.5))
    assert costmodel.plan_tokens(arch, plan) == [17, 14, 14, 11, 11]

    plan = make_plan(5, (1, 2), (0.0, 0.25))
    assert costmodel.plan_tokens(arch, plan) == [17, 17, 14, 14, 14]
    merged = dict(arch, package_policy='merge_single')
    assert costmodel.plan_tokens(
        merged, make_plan(5, (1, 2, 3), (0.3, 0.5, 0.75))) == (
            [17, 14, 10, 6, 6])
    bare = dict(arch, package_policy='none')
    assert costmodel.plan_tokens(
        bare, make_plan(5, (1, 2, 3), (0.3, 0.5, 0.75))) == (
            [17, 13, 9, 5, 5])


def test__plan_tokens_runtime(monkeypatch):
    """ test that the planned token counts are the counts entering every
        block when each selector keeps exactly the planned number
    """
    rng = numpy.random.default_rng(21)
    counts = []
    real_block = _model.block_forward

    def _counting_block(x, mask, params, prefix, n_heads):
        counts.append(nc.value(x).shape[1])
        return real_block(x, mask, params, prefix, n_heads)

    monkeypatch.setattr(_model, 'block_forward', _counting_block)
    image = rng.normal(size=(1, 8, 8, 1))
    for trial in range(60):
        n_sel = int(rng.integers(1, 5))
        positions = sorted(rng.choice([1, 2, 3, 4], n_sel, replace=False))
        positions = [int(pos) for pos in positions]
        rates = sorted(round(float(rate), 2)
                       for rate in rng.choice(RUNTIME_RATES, n_sel))
        for policy in POLICIES:
            arch = _small_arch(positions, rates, package_policy=policy)
            monkeypatch.setattr(sel, 'gumbel_decision', _keep_first(arch))
            params = backbone.init_params(arch, seed=trial)
            del counts[:]
            backbone.model_forward(image, arch, params, layout='pruned')
            plan = make_plan(5, positions, rates)
            assert counts == costmodel.plan_tokens(arch, plan), (
                positions, rates, policy)


def test__rates_for_reduction():
    """ test costmodel.rates_for_reduction
    """
    plan = costmodel.rates_for_reduction(DEIT_S, 0.4261)
    assert plan['positions'] == (3, 6, 9)
    assert list(plan['phase_rates']) == sorted(plan['phase_rates'])
    out = costmodel.model_flops(DEIT_S, plan)
    assert out['reduction'] == pytest.approx(0.426, abs=5.0e-3)

    with pytest.raises(ConfigError):
        costmodel.rates_for_reduction(DEIT_S, 0.99)
    with pytest.raises(ConfigError):
        costmodel.rates_for_reduction(DEIT_S, 0.3, positions=())


def test__compare_strategies():
    """ test costmodel.compare_strategies
    """
    out = costmodel.compare_strategies(DEIT_S, 0.0)
    assert out['token'] == out['channel'] == out['head'] == 0.0

    out = costmodel.compare_strategies(DEIT_S, 0.5)
    assert out['token'] == pytest.approx(1.0 - 181744320 / DEIT_S_BLOCK)
    assert out['head'] == pytest.approx(1.0 - 305390976 / DEIT_S_BLOCK)
    assert round(100.0 * out['token'], 1) == 52.0
    assert round(100.0 * out['head'], 1) == 19.3
    assert 0.0 < out['channel'] < out['token']

    for d_ch in DIMS:
        for d_attn in DIMS:
            for d_fc in DIMS:
                arch = dict(DEIT_S, embed_dim=d_ch, attn_dim=d_attn,
                            fc_dim=d_fc)
                for rate in RATES:
                    out = costmodel.compare_strategies(arch, rate)
                    assert out['token'] >= out['head']
                    assert out['token'] >= rate - 1.0e-12

    with pytest.raises(ConfigError):
        costmodel.compare_strategies(DEIT_S, 1.0)


def test__kept_patches():
    """ test costmodel.kept_patches rounding
    """
    assert costmodel.kept_patches(196, 0.0) == 196
    assert costmodel.kept_patches(196, 0.3) == 138
    assert costmodel.kept_patches(196, 0.5) == 98
    assert costmodel.kept_patches(10, 0.3) == 7
    assert numpy.all([costmodel.kept_patches(196, rate) >= 196 * (1 - rate)
                      for rate in RATES])


def test__structure_widths():
    """ test the plain model narrowed to the count of a pruned one
    """
    out = costmodel.structure_widths(DEIT_T)
    assert out['target'] == costmodel.model_flops(DEIT_T)['total']
    assert out['total'] <= out['target']
    assert out['embed_dim'] < DEIT_T['embed_dim']
    assert out['embed_dim'] % DEIT_T['n_heads'] == 0
    assert out['attn_dim'] % DEIT_T['n_heads'] == 0

    wider = out['embed_dim'] + DEIT_T['n_heads']
    n_tok = backbone.token_counts(DEIT_T)[2]
    assert 12 * costmodel.block_flops(
        n_tok, wider, wider, wider)['total'] > out['target']

    full = costmodel.structure_widths(DEIT_T, make_plan(12, (), ()))
    assert (full['embed_dim'], full['attn_dim'], full['fc_dim']) == (
        192, 192, 192)


# Helpers
def _small_arch(positions, rates, **kwargs):
    arch_dct = dict(SMALL_ARCH, selector_positions=list(positions),
                    phase_rates=list(rates), **kwargs)
    return config_dictionary(yaml.safe_dump({'arch': arch_dct}))['arch']


def _keep_first(arch):
    """ Decision that keeps the first tokens of the pool, as many as the
        plan leaves after the phase given by the seed
    """
    n_pat = backbone.token_counts(arch)[0]

    def _decision(scores, mode, tau=0.5, seed=0, protected=(), rate=0.0):
        n_cur = nc.value(scores).shape[1]
        keep = costmodel.kept_patches(n_pat, arch['phase_rates'][seed[1]])
        mask = numpy.zeros((1, n_cur))
        mask[0, :keep] = 1.0
        return sel.keep_decision(mask, protected)

    return _decision


if __name__ == '__main__':
    test__block_flops()
    test__model_flops()
    test__plan_tokens()
    test__compare_strategies()
    test__structure_widths()
