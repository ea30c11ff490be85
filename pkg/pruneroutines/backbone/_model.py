""" Forward pass of the whole model with its selectors.

    Two layouts run the same model. `masked` keeps every token of every
    image in place and prunes by zeroing keep-mask entries, which keeps
    batches rectangular and differentiable; one package slot per phase is
    appended at the end of the sequence. `pruned` processes each image on
    its own, physically dropping pruned tokens and appending package
    tokens, which is what inference costs on a device.
"""

import numpy
from pruneroutines import numcore as nc
from pruneroutines import selector as sel
from pruneroutines import packaging as pkg
from pruneroutines.backbone._params import token_counts
from pruneroutines.backbone._params import selector_prefix
from pruneroutines.backbone._embed import patch_embed
from pruneroutines.backbone._block import block_forward
from prunelib.errors import ConfigError


LAYOUTS = ('masked', 'pruned')


def model_forward(images, arch, params, mode='infer', layout=None, seed=0,
                  use_selectors=True, features=None):
    """ Logits, keep decisions and kept fractions of a batch

        :param images: [B, Hpx, Wpx, ch]
        :param arch: arch section of a configuration
        :param params: model parameters; arrays or tape variables
        :param mode: decision mode of the selectors (train, infer, soft,
            random)
        :param layout: masked or pruned; masked for every mode but infer
            if None
        :param seed: seed of the decision noise
        :param use_selectors: run the selectors; False gives the plain model
        :param features: list that receives the tokens after every block
            (masked layout only)
        :rtype: (logits [B, K], list of keep decisions, kept fraction of the
            patch tokens [phases + 1, B])
    """

    if layout is None:
        layout = 'pruned' if mode == 'infer' else 'masked'
    if layout not in LAYOUTS:
        raise ConfigError('Unknown layout {}; supported: {}'.format(
            layout, LAYOUTS))
    positions = tuple(arch['selector_positions']) if use_selectors else ()

    if layout == 'pruned':
        assert features is None, 'features are captured in the masked layout'
        return _pruned_forward(images, arch, params, mode, seed, positions)
    return _masked_forward(images, arch, params, mode, seed, positions,
                           features)


def classify(x, mask, arch, params):
    """ Classification head: final layernorm, then the class token, or the
        mean of the kept tokens without one, through a linear layer
    """
    bsz, _, chans = nc.value(x).shape
    hid = nc.layernorm(x, params['norm_g'], params['norm_b'])
    if arch['use_cls_token']:
        pooled = nc.take(hid, [0], 1)
    else:
        if mask is None:
            mask = numpy.ones(nc.value(x).shape[:2])
        pooled = nc.masked_mean(hid, mask)
    pooled = nc.reshape(pooled, (bsz, chans))
    return nc.linear(pooled, params['head_w'], params['head_b'])


# ---- #
def _masked_forward(images, arch, params, mode, seed, positions, features):
    """ Batched forward with keep masks
    """

    x = patch_embed(images, arch, params)
    bsz = nc.value(x).shape[0]
    n_pat, n_cls, n_tok = token_counts(arch)
    patch = slice(n_cls, n_cls + n_pat)

    decision = sel.keep_decision(numpy.ones((bsz, n_tok)), range(n_cls))
    decisions, kept = [], [numpy.ones(bsz)]
    mask = None
    for blk in range(arch['n_blocks']):
        if blk in positions:
            phase = positions.index(blk)
            x, decision = _masked_selector(
                x, decision, params, arch, phase, blk, mode, seed, patch)
            mask = decision['mask']
            decisions.append(decision)
            kept.append(nc.value(mask)[:, patch].sum(axis=-1) / n_pat)
        x = block_forward(x, mask, params, 'blk{}'.format(blk),
                          arch['n_heads'])
        if features is not None:
            features.append(nc.value(x))

    logits = classify(x, mask, arch, params)
    return logits, decisions, numpy.array(kept)


def _masked_selector(x, decision, params, arch, phase, blk, mode, seed,
                     patch):
    """ Score the patch tokens, update the decision and write the package
        slot of one phase
    """

    bsz, n_tok, _ = nc.value(x).shape
    n_pat = patch.stop - patch.start
    x_pat = nc.take(x, patch, 1)
    old_pat = nc.take(decision['mask'], patch, 1)

    scores = sel.score_tokens(
        x_pat, old_pat, params, selector_prefix(blk), arch['n_heads'],
        allow_empty=True)['agg']
    new_pat = sel.gumbel_decision(
        scores, mode, tau=arch['gumbel_tau'], seed=(seed, phase),
        rate=phase_drop_rate(arch, phase))['mask']

    new_mask = nc.concat(
        [numpy.ones((bsz, patch.start)), new_pat,
         numpy.ones((bsz, n_tok - patch.stop))], 1)
    decision = sel.update_decision(decision, sel.keep_decision(new_mask))
    if arch['package_policy'] == 'none':
        return x, decision

    weights = pkg.package_weights(
        old_pat, new_pat, nc.reshape(nc.take(scores, [0], -1), (bsz, n_pat)))
    pkg_vec = nc.weighted_mean(x_pat, weights, allow_empty=True)
    has = nc.value(weights).sum(axis=-1) > 0.0

    return pkg.attach_package_masked(
        x, decision, pkg_vec, has, arch['package_policy'])


# ---- #
def _pruned_forward(images, arch, params, mode, seed, positions):
    """ Per-image forward on the kept tokens only
    """

    tok = patch_embed(images, arch, params)
    bsz = nc.value(tok).shape[0]
    n_pat, n_cls, _ = token_counts(arch)
    policy = arch['package_policy']

    logits, masks, kept = [], [[] for _ in positions], []
    for img in range(bsz):
        x = nc.take(tok, [img], 0)
        # original token index of every row; -1 marks a package token
        rows = list(range(n_cls + n_pat))
        packaged, img_kept = [], [1.0]
        for blk in range(arch['n_blocks']):
            if blk in positions:
                phase = positions.index(blk)
                x, rows, has = _pruned_selector(
                    x, rows, params, arch, phase, blk, mode,
                    (seed, phase, img), n_cls)
                packaged.append(has)
                kept_pat = numpy.zeros(n_pat)
                kept_pat[[row - n_cls for row in rows if row >= n_cls]] = 1.0
                img_kept.append(kept_pat.sum() / n_pat)
                slots = _slot_flags(packaged, policy)
                masks[phase].append(numpy.concatenate(
                    [numpy.ones(n_cls), kept_pat, slots]))
            x = block_forward(x, None, params, 'blk{}'.format(blk),
                              arch['n_heads'])
        logits.append(nc.value(classify(x, None, arch, params))[0])
        kept.append(img_kept)

    decisions = []
    for phase, mask_lst in enumerate(masks):
        n_slots = len(_slot_flags([False] * (phase + 1), policy))
        n_tok = n_cls + n_pat + n_slots
        slot_idx = tuple(range(n_cls + n_pat, n_tok))
        decisions.append(sel.keep_decision(
            numpy.array(mask_lst), tuple(range(n_cls)) + slot_idx, slot_idx))

    return (numpy.array(logits), decisions,
            numpy.array(kept).T.reshape(len(positions) + 1, bsz))


def _pruned_selector(x, rows, params, arch, phase, blk, mode, seed, n_cls):
    """ Drop the pruned tokens of one image and append their package
    """

    pat_idx = [idx for idx, row in enumerate(rows) if row >= n_cls]
    other_idx = [idx for idx, row in enumerate(rows) if row < n_cls]
    cls_idx = [idx for idx in other_idx if rows[idx] >= 0]
    pkg_idx = [idx for idx in other_idx if rows[idx] < 0]
    if not pat_idx:
        return x, rows, False

    x_pat = nc.take(x, pat_idx, 1)
    scores = sel.score_tokens(
        x_pat, numpy.ones((1, len(pat_idx))), params, selector_prefix(blk),
        arch['n_heads'])['agg']
    new = nc.value(sel.gumbel_decision(
        scores, mode, tau=arch['gumbel_tau'], seed=seed,
        rate=phase_drop_rate(arch, phase))['mask'])[0]
    keep = [idx for idx, flag in zip(pat_idx, new) if flag > 0.5]
    drop = [pos for pos, flag in enumerate(new) if flag <= 0.5]

    order = cls_idx + keep + pkg_idx
    x = nc.take(x, order, 1)
    rows = [rows[idx] for idx in order]
    if not drop or arch['package_policy'] == 'none':
        return x, rows, bool(drop)

    chans = nc.value(x).shape[-1]
    package = pkg.build_package(
        nc.reshape(nc.take(x_pat, drop, 1), (len(drop), chans)),
        nc.reshape(nc.take(scores, drop, 1), (len(drop), 2)), phase=phase)
    slots = tuple(idx for idx, row in enumerate(rows) if row < 0)
    x, _ = pkg.attach_package(x, package, arch['package_policy'], slots)
    rows = rows + [-1] * (nc.value(x).shape[1] - len(rows))

    return x, rows, True


def phase_drop_rate(arch, phase):
    """ Fraction of the tokens reaching a selector that it must drop for
        the cumulative rate of its phase
    """
    rates = arch['phase_rates']
    before = rates[phase - 1] if phase else 0.0
    return 1.0 - (1.0 - rates[phase]) / (1.0 - before)


def _slot_flags(packaged, policy):
    if policy == 'none':
        return []
    if policy == 'merge_single':
        return [float(any(packaged))]
    return [float(flag) for flag in packaged]
