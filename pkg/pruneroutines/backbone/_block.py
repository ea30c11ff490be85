""" Transformer block: multi-head self-attention and feed-forward network,
    each with a gated residual connection.

    With a keep mask D the residual update of every token is multiplied by
    its mask entry and attention weights the exponentials of the keys by
    D. For a binary D this gives the outputs of the same block run on the
    kept tokens only, while masked rows stay equal to their input.
"""

from pruneroutines import numcore as nc


def msa_forward(x, mask, params, prefix, n_heads):
    """ Multi-head self-attention with residual

        :param x: tokens [B, N, C]
        :param mask: keep mask [B, N], or None to attend to every token
        :param params: model parameters
        :param prefix: block prefix, such as blk3
        :param n_heads: number of attention heads
        :rtype: [B, N, C]
    """

    bsz, ntok, _ = nc.value(x).shape
    attn = nc.value(params[prefix + '.q_w']).shape[1]
    head_dim = attn // n_heads
    assert head_dim * n_heads == attn, (
        'attention width {} not divisible by {} heads'.format(attn, n_heads))

    def _heads(name):
        out = nc.linear(hid, params[prefix + '.' + name + '_w'],
                        params[prefix + '.' + name + '_b'])
        out = nc.reshape(out, (bsz, ntok, n_heads, head_dim))
        return nc.transpose(out, (0, 2, 1, 3))

    hid = nc.layernorm(x, params[prefix + '.ln1_g'], params[prefix + '.ln1_b'])
    qry, key, val = _heads('q'), _heads('k'), _heads('v')

    logits = nc.mul(nc.matmul(qry, nc.transpose(key, (0, 1, 3, 2))),
                    head_dim**-0.5)
    if mask is None:
        probs = nc.softmax(logits, -1)
    else:
        probs = nc.masked_softmax(
            logits, nc.reshape(mask, (bsz, 1, 1, ntok)), -1)

    out = nc.transpose(nc.matmul(probs, val), (0, 2, 1, 3))
    out = nc.reshape(out, (bsz, ntok, attn))
    out = nc.linear(out, params[prefix + '.proj_w'],
                    params[prefix + '.proj_b'])

    return _residual(x, out, mask)


def ffn_forward(x, mask, params, prefix):
    """ Per-token MLP C -> 4 D_fc -> C with GELU, with residual

        :param x: tokens [B, N, C]
        :param mask: keep mask [B, N], or None
        :rtype: [B, N, C]
    """
    out = nc.layernorm(x, params[prefix + '.ln2_g'], params[prefix + '.ln2_b'])
    out = nc.activation(
        nc.linear(out, params[prefix + '.fc1_w'], params[prefix + '.fc1_b']),
        'gelu')
    out = nc.linear(out, params[prefix + '.fc2_w'], params[prefix + '.fc2_b'])
    return _residual(x, out, mask)


def block_forward(x, mask, params, prefix, n_heads):
    """ One transformer block
    """
    x = msa_forward(x, mask, params, prefix, n_heads)
    return ffn_forward(x, mask, params, prefix)


def _residual(x, update, mask):
    if mask is None:
        return nc.add(x, update)
    bsz, ntok = nc.value(mask).shape
    return nc.add(x, nc.mul(update, nc.reshape(mask, (bsz, ntok, 1))))
