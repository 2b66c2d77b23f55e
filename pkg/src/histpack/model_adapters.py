"""Reference numpy kernels for consuming packed data.

These are small and framework-free on purpose: a block-diagonal attention
mask, per-sequence loss recovery from a packed per-token loss, and the LAMB
decay-rate correction for the larger effective batch.
"""

from __future__ import annotations

import numpy as np

BLOCKED = -1000.0


def validate_composition(seq_ids) -> np.ndarray:
    """Check a pack composition (sequence id per token, 0 = padding)."""
    ids = np.asarray(seq_ids, dtype=np.int64).reshape(-1)
    if ids.size and ids.min() < 0:
        raise ValueError("sequence ids must be non-negative")
    real = ids[ids > 0]
    if real.size:
        if np.any(np.diff(real) < 0):
            raise ValueError("sequence ids must appear in non-decreasing order")
        # every id must form a single contiguous run
        for k in np.unique(real):
            pos = np.flatnonzero(ids == k)
            if pos[-1] - pos[0] + 1 != pos.size:
                raise ValueError(f"tokens of sequence {k} are not contiguous")
    return ids


def build_attention_mask(seq_ids, blocked: float = BLOCKED) -> tuple[np.ndarray, np.ndarray]:
    """Block-diagonal 0/1 mask and its additive softmax form.

    ``zero_one[i, j] == 1`` iff tokens ``i`` and ``j`` belong to the same
    (non-padding) sequence. The additive mask holds 0 where attention is
    allowed and ``blocked`` (default -1000, pass ``-np.inf`` for hard
    masking) elsewhere.
    """
    ids = validate_composition(seq_ids)
    same = (ids[:, None] == ids[None, :]) & (ids[:, None] > 0)
    zero_one = same.astype(np.int8)
    additive = np.where(same, 0.0, blocked)
    return zero_one, additive


def unpack_per_sequence_loss(nll_per_token, masked_lm_weight, max_sequences_per_pack: int):
    """Per-sequence mean loss for packed inputs.

    ``masked_lm_weight`` gives, for every masked-token slot, the id of the
    sequence it belongs to (0 = unused slot). Inputs are one pack (1-D) or a
    micro-batch of packs (2-D, one row per pack). Returns the per-sequence
    mean NLL, shaped ``(..., max_sequences_per_pack)``, and the loss averaged
    over the sequences actually present. Sequences without tokens give 0.
    """
    nll = np.asarray(nll_per_token, dtype=float)
    ids = np.asarray(masked_lm_weight, dtype=np.int64)
    if nll.shape != ids.shape:
        raise ValueError(f"shape mismatch: nll {nll.shape} vs ids {ids.shape}")
    if ids.size and (ids.min() < 0 or ids.max() > max_sequences_per_pack):
        raise ValueError(f"sequence ids must lie in 0..{max_sequences_per_pack}")
    squeeze = nll.ndim == 1
    nll = np.atleast_2d(nll)
    ids = np.atleast_2d(ids)

    sequences_in_batch = int(ids.max(axis=-1, initial=0).sum())
    selection = ids[:, None, :] == np.arange(1, max_sequences_per_pack + 1)[None, :, None]
    attempted = selection.sum(axis=-1)
    totals = (selection * nll[:, None, :]).sum(axis=-1)
    per_sequence = totals / np.maximum(attempted, 1)
    pack_loss = float(per_sequence.sum() / sequences_in_batch) if sequences_in_batch else 0.0
    return (per_sequence[0] if squeeze else per_sequence), pack_loss


def adjust_lamb_betas(beta1: float, beta2: float, packing_factor: float) -> tuple[float, float]:
    """Raise the LAMB decay rates to the packing-factor power."""
    for name, beta in (("beta1", beta1), ("beta2", beta2)):
        if not 0.0 < beta < 1.0:
            raise ValueError(f"{name} must lie in (0, 1), got {beta}")
    if packing_factor < 1:
        raise ValueError(f"packing factor must be >= 1, got {packing_factor}")
    return beta1**packing_factor, beta2**packing_factor


def lamb_equivalence_check(beta1, beta2, p: int, g, m0, v0):
    """Compare ``p`` sequential moment updates with one packed update.

    With a constant gradient ``g``, ``p`` steps of ``m <- b1*m + (1-b1)*g``
    (and the same for ``v`` with ``g**2``) equal a single step with
    ``b1**p``. Returns ``((m_seq, v_seq), (m_packed, v_packed), max_abs_diff)``.
    """
    if int(p) != p or p < 1:
        raise ValueError(f"p must be a positive integer, got {p}")
    g = np.asarray(g, dtype=float)
    m = np.array(m0, dtype=float)
    v = np.array(v0, dtype=float)
    for _ in range(int(p)):
        m = beta1 * m + (1.0 - beta1) * g
        v = beta2 * v + (1.0 - beta2) * g * g
    pb1, pb2 = adjust_lamb_betas(beta1, beta2, p)
    m_packed = pb1 * np.asarray(m0, dtype=float) + (1.0 - pb1) * g
    v_packed = pb2 * np.asarray(v0, dtype=float) + (1.0 - pb2) * g * g
    diff = max(
        float(np.max(np.abs(m - m_packed), initial=0.0)),
        float(np.max(np.abs(v - v_packed), initial=0.0)),
    )
    return (m, v), (m_packed, v_packed), diff
