"""Pure numpy implementations of the batched kernels.

Semantics (shared with the compiled module):

``expected_losses(weights, preds, kind)``
    ``weights`` is an ``(A, K)`` array of joint masses over representation
    atom and label, ``preds`` a ``(P, A, K)`` stack of predictor outputs on
    the same atoms.  Returns the ``(P,)`` expected losses in nats.  Kind 0 is
    cross-entropy (zero weight times infinite loss counts as zero), kind 1 is
    0-1 loss with argmax ties broken toward the smallest label.

``hdh_sup(ra, rb)``
    Risks of the same hypotheses under two environments.  Returns
    ``(max over pairs i < j of | |ra_i - ra_j| - |rb_i - rb_j| |, skipped)``
    where pairs that reduce to ``inf - inf`` are skipped and counted.  The
    maximum is floored at 0 (the diagonal pairs).
"""
import numpy as np

CROSS_ENTROPY = 0
ZERO_ONE = 1


def expected_losses(weights, preds, kind):
    weights = np.asarray(weights, dtype=np.float64)
    preds = np.asarray(preds, dtype=np.float64)
    n_pred = preds.shape[0]
    if kind == CROSS_ENTROPY:
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(weights > 0.0, weights * -np.log(preds), 0.0)
    else:
        best = preds.argmax(axis=2)
        hit = np.arange(preds.shape[2]) == best[..., None]
        terms = np.where(hit, 0.0, np.broadcast_to(weights, preds.shape))
    return terms.reshape(n_pred, -1).sum(axis=1)


def hdh_sup(ra, rb):
    ra = np.asarray(ra, dtype=np.float64)
    rb = np.asarray(rb, dtype=np.float64)
    i, j = np.triu_indices(len(ra), k=1)
    with np.errstate(invalid="ignore"):
        nu_a = np.abs(ra[i] - ra[j])
        nu_b = np.abs(rb[i] - rb[j])
        d = np.abs(nu_a - nu_b)
    bad = np.isnan(d)
    skipped = int(bad.sum())
    if skipped == len(d):
        return 0.0, skipped
    return max(0.0, float(d[~bad].max())), skipped
