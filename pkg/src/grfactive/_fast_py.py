"""Pure NumPy implementations of the greedy-selection kernels.

Same contracts as the compiled module ``grfactive._fast``; used when the
extension is unavailable (or forced via GRFACTIVE_BACKEND=python).
"""

import numpy as np


def candidate_reductions(sigma, diag_tol, cand, test, survey):
    """Risk reduction obtained by labeling each candidate.

    For candidate column v of the (symmetric) conditional covariance
    ``sigma``: classification removes ``sum_t sigma[t,v]^2 / sigma[v,v]``
    from the trace over the test rows; survey removes
    ``(sum_t sigma[t,v])^2 / sigma[v,v]`` from the grand sum.  Candidates
    whose pivot ``sigma[v,v]`` is at or below ``diag_tol`` get NaN.
    """
    cand = np.asarray(cand, dtype=np.intp)
    test = np.asarray(test, dtype=np.intp)
    diag = sigma[cand, cand]
    # symmetric sigma: read candidate rows (contiguous) instead of columns
    block = sigma[np.ix_(cand, test)]
    if survey:
        num = block.sum(axis=1) ** 2
    else:
        num = (block * block).sum(axis=1)
    pivot = np.where(diag > diag_tol, diag, np.nan)
    with np.errstate(invalid="ignore"):
        return num / pivot


def downdate(sigma, pos):
    """Condition ``sigma`` on the variable at ``pos``, in place.

    Subtracts the rank-one term ``col col^T / sigma[pos,pos]`` and zeroes
    row/column ``pos``, leaving the reduced covariance embedded in the
    same buffer.  Exact symmetry of the input is preserved.
    """
    col = sigma[:, pos].copy()
    sigma -= np.outer(col, col / col[pos])
    sigma[pos, :] = 0.0
    sigma[:, pos] = 0.0
