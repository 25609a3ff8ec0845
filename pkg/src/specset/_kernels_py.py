"""Pure numpy implementation of the hot kernels.

Same call signatures as the compiled ``_kernels`` extension; selected by
``specset.kernels`` when the extension is missing or disabled.
"""

import numpy as np

LEAF = 0


def pnorm_rows(a, p):
    """p-norm of each row of a nonnegative real array, with max-scaling."""
    if a.shape[1] == 0:
        return np.zeros(a.shape[0])
    if p == 1.0:
        return a.sum(axis=1)
    m = a.max(axis=1)
    if np.isinf(p):
        return m
    safe = np.where(m > 0.0, m, 1.0)
    scaled = a / safe[:, None]
    if p == 2.0:
        s = np.sqrt(np.einsum("ij,ij->i", scaled, scaled))
    else:
        s = np.power(np.power(scaled, p).sum(axis=1), 1.0 / p)
    return np.where(m > 0.0, m * s, 0.0)


def tree_norms(X, kind, p, lo, hi, cstart, cend, children):
    X = np.asarray(X)
    vals = [None] * len(kind)
    for k in range(len(kind)):
        if kind[k] == LEAF:
            vals[k] = pnorm_rows(np.abs(X[:, lo[k]:hi[k]]), p[k])
        else:
            kids = children[cstart[k]:cend[k]]
            stacked = np.stack([vals[c] for c in kids], axis=1)
            vals[k] = pnorm_rows(stacked, p[k])
    return vals[-1]


def sweep_max(T, amps, phases, dom_norms, kind, p, lo, hi, cstart, cend, children):
    """For each amplitude row ``a`` maximize ||T x|| / ||x|| over the phase
    rows ``b`` with x = amps[a] * exp(i phases[b]).

    Returns ``(best, arg)``: per-row maximum ratio and maximizing phase index
    (``-1`` and ratio ``-1`` for zero-norm rows).
    """
    E = np.exp(1j * np.asarray(phases))
    TT = np.asarray(T).T
    na = amps.shape[0]
    best = np.full(na, -1.0)
    arg = np.full(na, -1, dtype=np.int64)
    for a in range(na):
        if dom_norms[a] <= 0.0:
            continue
        X = amps[a][None, :] * E
        ratios = tree_norms(X @ TT, kind, p, lo, hi, cstart, cend, children) / dom_norms[a]
        b = int(np.argmax(ratios))
        best[a] = ratios[b]
        arg[a] = b
    return best, arg
