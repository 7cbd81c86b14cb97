"""Pure-Python/numpy versions of the compiled kernels in ``_kernels.pyx``.

Every function here must return results bit-identical to its compiled
counterpart; ``tests/test_kernels.py`` enforces this.
"""

import numpy as np

_MASK64 = (1 << 64) - 1


def fisher_yates(raw, n):
    """Unbiased in-place shuffle of ``arange(n)`` driven by raw 64-bit words.

    Bounded draws use Lemire's multiply-shift with rejection, so every
    permutation is exactly equally likely. Returns -1 in place of the
    permutation if ``raw`` runs out (only possible with an undersized buffer).
    """
    perm = list(range(n))
    words = raw.tolist()
    pos = 0
    nwords = len(words)
    for i in range(n - 1, 0, -1):
        s = i + 1
        if pos >= nwords:
            return None
        m = words[pos] * s
        pos += 1
        lo = m & _MASK64
        if lo < s:
            t = ((1 << 64) - s) % s
            while lo < t:
                if pos >= nwords:
                    return None
                m = words[pos] * s
                pos += 1
                lo = m & _MASK64
        j = m >> 64
        perm[i], perm[j] = perm[j], perm[i]
    return np.asarray(perm, dtype=np.int64)


def batch_abs_deviation(half_values, order, batch_size, target, d):
    """Mean absolute deviation of batch means from ``target`` over a real spectrum.

    ``half_values`` holds the D/2 + 1 non-redundant values of a
    conjugate-symmetric spectrum; frequency k reads index min(k, D - k).
    ``order`` lists the frequencies to use, and consecutive runs of
    ``batch_size`` form the batches. Also returns the subgradient weights
    sign(batch deviation) / (nb * B) summed onto each half-spectrum slot.
    """
    nb = len(order) // batch_size
    idx = np.minimum(order, d - order)
    sel = half_values[idx].reshape(nb, batch_size)
    # cumsum is strictly left-to-right, matching the compiled loop
    dev = np.cumsum(sel, axis=1)[:, -1] / batch_size - target
    value = float(np.cumsum(np.abs(dev))[-1] / nb)
    contrib = np.repeat(np.sign(dev), batch_size) / (nb * batch_size)
    weights = np.bincount(idx, weights=contrib, minlength=len(half_values))
    return value, weights


def smooth5(img):
    """Circular 5-point stencil: 0.5 at the centre, 0.125 on each neighbour."""
    return 0.5 * img + 0.125 * (
        np.roll(img, 1, axis=0)
        + np.roll(img, -1, axis=0)
        + np.roll(img, 1, axis=1)
        + np.roll(img, -1, axis=1)
    )


def circular_autocorr_direct(x):
    d = len(x)
    out = np.empty(d)
    for r in range(d):
        out[r] = np.dot(x, np.roll(x, -r)) / d
    return out
