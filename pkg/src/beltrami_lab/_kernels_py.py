"""Numpy implementations of the hot loops; used when the compiled module is absent."""

from __future__ import annotations

import numpy as np
from scipy.ndimage import maximum_filter1d, minimum_filter1d


def box_product(Sa, Sb, rows, cols, sides, ea, eb):
    """mean_a(Q)**ea * mean_b(Q)**eb for square boxes read off summed-area tables.

    Box Q covers rows [r, r+s) and columns [c, c+s) of the table's source array.
    """
    r = np.asarray(rows, dtype=np.int64)
    c = np.asarray(cols, dtype=np.int64)
    s = np.asarray(sides, dtype=np.int64)
    area = (s * s).astype(float)

    def mean(S):
        return (S[r + s, c + s] - S[r, c + s] - S[r + s, c] + S[r, c]) / area

    return mean(Sa) ** ea * mean(Sb) ** eb


def besov_sum(z, f, ds, q, diag, chunk=256):
    """Off-diagonal double sum of |f_i - f_j|^q / |z_i - z_j|^q ds_i ds_j plus sum diag_i ds_i^2.

    Returns (total, number of coincident distinct node pairs).
    """
    z = np.asarray(z, dtype=complex)
    f = np.asarray(f, dtype=complex)
    ds = np.asarray(ds, dtype=float)
    m = z.size
    total = 0.0
    bad = 0
    for i0 in range(0, m, chunk):
        i1 = min(m, i0 + chunk)
        dz = np.abs(z[i0:i1, None] - z[None, :])
        df = np.abs(f[i0:i1, None] - f[None, :])
        rows = np.arange(i0, i1)
        dz[rows - i0, rows] = 1.0
        df[rows - i0, rows] = 0.0
        zero = dz == 0
        if zero.any():
            bad += int(zero.sum())
            dz[zero] = 1.0
            df[zero] = 0.0
        total += float(((df / dz) ** q * ds[None, :]).sum(axis=1) @ ds[i0:i1])
    total += float(np.sum(np.asarray(diag, dtype=float) * ds * ds))
    return total, bad


def oscillation(f, widths):
    """max over windows of width w (in samples) of max - min, for each w."""
    f = np.asarray(f, dtype=float)
    out = np.empty(len(widths))
    for k, w in enumerate(widths):
        size = int(w) + 1
        if size >= f.size:
            out[k] = f.max() - f.min()
        else:
            out[k] = (maximum_filter1d(f, size, mode="nearest") - minimum_filter1d(f, size, mode="nearest")).max()
    return out
