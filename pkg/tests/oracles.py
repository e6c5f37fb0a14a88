"""Slow, independent reference implementations used only by the tests.

None of these call into the vectorized library paths they are compared with.
"""

import math

import numpy as np

OFFSETS = [(dl, dk) for dl in (-1, 0, 1) for dk in (-1, 0, 1) if (dl, dk) != (0, 0)]


def reflect_index(i, n):
    # mirror without repeating the edge sample, as many times as needed
    if n == 1:
        return 0
    period = 2 * (n - 1)
    i = i % period
    return i if i < n else period - i


def naive_stft(x, window_size=1024, hop=256, center=True, fft_size=None):
    fft_size = fft_size or window_size
    x = list(map(float, x))
    if center:
        half = window_size // 2
        x = [x[reflect_index(i, len(x))] for i in range(-half, len(x) + half)]
    n_frames = 1 + (len(x) - window_size) // hop
    win = np.array([0.5 - 0.5 * math.cos(2 * math.pi * m / window_size) for m in range(window_size)])
    n_bins = fft_size // 2 + 1
    m = np.arange(window_size)
    basis = np.exp(-2j * np.pi * np.outer(np.arange(n_bins), m) / fft_size)
    out = np.zeros((n_frames, n_bins), dtype=complex)
    for l in range(n_frames):
        frame = np.array(x[l * hop : l * hop + window_size]) * win
        # O(N^2) DFT via explicit basis, one frame at a time
        out[l] = basis @ frame
    return out


def naive_derivs(phase):
    phase = np.asarray(phase, dtype=float)
    L, K = phase.shape
    out = np.zeros((9, L, K))
    for l in range(L):
        for k in range(K):
            for i, (dl, dk) in enumerate(OFFSETS):
                ln = min(max(l + dl, 0), L - 1)
                kn = min(max(k + dk, 0), K - 1)
                out[i, l, k] = phase[l, k] - phase[ln, kn]
            out[8, l, k] = phase[l, k]
    return out


def f_aw(x):
    r = x / (2 * math.pi)
    n = math.floor(abs(r) + 0.5) * (1 if r >= 0 else -1)
    return abs(x - 2 * math.pi * n)


def bin_component(kind, my, mh, dref, dest):
    """Correlation component at one bin; dref/dest are the nine channel values (or one phase for snr)."""
    if kind == "snr":
        return -2.0 * my * mh * math.cos(dref - dest)
    if kind == "ompsnr":
        return -(2.0 / 9.0) * my * mh * sum(math.cos(a - b) for a, b in zip(dref, dest))
    return (2.0 / 9.0) * my * mh * sum(f_aw(a - b) / math.pi - 1.0 for a, b in zip(dref, dest))


def naive_snr_family_db(Y, Yh, kinds=("snr", "ompsnr", "gompsnr")):
    """Assemble the T-F SNR family bin by bin from complex spectrograms."""
    L, K = Y.shape
    my = np.abs(Y)
    mh = np.abs(Yh)
    th = np.where(my == 0, 0.0, np.angle(Y))
    thh = np.where(mh == 0, 0.0, np.angle(Yh))
    dy = naive_derivs(th) if set(kinds) - {"snr"} else None
    dh = naive_derivs(thh) if set(kinds) - {"snr"} else None
    out = {}
    for kind in kinds:
        num = 0.0
        den = []
        for l in range(L):
            for k in range(K):
                a, b = float(my[l, k]), float(mh[l, k])
                num += a * a
                if kind == "snr":
                    c = bin_component(kind, a, b, float(th[l, k]), float(thh[l, k]))
                else:
                    c = bin_component(kind, a, b, dy[:, l, k].tolist(), dh[:, l, k].tolist())
                den.append(a * a + b * b + c)
        d = max(math.fsum(den), 0.0)
        out[kind] = math.inf if d == 0.0 else 10 * math.log10(num / d)
    return out


def loss_oracle(kind, my, th, mh, thh, distance="l1", eps=1e-8):
    my, th, mh, thh = (np.asarray(a, dtype=float) for a in (my, th, mh, thh))
    L, K = th.shape
    dy = naive_derivs(th)
    dh = naive_derivs(thh)
    h = (lambda a, b: abs(a - b)) if distance == "l1" else (lambda a, b: (a - b) ** 2)
    mx = max(my.ravel().tolist())
    total = 0.0
    for i in range(9):
        for l in range(L):
            for k in range(K):
                p, q = dy[i, l, k], dh[i, l, k]
                if kind == "op":
                    total += f_aw(p - q)
                elif kind == "wop":
                    total += my[l, k] * f_aw(p - q) / (mx + eps)
                elif kind == "ori":
                    total += h(my[l, k] * math.cos(p), mh[l, k] * math.cos(q))
                    total += h(my[l, k] * math.sin(p), mh[l, k] * math.sin(q))
                else:
                    total += h(my[l, k], mh[l, k]) * f_aw(p - q)
    if kind == "cori":
        return 2.0 / (9.0 * math.pi) * total / (K * L)
    return total / (9 * K * L)


def brute_ranks(x):
    """Average ranks by counting, O(n^2)."""
    x = list(x)
    ranks = []
    for v in x:
        less = sum(1 for u in x if u < v)
        equal = sum(1 for u in x if u == v)
        ranks.append(less + (equal + 1) / 2.0)
    return ranks


def direct_pearson(x, y):
    """Textbook formula in extended precision via fractions-free mpmath-like float sums."""
    import mpmath

    mpmath.mp.dps = 40
    x = [mpmath.mpf(float(v)) for v in x]
    y = [mpmath.mpf(float(v)) for v in y]
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    return float(sxy / mpmath.sqrt(sxx * syy))


def central_diff(f, x, step=1e-5):
    x = np.array(x, dtype=float)
    g = np.zeros_like(x)
    for idx in np.ndindex(*x.shape):
        orig = x[idx]
        x[idx] = orig + step
        fp = f(x)
        x[idx] = orig - step
        fm = f(x)
        x[idx] = orig
        g[idx] = (fp - fm) / (2 * step)
    return g
