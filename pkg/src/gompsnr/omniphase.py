"""Omnidirectional phase derivatives and the anti-wrapping distance.

A phase grid of shape (L, K) (frames x bins) is correlated with nine fixed
3x3 kernels under edge-clamped padding. Kernels 0-7 take
``center - neighbor`` for the eight neighbor offsets ``(dl, dk)`` listed
row-major; kernel 8 is the identity and returns the phase itself.
"""

from __future__ import annotations

import numpy as np

from .errors import ShapeMismatch

__all__ = [
    "NEIGHBOR_OFFSETS",
    "KERNELS",
    "make_kernel_bank",
    "validate_kernel_bank",
    "omni_derivatives",
    "omni_derivatives_adjoint",
    "anti_wrap",
    "wrap",
]

TWO_PI = 2.0 * np.pi

NEIGHBOR_OFFSETS: tuple[tuple[int, int], ...] = tuple(
    (dl, dk) for dl in (-1, 0, 1) for dk in (-1, 0, 1) if (dl, dk) != (0, 0)
)


def make_kernel_bank() -> np.ndarray:
    bank = np.zeros((9, 3, 3))
    for i, (dl, dk) in enumerate(NEIGHBOR_OFFSETS):
        bank[i, 1, 1] = 1.0
        bank[i, 1 + dl, 1 + dk] = -1.0
    bank[8, 1, 1] = 1.0
    return bank


KERNELS = make_kernel_bank()
KERNELS.setflags(write=False)


def validate_kernel_bank(bank: np.ndarray) -> list[str]:
    """Return a list of structural problems with ``bank`` (empty when valid)."""
    problems = []
    bank = np.asarray(bank)
    if bank.shape != (9, 3, 3):
        return [f"expected shape (9, 3, 3), got {bank.shape}"]
    used = set()
    for i in range(8):
        k = bank[i]
        if k[1, 1] != 1.0:
            problems.append(f"kernel {i}: center is {k[1, 1]}, expected 1")
        neg = np.argwhere(k == -1.0)
        if len(neg) != 1 or np.count_nonzero(k) != 2:
            problems.append(f"kernel {i}: expected exactly one -1 neighbor and zeros elsewhere")
            continue
        off = (int(neg[0][0]) - 1, int(neg[0][1]) - 1)
        if off != NEIGHBOR_OFFSETS[i]:
            problems.append(f"kernel {i}: neighbor offset {off}, expected {NEIGHBOR_OFFSETS[i]}")
        used.add(off)
    if len(used) != 8 and not problems:
        problems.append("neighbor offsets are not all distinct")
    ident = np.zeros((3, 3))
    ident[1, 1] = 1.0
    if not np.array_equal(bank[8], ident):
        problems.append("kernel 8 is not the identity")
    return problems


def _check_grid(phase) -> np.ndarray:
    phase = np.asarray(phase, dtype=np.float64)
    if phase.ndim != 2 or 0 in phase.shape:
        raise ShapeMismatch(f"expected a non-empty 2-D grid, got shape {phase.shape}")
    return phase


def omni_derivatives(phase, kernels: np.ndarray = KERNELS) -> np.ndarray:
    """Correlate ``phase`` with each kernel under edge-clamped padding.

    Args:
        phase: (L, K) real grid.
        kernels: (C, 3, 3) kernel bank, ``KERNELS`` by default.

    Returns:
        (C, L, K) array; with the default bank channel 8 equals ``phase``.
    """
    phase = _check_grid(phase)
    L, K = phase.shape
    padded = np.pad(phase, 1, mode="edge")
    out = np.zeros((kernels.shape[0], L, K))
    for a in range(3):
        for b in range(3):
            coef = kernels[:, a, b]
            nz = np.nonzero(coef)[0]
            if nz.size == 0:
                continue
            window = padded[a : a + L, b : b + K]
            out[nz] += coef[nz, None, None] * window
    return out


def omni_derivatives_adjoint(grads, kernels: np.ndarray = KERNELS) -> np.ndarray:
    """Transpose of ``omni_derivatives``.

    Maps a (C, L, K) cotangent back onto the (L, K) phase grid. Cotangent
    mass that landed on padding cells is folded back into the edge cells
    they were copied from.
    """
    grads = np.asarray(grads, dtype=np.float64)
    if grads.ndim != 3 or grads.shape[0] != kernels.shape[0]:
        raise ShapeMismatch(f"expected ({kernels.shape[0]}, L, K) cotangent, got {grads.shape}")
    _, L, K = grads.shape
    padded = np.zeros((L + 2, K + 2))
    for a in range(3):
        for b in range(3):
            coef = kernels[:, a, b]
            if not coef.any():
                continue
            padded[a : a + L, b : b + K] += np.tensordot(coef, grads, axes=1)
    padded[1, :] += padded[0, :]
    padded[L, :] += padded[L + 1, :]
    padded[:, 1] += padded[:, 0]
    padded[:, K] += padded[:, K + 1]
    return padded[1 : L + 1, 1 : K + 1].copy()


def _round_half_away(q):
    return np.sign(q) * np.floor(np.abs(q) + 0.5)


def wrap(x):
    """Signed principal value ``x - 2 pi round(x / 2 pi)`` in [-pi, pi]."""
    x = np.asarray(x, dtype=np.float64)
    return x - TWO_PI * _round_half_away(x / TWO_PI)


def anti_wrap(x):
    """Anti-wrapping distance ``|x - 2 pi round(x / 2 pi)|``, in [0, pi].

    Works elementwise on arrays and returns a float for scalar input.
    """
    out = np.abs(wrap(x))
    # x/2pi can round so that the remainder creeps a few ulps past pi
    out = np.minimum(out, np.pi)
    return float(out) if out.ndim == 0 else out
