"""Embedded invariant suite behind ``gompsnr selfcheck``.

Each group returns ``(ok, detail)``; output depends only on the seed.
"""

from __future__ import annotations

import numpy as np

from .gradcheck import check_loss_gradient, sample_smooth_instance
from .losses import DISTANCES, LOSS_KINDS
from .metrics import Kind, correlation_component
from .omniphase import KERNELS, NEIGHBOR_OFFSETS, anti_wrap, omni_derivatives

__all__ = ["GROUPS", "run_selfcheck", "naive_derivatives"]


def naive_derivatives(phase: np.ndarray) -> np.ndarray:
    """Loop implementation of the nine channels with explicit edge clamping."""
    L, K = phase.shape
    out = np.zeros((9, L, K))
    for l in range(L):
        for k in range(K):
            for i, (dl, dk) in enumerate(NEIGHBOR_OFFSETS):
                ln = min(max(l + dl, 0), L - 1)
                kn = min(max(k + dk, 0), K - 1)
                out[i, l, k] = phase[l, k] - phase[ln, kn]
            out[8, l, k] = phase[l, k]
    return out


def check_anti_wrap(rng, kernels):
    x = rng.uniform(-50.0, 50.0, 2000)
    m = rng.integers(-5, 6, 2000)
    a = anti_wrap(x)
    b = anti_wrap(x + 2.0 * np.pi * m)
    err = float(np.max(np.abs(a - b)))
    in_range = bool(np.all((a >= 0.0) & (a <= np.pi)))
    return err <= 1e-9 and in_range, f"max periodicity error {err:.1e}"


def check_kernels(rng, kernels):
    worst = 0.0
    for _ in range(20):
        shape = tuple(rng.integers(1, 9, 2))
        phase = rng.uniform(-np.pi, np.pi, shape)
        worst = max(worst, float(np.max(np.abs(omni_derivatives(phase, kernels) - naive_derivatives(phase)))))
    return worst <= 1e-12, f"max oracle deviation {worst:.1e}"


def check_denominator(rng, kernels):
    shape = (9, 60, 60)
    m_ref = rng.exponential(1.0, shape[1:])
    m_est = rng.exponential(1.0, shape[1:])
    d_ref = rng.uniform(-4 * np.pi, 4 * np.pi, shape)
    d_est = rng.uniform(-4 * np.pi, 4 * np.pi, shape)
    lo = (m_ref - m_est) ** 2
    ok = True
    for kind, hi in ((Kind.OMPSNR, (m_ref + m_est) ** 2), (Kind.GOMPSNR, m_ref**2 + m_est**2)):
        den = m_ref**2 + m_est**2 + correlation_component(kind, m_ref, m_est, d_ref, d_est)
        tol = 1e-9 * (1.0 + hi)
        ok &= bool(np.all(den >= -1e-9) and np.all(den >= lo - tol) and np.all(den <= hi + tol))
    return ok, "per-bin bounds on 3600 bins"


def check_gradients(rng, kernels):
    worst = 0.0
    ok = True
    for kind in LOSS_KINDS:
        for distance in DISTANCES if kind in ("ori", "cori") else ("l1",):
            inst = sample_smooth_instance(rng, (3, 4), kind, distance)
            err, passed = check_loss_gradient(kind, distance, *inst)
            worst = max(worst, err)
            ok &= passed
    return ok, f"worst relative error {worst:.1e}"


GROUPS = {
    "anti_wrap": check_anti_wrap,
    "kernel": check_kernels,
    "denominator": check_denominator,
    "gradient": check_gradients,
}


def run_selfcheck(seed: int = 0, kernels: np.ndarray = KERNELS) -> tuple[bool, list[str]]:
    """Run every group; returns overall success and one printable line per group."""
    lines = []
    all_ok = True
    for index, (name, fn) in enumerate(GROUPS.items()):
        rng = np.random.default_rng([seed, index])
        try:
            ok, detail = fn(rng, np.asarray(kernels, dtype=np.float64))
        except Exception as exc:  # a crashing group is a failing group
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        all_ok &= ok
        lines.append(f"{name}: {'pass' if ok else 'fail'} ({detail})")
    return all_ok, lines
