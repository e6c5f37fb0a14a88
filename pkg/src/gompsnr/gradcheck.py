"""Central finite differences and kink-free sampling for the loss gradients."""

from __future__ import annotations

import numpy as np

from .losses import compute_loss
from .omniphase import omni_derivatives, wrap

__all__ = ["central_difference", "structural_zero_mask", "sample_smooth_instance", "check_loss_gradient"]

KINK_MARGIN = 1e-3


def central_difference(f, x: np.ndarray, step: float = 1e-5) -> np.ndarray:
    """Gradient of scalar ``f`` at ``x`` by central differences, one entry at a time."""
    x = np.array(x, dtype=np.float64)
    g = np.zeros_like(x)
    flat = x.reshape(-1)
    gflat = g.reshape(-1)
    for j in range(flat.size):
        orig = flat[j]
        flat[j] = orig + step
        fp = f(x)
        flat[j] = orig - step
        fm = f(x)
        flat[j] = orig
        gflat[j] = (fp - fm) / (2.0 * step)
    return g


def structural_zero_mask(shape) -> np.ndarray:
    """True where a difference channel compares a bin with its own clamped copy.

    Those entries are identically zero for every input grid.
    """
    probe = np.arange(np.prod(shape), dtype=np.float64).reshape(shape)
    mask = omni_derivatives(probe) == 0.0
    mask[8] = False
    return mask


def _is_smooth(kind, distance, mag_ref, theta, mag_est, theta_est, margin) -> bool:
    live = ~structural_zero_mask(theta.shape)
    phi = omni_derivatives(theta)
    phi_est = omni_derivatives(theta_est)
    if kind in ("op", "wop", "cori"):
        w = np.abs(wrap(phi - phi_est))[live]
        if np.any(w < margin) or np.any(w > np.pi - margin):
            return False
    if kind == "cori" and distance == "l1" and np.any(np.abs(mag_ref - mag_est) < margin):
        return False
    if kind == "ori" and distance == "l1":
        dc = mag_ref * np.cos(phi) - mag_est * np.cos(phi_est)
        ds = (mag_ref * np.sin(phi) - mag_est * np.sin(phi_est))[live]
        if np.any(np.abs(dc) < margin) or np.any(np.abs(ds) < margin):
            return False
    return True


def sample_smooth_instance(rng: np.random.Generator, shape, kind: str, distance: str, margin: float = KINK_MARGIN):
    """Draw ``(mag_ref, theta, mag_est, theta_est)`` at least ``margin`` away from every kink."""
    for _ in range(10_000):
        mag_ref = rng.uniform(0.5, 2.0, shape)
        mag_est = rng.uniform(0.5, 2.0, shape)
        theta = rng.uniform(-np.pi, np.pi, shape)
        theta_est = rng.uniform(-np.pi, np.pi, shape)
        if _is_smooth(kind, distance, mag_ref, theta, mag_est, theta_est, margin):
            return mag_ref, theta, mag_est, theta_est
    raise RuntimeError("could not sample a kink-free instance")


def check_loss_gradient(kind, distance, mag_ref, theta, mag_est, theta_est, step=1e-5, rtol=1e-4, atol=1e-9):
    """Compare analytic loss gradients with central differences.

    Returns the worst ``|analytic - numeric| / max(|analytic|, |numeric|)``
    over components that are not numerically zero, and whether every
    component satisfied ``err <= rtol * scale + atol``.
    """
    res = compute_loss(kind, mag_ref, theta, mag_est, theta_est, distance, grad=True)
    fd_phase = central_difference(lambda t: compute_loss(kind, mag_ref, theta, mag_est, t, distance).value, theta_est, step)
    fd_mag = central_difference(lambda m: compute_loss(kind, mag_ref, theta, m, theta_est, distance).value, mag_est, step)
    worst = 0.0
    ok = True
    for an, fd in ((res.grad_phase_est, fd_phase), (res.grad_mag_est, fd_mag)):
        err = np.abs(an - fd)
        scale = np.maximum(np.abs(an), np.abs(fd))
        ok &= bool(np.all(err <= rtol * scale + atol))
        sig = scale > atol
        if np.any(sig):
            worst = max(worst, float(np.max(err[sig] / scale[sig])))
    return worst, ok
