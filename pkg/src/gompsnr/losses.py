"""Omnidirectional phase losses (OP, WOP, ORI, CORI) with analytic gradients.

All losses take (L, K) magnitude/phase grids and average over the 9 x L x K
derivative entries. Gradients are taken with respect to the *estimated*
magnitude and phase. Non-smooth points use the subgradient ``sign(0) = 0``,
both at anti-wrapping kinks and at L1 ties.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfig, ShapeMismatch
from .omniphase import anti_wrap, omni_derivatives, omni_derivatives_adjoint, wrap

__all__ = [
    "LossResult",
    "LOSS_KINDS",
    "DISTANCES",
    "loss_op",
    "loss_wop",
    "loss_ori",
    "loss_cori",
    "loss_gradients",
    "compute_loss",
    "ri_loss",
    "polar_to_rect_grad",
]

LOSS_KINDS = ("op", "wop", "ori", "cori")
DISTANCES = ("l1", "l2")


@dataclass
class LossResult:
    value: float
    grad_mag_est: np.ndarray | None = None
    grad_phase_est: np.ndarray | None = None


def _grids(*arrays):
    arrays = [np.asarray(a, dtype=np.float64) for a in arrays]
    shape = arrays[0].shape
    if arrays[0].ndim != 2 or 0 in shape:
        raise ShapeMismatch(f"expected non-empty (L, K) grids, got {shape}")
    for a in arrays[1:]:
        if a.shape != shape:
            raise ShapeMismatch(f"grid shapes differ: {shape} vs {a.shape}")
    return arrays


def _distance(a, b, distance):
    """Return ``h(a, b)`` and ``dh/db``."""
    d = a - b
    if distance == "l1":
        return np.abs(d), -np.sign(d)
    if distance == "l2":
        return d * d, -2.0 * d
    raise InvalidConfig(f"unknown distance {distance!r}")


def _weighted_phase_loss(theta, theta_est, weight, grad):
    """Shared body of OP/WOP: mean of ``weight * f_AW(d_i theta - d_i theta_est)``."""
    L, K = theta.shape
    scale = 1.0 / (9 * K * L)
    diff = omni_derivatives(theta) - omni_derivatives(theta_est)
    terms = anti_wrap(diff) if weight is None else weight * anti_wrap(diff)
    value = float(terms.sum() * scale)
    if not grad:
        return LossResult(value)
    cot = np.sign(wrap(diff))
    if weight is not None:
        cot = cot * weight
    g_phase = -scale * omni_derivatives_adjoint(cot)
    return LossResult(value, np.zeros_like(theta), g_phase)


def loss_op(theta, theta_est, grad: bool = False) -> LossResult:
    """Mean anti-wrapped distance between the derivative stacks of two phase grids."""
    theta, theta_est = _grids(theta, theta_est)
    return _weighted_phase_loss(theta, theta_est, None, grad)


def loss_wop(mag_ref, theta, theta_est, eps: float = 1e-8, grad: bool = False) -> LossResult:
    """OP loss with every bin weighted by ``|Y| / (max |Y| + eps)``.

    The maximum is global over the whole utterance, not per frame.
    """
    mag_ref, theta, theta_est = _grids(mag_ref, theta, theta_est)
    weight = mag_ref / (mag_ref.max() + eps)
    return _weighted_phase_loss(theta, theta_est, weight, grad)


def loss_ori(mag_ref, theta, mag_est, theta_est, distance: str = "l1", grad: bool = False) -> LossResult:
    """Real/imaginary-style loss on ``|Y| cos d_i theta`` and ``|Y| sin d_i theta``."""
    mag_ref, theta, mag_est, theta_est = _grids(mag_ref, theta, mag_est, theta_est)
    L, K = theta.shape
    scale = 1.0 / (9 * K * L)
    phi = omni_derivatives(theta)
    phi_est = omni_derivatives(theta_est)
    cos_est, sin_est = np.cos(phi_est), np.sin(phi_est)
    h_cos, dh_cos = _distance(mag_ref * np.cos(phi), mag_est * cos_est, distance)
    h_sin, dh_sin = _distance(mag_ref * np.sin(phi), mag_est * sin_est, distance)
    value = float((h_cos.sum() + h_sin.sum()) * scale)
    if not grad:
        return LossResult(value)
    g_mag = scale * (dh_cos * cos_est + dh_sin * sin_est).sum(axis=0)
    g_phi = mag_est * (dh_sin * cos_est - dh_cos * sin_est)
    g_phase = scale * omni_derivatives_adjoint(g_phi)
    return LossResult(value, g_mag, g_phase)


def loss_cori(mag_ref, theta, mag_est, theta_est, distance: str = "l1", grad: bool = False) -> LossResult:
    """Magnitude distance times anti-wrapped derivative distance, scaled by 2/(9 pi)."""
    mag_ref, theta, mag_est, theta_est = _grids(mag_ref, theta, mag_est, theta_est)
    L, K = theta.shape
    scale = 2.0 / (9.0 * np.pi * K * L)
    diff = omni_derivatives(theta) - omni_derivatives(theta_est)
    fa = anti_wrap(diff)
    h, dh = _distance(mag_ref, mag_est, distance)
    value = float((h * fa).sum() * scale)
    if not grad:
        return LossResult(value)
    g_mag = scale * dh * fa.sum(axis=0)
    g_phase = -scale * omni_derivatives_adjoint(h * np.sign(wrap(diff)))
    return LossResult(value, g_mag, g_phase)


def compute_loss(
    kind: str,
    mag_ref,
    theta,
    mag_est,
    theta_est,
    distance: str = "l1",
    grad: bool = False,
    eps: float = 1e-8,
) -> LossResult:
    """Dispatch on ``kind``; ``op``/``wop`` ignore ``distance`` (and ``op`` the magnitudes)."""
    if distance not in DISTANCES:
        raise InvalidConfig(f"unknown distance {distance!r}")
    if kind == "op":
        _grids(mag_ref, theta, mag_est, theta_est)
        return loss_op(theta, theta_est, grad=grad)
    if kind == "wop":
        _grids(mag_ref, theta, mag_est, theta_est)
        return loss_wop(mag_ref, theta, theta_est, eps=eps, grad=grad)
    if kind == "ori":
        return loss_ori(mag_ref, theta, mag_est, theta_est, distance, grad=grad)
    if kind == "cori":
        return loss_cori(mag_ref, theta, mag_est, theta_est, distance, grad=grad)
    raise InvalidConfig(f"unknown loss kind {kind!r}")


def loss_gradients(kind: str, mag_ref, theta, mag_est, theta_est, distance: str = "l1", eps: float = 1e-8) -> LossResult:
    return compute_loss(kind, mag_ref, theta, mag_est, theta_est, distance, grad=True, eps=eps)


def ri_loss(mag_ref, theta, mag_est, theta_est, distance: str = "l1") -> float:
    """Plain real/imaginary loss ``mean h(Re Y, Re Yh) + h(Im Y, Im Yh)``; a baseline for comparisons."""
    mag_ref, theta, mag_est, theta_est = _grids(mag_ref, theta, mag_est, theta_est)
    h_re, _ = _distance(mag_ref * np.cos(theta), mag_est * np.cos(theta_est), distance)
    h_im, _ = _distance(mag_ref * np.sin(theta), mag_est * np.sin(theta_est), distance)
    return float((h_re + h_im).mean())


def polar_to_rect_grad(mag, phase, grad_mag, grad_phase):
    """Chain polar gradients onto ``(re, im)`` via the polar Jacobian.

    Bins with zero magnitude get no phase contribution.
    """
    mag, phase, grad_mag, grad_phase = _grids(mag, phase, grad_mag, grad_phase)
    c, s = np.cos(phase), np.sin(phase)
    inv = np.divide(1.0, mag, out=np.zeros_like(mag), where=mag > 0)
    g_re = grad_mag * c - grad_phase * s * inv
    g_im = grad_mag * s + grad_phase * c * inv
    return g_re, g_im
