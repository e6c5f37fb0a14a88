"""
Phase-aware losses and their gradients
======================================

Evaluates OP, WOP, ORI and CORI between two spectrograms and runs a few
steps of plain gradient descent on the estimated phase using the analytic
gradients.
"""

# %%
import numpy as np

from gompsnr import compute_loss, loss_gradients, stft, to_mag_phase
from gompsnr.gradcheck import check_loss_gradient, sample_smooth_instance

rng = np.random.default_rng(1)
x = rng.standard_normal(8192)
target = to_mag_phase(stft(x))
est = to_mag_phase(stft(x + 0.3 * rng.standard_normal(x.size)))

for kind in ("op", "wop", "ori", "cori"):
    for dist in ("l1", "l2") if kind in ("ori", "cori") else ("l1",):
        v = compute_loss(kind, target.mag, target.phase, est.mag, est.phase, dist).value
        print(f"{kind:5s} {dist}: {v:.5f}")

# %%
# Descend the WOP loss over the estimated phase
phase = est.phase.copy()
for step in range(6):
    res = loss_gradients("wop", target.mag, target.phase, est.mag, phase)
    print(f"step {step}: wop = {res.value:.5f}")
    phase -= 2000.0 * res.grad_phase_est

# %%
# Gradients agree with central differences away from the non-smooth points
for kind, dist in (("op", "l1"), ("ori", "l2"), ("cori", "l1")):
    worst, ok = check_loss_gradient(kind, dist, *sample_smooth_instance(rng, (4, 4), kind, dist))
    print(f"{kind}/{dist}: worst relative error {worst:.1e}, ok={ok}")
