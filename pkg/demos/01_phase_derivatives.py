"""
Omnidirectional phase derivatives
=================================

Builds the nine-channel derivative stack for a linear chirp, prints the
kernel bank, and shows how the anti-wrapping distance folds values.
"""

# %%
import numpy as np

from gompsnr import KERNELS, anti_wrap, omni_derivatives, stft, to_mag_phase
from gompsnr.omniphase import NEIGHBOR_OFFSETS

sr = 22050
t = np.arange(sr) / sr
chirp = np.sin(2 * np.pi * (200 * t + 400 * t**2))

mp = to_mag_phase(stft(chirp))
print("spectrogram (frames, bins):", mp.phase.shape)

# %%
# Eight center-minus-neighbor kernels plus the identity
for i, off in enumerate(NEIGHBOR_OFFSETS):
    print(i, off, KERNELS[i].astype(int).tolist())
print(8, "identity", KERNELS[8].astype(int).tolist())

# %%
d = omni_derivatives(mp.phase)
strong = mp.mag > 0.1 * mp.mag.max()
for i, off in enumerate(NEIGHBOR_OFFSETS):
    print(f"channel {i} offset {off}: mean |wrapped derivative| {anti_wrap(d[i][strong]).mean():.3f} rad")
print("channel 8 equals the phase:", np.array_equal(d[8], mp.phase))

# %%
# f_AW maps any difference onto its principal distance in [0, pi]
x = np.array([0.0, np.pi / 2, np.pi, 3 * np.pi, -3 * np.pi, 2 * np.pi + 0.1])
for xi, fi in zip(x, anti_wrap(x)):
    print(f"f_AW({xi:+.3f}) = {fi:.3f}")
