"""
Metric agreement via PCC and SRCC
=================================

Builds a small synthetic corpus with graded distortion, scores every pair,
and correlates the metrics with each other and with the distortion rank,
the same way a table of perceptual scores would be analysed.
"""

# %%
import numpy as np

from gompsnr import Waveform, correlation_matrix, score_pair
from gompsnr.signal_io import score_table_from_records

rng = np.random.default_rng(2)
sr = 16000
t = np.arange(sr // 2) / sr

ids, records = [], []
for j, level in enumerate(np.linspace(0.005, 0.3, 40)):
    ref = np.sin(2 * np.pi * rng.uniform(120, 300) * t) * (0.6 + 0.4 * np.sin(2 * np.pi * 3 * t))
    est = ref + level * rng.standard_normal(ref.size)
    r = score_pair(Waveform(ref, sr), Waveform(est, sr))
    ids.append(f"utt{j:02d}")
    records.append({"distortion": -level, "snr_time": r.snr_time_db, "snr_tf": r.snr_tf_db, "gompsnr": r.gompsnr_db})

# %%
table = score_table_from_records(ids, records)
cm = correlation_matrix(table)
print("metrics:", cm.metric_names)
print("SRCC\n", np.round(cm.srcc, 3))
print("PCC\n", np.round(cm.pcc, 3))
