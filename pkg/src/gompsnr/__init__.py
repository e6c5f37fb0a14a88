"""SNR-family audio metrics with omnidirectional phase derivatives, plus phase-aware losses."""

__version__ = "0.1.0"

from .errors import GompsnrError
from .losses import LossResult, compute_loss, loss_cori, loss_gradients, loss_op, loss_ori, loss_wop
from .metrics import Kind, MetricReport, correlation_component, score_pair, snr_family, snr_family_from_spectra, snr_time
from .omniphase import KERNELS, anti_wrap, omni_derivatives
from .signal_io import Waveform, align_pair, load_waveform, read_manifest, write_report
from .stats import correlation_matrix, pcc, srcc
from .stft import StftConfig, stft, to_mag_phase
