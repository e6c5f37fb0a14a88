"""Exception hierarchy with stable machine-readable codes.

Every expected failure raised by the library derives from ``GompsnrError``
and carries a snake_case ``code`` and a CLI ``exit_code`` category
(2 = bad input, 3 = computation, 4 = I/O).
"""

from __future__ import annotations

INPUT = 2
COMPUTATION = 3
IO = 4


class GompsnrError(Exception):
    code = "error"
    exit_code = INPUT

    def __init__(self, message: str = "", *, pair_id: str | None = None):
        super().__init__(message)
        self.message = message
        self.pair_id = pair_id

    def to_dict(self) -> dict:
        out = {"code": self.code, "message": self.message}
        if self.pair_id is not None:
            out["id"] = self.pair_id
        return out


class UnsupportedFormat(GompsnrError):
    code = "unsupported_format"


class CorruptHeader(GompsnrError):
    code = "corrupt_header"


class EmptyAudio(GompsnrError):
    code = "empty_audio"


class MultiChannel(GompsnrError):
    code = "multi_channel"


class NonFiniteAudio(GompsnrError):
    code = "non_finite_audio"


class SampleRateMismatch(GompsnrError):
    code = "sample_rate_mismatch"


class LengthMismatch(GompsnrError):
    code = "length_mismatch"


class TooShort(GompsnrError):
    code = "too_short"


class MissingColumn(GompsnrError):
    code = "missing_column"


class DuplicateId(GompsnrError):
    code = "duplicate_id"


class EmptyManifest(GompsnrError):
    code = "empty_manifest"


class EmptyReport(GompsnrError):
    code = "empty_report"


class InvalidConfig(GompsnrError):
    code = "invalid_config"


class ShapeMismatch(GompsnrError):
    code = "shape_mismatch"


class SilentReference(GompsnrError):
    code = "silent_reference"


class ConstantInput(GompsnrError):
    code = "constant_input"


class TooFew(GompsnrError):
    code = "too_few"


class UnknownMetric(GompsnrError):
    code = "unknown_metric"


class SelfCheckFailed(GompsnrError):
    code = "selfcheck_failed"
    exit_code = COMPUTATION


class IoFailure(GompsnrError):
    code = "io_failure"
    exit_code = IO


class NonFiniteInput(GompsnrError):
    code = "non_finite_input"


class InvalidValue(GompsnrError):
    code = "invalid_value"
