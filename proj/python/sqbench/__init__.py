"""Speech-quality bias toolkit: degradation synthesis, intrusive metrics,
and the statistics used in the bias analysis."""

from ._sqbench import (
    SqbenchError,
    __version__,
    alaw_decode,
    alaw_encode,
    codec_pass,
    degrade,
    deviation_stats,
    disturbance_score,
    gen_noise,
    irs_filter,
    ks_two_sample,
    mix_at_snr,
    normalize_to_dbfs,
    nsim_score,
    polyfit_cubic,
    read_wav,
    resample,
    trim_silence,
    write_wav,
)

__all__ = [
    "SqbenchError",
    "__version__",
    "alaw_decode",
    "alaw_encode",
    "codec_pass",
    "degrade",
    "deviation_stats",
    "disturbance_score",
    "gen_noise",
    "irs_filter",
    "ks_two_sample",
    "mix_at_snr",
    "normalize_to_dbfs",
    "nsim_score",
    "polyfit_cubic",
    "read_wav",
    "resample",
    "trim_silence",
    "write_wav",
]
