#pragma once

#include <cstdint>

#include "sqbench/audio.hpp"

namespace sqbench {

/// Telephone-band (300-3400 Hz) limitation of the intermediate reference
/// system, realized as a linear-phase FIR at 8 kHz. Unity gain (+-0.5 dB) at
/// 1 kHz, >= 20 dB rejection at <= 100 Hz and >= 3950 Hz, monotone rolloff
/// through both transitions. Output is group-delay compensated so it stays
/// sample-aligned with the input.
AudioBuffer irs_filter(const AudioBuffer& buf);

/// The FIR taps behind irs_filter (exposed for response verification).
const std::vector<double>& irs_filter_taps();

/// G.711 A-law companding. Total on all int16 inputs; decode is midpoint
/// reconstruction, total on all 256 codes.
std::uint8_t alaw_encode(std::int16_t sample);
std::int16_t alaw_decode(std::uint8_t code);

/// One encode/decode round trip through the A-law codec at 8 kHz:
/// float -> int16 -> A-law -> int16 -> float. Idempotent bit-exactly.
AudioBuffer codec_pass(const AudioBuffer& buf);

}  // namespace sqbench
