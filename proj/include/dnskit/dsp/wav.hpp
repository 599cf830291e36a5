#pragma once

#include <string>

#include "dnskit/dsp/stft.hpp"

namespace dnskit::dsp {

// 16-bit PCM mono at 16 kHz only; anything else is rejected with a clear
// error (resampling is out of scope).
Waveform read_wav(const std::string& path);
void write_wav(const std::string& path, const Waveform& w);

// Round to the 16-bit grid used on disk, as value/32768 with saturation.
double quantize16(double x);

}  // namespace dnskit::dsp
