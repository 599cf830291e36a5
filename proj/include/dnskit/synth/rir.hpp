#pragma once

#include <array>

#include "dnskit/dsp/stft.hpp"

namespace dnskit::synth {

inline constexpr double kSpeedOfSound = 343.0;  // m/s

struct RoomSpec {
  double length = 0.0, width = 0.0, height = 0.0;  // meters
  double absorption = 0.0;                          // all surfaces, (0,1]
  std::array<double, 3> source_pos{};
  std::array<double, 3> mic_pos{};
  int max_image_order = 8;  // max total wall bounces per image

  void validate() const;
  double source_mic_distance() const;
};

// Mirror/image-source method with frequency-independent reflection
// coefficient sqrt(1-absorption) per bounce, 1/distance amplitude, taps
// placed at the nearest sample.
dsp::Waveform simulate_rir(const RoomSpec& room, int sample_rate,
                           double c = kSpeedOfSound);

// Index of the direct-path tap: round(distance/c * fs).
int direct_path_delay(const RoomSpec& room, int sample_rate,
                      double c = kSpeedOfSound);

// Time-zero alignment for mask-based training targets: shift so the direct
// tap lands at index 0 and rescale it to unit amplitude.
dsp::Waveform align_rir(const dsp::Waveform& rir, int direct_delay,
                        double direct_amplitude);

// Linear convolution truncated to the speech length.
dsp::Waveform reverberate(const dsp::Waveform& speech,
                          const dsp::Waveform& rir);

}  // namespace dnskit::synth
