#pragma once

#include <vector>

#include "dnskit/dsp/stft.hpp"
#include "dnskit/nn/tensor.hpp"

namespace dnskit::model {

// Per-(bin, channel) zero-mean unit-variance input normalization, collected
// over the training set. Channel 0 is the real part, channel 1 the imaginary.
struct NormStats {
  nn::Tensor mean;  // (K, 2)
  nn::Tensor std;   // (K, 2), floored at 1e-5

  static constexpr double kStdFloor = 1e-5;
};

NormStats compute_norm_stats(const std::vector<dsp::ComplexSpectrogram>& specs);

// (frames, K, 2) tensor view of a spectrogram.
nn::Tensor spectrogram_to_tensor(const dsp::ComplexSpectrogram& spec);

nn::Tensor normalize_spectrogram(const dsp::ComplexSpectrogram& spec,
                                 const NormStats& stats);

}  // namespace dnskit::model
