#include "dnskit/model/norm.hpp"

#include <cmath>

namespace dnskit::model {

NormStats compute_norm_stats(
    const std::vector<dsp::ComplexSpectrogram>& specs) {
  require(!specs.empty(), "cannot compute normalization stats: empty corpus");
  const int K = specs.front().bins;

  NormStats st;
  st.mean = nn::Tensor({K, 2});
  st.std = nn::Tensor({K, 2});

  nn::Tensor sum({K, 2}), sum_sq({K, 2});
  std::size_t frames = 0;
  for (const auto& spec : specs) {
    require(spec.bins == K, "inconsistent bin counts across corpus");
    for (int l = 0; l < spec.frames; ++l) {
      for (int k = 0; k < K; ++k) {
        const auto z = spec.at(l, k);
        sum.at(k, 0) += z.real();
        sum.at(k, 1) += z.imag();
        sum_sq.at(k, 0) += z.real() * z.real();
        sum_sq.at(k, 1) += z.imag() * z.imag();
      }
    }
    frames += static_cast<std::size_t>(spec.frames);
  }

  const double n = static_cast<double>(frames);
  for (int k = 0; k < K; ++k) {
    for (int c = 0; c < 2; ++c) {
      const double mu = sum.at(k, c) / n;
      const double var = std::max(0.0, sum_sq.at(k, c) / n - mu * mu);
      st.mean.at(k, c) = mu;
      st.std.at(k, c) = std::max(std::sqrt(var), NormStats::kStdFloor);
    }
  }
  return st;
}

nn::Tensor spectrogram_to_tensor(const dsp::ComplexSpectrogram& spec) {
  nn::Tensor x({spec.frames, spec.bins, 2});
  for (int l = 0; l < spec.frames; ++l) {
    for (int k = 0; k < spec.bins; ++k) {
      x.at(l, k, 0) = spec.at(l, k).real();
      x.at(l, k, 1) = spec.at(l, k).imag();
    }
  }
  return x;
}

nn::Tensor normalize_spectrogram(const dsp::ComplexSpectrogram& spec,
                                 const NormStats& stats) {
  require(stats.mean.ndim() == 2 && stats.mean.dim(0) == spec.bins,
          "normalization stats cover ", stats.mean.dim(0),
          " bins, spectrogram has ", spec.bins);
  nn::Tensor x = spectrogram_to_tensor(spec);
  for (int l = 0; l < spec.frames; ++l) {
    for (int k = 0; k < spec.bins; ++k) {
      for (int c = 0; c < 2; ++c) {
        x.at(l, k, c) = (x.at(l, k, c) - stats.mean.at(k, c)) /
                        stats.std.at(k, c);
      }
    }
  }
  return x;
}

}  // namespace dnskit::model
