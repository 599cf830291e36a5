#include "dnskit/dsp/stft.hpp"

#include <cmath>

#include "dnskit/dsp/fft.hpp"

namespace dnskit::dsp {

std::vector<double> periodic_hann(int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    w[static_cast<std::size_t>(i)] =
        0.5 * (1.0 - std::cos(2.0 * M_PI * i / static_cast<double>(n)));
  }
  return w;
}

int stft_frame_count(std::size_t n_samples, const StftConfig& cfg) {
  require(n_samples >= static_cast<std::size_t>(cfg.frame_len),
          "signal shorter than one frame: ", n_samples, " < ", cfg.frame_len);
  return 1 + static_cast<int>((n_samples - static_cast<std::size_t>(
                                               cfg.frame_len)) /
                              static_cast<std::size_t>(cfg.hop));
}

ComplexSpectrogram stft(const Waveform& w, const StftConfig& cfg) {
  cfg.validate();
  require(w.sample_rate == kSampleRate, "expected ", kSampleRate,
          " Hz input, got ", w.sample_rate);
  const int frames = stft_frame_count(w.size(), cfg);
  const int phys = cfg.physical_bins();
  const std::vector<double> win = periodic_hann(cfg.frame_len);

  ComplexSpectrogram spec;
  spec.frames = frames;
  spec.bins = cfg.n_bins;
  spec.cfg = cfg;
  spec.data.assign(static_cast<std::size_t>(frames) * cfg.n_bins, {0.0, 0.0});

  std::vector<std::complex<double>> buf(static_cast<std::size_t>(cfg.fft_size));
  for (int l = 0; l < frames; ++l) {
    const std::size_t off = static_cast<std::size_t>(l) *
                            static_cast<std::size_t>(cfg.hop);
    for (int n = 0; n < cfg.frame_len; ++n) {
      buf[static_cast<std::size_t>(n)] = {
          w.samples[off + static_cast<std::size_t>(n)] *
              win[static_cast<std::size_t>(n)],
          0.0};
    }
    for (int n = cfg.frame_len; n < cfg.fft_size; ++n) {
      buf[static_cast<std::size_t>(n)] = {0.0, 0.0};
    }
    fft_inplace(buf, false);
    for (int k = 0; k < phys; ++k) {
      spec.at(l, k) = buf[static_cast<std::size_t>(k)];
    }
    // bins phys..n_bins-1 stay zero
  }
  return spec;
}

Waveform istft_ola(const ComplexSpectrogram& spec, const StftConfig& cfg) {
  cfg.validate();
  require(spec.frames >= 1, "empty spectrogram");
  require(spec.bins == cfg.n_bins, "spectrogram has ", spec.bins,
          " bins, config expects ", cfg.n_bins);
  const int phys = cfg.physical_bins();
  const std::vector<double> win = periodic_hann(cfg.frame_len);
  const std::size_t out_len =
      static_cast<std::size_t>(spec.frames - 1) * cfg.hop + cfg.frame_len;

  std::vector<double> acc(out_len, 0.0);
  std::vector<double> env(out_len, 0.0);
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(cfg.fft_size));

  for (int l = 0; l < spec.frames; ++l) {
    for (int k = 0; k < phys; ++k) {
      buf[static_cast<std::size_t>(k)] = spec.at(l, k);
    }
    // conjugate-symmetric extension of the physical half spectrum
    for (int k = phys; k < cfg.fft_size; ++k) {
      buf[static_cast<std::size_t>(k)] =
          std::conj(spec.at(l, cfg.fft_size - k));
    }
    fft_inplace(buf, true);
    const std::size_t off = static_cast<std::size_t>(l) *
                            static_cast<std::size_t>(cfg.hop);
    for (int n = 0; n < cfg.frame_len; ++n) {
      const double wn = win[static_cast<std::size_t>(n)];
      acc[off + static_cast<std::size_t>(n)] +=
          wn * buf[static_cast<std::size_t>(n)].real();
      env[off + static_cast<std::size_t>(n)] += wn * wn;
    }
  }

  Waveform out;
  out.sample_rate = kSampleRate;
  out.samples.resize(out_len);
  for (std::size_t n = 0; n < out_len; ++n) {
    out.samples[n] = acc[n] / std::max(env[n], 1e-8);
  }
  return out;
}

ComplexSpectrogram pad_bins(const ComplexSpectrogram& phys) {
  require(phys.bins == phys.cfg.physical_bins(), "pad_bins expects ",
          phys.cfg.physical_bins(), " bins, got ", phys.bins);
  ComplexSpectrogram out;
  out.frames = phys.frames;
  out.bins = phys.cfg.n_bins;
  out.cfg = phys.cfg;
  out.data.assign(static_cast<std::size_t>(out.frames) * out.bins, {0.0, 0.0});
  for (int l = 0; l < out.frames; ++l) {
    for (int k = 0; k < phys.bins; ++k) {
      out.at(l, k) = phys.at(l, k);
    }
  }
  return out;
}

ComplexSpectrogram drop_bins(const ComplexSpectrogram& padded) {
  require(padded.bins == padded.cfg.n_bins, "drop_bins expects ",
          padded.cfg.n_bins, " bins, got ", padded.bins);
  ComplexSpectrogram out;
  out.frames = padded.frames;
  out.bins = padded.cfg.physical_bins();
  out.cfg = padded.cfg;
  out.data.resize(static_cast<std::size_t>(out.frames) * out.bins);
  for (int l = 0; l < out.frames; ++l) {
    for (int k = 0; k < out.bins; ++k) {
      out.at(l, k) = padded.at(l, k);
    }
  }
  return out;
}

}  // namespace dnskit::dsp
