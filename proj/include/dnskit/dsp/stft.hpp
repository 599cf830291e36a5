#pragma once

#include <complex>
#include <vector>

#include "dnskit/util/error.hpp"

namespace dnskit::dsp {

inline constexpr int kSampleRate = 16000;

struct Waveform {
  std::vector<double> samples;
  int sample_rate = kSampleRate;

  std::size_t size() const { return samples.size(); }
};

// Frame length 384 with 50% overlap, periodic Hann, zero-padded to a 512-point
// FFT. The 257 physical bins (DC..Nyquist) are carried padded to 260 bins so
// the feature axis survives two halvings; the 3 extra bins are always zero.
struct StftConfig {
  int frame_len = 384;
  int hop = 192;
  int fft_size = 512;
  int n_bins = 260;

  int physical_bins() const { return fft_size / 2 + 1; }

  void validate() const {
    require(frame_len > 0 && hop > 0, "frame_len and hop must be positive");
    require(hop == frame_len / 2, "hop must be frame_len/2 (50% overlap)");
    require(fft_size >= frame_len, "fft_size must be >= frame_len");
    require((fft_size & (fft_size - 1)) == 0, "fft_size must be a power of 2");
    require(n_bins >= physical_bins(), "n_bins must cover the physical bins");
  }
};

struct ComplexSpectrogram {
  int frames = 0;
  int bins = 0;
  StftConfig cfg;
  std::vector<std::complex<double>> data;  // row-major frames x bins

  std::complex<double>& at(int l, int k) {
    return data[static_cast<std::size_t>(l) * bins + k];
  }
  const std::complex<double>& at(int l, int k) const {
    return data[static_cast<std::size_t>(l) * bins + k];
  }
};

// w[n] = 0.5 (1 - cos(2 pi n / N)), n = 0..N-1
std::vector<double> periodic_hann(int n);

int stft_frame_count(std::size_t n_samples, const StftConfig& cfg);

ComplexSpectrogram stft(const Waveform& w, const StftConfig& cfg);

// Weighted overlap-add inverse; reconstructs the analyzed region
// (frames-1)*hop + frame_len samples. Bins beyond the physical 257 are
// dropped before the inverse transform.
Waveform istft_ola(const ComplexSpectrogram& spec, const StftConfig& cfg);

// 257 physical bins <-> 260 padded bins (padding is zero, exactly invertible)
ComplexSpectrogram pad_bins(const ComplexSpectrogram& phys);
ComplexSpectrogram drop_bins(const ComplexSpectrogram& padded);

}  // namespace dnskit::dsp
