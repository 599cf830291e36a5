#pragma once

#include <cstdint>
#include <memory>

#include "dnskit/dsp/stft.hpp"
#include "dnskit/model/norm.hpp"
#include "dnskit/nn/layers.hpp"

namespace dnskit::model {

// Convolutional encoder-decoder over the frequency axis with a ConvLSTM
// bottleneck, estimating a magnitude-bounded complex mask. Two conv layers
// per resolution (widths F and 2F), two maxpool/upsample stages, additive
// skip connections where shapes match.
struct FcrnConfig {
  int filters = 88;  // F
  int kernel = 24;   // N
  int in_bins = 260;
  int in_ch = 2;
  int out_ch = 2;

  void validate() const {
    require(filters > 0 && kernel > 0, "filters and kernel must be positive");
    require(in_bins % 4 == 0,
            "in_bins must be divisible by 4 (two pooling stages), got ",
            in_bins);
    require(in_ch == 2 && out_ch == 2,
            "complex masking uses 2 input and 2 output channels");
  }

  bool operator==(const FcrnConfig&) const = default;
};

class Fcrn {
 public:
  Fcrn(FcrnConfig cfg, std::uint64_t seed);

  // normalized (L, K_in, 2) input -> complex mask (L, K_in, 2), |M| <= 1
  nn::Tensor forward(const nn::Tensor& y_norm);
  nn::Tensor backward(const nn::Tensor& d_mask);
  void clear_caches();

  std::vector<nn::Param*> parameters();
  void zero_grad();
  std::uint64_t param_hash() const;

  const FcrnConfig& config() const { return cfg_; }

 private:
  FcrnConfig cfg_;
  nn::FreqConv enc0a_, enc0b_, enc1a_, enc1b_;
  nn::Elu enc0a_act_, enc0b_act_, enc1a_act_, enc1b_act_;
  nn::MaxPoolFreq2 pool0_, pool1_;
  nn::ConvLstmFreq clstm_;
  nn::UpsampleFreq2 up1_, up0_;
  nn::FreqConv dec1a_, dec1b_, dec0a_, dec0b_;
  nn::Elu dec1a_act_, dec1b_act_, dec0a_act_, dec0b_act_;
  nn::FreqConv out_conv_;
  nn::BoundComplexMask bound_;
};

// Elementwise complex product S_hat = M . Y (shape-checked).
dsp::ComplexSpectrogram apply_mask(const nn::Tensor& mask,
                                   const dsp::ComplexSpectrogram& y);

// d(loss)/d(mask) given d(loss)/d(S_hat) for S_hat = M . Y.
nn::Tensor mask_grad_from_spec_grad(const dsp::ComplexSpectrogram& d_s_hat,
                                    const dsp::ComplexSpectrogram& y);

// Full inference: y(n) -> s_hat(n), same length as the input. The tail that
// does not fill a final STFT frame is passed through zeroed reconstruction.
dsp::Waveform enhance_utterance(Fcrn& model, const NormStats& stats,
                                const dsp::Waveform& y,
                                const dsp::StftConfig& cfg,
                                bool identity_mask = false);

}  // namespace dnskit::model
