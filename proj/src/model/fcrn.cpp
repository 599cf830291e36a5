#include "dnskit/model/fcrn.hpp"

#include "dnskit/util/hash.hpp"

namespace dnskit::model {

Fcrn::Fcrn(FcrnConfig cfg, std::uint64_t seed)
    : cfg_(cfg),
      enc0a_("fcrn.enc0a", cfg.in_ch, cfg.filters, cfg.kernel),
      enc0b_("fcrn.enc0b", cfg.filters, 2 * cfg.filters, cfg.kernel),
      enc1a_("fcrn.enc1a", 2 * cfg.filters, cfg.filters, cfg.kernel),
      enc1b_("fcrn.enc1b", cfg.filters, 2 * cfg.filters, cfg.kernel),
      clstm_("fcrn.clstm", 2 * cfg.filters, cfg.filters, cfg.kernel),
      dec1a_("fcrn.dec1a", cfg.filters, cfg.filters, cfg.kernel),
      dec1b_("fcrn.dec1b", cfg.filters, 2 * cfg.filters, cfg.kernel),
      dec0a_("fcrn.dec0a", 2 * cfg.filters, cfg.filters, cfg.kernel),
      dec0b_("fcrn.dec0b", cfg.filters, 2 * cfg.filters, cfg.kernel),
      out_conv_("fcrn.out", 2 * cfg.filters, cfg.out_ch, cfg.kernel) {
  cfg_.validate();
  Rng rng(splitmix64(seed) ^ 0xfc24);
  enc0a_.init(rng);
  enc0b_.init(rng);
  enc1a_.init(rng);
  enc1b_.init(rng);
  clstm_.init(rng);
  dec1a_.init(rng);
  dec1b_.init(rng);
  dec0a_.init(rng);
  dec0b_.init(rng);
  out_conv_.init(rng);
}

nn::Tensor Fcrn::forward(const nn::Tensor& y_norm) {
  require(y_norm.ndim() == 3 && y_norm.dim(1) == cfg_.in_bins &&
              y_norm.dim(2) == cfg_.in_ch,
          "Fcrn: bad input shape ", y_norm.shape_str(), ", expected (L,",
          cfg_.in_bins, ",", cfg_.in_ch, ")");

  nn::Tensor x = enc0a_act_.forward(enc0a_.forward(y_norm));
  nn::Tensor s0 = enc0b_act_.forward(enc0b_.forward(x));
  x = pool0_.forward(s0);
  x = enc1a_act_.forward(enc1a_.forward(x));
  nn::Tensor s1 = enc1b_act_.forward(enc1b_.forward(x));
  x = pool1_.forward(s1);

  x = clstm_.forward(x);

  x = up1_.forward(x);
  x = dec1a_act_.forward(dec1a_.forward(x));
  x = dec1b_act_.forward(dec1b_.forward(x));
  x.add_scaled(s1, 1.0);

  x = up0_.forward(x);
  x = dec0a_act_.forward(dec0a_.forward(x));
  x = dec0b_act_.forward(dec0b_.forward(x));
  x.add_scaled(s0, 1.0);

  x = out_conv_.forward(x);
  return bound_.forward(x);
}

nn::Tensor Fcrn::backward(const nn::Tensor& d_mask) {
  nn::Tensor g = bound_.backward(d_mask);
  g = out_conv_.backward(g);

  nn::Tensor g_skip0 = g;  // addition duplicates the gradient
  g = dec0b_.backward(dec0b_act_.backward(g));
  g = dec0a_.backward(dec0a_act_.backward(g));
  g = up0_.backward(g);

  nn::Tensor g_skip1 = g;
  g = dec1b_.backward(dec1b_act_.backward(g));
  g = dec1a_.backward(dec1a_act_.backward(g));
  g = up1_.backward(g);

  g = clstm_.backward(g);

  g = pool1_.backward(g);
  g.add_scaled(g_skip1, 1.0);
  g = enc1b_.backward(enc1b_act_.backward(g));
  g = enc1a_.backward(enc1a_act_.backward(g));

  g = pool0_.backward(g);
  g.add_scaled(g_skip0, 1.0);
  g = enc0b_.backward(enc0b_act_.backward(g));
  g = enc0a_.backward(enc0a_act_.backward(g));
  return g;
}

void Fcrn::clear_caches() {
  enc0a_.clear_cache();
  enc0b_.clear_cache();
  enc1a_.clear_cache();
  enc1b_.clear_cache();
  enc0a_act_.clear_cache();
  enc0b_act_.clear_cache();
  enc1a_act_.clear_cache();
  enc1b_act_.clear_cache();
  pool0_.clear_cache();
  pool1_.clear_cache();
  clstm_.clear_cache();
  dec1a_.clear_cache();
  dec1b_.clear_cache();
  dec0a_.clear_cache();
  dec0b_.clear_cache();
  dec1a_act_.clear_cache();
  dec1b_act_.clear_cache();
  dec0a_act_.clear_cache();
  dec0b_act_.clear_cache();
  out_conv_.clear_cache();
  bound_.clear_cache();
}

std::vector<nn::Param*> Fcrn::parameters() {
  std::vector<nn::Param*> ps;
  enc0a_.collect(ps);
  enc0b_.collect(ps);
  enc1a_.collect(ps);
  enc1b_.collect(ps);
  clstm_.collect(ps);
  dec1a_.collect(ps);
  dec1b_.collect(ps);
  dec0a_.collect(ps);
  dec0b_.collect(ps);
  out_conv_.collect(ps);
  return ps;
}

void Fcrn::zero_grad() {
  for (nn::Param* p : parameters()) p->grad.zero();
}

std::uint64_t Fcrn::param_hash() const {
  std::uint64_t h = kFnvOffset;
  for (const nn::Param* p : const_cast<Fcrn*>(this)->parameters()) {
    h = fnv1a64(p->value.raw(), h);
  }
  return h;
}

dsp::ComplexSpectrogram apply_mask(const nn::Tensor& mask,
                                   const dsp::ComplexSpectrogram& y) {
  require(mask.ndim() == 3 && mask.dim(0) == y.frames &&
              mask.dim(1) == y.bins && mask.dim(2) == 2,
          "apply_mask: mask shape ", mask.shape_str(),
          " does not match spectrogram");
  dsp::ComplexSpectrogram out = y;
  for (int l = 0; l < y.frames; ++l) {
    for (int k = 0; k < y.bins; ++k) {
      const std::complex<double> m(mask.at(l, k, 0), mask.at(l, k, 1));
      out.at(l, k) = m * y.at(l, k);
    }
  }
  return out;
}

nn::Tensor mask_grad_from_spec_grad(const dsp::ComplexSpectrogram& d_s_hat,
                                    const dsp::ComplexSpectrogram& y) {
  require(d_s_hat.frames == y.frames && d_s_hat.bins == y.bins,
          "mask_grad: shape mismatch");
  nn::Tensor g({y.frames, y.bins, 2});
  for (int l = 0; l < y.frames; ++l) {
    for (int k = 0; k < y.bins; ++k) {
      const auto gs = d_s_hat.at(l, k);
      const auto yy = y.at(l, k);
      // S_re = M_re Y_re - M_im Y_im ; S_im = M_re Y_im + M_im Y_re
      g.at(l, k, 0) = gs.real() * yy.real() + gs.imag() * yy.imag();
      g.at(l, k, 1) = -gs.real() * yy.imag() + gs.imag() * yy.real();
    }
  }
  return g;
}

dsp::Waveform enhance_utterance(Fcrn& model, const NormStats& stats,
                                const dsp::Waveform& y,
                                const dsp::StftConfig& cfg,
                                bool identity_mask) {
  const dsp::ComplexSpectrogram y_spec = dsp::stft(y, cfg);
  dsp::ComplexSpectrogram s_hat;
  if (identity_mask) {
    s_hat = y_spec;
  } else {
    const nn::Tensor y_norm = normalize_spectrogram(y_spec, stats);
    const nn::Tensor mask = model.forward(y_norm);
    model.clear_caches();
    s_hat = apply_mask(mask, y_spec);
  }
  dsp::Waveform out = dsp::istft_ola(s_hat, cfg);
  out.samples.resize(y.size(), 0.0);  // discarded tail samples stay zero
  return out;
}

}  // namespace dnskit::model
