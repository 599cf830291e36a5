#include "dnskit/loss/losses.hpp"

namespace dnskit::loss {

namespace {

void check_shapes(const dsp::ComplexSpectrogram& a,
                  const dsp::ComplexSpectrogram& b) {
  require(a.frames == b.frames && a.bins == b.bins,
          "loss: shape mismatch (", a.frames, "x", a.bins, " vs ", b.frames,
          "x", b.bins, ")");
  require(a.frames >= 1 && a.bins >= 1, "loss: empty spectrogram");
}

}  // namespace

double loss_joint(const dsp::ComplexSpectrogram& s_hat,
                  const dsp::ComplexSpectrogram& s) {
  check_shapes(s_hat, s);
  double acc = 0.0;
  for (std::size_t i = 0; i < s_hat.data.size(); ++i) {
    const std::complex<double> d = s_hat.data[i] - s.data[i];
    acc += d.real() * d.real() + d.imag() * d.imag();
  }
  return acc / (static_cast<double>(s_hat.frames) * s_hat.bins);
}

double loss_noise(const dsp::ComplexSpectrogram& s_hat,
                  const dsp::ComplexSpectrogram& s_rev) {
  return loss_joint(s_hat, s_rev);
}

double loss_mse(const dsp::ComplexSpectrogram& s_hat,
                const dsp::ComplexSpectrogram& s,
                const dsp::ComplexSpectrogram& s_rev, double beta) {
  require(beta >= 0.0 && beta <= 1.0, "beta must be in [0,1], got ", beta);
  return beta * loss_joint(s_hat, s) + (1.0 - beta) * loss_noise(s_hat, s_rev);
}

double loss_pesq(double pesq_hat, double pesq_true) {
  const double d = pesq_hat - pesq_true;
  return d * d;
}

double loss_pesqnet(double pesq_hat) {
  const double d = pesq_hat - kPesqMax;
  return d * d;
}

double loss_total(double j_mse, double j_pesqnet, double alpha) {
  require(alpha >= 0.0 && alpha <= 1.0, "alpha must be in [0,1], got ", alpha);
  return alpha * j_mse + (1.0 - alpha) * j_pesqnet;
}

dsp::ComplexSpectrogram loss_joint_grad(const dsp::ComplexSpectrogram& s_hat,
                                        const dsp::ComplexSpectrogram& s) {
  check_shapes(s_hat, s);
  const double scale =
      2.0 / (static_cast<double>(s_hat.frames) * s_hat.bins);
  dsp::ComplexSpectrogram g = s_hat;
  for (std::size_t i = 0; i < g.data.size(); ++i) {
    g.data[i] = scale * (s_hat.data[i] - s.data[i]);
  }
  return g;
}

dsp::ComplexSpectrogram loss_mse_grad(const dsp::ComplexSpectrogram& s_hat,
                                      const dsp::ComplexSpectrogram& s,
                                      const dsp::ComplexSpectrogram& s_rev,
                                      double beta) {
  require(beta >= 0.0 && beta <= 1.0, "beta must be in [0,1], got ", beta);
  dsp::ComplexSpectrogram g = loss_joint_grad(s_hat, s);
  const dsp::ComplexSpectrogram gn = loss_joint_grad(s_hat, s_rev);
  for (std::size_t i = 0; i < g.data.size(); ++i) {
    g.data[i] = beta * g.data[i] + (1.0 - beta) * gn.data[i];
  }
  return g;
}

}  // namespace dnskit::loss
