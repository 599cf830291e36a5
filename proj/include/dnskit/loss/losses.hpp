#pragma once

#include "dnskit/dsp/stft.hpp"

namespace dnskit::loss {

inline constexpr double kPesqMax = 4.64;

struct LossWeights {
  double alpha = 0.0;  // total-loss weight on the MSE term
  double beta = 0.0;   // MSE-loss weight on the dereverberation term

  void validate() const {
    require(alpha >= 0.0 && alpha <= 1.0, "alpha must be in [0,1], got ",
            alpha);
    require(beta >= 0.0 && beta <= 1.0, "beta must be in [0,1], got ", beta);
  }
};

// Mean squared complex residual vs the clean spectrum (dereverberation and
// denoising target).
double loss_joint(const dsp::ComplexSpectrogram& s_hat,
                  const dsp::ComplexSpectrogram& s);

// Same with the reverberated clean spectrum as target (denoising only).
double loss_noise(const dsp::ComplexSpectrogram& s_hat,
                  const dsp::ComplexSpectrogram& s_rev);

// beta-weighted combination of the two targets.
double loss_mse(const dsp::ComplexSpectrogram& s_hat,
                const dsp::ComplexSpectrogram& s,
                const dsp::ComplexSpectrogram& s_rev, double beta);

// Squared error between estimated and measured quality score.
double loss_pesq(double pesq_hat, double pesq_true);

// Distance of the estimated score from the top of the scale; minimizing it
// pushes the estimate up.
double loss_pesqnet(double pesq_hat);

// alpha-weighted total fine-tuning objective.
double loss_total(double j_mse, double j_pesqnet, double alpha);

// Analytic gradients w.r.t. s_hat (complex treated as two real channels).
dsp::ComplexSpectrogram loss_joint_grad(const dsp::ComplexSpectrogram& s_hat,
                                        const dsp::ComplexSpectrogram& s);
dsp::ComplexSpectrogram loss_mse_grad(const dsp::ComplexSpectrogram& s_hat,
                                      const dsp::ComplexSpectrogram& s,
                                      const dsp::ComplexSpectrogram& s_rev,
                                      double beta);

}  // namespace dnskit::loss
