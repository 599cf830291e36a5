#pragma once

#include <string>
#include <vector>

#include "dnskit/nn/tensor.hpp"
#include "dnskit/util/rng.hpp"

namespace dnskit::nn {

// Layers keep a LIFO stack of forward caches so shared-weight subnetworks can
// be applied several times (once per block) before a single backward sweep in
// reverse order. Parameter gradients accumulate with += until zero_grad.

// Convolution along the frequency axis of a (T, K, C) tensor; kernel (ksize
// x 1), stride 1, zero 'same' padding. Even kernels pad one extra on the
// right.
class FreqConv {
 public:
  FreqConv(std::string name, int in_ch, int out_ch, int ksize);
  void init(Rng& rng);
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& gy);
  void collect(std::vector<Param*>& ps);
  void clear_cache() { xs_.clear(); }
  int out_ch() const { return out_ch_; }

 private:
  int in_ch_, out_ch_, k_, pad_;
  Param w_;  // (out, in, k)
  Param b_;  // (out)
  std::vector<Tensor> xs_;
};

// ELU elementwise
class Elu {
 public:
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& gy);
  void clear_cache() { ys_.clear(); }

 private:
  std::vector<Tensor> ys_;
};

// (T, K, C) -> (T, K/2, C); K must be even. Ties pick the lower bin.
class MaxPoolFreq2 {
 public:
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& gy);
  void clear_cache() { args_.clear(); }

 private:
  struct Cache {
    std::vector<int> shape;
    std::vector<unsigned char> arg;
  };
  std::vector<Cache> args_;
};

// (T, K, C) -> (T, 2K, C), nearest-neighbor repeat.
class UpsampleFreq2 {
 public:
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& gy);
  void clear_cache() {}
};

// Convolutional LSTM over the frame axis of a (T, K, Cin) tensor; all gates
// are frequency-axis convolutions. State is zero-initialized per call and
// never crosses calls (one call == one utterance).
class ConvLstmFreq {
 public:
  ConvLstmFreq(std::string name, int in_ch, int hidden, int ksize);
  void init(Rng& rng);
  Tensor forward(const Tensor& x);   // -> (T, K, H)
  Tensor backward(const Tensor& gy);
  void collect(std::vector<Param*>& ps);
  void clear_cache() { caches_.clear(); }

 private:
  struct Cache {
    Tensor x;       // (T, K, Cin)
    Tensor act;     // (T, K, 4H) post-activation gates i|f|g|o
    Tensor c;       // (T, K, H)
    Tensor tanh_c;  // (T, K, H)
    Tensor h;       // (T, K, H)
  };
  int in_ch_, hidden_, k_, pad_;
  Param wx_;  // (4H, Cin, k)
  Param wh_;  // (4H, H, k)
  Param b_;   // (4H)
  std::vector<Cache> caches_;
};

// z -> tanh(|z|) z/|z| on the (re, im) channel pair of a (T, K, 2) tensor;
// keeps phase, bounds magnitude below 1.
class BoundComplexMask {
 public:
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& gy);
  void clear_cache() { xs_.clear(); }

 private:
  std::vector<Tensor> xs_;
};

// 2-D convolution on a (K, W, Cin) block, zero 'same' padding on both axes.
class Conv2d {
 public:
  Conv2d(std::string name, int in_ch, int out_ch, int kh, int kw);
  void init(Rng& rng);
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& gy);
  void collect(std::vector<Param*>& ps);
  void clear_cache() { xs_.clear(); }

 private:
  int in_ch_, out_ch_, kh_, kw_, ph_, pw_;
  Param w_;  // (out, in, kh, kw)
  Param b_;  // (out)
  std::vector<Tensor> xs_;
};

// (K, W, C) -> (K/p, W, C) max pooling along the frequency axis, kernel ==
// stride == p, leftover rows dropped.
class MaxPoolFreqN {
 public:
  explicit MaxPoolFreqN(int p) : p_(p) {}
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& gy);
  void clear_cache() { args_.clear(); }

 private:
  struct Cache {
    std::vector<int> in_shape;
    std::vector<int> arg;
  };
  int p_;
  std::vector<Cache> args_;
};

// (K, W, C) + per-frame validity -> (K, C), max over valid frames only.
class MaxOverTime {
 public:
  Tensor forward(const Tensor& x, const std::vector<bool>& valid);
  Tensor backward(const Tensor& gy);
  void clear_cache() { args_.clear(); }

 private:
  struct Cache {
    std::vector<int> in_shape;
    std::vector<int> arg;
  };
  std::vector<Cache> args_;
};

// Fully connected: y = W x + b on 1-D tensors.
class Dense {
 public:
  Dense(std::string name, int in_dim, int out_dim);
  void init(Rng& rng);
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& gy);
  void collect(std::vector<Param*>& ps);
  void clear_cache() { xs_.clear(); }

 private:
  int in_dim_, out_dim_;
  Param w_;  // (out, in)
  Param b_;  // (out)
  std::vector<Tensor> xs_;
};

// Dense-gate LSTM over a sequence of 1-D tensors. Zero initial state per
// call.
class Lstm {
 public:
  Lstm(std::string name, int in_dim, int hidden);
  void init(Rng& rng);
  std::vector<Tensor> forward(const std::vector<Tensor>& xs);
  std::vector<Tensor> backward(const std::vector<Tensor>& ghs);
  void collect(std::vector<Param*>& ps);
  void clear_cache() { caches_.clear(); }
  int hidden() const { return hidden_; }

 private:
  struct Cache {
    std::vector<Tensor> x, act, c, tanh_c, h;
  };
  int in_dim_, hidden_;
  Param wx_;  // (4H, I)
  Param wh_;  // (4H, H)
  Param b_;   // (4H)
  std::vector<Cache> caches_;
};

double sigmoid(double x);

// Variance-scaling (fan-in) normal initializer.
void init_normal_fan_in(Tensor& w, int fan_in, Rng& rng);

}  // namespace dnskit::nn
