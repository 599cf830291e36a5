#include "dnskit/nn/layers.hpp"

#include <cmath>

namespace dnskit::nn {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void init_normal_fan_in(Tensor& w, int fan_in, Rng& rng) {
  const double s = std::sqrt(1.0 / static_cast<double>(fan_in));
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = s * rng.normal();
}

// ---------------------------------------------------------------- FreqConv

FreqConv::FreqConv(std::string name, int in_ch, int out_ch, int ksize)
    : in_ch_(in_ch),
      out_ch_(out_ch),
      k_(ksize),
      pad_((ksize - 1) / 2),
      w_(name + ".w", {out_ch, in_ch, ksize}),
      b_(name + ".b", {out_ch}) {
  require(in_ch > 0 && out_ch > 0 && ksize > 0, "bad FreqConv geometry");
}

void FreqConv::init(Rng& rng) { init_normal_fan_in(w_.value, in_ch_ * k_, rng); }

Tensor FreqConv::forward(const Tensor& x) {
  require(x.ndim() == 3 && x.dim(2) == in_ch_, "FreqConv: bad input shape ",
          x.shape_str());
  const int T = x.dim(0), K = x.dim(1);
  Tensor y({T, K, out_ch_});
  for (int t = 0; t < T; ++t) {
    for (int k = 0; k < K; ++k) {
      for (int co = 0; co < out_ch_; ++co) {
        double acc = b_.value.at(co);
        for (int dk = 0; dk < k_; ++dk) {
          const int kk = k + dk - pad_;
          if (kk < 0 || kk >= K) continue;
          for (int ci = 0; ci < in_ch_; ++ci) {
            acc += w_.value.at(co, ci, dk) * x.at(t, kk, ci);
          }
        }
        y.at(t, k, co) = acc;
      }
    }
  }
  xs_.push_back(x);
  return y;
}

Tensor FreqConv::backward(const Tensor& gy) {
  require(!xs_.empty(), "FreqConv::backward without forward");
  const Tensor x = std::move(xs_.back());
  xs_.pop_back();
  const int T = x.dim(0), K = x.dim(1);
  require(gy.ndim() == 3 && gy.dim(0) == T && gy.dim(1) == K &&
              gy.dim(2) == out_ch_,
          "FreqConv: bad gradient shape ", gy.shape_str());
  Tensor gx({T, K, in_ch_});
  for (int t = 0; t < T; ++t) {
    for (int k = 0; k < K; ++k) {
      for (int co = 0; co < out_ch_; ++co) {
        const double g = gy.at(t, k, co);
        if (g == 0.0) continue;
        b_.grad.at(co) += g;
        for (int dk = 0; dk < k_; ++dk) {
          const int kk = k + dk - pad_;
          if (kk < 0 || kk >= K) continue;
          for (int ci = 0; ci < in_ch_; ++ci) {
            w_.grad.at(co, ci, dk) += g * x.at(t, kk, ci);
            gx.at(t, kk, ci) += g * w_.value.at(co, ci, dk);
          }
        }
      }
    }
  }
  return gx;
}

void FreqConv::collect(std::vector<Param*>& ps) {
  ps.push_back(&w_);
  ps.push_back(&b_);
}

// --------------------------------------------------------------------- Elu

Tensor Elu::forward(const Tensor& x) {
  Tensor y = x;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] < 0.0) y[i] = std::expm1(y[i]);
  }
  ys_.push_back(y);
  return y;
}

Tensor Elu::backward(const Tensor& gy) {
  require(!ys_.empty(), "Elu::backward without forward");
  const Tensor y = std::move(ys_.back());
  ys_.pop_back();
  require(gy.same_shape(y), "Elu: gradient shape mismatch");
  Tensor gx = gy;
  for (std::size_t i = 0; i < gx.size(); ++i) {
    if (y[i] < 0.0) gx[i] *= y[i] + 1.0;
  }
  return gx;
}

// ------------------------------------------------------------ MaxPoolFreq2

Tensor MaxPoolFreq2::forward(const Tensor& x) {
  require(x.ndim() == 3 && x.dim(1) % 2 == 0,
          "MaxPoolFreq2 needs an even bin count, got ", x.shape_str());
  const int T = x.dim(0), K = x.dim(1), C = x.dim(2);
  Tensor y({T, K / 2, C});
  Cache cache;
  cache.shape = x.shape();
  cache.arg.resize(y.size());
  std::size_t n = 0;
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < K / 2; ++j) {
      for (int c = 0; c < C; ++c, ++n) {
        const double a = x.at(t, 2 * j, c);
        const double b = x.at(t, 2 * j + 1, c);
        const bool second = b > a;
        y.at(t, j, c) = second ? b : a;
        cache.arg[n] = second ? 1 : 0;
      }
    }
  }
  args_.push_back(std::move(cache));
  return y;
}

Tensor MaxPoolFreq2::backward(const Tensor& gy) {
  require(!args_.empty(), "MaxPoolFreq2::backward without forward");
  const Cache cache = std::move(args_.back());
  args_.pop_back();
  Tensor gx(cache.shape);
  const int T = gy.dim(0), K2 = gy.dim(1), C = gy.dim(2);
  std::size_t n = 0;
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < K2; ++j) {
      for (int c = 0; c < C; ++c, ++n) {
        gx.at(t, 2 * j + cache.arg[n], c) += gy.at(t, j, c);
      }
    }
  }
  return gx;
}

// ----------------------------------------------------------- UpsampleFreq2

Tensor UpsampleFreq2::forward(const Tensor& x) {
  require(x.ndim() == 3, "UpsampleFreq2: bad input shape");
  const int T = x.dim(0), K = x.dim(1), C = x.dim(2);
  Tensor y({T, 2 * K, C});
  for (int t = 0; t < T; ++t) {
    for (int k = 0; k < K; ++k) {
      for (int c = 0; c < C; ++c) {
        const double v = x.at(t, k, c);
        y.at(t, 2 * k, c) = v;
        y.at(t, 2 * k + 1, c) = v;
      }
    }
  }
  return y;
}

Tensor UpsampleFreq2::backward(const Tensor& gy) {
  const int T = gy.dim(0), K2 = gy.dim(1), C = gy.dim(2);
  Tensor gx({T, K2 / 2, C});
  for (int t = 0; t < T; ++t) {
    for (int k = 0; k < K2 / 2; ++k) {
      for (int c = 0; c < C; ++c) {
        gx.at(t, k, c) = gy.at(t, 2 * k, c) + gy.at(t, 2 * k + 1, c);
      }
    }
  }
  return gx;
}

// ------------------------------------------------------------ ConvLstmFreq

ConvLstmFreq::ConvLstmFreq(std::string name, int in_ch, int hidden, int ksize)
    : in_ch_(in_ch),
      hidden_(hidden),
      k_(ksize),
      pad_((ksize - 1) / 2),
      wx_(name + ".wx", {4 * hidden, in_ch, ksize}),
      wh_(name + ".wh", {4 * hidden, hidden, ksize}),
      b_(name + ".b", {4 * hidden}) {}

void ConvLstmFreq::init(Rng& rng) {
  init_normal_fan_in(wx_.value, in_ch_ * k_, rng);
  init_normal_fan_in(wh_.value, hidden_ * k_, rng);
  // forget-gate bias starts at 1 so early training keeps state
  for (int h = 0; h < hidden_; ++h) b_.value.at(hidden_ + h) = 1.0;
}

namespace {

// y[k, co] += sum_{dk, ci} w[co_base+co, ci, dk] x[k+dk-pad, ci]
void conv_frame(const Tensor& x, const Tensor& w, int co_base, int co_count,
                int pad, Tensor& y, int y_co_base) {
  const int K = x.dim(0), Cin = x.dim(1), ks = w.dim(2);
  for (int k = 0; k < K; ++k) {
    for (int co = 0; co < co_count; ++co) {
      double acc = 0.0;
      for (int dk = 0; dk < ks; ++dk) {
        const int kk = k + dk - pad;
        if (kk < 0 || kk >= K) continue;
        for (int ci = 0; ci < Cin; ++ci) {
          acc += w.at(co_base + co, ci, dk) * x.at(kk, ci);
        }
      }
      y.at(k, y_co_base + co) += acc;
    }
  }
}

// backward of conv_frame into gx, gw
void conv_frame_backward(const Tensor& x, const Tensor& w, const Tensor& gy,
                         int co_base, int co_count, int pad, int gy_co_base,
                         Tensor* gx, Tensor& gw) {
  const int K = x.dim(0), Cin = x.dim(1), ks = w.dim(2);
  for (int k = 0; k < K; ++k) {
    for (int co = 0; co < co_count; ++co) {
      const double g = gy.at(k, gy_co_base + co);
      if (g == 0.0) continue;
      for (int dk = 0; dk < ks; ++dk) {
        const int kk = k + dk - pad;
        if (kk < 0 || kk >= K) continue;
        for (int ci = 0; ci < Cin; ++ci) {
          gw.at(co_base + co, ci, dk) += g * x.at(kk, ci);
          if (gx) gx->at(kk, ci) += g * w.at(co_base + co, ci, dk);
        }
      }
    }
  }
}

}  // namespace

Tensor ConvLstmFreq::forward(const Tensor& x) {
  require(x.ndim() == 3 && x.dim(2) == in_ch_, "ConvLstmFreq: bad input ",
          x.shape_str());
  const int T = x.dim(0), K = x.dim(1), H = hidden_;

  Cache cc;
  cc.x = x;
  cc.act = Tensor({T, K, 4 * H});
  cc.c = Tensor({T, K, H});
  cc.tanh_c = Tensor({T, K, H});
  cc.h = Tensor({T, K, H});

  Tensor x_t({K, in_ch_});
  Tensor h_prev({K, H});
  Tensor pre({K, 4 * H});

  for (int t = 0; t < T; ++t) {
    for (int k = 0; k < K; ++k)
      for (int ci = 0; ci < in_ch_; ++ci) x_t.at(k, ci) = x.at(t, k, ci);

    pre.zero();
    for (int k = 0; k < K; ++k)
      for (int g = 0; g < 4 * H; ++g) pre.at(k, g) = b_.value.at(g);
    conv_frame(x_t, wx_.value, 0, 4 * H, pad_, pre, 0);
    if (t > 0) conv_frame(h_prev, wh_.value, 0, 4 * H, pad_, pre, 0);

    for (int k = 0; k < K; ++k) {
      for (int h = 0; h < H; ++h) {
        const double i_g = sigmoid(pre.at(k, h));
        const double f_g = sigmoid(pre.at(k, H + h));
        const double g_g = std::tanh(pre.at(k, 2 * H + h));
        const double o_g = sigmoid(pre.at(k, 3 * H + h));
        const double c_prev = (t > 0) ? cc.c.at(t - 1, k, h) : 0.0;
        const double c_t = f_g * c_prev + i_g * g_g;
        const double th = std::tanh(c_t);
        cc.act.at(t, k, h) = i_g;
        cc.act.at(t, k, H + h) = f_g;
        cc.act.at(t, k, 2 * H + h) = g_g;
        cc.act.at(t, k, 3 * H + h) = o_g;
        cc.c.at(t, k, h) = c_t;
        cc.tanh_c.at(t, k, h) = th;
        cc.h.at(t, k, h) = o_g * th;
        h_prev.at(k, h) = o_g * th;
      }
    }
  }

  Tensor out = cc.h;
  caches_.push_back(std::move(cc));
  return out;
}

Tensor ConvLstmFreq::backward(const Tensor& gy) {
  require(!caches_.empty(), "ConvLstmFreq::backward without forward");
  Cache cc = std::move(caches_.back());
  caches_.pop_back();
  const int T = cc.x.dim(0), K = cc.x.dim(1), H = hidden_;
  require(gy.dim(0) == T && gy.dim(1) == K && gy.dim(2) == H,
          "ConvLstmFreq: bad gradient shape ", gy.shape_str());

  Tensor gx({T, K, in_ch_});
  Tensor gc_next({K, H});
  Tensor gh_carry({K, H});  // gradient reaching h_t through the recurrence
  Tensor dpre({K, 4 * H});
  Tensor x_t({K, in_ch_});
  Tensor h_prev({K, H});
  Tensor gx_t({K, in_ch_});
  Tensor gh_prev({K, H});

  for (int t = T - 1; t >= 0; --t) {
    dpre.zero();
    for (int k = 0; k < K; ++k) {
      for (int h = 0; h < H; ++h) {
        const double gh = gy.at(t, k, h) + gh_carry.at(k, h);
        const double i_g = cc.act.at(t, k, h);
        const double f_g = cc.act.at(t, k, H + h);
        const double g_g = cc.act.at(t, k, 2 * H + h);
        const double o_g = cc.act.at(t, k, 3 * H + h);
        const double th = cc.tanh_c.at(t, k, h);
        const double c_prev = (t > 0) ? cc.c.at(t - 1, k, h) : 0.0;

        const double go = gh * th;
        double gc = gc_next.at(k, h) + gh * o_g * (1.0 - th * th);
        const double gi = gc * g_g;
        const double gg = gc * i_g;
        const double gf = gc * c_prev;
        gc_next.at(k, h) = gc * f_g;

        dpre.at(k, h) = gi * i_g * (1.0 - i_g);
        dpre.at(k, H + h) = gf * f_g * (1.0 - f_g);
        dpre.at(k, 2 * H + h) = gg * (1.0 - g_g * g_g);
        dpre.at(k, 3 * H + h) = go * o_g * (1.0 - o_g);
      }
    }

    for (int k = 0; k < K; ++k)
      for (int g = 0; g < 4 * H; ++g) b_.grad.at(g) += dpre.at(k, g);

    for (int k = 0; k < K; ++k)
      for (int ci = 0; ci < in_ch_; ++ci) x_t.at(k, ci) = cc.x.at(t, k, ci);
    gx_t.zero();
    conv_frame_backward(x_t, wx_.value, dpre, 0, 4 * H, pad_, 0, &gx_t,
                        wx_.grad);
    for (int k = 0; k < K; ++k)
      for (int ci = 0; ci < in_ch_; ++ci) gx.at(t, k, ci) = gx_t.at(k, ci);

    gh_carry.zero();
    if (t > 0) {
      for (int k = 0; k < K; ++k)
        for (int h = 0; h < H; ++h) h_prev.at(k, h) = cc.h.at(t - 1, k, h);
      gh_prev.zero();
      conv_frame_backward(h_prev, wh_.value, dpre, 0, 4 * H, pad_, 0, &gh_prev,
                          wh_.grad);
      gh_carry = gh_prev;
    }
  }
  return gx;
}

void ConvLstmFreq::collect(std::vector<Param*>& ps) {
  ps.push_back(&wx_);
  ps.push_back(&wh_);
  ps.push_back(&b_);
}

// --------------------------------------------------------- BoundComplexMask

Tensor BoundComplexMask::forward(const Tensor& x) {
  require(x.ndim() == 3 && x.dim(2) == 2, "BoundComplexMask expects (T,K,2)");
  const int T = x.dim(0), K = x.dim(1);
  Tensor y({T, K, 2});
  for (int t = 0; t < T; ++t) {
    for (int k = 0; k < K; ++k) {
      const double a = x.at(t, k, 0), b = x.at(t, k, 1);
      const double r = std::hypot(a, b);
      // tanh(r)/r -> 1 as r -> 0
      const double g = (r < 1e-8) ? (1.0 - r * r / 3.0) : std::tanh(r) / r;
      y.at(t, k, 0) = g * a;
      y.at(t, k, 1) = g * b;
    }
  }
  xs_.push_back(x);
  return y;
}

Tensor BoundComplexMask::backward(const Tensor& gy) {
  require(!xs_.empty(), "BoundComplexMask::backward without forward");
  const Tensor x = std::move(xs_.back());
  xs_.pop_back();
  const int T = x.dim(0), K = x.dim(1);
  Tensor gx({T, K, 2});
  for (int t = 0; t < T; ++t) {
    for (int k = 0; k < K; ++k) {
      const double a = x.at(t, k, 0), b = x.at(t, k, 1);
      const double r = std::hypot(a, b);
      double g, dg_over_r;  // dg_over_r = g'(r)/r
      if (r < 1e-8) {
        g = 1.0 - r * r / 3.0;
        dg_over_r = -2.0 / 3.0;
      } else {
        const double th = std::tanh(r);
        g = th / r;
        const double sech2 = 1.0 - th * th;
        dg_over_r = (sech2 * r - th) / (r * r * r);
      }
      const double ga = gy.at(t, k, 0), gb = gy.at(t, k, 1);
      gx.at(t, k, 0) = ga * (g + a * a * dg_over_r) + gb * (a * b * dg_over_r);
      gx.at(t, k, 1) = ga * (a * b * dg_over_r) + gb * (g + b * b * dg_over_r);
    }
  }
  return gx;
}

// ------------------------------------------------------------------ Conv2d

Conv2d::Conv2d(std::string name, int in_ch, int out_ch, int kh, int kw)
    : in_ch_(in_ch),
      out_ch_(out_ch),
      kh_(kh),
      kw_(kw),
      ph_((kh - 1) / 2),
      pw_((kw - 1) / 2),
      w_(name + ".w", {out_ch, in_ch, kh, kw}),
      b_(name + ".b", {out_ch}) {}

void Conv2d::init(Rng& rng) {
  init_normal_fan_in(w_.value, in_ch_ * kh_ * kw_, rng);
}

Tensor Conv2d::forward(const Tensor& x) {
  require(x.ndim() == 3 && x.dim(2) == in_ch_, "Conv2d: bad input ",
          x.shape_str());
  const int K = x.dim(0), W = x.dim(1);
  Tensor y({K, W, out_ch_});
  for (int k = 0; k < K; ++k) {
    for (int t = 0; t < W; ++t) {
      for (int co = 0; co < out_ch_; ++co) {
        double acc = b_.value.at(co);
        for (int dk = 0; dk < kh_; ++dk) {
          const int kk = k + dk - ph_;
          if (kk < 0 || kk >= K) continue;
          for (int dt = 0; dt < kw_; ++dt) {
            const int tt = t + dt - pw_;
            if (tt < 0 || tt >= W) continue;
            for (int ci = 0; ci < in_ch_; ++ci) {
              acc += w_.value.at(co, ci, dk, dt) * x.at(kk, tt, ci);
            }
          }
        }
        y.at(k, t, co) = acc;
      }
    }
  }
  xs_.push_back(x);
  return y;
}

Tensor Conv2d::backward(const Tensor& gy) {
  require(!xs_.empty(), "Conv2d::backward without forward");
  const Tensor x = std::move(xs_.back());
  xs_.pop_back();
  const int K = x.dim(0), W = x.dim(1);
  Tensor gx({K, W, in_ch_});
  for (int k = 0; k < K; ++k) {
    for (int t = 0; t < W; ++t) {
      for (int co = 0; co < out_ch_; ++co) {
        const double g = gy.at(k, t, co);
        if (g == 0.0) continue;
        b_.grad.at(co) += g;
        for (int dk = 0; dk < kh_; ++dk) {
          const int kk = k + dk - ph_;
          if (kk < 0 || kk >= K) continue;
          for (int dt = 0; dt < kw_; ++dt) {
            const int tt = t + dt - pw_;
            if (tt < 0 || tt >= W) continue;
            for (int ci = 0; ci < in_ch_; ++ci) {
              w_.grad.at(co, ci, dk, dt) += g * x.at(kk, tt, ci);
              gx.at(kk, tt, ci) += g * w_.value.at(co, ci, dk, dt);
            }
          }
        }
      }
    }
  }
  return gx;
}

void Conv2d::collect(std::vector<Param*>& ps) {
  ps.push_back(&w_);
  ps.push_back(&b_);
}

// ------------------------------------------------------------ MaxPoolFreqN

Tensor MaxPoolFreqN::forward(const Tensor& x) {
  require(x.ndim() == 3 && x.dim(0) >= p_, "MaxPoolFreqN: too few bins");
  const int K = x.dim(0), W = x.dim(1), C = x.dim(2);
  const int K2 = K / p_;
  Tensor y({K2, W, C});
  Cache cache;
  cache.in_shape = x.shape();
  cache.arg.resize(y.size());
  std::size_t n = 0;
  for (int j = 0; j < K2; ++j) {
    for (int t = 0; t < W; ++t) {
      for (int c = 0; c < C; ++c, ++n) {
        int best = j * p_;
        double bv = x.at(best, t, c);
        for (int d = 1; d < p_; ++d) {
          const double v = x.at(j * p_ + d, t, c);
          if (v > bv) {
            bv = v;
            best = j * p_ + d;
          }
        }
        y.at(j, t, c) = bv;
        cache.arg[n] = best;
      }
    }
  }
  args_.push_back(std::move(cache));
  return y;
}

Tensor MaxPoolFreqN::backward(const Tensor& gy) {
  require(!args_.empty(), "MaxPoolFreqN::backward without forward");
  const Cache cache = std::move(args_.back());
  args_.pop_back();
  Tensor gx(cache.in_shape);
  const int K2 = gy.dim(0), W = gy.dim(1), C = gy.dim(2);
  std::size_t n = 0;
  for (int j = 0; j < K2; ++j)
    for (int t = 0; t < W; ++t)
      for (int c = 0; c < C; ++c, ++n)
        gx.at(cache.arg[n], t, c) += gy.at(j, t, c);
  return gx;
}

// ------------------------------------------------------------- MaxOverTime

Tensor MaxOverTime::forward(const Tensor& x, const std::vector<bool>& valid) {
  require(x.ndim() == 3, "MaxOverTime: bad input shape");
  const int K = x.dim(0), W = x.dim(1), C = x.dim(2);
  require(static_cast<int>(valid.size()) == W, "MaxOverTime: bad mask length");
  int first_valid = -1;
  for (int t = 0; t < W; ++t) {
    if (valid[static_cast<std::size_t>(t)]) {
      first_valid = t;
      break;
    }
  }
  require(first_valid >= 0, "MaxOverTime: no valid frames");
  Tensor y({K, C});
  Cache cache;
  cache.in_shape = x.shape();
  cache.arg.resize(y.size());
  std::size_t n = 0;
  for (int k = 0; k < K; ++k) {
    for (int c = 0; c < C; ++c, ++n) {
      int best = first_valid;
      double bv = x.at(k, first_valid, c);
      for (int t = first_valid + 1; t < W; ++t) {
        if (!valid[static_cast<std::size_t>(t)]) continue;
        const double v = x.at(k, t, c);
        if (v > bv) {
          bv = v;
          best = t;
        }
      }
      y.at(k, c) = bv;
      cache.arg[n] = best;
    }
  }
  args_.push_back(std::move(cache));
  return y;
}

Tensor MaxOverTime::backward(const Tensor& gy) {
  require(!args_.empty(), "MaxOverTime::backward without forward");
  const Cache cache = std::move(args_.back());
  args_.pop_back();
  Tensor gx(cache.in_shape);
  const int K = gy.dim(0), C = gy.dim(1);
  std::size_t n = 0;
  for (int k = 0; k < K; ++k)
    for (int c = 0; c < C; ++c, ++n) gx.at(k, cache.arg[n], c) += gy.at(k, c);
  return gx;
}

// ------------------------------------------------------------------- Dense

Dense::Dense(std::string name, int in_dim, int out_dim)
    : in_dim_(in_dim),
      out_dim_(out_dim),
      w_(name + ".w", {out_dim, in_dim}),
      b_(name + ".b", {out_dim}) {}

void Dense::init(Rng& rng) { init_normal_fan_in(w_.value, in_dim_, rng); }

Tensor Dense::forward(const Tensor& x) {
  require(x.ndim() == 1 && x.dim(0) == in_dim_, "Dense: bad input ",
          x.shape_str());
  Tensor y({out_dim_});
  for (int o = 0; o < out_dim_; ++o) {
    double acc = b_.value.at(o);
    for (int i = 0; i < in_dim_; ++i) acc += w_.value.at(o, i) * x.at(i);
    y.at(o) = acc;
  }
  xs_.push_back(x);
  return y;
}

Tensor Dense::backward(const Tensor& gy) {
  require(!xs_.empty(), "Dense::backward without forward");
  const Tensor x = std::move(xs_.back());
  xs_.pop_back();
  Tensor gx({in_dim_});
  for (int o = 0; o < out_dim_; ++o) {
    const double g = gy.at(o);
    b_.grad.at(o) += g;
    for (int i = 0; i < in_dim_; ++i) {
      w_.grad.at(o, i) += g * x.at(i);
      gx.at(i) += g * w_.value.at(o, i);
    }
  }
  return gx;
}

void Dense::collect(std::vector<Param*>& ps) {
  ps.push_back(&w_);
  ps.push_back(&b_);
}

// -------------------------------------------------------------------- Lstm

Lstm::Lstm(std::string name, int in_dim, int hidden)
    : in_dim_(in_dim),
      hidden_(hidden),
      wx_(name + ".wx", {4 * hidden, in_dim}),
      wh_(name + ".wh", {4 * hidden, hidden}),
      b_(name + ".b", {4 * hidden}) {}

void Lstm::init(Rng& rng) {
  init_normal_fan_in(wx_.value, in_dim_, rng);
  init_normal_fan_in(wh_.value, hidden_, rng);
  for (int h = 0; h < hidden_; ++h) b_.value.at(hidden_ + h) = 1.0;
}

std::vector<Tensor> Lstm::forward(const std::vector<Tensor>& xs) {
  require(!xs.empty(), "Lstm: empty sequence");
  const int H = hidden_;
  Cache cc;
  cc.x = xs;
  std::vector<Tensor> out;
  Tensor h_prev({H});
  Tensor c_prev({H});
  for (const Tensor& x : xs) {
    require(x.ndim() == 1 && x.dim(0) == in_dim_, "Lstm: bad input ",
            x.shape_str());
    Tensor act({4 * H}), c({H}), tanh_c({H}), h({H});
    for (int g = 0; g < 4 * H; ++g) {
      double acc = b_.value.at(g);
      for (int i = 0; i < in_dim_; ++i) acc += wx_.value.at(g, i) * x.at(i);
      for (int i = 0; i < H; ++i) acc += wh_.value.at(g, i) * h_prev.at(i);
      act.at(g) = acc;
    }
    for (int j = 0; j < H; ++j) {
      const double i_g = sigmoid(act.at(j));
      const double f_g = sigmoid(act.at(H + j));
      const double g_g = std::tanh(act.at(2 * H + j));
      const double o_g = sigmoid(act.at(3 * H + j));
      const double c_t = f_g * c_prev.at(j) + i_g * g_g;
      const double th = std::tanh(c_t);
      act.at(j) = i_g;
      act.at(H + j) = f_g;
      act.at(2 * H + j) = g_g;
      act.at(3 * H + j) = o_g;
      c.at(j) = c_t;
      tanh_c.at(j) = th;
      h.at(j) = o_g * th;
    }
    cc.act.push_back(act);
    cc.c.push_back(c);
    cc.tanh_c.push_back(tanh_c);
    cc.h.push_back(h);
    out.push_back(h);
    h_prev = h;
    c_prev = c;
  }
  caches_.push_back(std::move(cc));
  return out;
}

std::vector<Tensor> Lstm::backward(const std::vector<Tensor>& ghs) {
  require(!caches_.empty(), "Lstm::backward without forward");
  Cache cc = std::move(caches_.back());
  caches_.pop_back();
  const int T = static_cast<int>(cc.x.size());
  require(static_cast<int>(ghs.size()) == T, "Lstm: gradient length mismatch");
  const int H = hidden_;

  std::vector<Tensor> gxs(static_cast<std::size_t>(T));
  Tensor gh_carry({H});
  Tensor gc_next({H});
  for (int t = T - 1; t >= 0; --t) {
    const Tensor& act = cc.act[static_cast<std::size_t>(t)];
    Tensor dpre({4 * H});
    for (int j = 0; j < H; ++j) {
      const double gh = ghs[static_cast<std::size_t>(t)].at(j) +
                        gh_carry.at(j);
      const double i_g = act.at(j);
      const double f_g = act.at(H + j);
      const double g_g = act.at(2 * H + j);
      const double o_g = act.at(3 * H + j);
      const double th = cc.tanh_c[static_cast<std::size_t>(t)].at(j);
      const double c_prev =
          (t > 0) ? cc.c[static_cast<std::size_t>(t - 1)].at(j) : 0.0;

      const double go = gh * th;
      double gc = gc_next.at(j) + gh * o_g * (1.0 - th * th);
      const double gi = gc * g_g;
      const double gg = gc * i_g;
      const double gf = gc * c_prev;
      gc_next.at(j) = gc * f_g;

      dpre.at(j) = gi * i_g * (1.0 - i_g);
      dpre.at(H + j) = gf * f_g * (1.0 - f_g);
      dpre.at(2 * H + j) = gg * (1.0 - g_g * g_g);
      dpre.at(3 * H + j) = go * o_g * (1.0 - o_g);
    }

    Tensor gx({in_dim_});
    gh_carry.zero();
    const Tensor& x = cc.x[static_cast<std::size_t>(t)];
    for (int g = 0; g < 4 * H; ++g) {
      const double d = dpre.at(g);
      if (d == 0.0) continue;
      b_.grad.at(g) += d;
      for (int i = 0; i < in_dim_; ++i) {
        wx_.grad.at(g, i) += d * x.at(i);
        gx.at(i) += d * wx_.value.at(g, i);
      }
      if (t > 0) {
        const Tensor& hp = cc.h[static_cast<std::size_t>(t - 1)];
        for (int i = 0; i < H; ++i) {
          wh_.grad.at(g, i) += d * hp.at(i);
          gh_carry.at(i) += d * wh_.value.at(g, i);
        }
      }
    }
    gxs[static_cast<std::size_t>(t)] = std::move(gx);
  }
  return gxs;
}

void Lstm::collect(std::vector<Param*>& ps) {
  ps.push_back(&wx_);
  ps.push_back(&wh_);
  ps.push_back(&b_);
}

}  // namespace dnskit::nn
