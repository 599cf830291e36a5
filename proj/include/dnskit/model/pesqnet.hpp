#pragma once

#include <array>
#include <cstdint>

#include "dnskit/nn/layers.hpp"

namespace dnskit::model {

// Non-intrusive quality estimator: amplitude spectrogram -> one score on the
// [1.04, 4.64] scale. The utterance is split into K_in x W blocks processed
// by a shared-weight subnetwork (CNN encoder, four parallel multi-width
// kernels, max-pooling over time, BLSTM); four statistics over the block
// embeddings feed the FC head and the output gate.
struct PesqNetConfig {
  int in_bins = 260;
  int block_frames = 16;  // W
  std::array<int, 4> kernel_widths{1, 2, 4, 8};
  int enc_ch1 = 8;
  int enc_ch2 = 16;
  int enc_kernel = 3;
  int enc_pool = 4;  // frequency pooling per encoder stage
  int mw_ch = 16;    // filters per multi-width branch
  int mw_kh = 3;     // frequency extent of the multi-width kernels
  int blstm_hidden = 32;
  int fc1 = 128;
  int fc2 = 32;

  void validate() const {
    for (int i = 0; i < 4; ++i) {
      require(kernel_widths[static_cast<std::size_t>(i)] == (1 << i),
              "kernel widths must be 1,2,4,8");
    }
    require(block_frames >= kernel_widths.back(),
            "block must be at least as long as the widest kernel");
    require(in_bins >= enc_pool * enc_pool, "too few bins for the encoder");
    require(enc_ch1 > 0 && enc_ch2 > 0 && mw_ch > 0 && blstm_hidden > 0 &&
                fc1 > 0 && fc2 > 0,
            "channel counts must be positive");
  }

  bool operator==(const PesqNetConfig&) const = default;
};

struct QualityScore {
  double value = 0.0;
};

// One K_in x W block plus its frame-validity mask (padding frames are
// excluded from max-pooling over time).
struct Block {
  nn::Tensor x;  // (K, W, 1)
  std::vector<bool> valid;
};

// B = ceil(L / W); the final partial block is zero-padded on the time axis.
std::vector<Block> split_blocks(const nn::Tensor& amp, int block_frames);

class PesqNet {
 public:
  PesqNet(PesqNetConfig cfg, std::uint64_t seed);

  // amp: (L, K_in) nonnegative; returns the gated score. Caches for backward.
  double forward(const nn::Tensor& amp);
  // d(loss)/d(score) -> d(loss)/d(amp)
  nn::Tensor backward(double d_score);
  void clear_caches();

  std::vector<nn::Param*> parameters();
  void zero_grad();
  std::uint64_t param_hash() const;

  const PesqNetConfig& config() const { return cfg_; }

  // sigma(x) = 3.6 sigmoid(x) + 1.04
  static double output_gate(double x);

 private:
  // Embedding of one block; kept as the single point where the per-block
  // BLSTM reading lives (swap here for a cross-block recurrence instead).
  nn::Tensor block_embedding(const Block& block);
  nn::Tensor block_embedding_backward(const nn::Tensor& g_embed, int seq_len);

  PesqNetConfig cfg_;
  nn::Conv2d enc1_, enc2_;
  nn::Elu enc1_act_, enc2_act_;
  nn::MaxPoolFreqN pool1_, pool2_;
  std::vector<nn::Conv2d> mw_;
  std::vector<nn::Elu> mw_act_;
  std::vector<nn::MaxOverTime> mw_pool_;
  nn::Lstm blstm_fw_, blstm_bw_;
  nn::Dense fc1_, fc2_, fc_out_;
  nn::Elu fc1_act_, fc2_act_;

  // per-forward caches
  struct ForwardCache {
    int frames = 0;
    int n_blocks = 0;
    int seq_len = 0;
    std::vector<nn::Tensor> embeds;  // per block (2H)
    std::vector<int> arg_min, arg_max;
    nn::Tensor mean, std;
    double gate_sig = 0.0;
  };
  std::vector<ForwardCache> caches_;
};

}  // namespace dnskit::model
