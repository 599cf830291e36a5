#include "dnskit/model/pesqnet.hpp"

#include <cmath>

#include "dnskit/util/hash.hpp"

namespace dnskit::model {

std::vector<Block> split_blocks(const nn::Tensor& amp, int block_frames) {
  require(amp.ndim() == 2 && amp.dim(0) >= 1, "split_blocks expects (L,K)");
  const int L = amp.dim(0), K = amp.dim(1), W = block_frames;
  const int B = (L + W - 1) / W;
  std::vector<Block> blocks;
  blocks.reserve(static_cast<std::size_t>(B));
  for (int b = 0; b < B; ++b) {
    Block blk;
    blk.x = nn::Tensor({K, W, 1});
    blk.valid.assign(static_cast<std::size_t>(W), false);
    for (int t = 0; t < W; ++t) {
      const int l = b * W + t;
      if (l >= L) break;
      blk.valid[static_cast<std::size_t>(t)] = true;
      for (int k = 0; k < K; ++k) blk.x.at(k, t, 0) = amp.at(l, k);
    }
    blocks.push_back(std::move(blk));
  }
  return blocks;
}

PesqNet::PesqNet(PesqNetConfig cfg, std::uint64_t seed)
    : cfg_(cfg),
      enc1_("pesqnet.enc1", 1, cfg.enc_ch1, cfg.enc_kernel, cfg.enc_kernel),
      enc2_("pesqnet.enc2", cfg.enc_ch1, cfg.enc_ch2, cfg.enc_kernel,
            cfg.enc_kernel),
      pool1_(cfg.enc_pool),
      pool2_(cfg.enc_pool),
      blstm_fw_("pesqnet.blstm_fw", 4 * cfg.mw_ch, cfg.blstm_hidden),
      blstm_bw_("pesqnet.blstm_bw", 4 * cfg.mw_ch, cfg.blstm_hidden),
      fc1_("pesqnet.fc1", 8 * cfg.blstm_hidden, cfg.fc1),
      fc2_("pesqnet.fc2", cfg.fc1, cfg.fc2),
      fc_out_("pesqnet.fc_out", cfg.fc2, 1) {
  cfg_.validate();
  for (int i = 0; i < 4; ++i) {
    mw_.emplace_back("pesqnet.mw" + std::to_string(i), cfg.enc_ch2, cfg.mw_ch,
                     cfg.mw_kh, cfg.kernel_widths[static_cast<std::size_t>(i)]);
    mw_act_.emplace_back();
    mw_pool_.emplace_back();
  }
  Rng rng(splitmix64(seed) ^ 0x9e5c);
  enc1_.init(rng);
  enc2_.init(rng);
  for (auto& c : mw_) c.init(rng);
  blstm_fw_.init(rng);
  blstm_bw_.init(rng);
  fc1_.init(rng);
  fc2_.init(rng);
  fc_out_.init(rng);
}

double PesqNet::output_gate(double x) {
  return 3.6 * nn::sigmoid(x) + 1.04;
}

nn::Tensor PesqNet::block_embedding(const Block& block) {
  nn::Tensor x = enc1_act_.forward(enc1_.forward(block.x));
  x = pool1_.forward(x);
  x = enc2_act_.forward(enc2_.forward(x));
  x = pool2_.forward(x);

  // four parallel kernel widths, max-pooled over the valid frames
  std::vector<nn::Tensor> pooled;
  for (int i = 0; i < 4; ++i) {
    nn::Tensor branch = mw_act_[static_cast<std::size_t>(i)].forward(
        mw_[static_cast<std::size_t>(i)].forward(x));
    pooled.push_back(mw_pool_[static_cast<std::size_t>(i)].forward(
        branch, block.valid));
  }

  const int K2 = pooled[0].dim(0);
  const int C = pooled[0].dim(1);
  std::vector<nn::Tensor> seq(static_cast<std::size_t>(K2));
  for (int k = 0; k < K2; ++k) {
    nn::Tensor v({4 * C});
    for (int i = 0; i < 4; ++i)
      for (int c = 0; c < C; ++c)
        v.at(i * C + c) = pooled[static_cast<std::size_t>(i)].at(k, c);
    seq[static_cast<std::size_t>(k)] = std::move(v);
  }

  std::vector<nn::Tensor> rev(seq.rbegin(), seq.rend());
  const std::vector<nn::Tensor> h_fw = blstm_fw_.forward(seq);
  const std::vector<nn::Tensor> h_bw = blstm_bw_.forward(rev);

  const int H = cfg_.blstm_hidden;
  nn::Tensor embed({2 * H});
  for (int j = 0; j < H; ++j) {
    embed.at(j) = h_fw.back().at(j);
    embed.at(H + j) = h_bw.back().at(j);
  }
  return embed;
}

nn::Tensor PesqNet::block_embedding_backward(const nn::Tensor& g_embed,
                                             int seq_len) {
  const int H = cfg_.blstm_hidden;
  const int K2 = seq_len;

  std::vector<nn::Tensor> gh_fw(static_cast<std::size_t>(K2),
                                nn::Tensor({H}));
  std::vector<nn::Tensor> gh_bw(static_cast<std::size_t>(K2),
                                nn::Tensor({H}));
  for (int j = 0; j < H; ++j) {
    gh_fw.back().at(j) = g_embed.at(j);
    gh_bw.back().at(j) = g_embed.at(H + j);
  }
  const std::vector<nn::Tensor> gseq_bw_rev = blstm_bw_.backward(gh_bw);
  const std::vector<nn::Tensor> gseq_fw = blstm_fw_.backward(gh_fw);

  const int C = cfg_.mw_ch;
  std::vector<nn::Tensor> g_pooled(4, nn::Tensor({K2, C}));
  for (int k = 0; k < K2; ++k) {
    const nn::Tensor& ga = gseq_fw[static_cast<std::size_t>(k)];
    const nn::Tensor& gb = gseq_bw_rev[static_cast<std::size_t>(K2 - 1 - k)];
    for (int i = 0; i < 4; ++i)
      for (int c = 0; c < C; ++c)
        g_pooled[static_cast<std::size_t>(i)].at(k, c) =
            ga.at(i * C + c) + gb.at(i * C + c);
  }

  nn::Tensor gx;  // gradient at the encoder output
  for (int i = 3; i >= 0; --i) {
    nn::Tensor g = mw_pool_[static_cast<std::size_t>(i)].backward(
        g_pooled[static_cast<std::size_t>(i)]);
    g = mw_[static_cast<std::size_t>(i)].backward(
        mw_act_[static_cast<std::size_t>(i)].backward(g));
    if (gx.empty()) {
      gx = std::move(g);
    } else {
      gx.add_scaled(g, 1.0);
    }
  }

  gx = pool2_.backward(gx);
  gx = enc2_.backward(enc2_act_.backward(gx));
  gx = pool1_.backward(gx);
  gx = enc1_.backward(enc1_act_.backward(gx));
  return gx;
}

double PesqNet::forward(const nn::Tensor& amp) {
  require(amp.ndim() == 2 && amp.dim(0) >= 1 && amp.dim(1) == cfg_.in_bins,
          "PesqNet: bad input shape ", amp.shape_str(), ", expected (L,",
          cfg_.in_bins, ")");
  for (std::size_t i = 0; i < amp.size(); ++i) {
    require(amp[i] >= 0.0, "PesqNet input must be a nonnegative amplitude "
                           "spectrogram");
  }

  ForwardCache fc;
  fc.frames = amp.dim(0);

  const std::vector<Block> blocks = split_blocks(amp, cfg_.block_frames);
  fc.n_blocks = static_cast<int>(blocks.size());
  fc.seq_len = ((cfg_.in_bins / cfg_.enc_pool) / cfg_.enc_pool);

  for (const Block& blk : blocks) fc.embeds.push_back(block_embedding(blk));

  const int D = 2 * cfg_.blstm_hidden;
  const int B = fc.n_blocks;
  fc.mean = nn::Tensor({D});
  fc.std = nn::Tensor({D});
  fc.arg_min.assign(static_cast<std::size_t>(D), 0);
  fc.arg_max.assign(static_cast<std::size_t>(D), 0);
  nn::Tensor stats({4 * D});
  for (int d = 0; d < D; ++d) {
    double sum = 0.0;
    double lo = fc.embeds[0].at(d), hi = fc.embeds[0].at(d);
    int ilo = 0, ihi = 0;
    for (int b = 0; b < B; ++b) {
      const double v = fc.embeds[static_cast<std::size_t>(b)].at(d);
      sum += v;
      if (v < lo) {
        lo = v;
        ilo = b;
      }
      if (v > hi) {
        hi = v;
        ihi = b;
      }
    }
    const double mean = sum / B;
    double var = 0.0;
    for (int b = 0; b < B; ++b) {
      const double dv = fc.embeds[static_cast<std::size_t>(b)].at(d) - mean;
      var += dv * dv;
    }
    var /= B;
    const double sd = std::sqrt(std::max(var, 0.0));
    fc.mean.at(d) = mean;
    fc.std.at(d) = sd;
    fc.arg_min[static_cast<std::size_t>(d)] = ilo;
    fc.arg_max[static_cast<std::size_t>(d)] = ihi;
    stats.at(d) = mean;
    stats.at(D + d) = sd;
    stats.at(2 * D + d) = lo;
    stats.at(3 * D + d) = hi;
  }

  nn::Tensor h = fc1_act_.forward(fc1_.forward(stats));
  h = fc2_act_.forward(fc2_.forward(h));
  h = fc_out_.forward(h);
  const double x = h.at(0);
  const double sig = nn::sigmoid(x);
  fc.gate_sig = sig;
  caches_.push_back(std::move(fc));
  return 3.6 * sig + 1.04;
}

nn::Tensor PesqNet::backward(double d_score) {
  require(!caches_.empty(), "PesqNet::backward without forward");
  // gate: d score / d x = 3.6 sig (1 - sig)
  const double sig = caches_.back().gate_sig;
  nn::Tensor gh({1});
  gh.at(0) = d_score * 3.6 * sig * (1.0 - sig);

  nn::Tensor g = fc_out_.backward(gh);
  g = fc2_.backward(fc2_act_.backward(g));
  g = fc1_.backward(fc1_act_.backward(g));  // gradient on the 4D stats vector

  const ForwardCache fc = std::move(caches_.back());
  caches_.pop_back();
  const int D = 2 * cfg_.blstm_hidden;
  const int B = fc.n_blocks;

  std::vector<nn::Tensor> g_embeds(static_cast<std::size_t>(B),
                                   nn::Tensor({D}));
  for (int d = 0; d < D; ++d) {
    const double g_mean = g.at(d);
    const double g_std = g.at(D + d);
    const double g_min = g.at(2 * D + d);
    const double g_max = g.at(3 * D + d);
    const double sd = fc.std.at(d);
    for (int b = 0; b < B; ++b) {
      double gv = g_mean / B;
      if (sd > 1e-12) {
        gv += g_std * (fc.embeds[static_cast<std::size_t>(b)].at(d) -
                       fc.mean.at(d)) /
              (B * sd);
      }
      g_embeds[static_cast<std::size_t>(b)].at(d) = gv;
    }
    g_embeds[static_cast<std::size_t>(fc.arg_min[static_cast<std::size_t>(
        d)])].at(d) += g_min;
    g_embeds[static_cast<std::size_t>(fc.arg_max[static_cast<std::size_t>(
        d)])].at(d) += g_max;
  }

  // block backward runs in reverse block order (layer caches are LIFO)
  const int L = fc.frames, K = cfg_.in_bins, W = cfg_.block_frames;
  nn::Tensor damp({L, K});
  for (int b = B - 1; b >= 0; --b) {
    const nn::Tensor gblk = block_embedding_backward(
        g_embeds[static_cast<std::size_t>(b)], fc.seq_len);
    for (int t = 0; t < W; ++t) {
      const int l = b * W + t;
      if (l >= L) break;
      for (int k = 0; k < K; ++k) damp.at(l, k) = gblk.at(k, t, 0);
    }
  }
  return damp;
}

void PesqNet::clear_caches() {
  enc1_.clear_cache();
  enc2_.clear_cache();
  enc1_act_.clear_cache();
  enc2_act_.clear_cache();
  pool1_.clear_cache();
  pool2_.clear_cache();
  for (auto& c : mw_) c.clear_cache();
  for (auto& a : mw_act_) a.clear_cache();
  for (auto& p : mw_pool_) p.clear_cache();
  blstm_fw_.clear_cache();
  blstm_bw_.clear_cache();
  fc1_.clear_cache();
  fc2_.clear_cache();
  fc_out_.clear_cache();
  fc1_act_.clear_cache();
  fc2_act_.clear_cache();
  caches_.clear();
}

std::vector<nn::Param*> PesqNet::parameters() {
  std::vector<nn::Param*> ps;
  enc1_.collect(ps);
  enc2_.collect(ps);
  for (auto& c : mw_) c.collect(ps);
  blstm_fw_.collect(ps);
  blstm_bw_.collect(ps);
  fc1_.collect(ps);
  fc2_.collect(ps);
  fc_out_.collect(ps);
  return ps;
}

void PesqNet::zero_grad() {
  for (nn::Param* p : parameters()) p->grad.zero();
}

std::uint64_t PesqNet::param_hash() const {
  std::uint64_t h = kFnvOffset;
  for (const nn::Param* p : const_cast<PesqNet*>(this)->parameters()) {
    h = fnv1a64(p->value.raw(), h);
  }
  return h;
}

}  // namespace dnskit::model
