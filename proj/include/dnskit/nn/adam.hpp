#pragma once

#include <map>
#include <vector>

#include "dnskit/nn/tensor.hpp"

namespace dnskit::nn {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  Adam(std::vector<Param*> params, AdamConfig cfg);

  void step();
  void zero_grad();

  double lr() const { return cfg_.lr; }
  void set_lr(double lr) { cfg_.lr = lr; }
  long step_count() const { return t_; }

  // moment state keyed by parameter name, for checkpoint round-trips
  std::map<std::string, Tensor> state_tensors() const;
  void load_state(const std::map<std::string, Tensor>& st, long step_count);

 private:
  std::vector<Param*> params_;
  AdamConfig cfg_;
  std::vector<Tensor> m_, v_;
  long t_ = 0;
};

}  // namespace dnskit::nn
