#include "dnskit/nn/adam.hpp"

#include <cmath>

namespace dnskit::nn {

Adam::Adam(std::vector<Param*> params, AdamConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
  require(cfg_.lr > 0, "learning rate must be positive");
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const Param* p : params_) {
    m_.push_back(Tensor::zeros_like(p->value));
    v_.push_back(Tensor::zeros_like(p->value));
  }
}

void Adam::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t pi = 0; pi < params_.size(); ++pi) {
    Param& p = *params_[pi];
    Tensor& m = m_[pi];
    Tensor& v = v_[pi];
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad[i];
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g;
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g * g;
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      p.value[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
  }
}

void Adam::zero_grad() {
  for (Param* p : params_) p->grad.zero();
}

std::map<std::string, Tensor> Adam::state_tensors() const {
  std::map<std::string, Tensor> st;
  for (std::size_t pi = 0; pi < params_.size(); ++pi) {
    st["adam.m." + params_[pi]->name] = m_[pi];
    st["adam.v." + params_[pi]->name] = v_[pi];
  }
  return st;
}

void Adam::load_state(const std::map<std::string, Tensor>& st,
                      long step_count) {
  for (std::size_t pi = 0; pi < params_.size(); ++pi) {
    const auto im = st.find("adam.m." + params_[pi]->name);
    const auto iv = st.find("adam.v." + params_[pi]->name);
    require(im != st.end() && iv != st.end(),
            "optimizer state missing tensors for ", params_[pi]->name);
    require(im->second.same_shape(m_[pi]) && iv->second.same_shape(v_[pi]),
            "optimizer state shape mismatch for ", params_[pi]->name);
    m_[pi] = im->second;
    v_[pi] = iv->second;
  }
  t_ = step_count;
}

}  // namespace dnskit::nn
