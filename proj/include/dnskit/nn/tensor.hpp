#pragma once

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "dnskit/util/error.hpp"

namespace dnskit::nn {

// Dense row-major array of doubles, up to 4 dimensions. All layer math in
// this project runs in double so analytic gradients can be checked against
// central finite differences at tight tolerances.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
    std::size_t n = 1;
    for (const int d : shape_) {
      require(d > 0, "tensor dimensions must be positive");
      n *= static_cast<std::size_t>(d);
    }
    v_.assign(n, 0.0);
  }

  static Tensor zeros_like(const Tensor& t) { return Tensor(t.shape_); }

  const std::vector<int>& shape() const { return shape_; }
  int ndim() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_[static_cast<std::size_t>(i)]; }
  std::size_t size() const { return v_.size(); }
  bool empty() const { return v_.empty(); }

  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }
  std::vector<double>& raw() { return v_; }
  const std::vector<double>& raw() const { return v_; }

  double& operator[](std::size_t i) { return v_[i]; }
  double operator[](std::size_t i) const { return v_[i]; }

  double& at(int i) { return v_[static_cast<std::size_t>(i)]; }
  double at(int i) const { return v_[static_cast<std::size_t>(i)]; }
  double& at(int i, int j) {
    return v_[static_cast<std::size_t>(i) * shape_[1] + j];
  }
  double at(int i, int j) const {
    return v_[static_cast<std::size_t>(i) * shape_[1] + j];
  }
  double& at(int i, int j, int k) {
    return v_[(static_cast<std::size_t>(i) * shape_[1] + j) * shape_[2] + k];
  }
  double at(int i, int j, int k) const {
    return v_[(static_cast<std::size_t>(i) * shape_[1] + j) * shape_[2] + k];
  }
  double& at(int i, int j, int k, int l) {
    return v_[((static_cast<std::size_t>(i) * shape_[1] + j) * shape_[2] + k) *
                  shape_[3] +
              l];
  }
  double at(int i, int j, int k, int l) const {
    return v_[((static_cast<std::size_t>(i) * shape_[1] + j) * shape_[2] + k) *
                  shape_[3] +
              l];
  }

  void fill(double x) { std::fill(v_.begin(), v_.end(), x); }
  void zero() { fill(0.0); }

  void add_scaled(const Tensor& other, double s) {
    require(same_shape(other), "tensor shape mismatch in add_scaled");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += s * other.v_[i];
  }

  void scale(double s) {
    for (double& x : v_) x *= s;
  }

  bool same_shape(const Tensor& other) const {
    return shape_ == other.shape_;
  }

  bool all_finite() const {
    for (const double x : v_) {
      if (!std::isfinite(x)) return false;
    }
    return true;
  }

  std::string shape_str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < shape_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(shape_[i]);
    }
    return s + ")";
  }

 private:
  std::vector<int> shape_;
  std::vector<double> v_;
};

// A named trainable tensor and its gradient accumulator.
struct Param {
  std::string name;
  Tensor value;
  Tensor grad;

  Param() = default;
  Param(std::string n, std::vector<int> shape)
      : name(std::move(n)), value(shape), grad(std::move(shape)) {}
};

}  // namespace dnskit::nn
