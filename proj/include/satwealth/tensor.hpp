#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "satwealth/common.hpp"

namespace satwealth {

// Dense n-dimensional array, row-major, 64-bit values. The currency of the
// NN engine; raster and head code convert into it at the edges.
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<int> shape, double fill = 0.0)
      : shape_(std::move(shape)), data_(checked_numel(shape_), fill) {}

  static Tensor from_data(std::vector<int> shape, std::vector<double> data) {
    Tensor t;
    require(checked_numel(shape) == data.size(), Errc::bad_shape,
            "data length does not match shape");
    t.shape_ = std::move(shape);
    t.data_ = std::move(data);
    return t;
  }

  const std::vector<int>& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_[static_cast<std::size_t>(i)]; }
  std::size_t numel() const { return data_.size(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double& at(int i, int j) { return data_[idx2(i, j)]; }
  double at(int i, int j) const { return data_[idx2(i, j)]; }
  double& at(int i, int j, int k) { return data_[idx3(i, j, k)]; }
  double at(int i, int j, int k) const { return data_[idx3(i, j, k)]; }
  double& at(int i, int j, int k, int l) { return data_[idx4(i, j, k, l)]; }
  double at(int i, int j, int k, int l) const { return data_[idx4(i, j, k, l)]; }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  void fill(double v) { data_.assign(data_.size(), v); }

  bool all_finite() const;

  std::string shape_string() const;

 private:
  static std::size_t checked_numel(const std::vector<int>& shape);

  std::size_t idx2(int i, int j) const {
    return static_cast<std::size_t>(i) * shape_[1] + j;
  }
  std::size_t idx3(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * shape_[1] + j) * shape_[2] + k;
  }
  std::size_t idx4(int i, int j, int k, int l) const {
    return ((static_cast<std::size_t>(i) * shape_[1] + j) * shape_[2] + k) *
               shape_[3] +
           l;
  }

  std::vector<int> shape_;
  std::vector<double> data_;
};

}  // namespace satwealth
