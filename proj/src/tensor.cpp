#include "satwealth/tensor.hpp"

#include <cmath>

namespace satwealth {

std::size_t Tensor::checked_numel(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int d : shape) {
    require(d >= 0, Errc::bad_shape, "negative dimension");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

bool Tensor::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::string Tensor::shape_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape_[i]);
  }
  s += "]";
  return s;
}

}  // namespace satwealth
