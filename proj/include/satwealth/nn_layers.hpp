#pragma once

#include <memory>
#include <string>
#include <vector>

#include "satwealth/common.hpp"
#include "satwealth/tensor.hpp"

namespace satwealth::nn {

// First-layer convolution description. Per-input-channel dilation lets bands
// that were nn-upsampled from coarser native grids contribute through windows
// that realign to their original pixels, while all channels share one output
// grid sized by the maximum dilation.
struct ConvSpec {
  int filter_size = 0;
  int stride = 1;
  int in_channels = 0;
  int out_channels = 0;
  std::vector<int> dilation_per_channel;

  void validate() const;
  int max_dilation() const;
  int out_dim(int in_dim) const;  // ceil(in_dim / stride)
};

// Channels 0-2 copied verbatim; every added channel carries the per-position
// mean of the three RGB weights.
Tensor adapt_first_layer(const Tensor& rgb_weights, int target_channels);

// Weights are [F, F, C, K]; input is [C, H, W] or [N, C, H, W]. Each channel
// is zero-padded by floor((F-1)*d_c/2) so the windows of all channels stay
// centered on the same output pixel.
Tensor dilated_conv2d(const Tensor& input, const ConvSpec& spec,
                      const Tensor& weights, const Tensor& bias);

struct ConvGrads {
  Tensor grad_input;
  Tensor grad_weights;
  Tensor grad_bias;
};

ConvGrads conv2d_backward(const Tensor& grad_out, const Tensor& input,
                          const ConvSpec& spec, const Tensor& weights);

struct ParamRef {
  std::string name;
  Tensor* value;
  Tensor* grad;
  bool weight_decay;  // kernels and dense weights only
};

struct BufferRef {
  std::string name;
  Tensor* value;
};

class Layer {
 public:
  virtual ~Layer() = default;
  virtual Tensor forward(const Tensor& input, bool training) = 0;
  // Consumes state cached by the latest forward; accumulates into param grads
  // and returns the gradient with respect to the layer input.
  virtual Tensor backward(const Tensor& grad_out) = 0;
  virtual void collect_params(const std::string& prefix,
                              std::vector<ParamRef>& out) {}
  virtual void collect_buffers(const std::string& prefix,
                               std::vector<BufferRef>& out) {}
};

class Conv2d final : public Layer {
 public:
  explicit Conv2d(ConvSpec spec);

  Tensor forward(const Tensor& input, bool training) override;
  Tensor backward(const Tensor& grad_out) override;
  void collect_params(const std::string& prefix,
                      std::vector<ParamRef>& out) override;

  const ConvSpec& spec() const { return spec_; }
  Tensor& weights() { return weights_; }
  Tensor& bias() { return bias_; }

 private:
  ConvSpec spec_;
  Tensor weights_, bias_;
  Tensor grad_weights_, grad_bias_;
  Tensor cached_input_;
};

class Relu final : public Layer {
 public:
  Tensor forward(const Tensor& input, bool training) override;
  Tensor backward(const Tensor& grad_out) override;

 private:
  Tensor cached_input_;
};

class MaxPool2d final : public Layer {
 public:
  explicit MaxPool2d(int window = 2, int stride = 2)
      : window_(window), stride_(stride) {}

  Tensor forward(const Tensor& input, bool training) override;
  Tensor backward(const Tensor& grad_out) override;

 private:
  int window_, stride_;
  std::vector<int> in_shape_;
  std::vector<std::size_t> argmax_;
};

class GlobalAvgPool final : public Layer {
 public:
  Tensor forward(const Tensor& input, bool training) override;
  Tensor backward(const Tensor& grad_out) override;

 private:
  std::vector<int> in_shape_;
};

class Dense final : public Layer {
 public:
  Dense(int in_features, int out_features);

  Tensor forward(const Tensor& input, bool training) override;
  Tensor backward(const Tensor& grad_out) override;
  void collect_params(const std::string& prefix,
                      std::vector<ParamRef>& out) override;

  int in_features() const { return in_; }
  int out_features() const { return out_; }
  Tensor& weights() { return weights_; }

 private:
  int in_, out_;
  Tensor weights_, bias_;
  Tensor grad_weights_, grad_bias_;
  Tensor cached_input_;
};

// Per-channel batch normalization over [N, C, H, W] with running statistics
// (momentum 0.1) for inference.
class BatchNorm2d final : public Layer {
 public:
  explicit BatchNorm2d(int channels);

  Tensor forward(const Tensor& input, bool training) override;
  Tensor backward(const Tensor& grad_out) override;
  void collect_params(const std::string& prefix,
                      std::vector<ParamRef>& out) override;
  void collect_buffers(const std::string& prefix,
                       std::vector<BufferRef>& out) override;

 private:
  int channels_;
  double eps_ = 1e-5;
  double momentum_ = 0.1;
  Tensor gamma_, beta_;
  Tensor grad_gamma_, grad_beta_;
  Tensor running_mean_, running_var_;
  // training-mode cache
  bool cached_training_ = false;
  Tensor cached_xhat_;
  std::vector<double> cached_inv_std_;
};

// Pre-activation residual block: bn-relu-conv-bn-relu-conv plus a shortcut.
// When the shape changes, the shortcut is a 1x1 strided projection applied to
// the pre-activated input; otherwise it is the identity.
class PreActResidualBlock final : public Layer {
 public:
  PreActResidualBlock(int in_channels, int out_channels, int stride);

  Tensor forward(const Tensor& input, bool training) override;
  Tensor backward(const Tensor& grad_out) override;
  void collect_params(const std::string& prefix,
                      std::vector<ParamRef>& out) override;
  void collect_buffers(const std::string& prefix,
                       std::vector<BufferRef>& out) override;

 private:
  bool project_;
  BatchNorm2d bn1_;
  Relu relu1_;
  Conv2d conv1_;
  BatchNorm2d bn2_;
  Relu relu2_;
  Conv2d conv2_;
  std::unique_ptr<Conv2d> proj_;
};

struct LossResult {
  double loss = 0.0;
  Tensor grad_logits;  // gradient of the mean loss
};

// Mean softmax cross-entropy over the batch. Labels index the logit columns.
LossResult softmax_cross_entropy(const Tensor& logits,
                                 std::span<const int> labels);

// Kaiming-normal fill for kernels and dense weights; zero biases.
void he_init(Tensor& weights, int fan_in, Rng& rng);

ConvSpec make_conv_spec(int filter_size, int stride, int in_channels,
                        int out_channels, std::vector<int> dilations);

}  // namespace satwealth::nn
