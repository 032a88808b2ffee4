#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gazescreen/model.hpp"
#include "gazescreen/rng.hpp"
#include "gazescreen/tensor.hpp"

namespace gazescreen::nn {

struct Param {
    std::string name;
    std::vector<int> shape;
    std::vector<double> value;
    std::vector<double> grad;
    std::vector<double> velocity;
    bool trainable = true;
    bool head = false;

    Param(std::string n, std::vector<int> s, bool is_trainable = true);
    void zero_grad();
};

using ParamList = std::vector<Param*>;

// Layers cache activations for backward only when `record` is set, so
// non-recording forwards are read-only and safe to run concurrently.

class Conv2d {
public:
    Conv2d(const std::string& name, int in_c, int out_c, int kernel, int stride, int pad);

    Tensor forward(const Tensor& x, bool record) const;
    Tensor backward(const Tensor& dy, bool need_dx);

    void init_kaiming(Pcg64& rng);
    void collect(ParamList& out) { out.push_back(&weight_); }
    int out_channels() const noexcept { return out_c_; }
    Param& weight() noexcept { return weight_; }

private:
    int in_c_;
    int out_c_;
    int k_;
    int stride_;
    int pad_;
    Param weight_;
    mutable Tensor input_;
};

class BatchNorm2d {
public:
    BatchNorm2d(const std::string& name, int channels);

    Tensor forward(const Tensor& x, BnMode mode, bool record) const;
    Tensor backward(const Tensor& dy);

    void collect(ParamList& out);

private:
    int c_;
    Param gamma_;
    Param beta_;
    mutable Param running_mean_;
    mutable Param running_var_;
    mutable Tensor xhat_;
    mutable std::vector<double> inv_std_;
    mutable BnMode mode_ = BnMode::RunningStats;
};

class Relu {
public:
    Tensor forward(const Tensor& x, bool record) const;
    Tensor backward(const Tensor& dy) const;

private:
    mutable std::vector<unsigned char> mask_;
};

class MaxPool {
public:
    MaxPool(int kernel, int stride, int pad) : k_(kernel), s_(stride), p_(pad) {}
    Tensor forward(const Tensor& x, bool record) const;
    Tensor backward(const Tensor& dy) const;

private:
    int k_;
    int s_;
    int p_;
    mutable std::vector<std::size_t> argmax_;
    mutable Tensor shape_;
};

class Linear {
public:
    Linear(const std::string& name, int in_f, int out_f);

    /// x: N × in_f (row-major), returns N × out_f.
    std::vector<double> forward(const std::vector<double>& x, int n, bool record) const;
    std::vector<double> backward(const std::vector<double>& dy, int n, bool need_dx);

    void init_uniform(Pcg64& rng);
    void init_zero();
    void collect(ParamList& out);

private:
    int in_f_;
    int out_f_;
    Param weight_;
    Param bias_;
    mutable std::vector<double> input_;
};

class Block {
public:
    virtual ~Block() = default;
    virtual Tensor forward(const Tensor& x, BnMode mode, bool record) const = 0;
    virtual Tensor backward(const Tensor& dy) = 0;
    virtual void collect(ParamList& out) = 0;
    virtual void init(Pcg64& rng) = 0;
};

class BasicBlock final : public Block {
public:
    static constexpr int kExpansion = 1;
    BasicBlock(const std::string& prefix, int in_c, int planes, int stride);

    Tensor forward(const Tensor& x, BnMode mode, bool record) const override;
    Tensor backward(const Tensor& dy) override;
    void collect(ParamList& out) override;
    void init(Pcg64& rng) override;

    Conv2d& conv1() noexcept { return conv1_; }
    Conv2d& conv2() noexcept { return conv2_; }

private:
    Conv2d conv1_;
    BatchNorm2d bn1_;
    Relu relu1_;
    Conv2d conv2_;
    BatchNorm2d bn2_;
    std::unique_ptr<Conv2d> down_conv_;
    std::unique_ptr<BatchNorm2d> down_bn_;
    Relu relu_out_;
};

class BottleneckBlock final : public Block {
public:
    static constexpr int kExpansion = 4;
    BottleneckBlock(const std::string& prefix, int in_c, int planes, int stride);

    Tensor forward(const Tensor& x, BnMode mode, bool record) const override;
    Tensor backward(const Tensor& dy) override;
    void collect(ParamList& out) override;
    void init(Pcg64& rng) override;

private:
    Conv2d conv1_;
    BatchNorm2d bn1_;
    Relu relu1_;
    Conv2d conv2_;
    BatchNorm2d bn2_;
    Relu relu2_;
    Conv2d conv3_;
    BatchNorm2d bn3_;
    std::unique_ptr<Conv2d> down_conv_;
    std::unique_ptr<BatchNorm2d> down_bn_;
    Relu relu_out_;
};

/// Stem, four residual stages, global average pooling, linear head.
class ResNet {
public:
    ResNet(const ModelConfig& cfg, const StagePlan& plan);

    void init(std::uint64_t seed, HeadInit head_init);

    /// Backbone output after global pooling: N × feature_dim.
    std::vector<double> features(const Tensor& x, BnMode mode, bool record) const;
    std::vector<double> forward(const Tensor& x, BnMode mode, bool record) const;

    /// Backward from logits gradient (N × classes). Stops at the head when `head_only`.
    void backward(const std::vector<double>& dlogits, int n, bool head_only);

    ParamList& params() noexcept { return params_; }
    const ParamList& params() const noexcept { return params_; }
    int feature_dim() const noexcept { return feature_dim_; }
    Block& block(std::size_t i) { return *blocks_.at(i); }
    std::size_t block_count() const noexcept { return blocks_.size(); }

private:
    Conv2d stem_conv_;
    BatchNorm2d stem_bn_;
    Relu stem_relu_;
    MaxPool pool_;
    std::vector<std::unique_ptr<Block>> blocks_;
    Linear fc_;
    int feature_dim_;
    ParamList params_;
    mutable int pooled_n_ = 0;
    mutable int pooled_c_ = 0;
    mutable int pooled_h_ = 0;
    mutable int pooled_w_ = 0;
};

int scaled_channels(int base, double width_multiplier);

}  // namespace gazescreen::nn
