#include "layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Core>

#include "gazescreen/error.hpp"

namespace gazescreen::nn {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;

constexpr double kBnEps = 1e-5;
constexpr double kBnMomentum = 0.1;

std::size_t product(const std::vector<int>& shape) {
    std::size_t n = 1;
    for (int d : shape) n *= static_cast<std::size_t>(d);
    return n;
}

int out_dim(int in, int k, int s, int p) { return (in + 2 * p - k) / s + 1; }

// col is (C·k·k) × (Ho·Wo), row-major.
void im2col(const double* x, int c, int h, int w, int k, int s, int p, int ho, int wo, double* col) {
    const std::size_t hw_out = static_cast<std::size_t>(ho) * wo;
    for (int ch = 0; ch < c; ++ch) {
        const double* plane = x + static_cast<std::size_t>(ch) * h * w;
        for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
                double* row = col + (static_cast<std::size_t>(ch) * k * k + static_cast<std::size_t>(ky) * k + kx) * hw_out;
                for (int oy = 0; oy < ho; ++oy) {
                    const int iy = oy * s - p + ky;
                    double* dst = row + static_cast<std::size_t>(oy) * wo;
                    if (iy < 0 || iy >= h) {
                        std::fill_n(dst, wo, 0.0);
                        continue;
                    }
                    const double* src = plane + static_cast<std::size_t>(iy) * w;
                    for (int ox = 0; ox < wo; ++ox) {
                        const int ix = ox * s - p + kx;
                        dst[ox] = (ix >= 0 && ix < w) ? src[ix] : 0.0;
                    }
                }
            }
        }
    }
}

void col2im(const double* col, int c, int h, int w, int k, int s, int p, int ho, int wo, double* dx) {
    const std::size_t hw_out = static_cast<std::size_t>(ho) * wo;
    for (int ch = 0; ch < c; ++ch) {
        double* plane = dx + static_cast<std::size_t>(ch) * h * w;
        for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
                const double* row =
                    col + (static_cast<std::size_t>(ch) * k * k + static_cast<std::size_t>(ky) * k + kx) * hw_out;
                for (int oy = 0; oy < ho; ++oy) {
                    const int iy = oy * s - p + ky;
                    if (iy < 0 || iy >= h) continue;
                    const double* src = row + static_cast<std::size_t>(oy) * wo;
                    double* dst = plane + static_cast<std::size_t>(iy) * w;
                    for (int ox = 0; ox < wo; ++ox) {
                        const int ix = ox * s - p + kx;
                        if (ix >= 0 && ix < w) dst[ix] += src[ox];
                    }
                }
            }
        }
    }
}

}  // namespace

Param::Param(std::string n, std::vector<int> s, bool is_trainable)
    : name(std::move(n)), shape(std::move(s)), value(product(shape), 0.0), trainable(is_trainable) {
    if (trainable) {
        grad.assign(value.size(), 0.0);
        velocity.assign(value.size(), 0.0);
    }
}

void Param::zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }

int scaled_channels(int base, double width_multiplier) {
    return std::max(1, static_cast<int>(std::lround(base * width_multiplier)));
}

// ---------------------------------------------------------------- Conv2d

Conv2d::Conv2d(const std::string& name, int in_c, int out_c, int kernel, int stride, int pad)
    : in_c_(in_c), out_c_(out_c), k_(kernel), stride_(stride), pad_(pad),
      weight_(name + ".weight", {out_c, in_c, kernel, kernel}) {}

void Conv2d::init_kaiming(Pcg64& rng) {
    const double bound = std::sqrt(6.0 / (in_c_ * k_ * k_));
    for (double& v : weight_.value) v = rng.uniform(-bound, bound);
}

Tensor Conv2d::forward(const Tensor& x, bool record) const {
    const int ho = out_dim(x.h, k_, stride_, pad_);
    const int wo = out_dim(x.w, k_, stride_, pad_);
    Tensor y(x.n, out_c_, ho, wo);
    const int ckk = in_c_ * k_ * k_;
    const std::size_t hw = static_cast<std::size_t>(ho) * wo;
    const bool direct = k_ == 1 && stride_ == 1 && pad_ == 0;
    std::vector<double> col(direct ? 0 : static_cast<std::size_t>(ckk) * hw);
    ConstMapMat wm(weight_.value.data(), out_c_, ckk);
    for (int i = 0; i < x.n; ++i) {
        const double* cols = x.sample(i);
        if (!direct) {
            im2col(x.sample(i), in_c_, x.h, x.w, k_, stride_, pad_, ho, wo, col.data());
            cols = col.data();
        }
        MapMat(y.sample(i), out_c_, static_cast<Eigen::Index>(hw)).noalias() =
            wm * ConstMapMat(cols, ckk, static_cast<Eigen::Index>(hw));
    }
    if (record) input_ = x;
    return y;
}

Tensor Conv2d::backward(const Tensor& dy, bool need_dx) {
    const Tensor& x = input_;
    const int ckk = in_c_ * k_ * k_;
    const std::size_t hw = static_cast<std::size_t>(dy.h) * dy.w;
    const bool direct = k_ == 1 && stride_ == 1 && pad_ == 0;
    std::vector<double> col(direct ? 0 : static_cast<std::size_t>(ckk) * hw);
    std::vector<double> dcol(static_cast<std::size_t>(ckk) * hw);
    MapMat dw(weight_.grad.data(), out_c_, ckk);
    ConstMapMat wm(weight_.value.data(), out_c_, ckk);
    Tensor dx;
    if (need_dx) dx = Tensor(x.n, x.c, x.h, x.w);
    for (int i = 0; i < x.n; ++i) {
        const double* cols = x.sample(i);
        if (!direct) {
            im2col(x.sample(i), in_c_, x.h, x.w, k_, stride_, pad_, dy.h, dy.w, col.data());
            cols = col.data();
        }
        ConstMapMat dyi(dy.sample(i), out_c_, static_cast<Eigen::Index>(hw));
        dw.noalias() += dyi * ConstMapMat(cols, ckk, static_cast<Eigen::Index>(hw)).transpose();
        if (need_dx) {
            if (direct) {
                MapMat(dx.sample(i), ckk, static_cast<Eigen::Index>(hw)).noalias() = wm.transpose() * dyi;
            } else {
                MapMat(dcol.data(), ckk, static_cast<Eigen::Index>(hw)).noalias() = wm.transpose() * dyi;
                col2im(dcol.data(), in_c_, x.h, x.w, k_, stride_, pad_, dy.h, dy.w, dx.sample(i));
            }
        }
    }
    return dx;
}

// ---------------------------------------------------------------- BatchNorm2d

BatchNorm2d::BatchNorm2d(const std::string& name, int channels)
    : c_(channels), gamma_(name + ".weight", {channels}), beta_(name + ".bias", {channels}),
      running_mean_(name + ".running_mean", {channels}, false), running_var_(name + ".running_var", {channels}, false) {
    std::fill(gamma_.value.begin(), gamma_.value.end(), 1.0);
    std::fill(running_var_.value.begin(), running_var_.value.end(), 1.0);
}

void BatchNorm2d::collect(ParamList& out) {
    out.push_back(&gamma_);
    out.push_back(&beta_);
    out.push_back(&running_mean_);
    out.push_back(&running_var_);
}

Tensor BatchNorm2d::forward(const Tensor& x, BnMode mode, bool record) const {
    Tensor y(x.n, x.c, x.h, x.w);
    const std::size_t plane = x.plane();
    const double m = static_cast<double>(x.n) * static_cast<double>(plane);
    std::vector<double> inv_std(static_cast<std::size_t>(c_));
    Tensor xhat;
    if (record) xhat = Tensor(x.n, x.c, x.h, x.w);

    for (int ch = 0; ch < c_; ++ch) {
        double mean = 0.0;
        double var = 0.0;
        if (mode == BnMode::BatchStats) {
            for (int i = 0; i < x.n; ++i) {
                const double* p = x.channel(i, ch);
                for (std::size_t k = 0; k < plane; ++k) mean += p[k];
            }
            mean /= m;
            for (int i = 0; i < x.n; ++i) {
                const double* p = x.channel(i, ch);
                for (std::size_t k = 0; k < plane; ++k) var += (p[k] - mean) * (p[k] - mean);
            }
            var /= m;
            if (record) {
                const double unbiased = m > 1.0 ? var * m / (m - 1.0) : var;
                auto& rm = running_mean_.value[static_cast<std::size_t>(ch)];
                auto& rv = running_var_.value[static_cast<std::size_t>(ch)];
                rm = (1.0 - kBnMomentum) * rm + kBnMomentum * mean;
                rv = (1.0 - kBnMomentum) * rv + kBnMomentum * unbiased;
            }
        } else {
            mean = running_mean_.value[static_cast<std::size_t>(ch)];
            var = running_var_.value[static_cast<std::size_t>(ch)];
        }
        const double is = 1.0 / std::sqrt(var + kBnEps);
        inv_std[static_cast<std::size_t>(ch)] = is;
        const double g = gamma_.value[static_cast<std::size_t>(ch)];
        const double b = beta_.value[static_cast<std::size_t>(ch)];
        for (int i = 0; i < x.n; ++i) {
            const double* p = x.channel(i, ch);
            double* q = y.channel(i, ch);
            double* xh = record ? xhat.channel(i, ch) : nullptr;
            for (std::size_t k = 0; k < plane; ++k) {
                const double v = (p[k] - mean) * is;
                if (xh) xh[k] = v;
                q[k] = g * v + b;
            }
        }
    }
    if (record) {
        xhat_ = std::move(xhat);
        inv_std_ = std::move(inv_std);
        mode_ = mode;
    }
    return y;
}

Tensor BatchNorm2d::backward(const Tensor& dy) {
    Tensor dx(dy.n, dy.c, dy.h, dy.w);
    const std::size_t plane = dy.plane();
    const double m = static_cast<double>(dy.n) * static_cast<double>(plane);
    for (int ch = 0; ch < c_; ++ch) {
        double sum_dy = 0.0;
        double sum_dy_xhat = 0.0;
        for (int i = 0; i < dy.n; ++i) {
            const double* d = dy.channel(i, ch);
            const double* xh = xhat_.channel(i, ch);
            for (std::size_t k = 0; k < plane; ++k) {
                sum_dy += d[k];
                sum_dy_xhat += d[k] * xh[k];
            }
        }
        gamma_.grad[static_cast<std::size_t>(ch)] += sum_dy_xhat;
        beta_.grad[static_cast<std::size_t>(ch)] += sum_dy;
        const double g = gamma_.value[static_cast<std::size_t>(ch)];
        const double is = inv_std_[static_cast<std::size_t>(ch)];
        for (int i = 0; i < dy.n; ++i) {
            const double* d = dy.channel(i, ch);
            const double* xh = xhat_.channel(i, ch);
            double* out = dx.channel(i, ch);
            if (mode_ == BnMode::BatchStats) {
                const double scale = g * is / m;
                for (std::size_t k = 0; k < plane; ++k) out[k] = scale * (m * d[k] - sum_dy - xh[k] * sum_dy_xhat);
            } else {
                for (std::size_t k = 0; k < plane; ++k) out[k] = d[k] * g * is;
            }
        }
    }
    return dx;
}

// ---------------------------------------------------------------- Relu / MaxPool

Tensor Relu::forward(const Tensor& x, bool record) const {
    Tensor y = x;
    if (record) mask_.assign(x.size(), 0);
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y.data[i] > 0.0) {
            if (record) mask_[i] = 1;
        } else {
            y.data[i] = 0.0;
        }
    }
    return y;
}

Tensor Relu::backward(const Tensor& dy) const {
    Tensor dx = dy;
    for (std::size_t i = 0; i < dx.size(); ++i) {
        if (!mask_[i]) dx.data[i] = 0.0;
    }
    return dx;
}

Tensor MaxPool::forward(const Tensor& x, bool record) const {
    const int ho = out_dim(x.h, k_, s_, p_);
    const int wo = out_dim(x.w, k_, s_, p_);
    Tensor y(x.n, x.c, ho, wo);
    if (record) {
        argmax_.assign(y.size(), 0);
        shape_ = Tensor(x.n, x.c, x.h, x.w, 0.0);
        shape_.data.clear();
    }
    std::size_t out_i = 0;
    for (int i = 0; i < x.n; ++i) {
        for (int ch = 0; ch < x.c; ++ch) {
            const double* plane = x.channel(i, ch);
            const std::size_t base = static_cast<std::size_t>(i) * x.sample_size() + static_cast<std::size_t>(ch) * x.plane();
            for (int oy = 0; oy < ho; ++oy) {
                for (int ox = 0; ox < wo; ++ox, ++out_i) {
                    double best = -std::numeric_limits<double>::infinity();
                    std::size_t best_idx = 0;
                    for (int ky = 0; ky < k_; ++ky) {
                        const int iy = oy * s_ - p_ + ky;
                        if (iy < 0 || iy >= x.h) continue;
                        for (int kx = 0; kx < k_; ++kx) {
                            const int ix = ox * s_ - p_ + kx;
                            if (ix < 0 || ix >= x.w) continue;
                            const std::size_t idx = static_cast<std::size_t>(iy) * x.w + ix;
                            if (plane[idx] > best) {
                                best = plane[idx];
                                best_idx = base + idx;
                            }
                        }
                    }
                    y.data[out_i] = best;
                    if (record) argmax_[out_i] = best_idx;
                }
            }
        }
    }
    return y;
}

Tensor MaxPool::backward(const Tensor& dy) const {
    Tensor dx(shape_.n, shape_.c, shape_.h, shape_.w);
    for (std::size_t i = 0; i < dy.size(); ++i) dx.data[argmax_[i]] += dy.data[i];
    return dx;
}

// ---------------------------------------------------------------- Linear

Linear::Linear(const std::string& name, int in_f, int out_f)
    : in_f_(in_f), out_f_(out_f), weight_(name + ".weight", {out_f, in_f}), bias_(name + ".bias", {out_f}) {
    weight_.head = true;
    bias_.head = true;
}

void Linear::init_uniform(Pcg64& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in_f_));
    for (double& v : weight_.value) v = rng.uniform(-bound, bound);
    for (double& v : bias_.value) v = rng.uniform(-bound, bound);
}

void Linear::init_zero() {
    std::fill(weight_.value.begin(), weight_.value.end(), 0.0);
    std::fill(bias_.value.begin(), bias_.value.end(), 0.0);
}

void Linear::collect(ParamList& out) {
    out.push_back(&weight_);
    out.push_back(&bias_);
}

std::vector<double> Linear::forward(const std::vector<double>& x, int n, bool record) const {
    std::vector<double> y(static_cast<std::size_t>(n) * out_f_);
    for (int i = 0; i < n; ++i) {
        for (int o = 0; o < out_f_; ++o) {
            double acc = bias_.value[static_cast<std::size_t>(o)];
            const double* wrow = &weight_.value[static_cast<std::size_t>(o) * in_f_];
            const double* xrow = &x[static_cast<std::size_t>(i) * in_f_];
            for (int k = 0; k < in_f_; ++k) acc += wrow[k] * xrow[k];
            y[static_cast<std::size_t>(i) * out_f_ + o] = acc;
        }
    }
    if (record) input_ = x;
    return y;
}

std::vector<double> Linear::backward(const std::vector<double>& dy, int n, bool need_dx) {
    std::vector<double> dx(need_dx ? static_cast<std::size_t>(n) * in_f_ : 0, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int o = 0; o < out_f_; ++o) {
            const double g = dy[static_cast<std::size_t>(i) * out_f_ + o];
            bias_.grad[static_cast<std::size_t>(o)] += g;
            double* wgrad = &weight_.grad[static_cast<std::size_t>(o) * in_f_];
            const double* xrow = &input_[static_cast<std::size_t>(i) * in_f_];
            for (int k = 0; k < in_f_; ++k) wgrad[k] += g * xrow[k];
            if (need_dx) {
                const double* wrow = &weight_.value[static_cast<std::size_t>(o) * in_f_];
                double* dxrow = &dx[static_cast<std::size_t>(i) * in_f_];
                for (int k = 0; k < in_f_; ++k) dxrow[k] += g * wrow[k];
            }
        }
    }
    return dx;
}

// ---------------------------------------------------------------- residual blocks

namespace {

Tensor add(Tensor a, const Tensor& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a.data[i] += b.data[i];
    return a;
}

}  // namespace

BasicBlock::BasicBlock(const std::string& prefix, int in_c, int planes, int stride)
    : conv1_(prefix + ".conv1", in_c, planes, 3, stride, 1), bn1_(prefix + ".bn1", planes),
      conv2_(prefix + ".conv2", planes, planes, 3, 1, 1), bn2_(prefix + ".bn2", planes) {
    if (stride != 1 || in_c != planes) {
        down_conv_ = std::make_unique<Conv2d>(prefix + ".downsample.0", in_c, planes, 1, stride, 0);
        down_bn_ = std::make_unique<BatchNorm2d>(prefix + ".downsample.1", planes);
    }
}

Tensor BasicBlock::forward(const Tensor& x, BnMode mode, bool record) const {
    Tensor out = relu1_.forward(bn1_.forward(conv1_.forward(x, record), mode, record), record);
    out = bn2_.forward(conv2_.forward(out, record), mode, record);
    if (down_conv_) {
        out = add(std::move(out), down_bn_->forward(down_conv_->forward(x, record), mode, record));
    } else {
        out = add(std::move(out), x);
    }
    return relu_out_.forward(out, record);
}

Tensor BasicBlock::backward(const Tensor& dy) {
    Tensor d = relu_out_.backward(dy);
    Tensor dbranch = conv1_.backward(bn1_.backward(relu1_.backward(conv2_.backward(bn2_.backward(d), true))), true);
    Tensor dskip = down_conv_ ? down_conv_->backward(down_bn_->backward(d), true) : d;
    return add(std::move(dbranch), dskip);
}

void BasicBlock::collect(ParamList& out) {
    conv1_.collect(out);
    bn1_.collect(out);
    conv2_.collect(out);
    bn2_.collect(out);
    if (down_conv_) {
        down_conv_->collect(out);
        down_bn_->collect(out);
    }
}

void BasicBlock::init(Pcg64& rng) {
    conv1_.init_kaiming(rng);
    conv2_.init_kaiming(rng);
    if (down_conv_) down_conv_->init_kaiming(rng);
}

BottleneckBlock::BottleneckBlock(const std::string& prefix, int in_c, int planes, int stride)
    : conv1_(prefix + ".conv1", in_c, planes, 1, 1, 0), bn1_(prefix + ".bn1", planes),
      conv2_(prefix + ".conv2", planes, planes, 3, stride, 1), bn2_(prefix + ".bn2", planes),
      conv3_(prefix + ".conv3", planes, planes * kExpansion, 1, 1, 0), bn3_(prefix + ".bn3", planes * kExpansion) {
    if (stride != 1 || in_c != planes * kExpansion) {
        down_conv_ = std::make_unique<Conv2d>(prefix + ".downsample.0", in_c, planes * kExpansion, 1, stride, 0);
        down_bn_ = std::make_unique<BatchNorm2d>(prefix + ".downsample.1", planes * kExpansion);
    }
}

Tensor BottleneckBlock::forward(const Tensor& x, BnMode mode, bool record) const {
    Tensor out = relu1_.forward(bn1_.forward(conv1_.forward(x, record), mode, record), record);
    out = relu2_.forward(bn2_.forward(conv2_.forward(out, record), mode, record), record);
    out = bn3_.forward(conv3_.forward(out, record), mode, record);
    if (down_conv_) {
        out = add(std::move(out), down_bn_->forward(down_conv_->forward(x, record), mode, record));
    } else {
        out = add(std::move(out), x);
    }
    return relu_out_.forward(out, record);
}

Tensor BottleneckBlock::backward(const Tensor& dy) {
    Tensor d = relu_out_.backward(dy);
    Tensor db = conv3_.backward(bn3_.backward(d), true);
    db = conv2_.backward(bn2_.backward(relu2_.backward(db)), true);
    db = conv1_.backward(bn1_.backward(relu1_.backward(db)), true);
    Tensor dskip = down_conv_ ? down_conv_->backward(down_bn_->backward(d), true) : d;
    return add(std::move(db), dskip);
}

void BottleneckBlock::collect(ParamList& out) {
    conv1_.collect(out);
    bn1_.collect(out);
    conv2_.collect(out);
    bn2_.collect(out);
    conv3_.collect(out);
    bn3_.collect(out);
    if (down_conv_) {
        down_conv_->collect(out);
        down_bn_->collect(out);
    }
}

void BottleneckBlock::init(Pcg64& rng) {
    conv1_.init_kaiming(rng);
    conv2_.init_kaiming(rng);
    conv3_.init_kaiming(rng);
    if (down_conv_) down_conv_->init_kaiming(rng);
}

// ---------------------------------------------------------------- ResNet

namespace {

int final_channels(const ModelConfig& cfg, const StagePlan& plan) {
    const int expansion = plan.kind == BlockKind::Bottleneck ? BottleneckBlock::kExpansion : BasicBlock::kExpansion;
    return scaled_channels(512, cfg.width_multiplier) * expansion;
}

}  // namespace

ResNet::ResNet(const ModelConfig& cfg, const StagePlan& plan)
    : stem_conv_("conv1", 3, scaled_channels(64, cfg.width_multiplier), 7, 2, 3),
      stem_bn_("bn1", scaled_channels(64, cfg.width_multiplier)), pool_(3, 2, 1),
      fc_("fc", final_channels(cfg, plan), cfg.n_classes()), feature_dim_(final_channels(cfg, plan)) {
    int in_c = scaled_channels(64, cfg.width_multiplier);
    for (int stage = 0; stage < 4; ++stage) {
        const int planes = scaled_channels(64 << stage, cfg.width_multiplier);
        for (int b = 0; b < plan.blocks[static_cast<std::size_t>(stage)]; ++b) {
            const int stride = (stage > 0 && b == 0) ? 2 : 1;
            const std::string prefix = "layer" + std::to_string(stage + 1) + "." + std::to_string(b);
            if (plan.kind == BlockKind::Basic) {
                blocks_.push_back(std::make_unique<BasicBlock>(prefix, in_c, planes, stride));
                in_c = planes * BasicBlock::kExpansion;
            } else {
                blocks_.push_back(std::make_unique<BottleneckBlock>(prefix, in_c, planes, stride));
                in_c = planes * BottleneckBlock::kExpansion;
            }
        }
    }
    stem_conv_.collect(params_);
    stem_bn_.collect(params_);
    for (auto& b : blocks_) b->collect(params_);
    fc_.collect(params_);
}

void ResNet::init(std::uint64_t seed, HeadInit head_init) {
    Pcg64 rng(seed);
    stem_conv_.init_kaiming(rng);
    for (auto& b : blocks_) b->init(rng);
    Pcg64 head_rng(derive_seed(seed, 0x4EAD));
    if (head_init == HeadInit::Zero) {
        fc_.init_zero();
    } else {
        fc_.init_uniform(head_rng);
    }
}

std::vector<double> ResNet::features(const Tensor& x, BnMode mode, bool record) const {
    Tensor t = pool_.forward(stem_relu_.forward(stem_bn_.forward(stem_conv_.forward(x, record), mode, record), record),
                             record);
    for (const auto& b : blocks_) t = b->forward(t, mode, record);
    if (record) {
        pooled_n_ = t.n;
        pooled_c_ = t.c;
        pooled_h_ = t.h;
        pooled_w_ = t.w;
    }
    std::vector<double> feat(static_cast<std::size_t>(t.n) * t.c);
    const double inv = 1.0 / static_cast<double>(t.plane());
    for (int i = 0; i < t.n; ++i) {
        for (int ch = 0; ch < t.c; ++ch) {
            const double* p = t.channel(i, ch);
            double acc = 0.0;
            for (std::size_t k = 0; k < t.plane(); ++k) acc += p[k];
            feat[static_cast<std::size_t>(i) * t.c + ch] = acc * inv;
        }
    }
    return feat;
}

std::vector<double> ResNet::forward(const Tensor& x, BnMode mode, bool record) const {
    return fc_.forward(features(x, mode, record), x.n, record);
}

void ResNet::backward(const std::vector<double>& dlogits, int n, bool head_only) {
    std::vector<double> dfeat = fc_.backward(dlogits, n, !head_only);
    if (head_only) return;
    Tensor d(pooled_n_, pooled_c_, pooled_h_, pooled_w_);
    const double inv = 1.0 / static_cast<double>(d.plane());
    for (int i = 0; i < d.n; ++i) {
        for (int ch = 0; ch < d.c; ++ch) {
            double* p = d.channel(i, ch);
            const double g = dfeat[static_cast<std::size_t>(i) * d.c + ch] * inv;
            std::fill_n(p, d.plane(), g);
        }
    }
    for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it) d = (*it)->backward(d);
    d = stem_relu_.backward(pool_.backward(d));
    stem_conv_.backward(stem_bn_.backward(d), false);
}

}  // namespace gazescreen::nn
