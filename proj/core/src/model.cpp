#include "gazescreen/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "gazescreen/error.hpp"
#include "gazescreen/render.hpp"
#include "model_access.hpp"
#include "nn/layers.hpp"

namespace gazescreen {

namespace {

constexpr std::array<double, 3> kImageMean = {0.485, 0.456, 0.406};
constexpr std::array<double, 3> kImageStd = {0.229, 0.224, 0.225};

}  // namespace

StagePlan stage_plan(int depth) {
    switch (depth) {
        case 8: return {BlockKind::Basic, {1, 1, 1, 1}};
        case 18: return {BlockKind::Basic, {2, 2, 2, 2}};
        case 34: return {BlockKind::Basic, {3, 4, 6, 3}};
        case 50: return {BlockKind::Bottleneck, {3, 4, 6, 3}};
        case 101: return {BlockKind::Bottleneck, {3, 4, 23, 3}};
        case 152: return {BlockKind::Bottleneck, {3, 8, 36, 3}};
        default: break;
    }
    throw Error(ErrorCode::UnsupportedDepth, "depth " + std::to_string(depth) + " (expected 8, 18, 34, 50, 101 or 152)");
}

void validate(const ModelConfig& cfg) {
    stage_plan(cfg.depth);
    if (cfg.classes.size() < 2 || cfg.classes.size() > 3) {
        throw Error(ErrorCode::InvalidConfig, "a classifier needs 2 or 3 classes");
    }
    if (!std::is_sorted(cfg.classes.begin(), cfg.classes.end()) ||
        std::adjacent_find(cfg.classes.begin(), cfg.classes.end()) != cfg.classes.end()) {
        throw Error(ErrorCode::InvalidConfig, "classes must be distinct and in canonical order");
    }
    if (cfg.input_size < 32) throw Error(ErrorCode::InvalidConfig, "input_size must be at least 32");
    if (!(cfg.width_multiplier > 0.0)) throw Error(ErrorCode::InvalidConfig, "width_multiplier must be positive");
}

int class_index(const ModelConfig& cfg, GroupLabel group) {
    auto it = std::find(cfg.classes.begin(), cfg.classes.end(), group);
    if (it == cfg.classes.end()) {
        throw Error(ErrorCode::InvalidParameter, "class '" + std::string(group_name(group)) + "' is not in the model");
    }
    return static_cast<int>(it - cfg.classes.begin());
}

struct ResidualClassifier::Impl {
    ModelConfig cfg;
    StagePlan plan;
    nn::ResNet net;
    bool frozen = false;
    std::unordered_map<std::string, nn::Param*> by_name;

    Impl(const ModelConfig& c, const StagePlan& p) : cfg(c), plan(p), net(c, p) {
        for (auto* param : net.params()) by_name.emplace(param->name, param);
    }

    nn::Param& find(const std::string& name) const {
        auto it = by_name.find(name);
        if (it == by_name.end()) throw Error(ErrorCode::MissingTensor, name);
        return *it->second;
    }
};

ResidualClassifier::ResidualClassifier(const ModelConfig& cfg, std::uint64_t seed, HeadInit head_init) {
    validate(cfg);
    impl_ = std::make_unique<Impl>(cfg, stage_plan(cfg.depth));
    impl_->net.init(seed, head_init);
}

ResidualClassifier::~ResidualClassifier() = default;
ResidualClassifier::ResidualClassifier(ResidualClassifier&&) noexcept = default;
ResidualClassifier& ResidualClassifier::operator=(ResidualClassifier&&) noexcept = default;

const ModelConfig& ResidualClassifier::config() const noexcept { return impl_->cfg; }
const StagePlan& ResidualClassifier::plan() const noexcept { return impl_->plan; }
bool ResidualClassifier::backbone_frozen() const noexcept { return impl_->frozen; }
void ResidualClassifier::set_backbone_frozen(bool frozen) noexcept { impl_->frozen = frozen; }

std::vector<ParameterInfo> ResidualClassifier::parameters() const {
    std::vector<ParameterInfo> out;
    for (const auto* p : impl_->net.params()) out.push_back({p->name, p->shape, p->trainable, p->head});
    return out;
}

std::size_t ResidualClassifier::parameter_count() const {
    std::size_t n = 0;
    for (const auto* p : impl_->net.params()) {
        if (p->trainable) n += p->value.size();
    }
    return n;
}

const std::vector<double>& ResidualClassifier::value(const std::string& name) const { return impl_->find(name).value; }
std::vector<double>& ResidualClassifier::mutable_value(const std::string& name) { return impl_->find(name).value; }

const std::vector<double>& ResidualClassifier::gradient(const std::string& name) const {
    auto& p = impl_->find(name);
    if (!p.trainable) throw Error(ErrorCode::InvalidParameter, name + " is not trainable");
    return p.grad;
}

Tensor ResidualClassifier::prepare_input(const RasterImage& img) const {
    const int s = impl_->cfg.input_size;
    const RasterImage sized = (img.width() == s && img.height() == s) ? img : resize(img, s);
    const Rgba bg = impl_->cfg.background;
    Tensor t(1, 3, s, s);
    for (int y = 0; y < s; ++y) {
        for (int x = 0; x < s; ++x) {
            const auto* p = sized.pixel(x, y);
            const double a = p[3] / 255.0;
            for (int c = 0; c < 3; ++c) {
                const double v = (p[c] * a + bg[static_cast<std::size_t>(c)] * (1.0 - a)) / 255.0;
                t.channel(0, c)[static_cast<std::size_t>(y) * s + x] =
                    (v - kImageMean[static_cast<std::size_t>(c)]) / kImageStd[static_cast<std::size_t>(c)];
            }
        }
    }
    return t;
}

namespace {

std::vector<std::vector<double>> rows(const std::vector<double>& flat, int n) {
    std::vector<std::vector<double>> out(static_cast<std::size_t>(n));
    const std::size_t width = n > 0 ? flat.size() / static_cast<std::size_t>(n) : 0;
    for (int i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)].assign(flat.begin() + static_cast<std::ptrdiff_t>(i * width),
                                                flat.begin() + static_cast<std::ptrdiff_t>((i + 1) * width));
    }
    return out;
}

std::vector<double> softmax_row(const double* logits, int k) {
    std::vector<double> p(static_cast<std::size_t>(k));
    const double mx = *std::max_element(logits, logits + k);
    double total = 0.0;
    for (int j = 0; j < k; ++j) {
        p[static_cast<std::size_t>(j)] = std::exp(logits[j] - mx);
        total += p[static_cast<std::size_t>(j)];
    }
    for (double& v : p) v /= total;
    return p;
}

int argmax(const double* v, int k) {
    int best = 0;
    for (int j = 1; j < k; ++j) {
        if (v[j] > v[best]) best = j;
    }
    return best;
}

// Mean cross-entropy; fills dlogits = (softmax − onehot) / N when requested.
double cross_entropy(const std::vector<double>& logits, const std::vector<int>& labels, int k,
                     std::vector<double>* dlogits, std::vector<int>* predictions) {
    const int n = static_cast<int>(labels.size());
    double total = 0.0;
    if (dlogits) dlogits->assign(logits.size(), 0.0);
    if (predictions) predictions->assign(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
        const double* row = &logits[static_cast<std::size_t>(i) * k];
        const double mx = *std::max_element(row, row + k);
        double z = 0.0;
        for (int j = 0; j < k; ++j) z += std::exp(row[j] - mx);
        const double log_z = mx + std::log(z);
        const int y = labels[static_cast<std::size_t>(i)];
        total += log_z - row[y];
        if (dlogits) {
            for (int j = 0; j < k; ++j) {
                const double p = std::exp(row[j] - log_z);
                (*dlogits)[static_cast<std::size_t>(i) * k + j] = (p - (j == y ? 1.0 : 0.0)) / n;
            }
        }
        if (predictions) (*predictions)[static_cast<std::size_t>(i)] = argmax(row, k);
    }
    return total / n;
}

void check_labels(const Tensor& batch, const std::vector<int>& labels, int k) {
    if (batch.n != static_cast<int>(labels.size()) || batch.n == 0) {
        throw Error(ErrorCode::InvalidParameter, "batch size and label count differ");
    }
    for (int y : labels) {
        if (y < 0 || y >= k) throw Error(ErrorCode::InvalidParameter, "label out of range");
    }
}

}  // namespace

std::vector<std::vector<double>> ResidualClassifier::logits(const Tensor& batch) const {
    return rows(impl_->net.forward(batch, BnMode::RunningStats, false), batch.n);
}

std::vector<std::vector<double>> ResidualClassifier::features(const Tensor& batch) const {
    return rows(impl_->net.features(batch, BnMode::RunningStats, false), batch.n);
}

double ResidualClassifier::loss_and_gradients(const Tensor& batch, const std::vector<int>& labels, BnMode mode,
                                              bool head_only, std::vector<int>* predictions) {
    const int k = impl_->cfg.n_classes();
    check_labels(batch, labels, k);
    for (auto* p : impl_->net.params()) {
        if (p->trainable) p->zero_grad();
    }
    const auto out = impl_->net.forward(batch, mode, true);
    std::vector<double> dlogits;
    const double l = cross_entropy(out, labels, k, &dlogits, predictions);
    impl_->net.backward(dlogits, batch.n, head_only);
    return l;
}

double ResidualClassifier::loss(const Tensor& batch, const std::vector<int>& labels) const {
    check_labels(batch, labels, impl_->cfg.n_classes());
    return cross_entropy(impl_->net.forward(batch, BnMode::RunningStats, false), labels, impl_->cfg.n_classes(), nullptr,
                         nullptr);
}

double ModelAccess::loss(const ResidualClassifier& m, const Tensor& batch, const std::vector<int>& labels, BnMode mode) {
    check_labels(batch, labels, m.impl_->cfg.n_classes());
    return cross_entropy(m.impl_->net.forward(batch, mode, false), labels, m.impl_->cfg.n_classes(), nullptr, nullptr);
}

std::vector<double> ResidualClassifier::predict(const RasterImage& img) const {
    const auto out = impl_->net.forward(prepare_input(img), BnMode::RunningStats, false);
    return softmax_row(out.data(), impl_->cfg.n_classes());
}

int ResidualClassifier::predict_index(const RasterImage& img) const {
    const auto out = impl_->net.forward(prepare_input(img), BnMode::RunningStats, false);
    return argmax(out.data(), impl_->cfg.n_classes());
}

nn::ParamList& ModelAccess::params(ResidualClassifier& m) { return m.impl_->net.params(); }
const nn::ParamList& ModelAccess::params(const ResidualClassifier& m) { return m.impl_->net.params(); }
nn::ResNet& ModelAccess::net(ResidualClassifier& m) { return m.impl_->net; }

ResidualClassifier build_model(const ModelConfig& cfg, std::uint64_t seed, HeadInit head_init) {
    return ResidualClassifier(cfg, seed, head_init);
}

// ---------------------------------------------------------------- grad check

GradCheckResult grad_check(ResidualClassifier& model, const Tensor& batch, const std::vector<int>& labels,
                           const GradCheckOptions& opts) {
    if (!(opts.epsilon > 0.0)) throw Error(ErrorCode::InvalidParameter, "epsilon must be positive");
    auto& params = ModelAccess::params(model);

    // Running statistics are restored afterwards so the check has no side effects.
    std::vector<std::vector<double>> saved_buffers;
    for (auto* p : params) {
        if (!p->trainable) saved_buffers.push_back(p->value);
    }

    model.loss_and_gradients(batch, labels, opts.mode);

    std::vector<std::pair<nn::Param*, std::size_t>> flat;
    std::size_t total = 0;
    for (auto* p : params) {
        if (p->trainable) total += p->value.size();
    }
    Pcg64 rng(opts.seed);
    std::set<std::size_t> picks;
    const auto want = std::min<std::size_t>(static_cast<std::size_t>(std::max(0, opts.n_params)), total);
    while (picks.size() < want) picks.insert(static_cast<std::size_t>(rng.bounded(total)));

    GradCheckResult result;
    std::size_t offset = 0;
    auto pick = picks.begin();
    for (auto* p : params) {
        if (!p->trainable) continue;
        const std::vector<double> analytic = p->grad;
        while (pick != picks.end() && *pick < offset + p->value.size()) {
            const std::size_t i = *pick - offset;
            const double orig = p->value[i];
            p->value[i] = orig + opts.epsilon;
            const double up = ModelAccess::loss(model, batch, labels, opts.mode);
            p->value[i] = orig - opts.epsilon;
            const double down = ModelAccess::loss(model, batch, labels, opts.mode);
            p->value[i] = orig;
            const double numeric = (up - down) / (2.0 * opts.epsilon);
            const double a = analytic[i];
            const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
            const double rel = std::abs(a - numeric) / denom;
            if (rel >= result.max_relative_error) {
                result.max_relative_error = rel;
                result.worst_parameter = p->name + "[" + std::to_string(i) + "]";
            }
            ++result.checked;
            ++pick;
        }
        offset += p->value.size();
    }

    std::size_t b = 0;
    for (auto* p : params) {
        if (!p->trainable) p->value = saved_buffers[b++];
    }
    return result;
}

double grad_check(ResidualClassifier& model, const RasterImage& img, int label, double epsilon) {
    GradCheckOptions opts;
    opts.epsilon = epsilon;
    return grad_check(model, model.prepare_input(img), {label}, opts).max_relative_error;
}

}  // namespace gazescreen
