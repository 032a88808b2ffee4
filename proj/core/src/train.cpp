#include <algorithm>
#include <cmath>
#include <numeric>

#include "gazescreen/error.hpp"
#include "gazescreen/model.hpp"
#include "gazescreen/rng.hpp"
#include "model_access.hpp"

namespace gazescreen {

namespace {

// Random horizontal flip and an integer shift of up to ±4 px; vacated pixels
// take `fill` (the normalized background colour).
void light_transform(const double* src, double* dst, int c, int s, Pcg64& rng, const std::array<double, 3>& fill) {
    const bool flip = rng.bounded(2) == 1;
    const int dx = static_cast<int>(rng.bounded(9)) - 4;
    const int dy = static_cast<int>(rng.bounded(9)) - 4;
    for (int ch = 0; ch < c; ++ch) {
        const double* in = src + static_cast<std::size_t>(ch) * s * s;
        double* out = dst + static_cast<std::size_t>(ch) * s * s;
        for (int y = 0; y < s; ++y) {
            for (int x = 0; x < s; ++x) {
                const int sy = y - dy;
                int sx = x - dx;
                if (flip) sx = s - 1 - sx;
                out[static_cast<std::size_t>(y) * s + x] =
                    (sx < 0 || sy < 0 || sx >= s || sy >= s) ? fill[static_cast<std::size_t>(ch)]
                                                              : in[static_cast<std::size_t>(sy) * s + sx];
            }
        }
    }
}

void sgd_step(nn::ParamList& params, const TrainConfig& cfg, bool head_only) {
    for (auto* p : params) {
        if (!p->trainable || (head_only && !p->head)) continue;
        for (std::size_t i = 0; i < p->value.size(); ++i) {
            const double g = p->grad[i] + cfg.weight_decay * p->value[i];
            p->velocity[i] = cfg.momentum * p->velocity[i] + g;
            p->value[i] -= cfg.learning_rate * p->velocity[i];
        }
    }
}

void reset_velocity(nn::ParamList& params) {
    for (auto* p : params) std::fill(p->velocity.begin(), p->velocity.end(), 0.0);
}

void validate(const TrainConfig& cfg) {
    if (cfg.epochs < 1) throw Error(ErrorCode::InvalidConfig, "epochs must be at least 1");
    if (cfg.batch_size < 1) throw Error(ErrorCode::InvalidConfig, "batch_size must be at least 1");
    if (!(cfg.learning_rate >= 0.0)) throw Error(ErrorCode::InvalidConfig, "learning_rate must be non-negative");
    if (!(cfg.momentum >= 0.0) || !(cfg.weight_decay >= 0.0) || cfg.head_only_epochs < 0) {
        throw Error(ErrorCode::InvalidConfig, "momentum, weight_decay and head_only_epochs must be non-negative");
    }
}

}  // namespace

History train(ResidualClassifier& model, const std::vector<RasterImage>& images, const std::vector<int>& labels,
              const TrainConfig& cfg) {
    validate(cfg);
    if (images.empty()) throw Error(ErrorCode::EmptyTrainSet, "no training images");
    if (images.size() != labels.size()) throw Error(ErrorCode::InvalidParameter, "image and label counts differ");

    const int s = model.config().input_size;
    const int n = static_cast<int>(images.size());
    std::vector<Tensor> inputs;
    inputs.reserve(images.size());
    for (const auto& img : images) inputs.push_back(model.prepare_input(img));

    std::array<double, 3> fill{};
    {
        const Rgba bg = model.config().background;
        Tensor t = model.prepare_input(RasterImage(s, s, {bg[0], bg[1], bg[2], 255}));
        for (int c = 0; c < 3; ++c) fill[static_cast<std::size_t>(c)] = t.channel(0, c)[0];
    }

    auto& params = ModelAccess::params(model);
    reset_velocity(params);
    History history;
    const bool had_frozen_backbone = model.backbone_frozen();

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const bool head_only = had_frozen_backbone && epoch < cfg.head_only_epochs;
        if (!head_only && model.backbone_frozen()) {
            model.set_backbone_frozen(false);
            reset_velocity(params);
        }

        std::vector<int> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        Pcg64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(epoch)));
        rng.shuffle(order);

        double loss_sum = 0.0;
        int correct = 0;
        for (int start = 0; start < n; start += cfg.batch_size) {
            const int bn = std::min(cfg.batch_size, n - start);
            Tensor batch(bn, 3, s, s);
            std::vector<int> batch_labels(static_cast<std::size_t>(bn));
            for (int b = 0; b < bn; ++b) {
                const int idx = order[static_cast<std::size_t>(start + b)];
                const double* src = inputs[static_cast<std::size_t>(idx)].sample(0);
                if (cfg.transforms == TrainTransforms::Light) {
                    light_transform(src, batch.sample(b), 3, s, rng, fill);
                } else {
                    std::copy_n(src, batch.sample_size(), batch.sample(b));
                }
                batch_labels[static_cast<std::size_t>(b)] = labels[static_cast<std::size_t>(idx)];
            }
            std::vector<int> preds;
            const double l = model.loss_and_gradients(batch, batch_labels,
                                                      head_only ? BnMode::RunningStats : BnMode::BatchStats, head_only,
                                                      &preds);
            if (!std::isfinite(l)) {
                throw Error(ErrorCode::DivergedLoss, "non-finite loss in epoch " + std::to_string(epoch));
            }
            loss_sum += l * bn;
            for (int b = 0; b < bn; ++b) correct += preds[static_cast<std::size_t>(b)] == batch_labels[static_cast<std::size_t>(b)];
            sgd_step(params, cfg, head_only);
        }
        history.epochs.push_back({epoch, head_only ? 1 : 2, loss_sum / n, static_cast<double>(correct) / n});
    }
    return history;
}

History train(ResidualClassifier& model, const DatasetManifest& train_manifest, const TrainConfig& cfg) {
    if (train_manifest.empty()) throw Error(ErrorCode::EmptyTrainSet, "training manifest is empty");
    std::vector<RasterImage> images;
    std::vector<int> labels;
    images.reserve(train_manifest.size());
    for (const auto& e : train_manifest.entries()) {
        images.push_back(read_png(e.image_path));
        labels.push_back(class_index(model.config(), e.group));
    }
    return train(model, images, labels, cfg);
}

}  // namespace gazescreen
