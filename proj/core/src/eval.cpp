#include "gazescreen/eval.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "gazescreen/error.hpp"

namespace gazescreen {

ConfusionMatrix::ConfusionMatrix(std::vector<GroupLabel> classes)
    : classes_(std::move(classes)), counts_(classes_.size() * classes_.size(), 0) {
    if (classes_.empty()) throw Error(ErrorCode::InvalidParameter, "confusion matrix needs at least one class");
}

ConfusionMatrix::ConfusionMatrix(std::vector<GroupLabel> classes, std::vector<std::vector<std::size_t>> counts)
    : ConfusionMatrix(std::move(classes)) {
    if (counts.size() != size()) throw Error(ErrorCode::InvalidParameter, "count rows do not match classes");
    for (std::size_t r = 0; r < size(); ++r) {
        if (counts[r].size() != size()) throw Error(ErrorCode::InvalidParameter, "count columns do not match classes");
        for (std::size_t c = 0; c < size(); ++c) counts_[r * size() + c] = counts[r][c];
    }
}

std::size_t ConfusionMatrix::index_of(GroupLabel g) const {
    auto it = std::find(classes_.begin(), classes_.end(), g);
    if (it == classes_.end()) throw Error(ErrorCode::InvalidParameter, "class not in matrix: " + std::string(group_name(g)));
    return static_cast<std::size_t>(it - classes_.begin());
}

void ConfusionMatrix::add(std::size_t truth, std::size_t predicted) {
    if (truth >= size() || predicted >= size()) throw Error(ErrorCode::InvalidParameter, "class index out of range");
    ++counts_[truth * size() + predicted];
}

void ConfusionMatrix::add(GroupLabel truth, GroupLabel predicted) { add(index_of(truth), index_of(predicted)); }

std::size_t ConfusionMatrix::total() const noexcept {
    std::size_t t = 0;
    for (auto c : counts_) t += c;
    return t;
}

std::size_t ConfusionMatrix::trace() const noexcept {
    std::size_t t = 0;
    for (std::size_t i = 0; i < size(); ++i) t += counts_[i * size() + i];
    return t;
}

std::size_t ConfusionMatrix::row_sum(std::size_t truth) const {
    std::size_t t = 0;
    for (std::size_t c = 0; c < size(); ++c) t += at(truth, c);
    return t;
}

ConfusionMatrix evaluate(const ResidualClassifier& model, const DatasetManifest& test_manifest) {
    if (test_manifest.empty()) throw Error(ErrorCode::EmptyTestSet, "test manifest is empty");
    const auto& classes = model.config().classes;
    ConfusionMatrix cm(classes);
    for (const auto& e : test_manifest.entries()) {
        const int truth = class_index(model.config(), e.group);
        const int predicted = model.predict_index(read_png(e.image_path));
        cm.add(static_cast<std::size_t>(truth), static_cast<std::size_t>(predicted));
    }
    return cm;
}

double accuracy(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw Error(ErrorCode::EmptyMatrix, "accuracy of an empty confusion matrix");
    return static_cast<double>(cm.trace()) / static_cast<double>(cm.total());
}

std::string format_percent(double ratio) { return fmt::format("{:.1f}%", ratio * 100.0); }

std::string describe_classes(DatasetTag tag, const std::vector<GroupLabel>& classes) {
    std::string out = tag == DatasetTag::Synthetic ? "(Synthetic)" : "(Dataset " + std::string(tag_name(tag)) + ")";
    for (std::size_t i = 0; i < classes.size(); ++i) {
        out += i == 0 ? " " : ", ";
        out += group_letter(classes[i]);
    }
    return out;
}

Report report(const ConfusionMatrix& cm, const RunMetadata& meta) {
    Report r;
    const double acc = accuracy(cm);
    r.table_row = fmt::format("ResNet-{},{},{}", meta.depth, describe_classes(meta.tag, cm.classes()), format_percent(acc));

    std::string header = "true\\predicted";
    for (auto g : cm.classes()) header += fmt::format(",{}", group_name(g));
    r.csv = header + "\n";
    for (std::size_t t = 0; t < cm.size(); ++t) {
        r.csv += group_name(cm.classes()[t]);
        for (std::size_t p = 0; p < cm.size(); ++p) r.csv += fmt::format(",{}", cm.at(t, p));
        r.csv += "\n";
    }

    r.text = "Architecture,Classes,Accuracy\n" + r.table_row + "\n\n";
    r.text += fmt::format("correct: {} of {}\n", cm.trace(), cm.total());
    r.text += fmt::format("accuracy: {}\n", acc);
    if (meta.repeats && meta.mean_accuracy) {
        r.text += fmt::format("mean accuracy over {} splits: {}\n", *meta.repeats, format_percent(*meta.mean_accuracy));
    }
    if (meta.tag == DatasetTag::Synthetic) {
        r.text += "data: synthetic gaze recordings from simulated bias profiles; not clinical evidence\n";
    }
    r.text += "\nconfusion matrix (rows = true, columns = predicted)\n" + r.csv;
    return r;
}

RasterImage render_heatmap(const ConfusionMatrix& cm, int cell_px) {
    const int n = static_cast<int>(cm.size());
    RasterImage img(n * cell_px, n * cell_px, {255, 255, 255, 255});
    for (int t = 0; t < n; ++t) {
        const auto row = cm.row_sum(static_cast<std::size_t>(t));
        for (int p = 0; p < n; ++p) {
            const double share =
                row == 0 ? 0.0 : static_cast<double>(cm.at(static_cast<std::size_t>(t), static_cast<std::size_t>(p))) / row;
            // White → dark blue.
            const Rgba color = {static_cast<std::uint8_t>(std::lround(255.0 - share * 227.0)),
                                static_cast<std::uint8_t>(std::lround(255.0 - share * 177.0)),
                                static_cast<std::uint8_t>(std::lround(255.0 - share * 75.0)), 255};
            for (int y = 1; y < cell_px - 1; ++y) {
                for (int x = 1; x < cell_px - 1; ++x) img.set(p * cell_px + x, t * cell_px + y, color);
            }
        }
    }
    return img;
}

}  // namespace gazescreen
