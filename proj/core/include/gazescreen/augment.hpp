#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gazescreen/image.hpp"

namespace gazescreen {

struct AugmentOp {
    enum class Kind { Negate, Canny, Posterize, Paint, Gamma, Modulate };

    Kind kind = Kind::Negate;
    /// Canny: threshold percent; Posterize: levels; Paint: radius; Gamma: g; Modulate: brightness percent.
    double value = 0.0;

    static AugmentOp negate() { return {Kind::Negate, 0.0}; }
    static AugmentOp canny(double threshold_pct) { return {Kind::Canny, threshold_pct}; }
    static AugmentOp posterize(int levels) { return {Kind::Posterize, static_cast<double>(levels)}; }
    static AugmentOp paint(int radius) { return {Kind::Paint, static_cast<double>(radius)}; }
    static AugmentOp gamma(double g) { return {Kind::Gamma, g}; }
    static AugmentOp modulate(double brightness_pct) { return {Kind::Modulate, brightness_pct}; }

    /// File-name token, e.g. "canny10", "posterize2", "modulate140".
    std::string name() const;
};

/// Parses a token produced by AugmentOp::name().
std::optional<AugmentOp> parse_augment_op(std::string_view token);

void validate(const AugmentOp& op);

/// Applies one filter. The alpha channel passes through unchanged for every
/// kind except Canny, which returns an opaque white-on-black edge map.
RasterImage apply(const AugmentOp& op, const RasterImage& img);

/// negate, canny 10, posterize 2, posterize 4, paint 1, paint 3, gamma 100, modulate 140, modulate 160.
const std::vector<AugmentOp>& augmentation_bank();

/// The nine bank variants of `img`, in bank order.
std::vector<RasterImage> augment_all(const RasterImage& img);

}  // namespace gazescreen
