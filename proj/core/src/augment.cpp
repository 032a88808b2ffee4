#include "gazescreen/augment.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>

#include <fmt/format.h>

#include "gazescreen/error.hpp"

namespace gazescreen {

namespace {

std::uint8_t clamp_round(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

template <typename F>
RasterImage map_rgb(const RasterImage& img, F&& f) {
    RasterImage out = img;
    auto& d = out.data();
    for (std::size_t i = 0; i < d.size(); i += 4) f(&d[i]);
    return out;
}

// Per-channel lookup table for point operations.
RasterImage map_channels(const RasterImage& img, const std::array<std::uint8_t, 256>& lut) {
    return map_rgb(img, [&](std::uint8_t* p) {
        p[0] = lut[p[0]];
        p[1] = lut[p[1]];
        p[2] = lut[p[2]];
    });
}

RasterImage negate(const RasterImage& img) {
    std::array<std::uint8_t, 256> lut{};
    for (int c = 0; c < 256; ++c) lut[c] = static_cast<std::uint8_t>(255 - c);
    return map_channels(img, lut);
}

RasterImage posterize(const RasterImage& img, int levels) {
    std::array<std::uint8_t, 256> lut{};
    const double steps = levels - 1;
    for (int c = 0; c < 256; ++c) {
        const double level = std::round(c * steps / 255.0);
        lut[c] = clamp_round(level * 255.0 / steps);
    }
    return map_channels(img, lut);
}

RasterImage gamma(const RasterImage& img, double g) {
    std::array<std::uint8_t, 256> lut{};
    for (int c = 0; c < 256; ++c) lut[c] = clamp_round(255.0 * std::pow(c / 255.0, 1.0 / g));
    return map_channels(img, lut);
}

double hue_to_channel(double p, double q, double t) {
    if (t < 0.0) t += 1.0;
    if (t > 1.0) t -= 1.0;
    if (t < 1.0 / 6.0) return p + (q - p) * 6.0 * t;
    if (t < 0.5) return q;
    if (t < 2.0 / 3.0) return p + (q - p) * (2.0 / 3.0 - t) * 6.0;
    return p;
}

// HSL round trip with the lightness scaled; hue and saturation kept.
RasterImage modulate(const RasterImage& img, double brightness_pct) {
    const double factor = brightness_pct / 100.0;
    return map_rgb(img, [&](std::uint8_t* p) {
        const double r = p[0] / 255.0;
        const double g = p[1] / 255.0;
        const double b = p[2] / 255.0;
        const double mx = std::max({r, g, b});
        const double mn = std::min({r, g, b});
        const double l = (mx + mn) / 2.0;
        double h = 0.0;
        double s = 0.0;
        if (mx > mn) {
            const double d = mx - mn;
            s = l > 0.5 ? d / (2.0 - mx - mn) : d / (mx + mn);
            if (mx == r) {
                h = (g - b) / d + (g < b ? 6.0 : 0.0);
            } else if (mx == g) {
                h = (b - r) / d + 2.0;
            } else {
                h = (r - g) / d + 4.0;
            }
            h /= 6.0;
        }
        const double l2 = std::clamp(l * factor, 0.0, 1.0);
        double nr = l2;
        double ng = l2;
        double nb = l2;
        if (s > 0.0) {
            const double q = l2 < 0.5 ? l2 * (1.0 + s) : l2 + s - l2 * s;
            const double pp = 2.0 * l2 - q;
            nr = hue_to_channel(pp, q, h + 1.0 / 3.0);
            ng = hue_to_channel(pp, q, h);
            nb = hue_to_channel(pp, q, h - 1.0 / 3.0);
        }
        p[0] = clamp_round(nr * 255.0);
        p[1] = clamp_round(ng * 255.0);
        p[2] = clamp_round(nb * 255.0);
    });
}

// Modal neighbourhood colour ("oil paint"); ties go to the lowest packed RGB.
RasterImage paint(const RasterImage& img, int radius) {
    RasterImage out = img;
    const int w = img.width();
    const int h = img.height();
    std::vector<std::uint32_t> window;
    window.reserve(static_cast<std::size_t>((2 * radius + 1) * (2 * radius + 1)));
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            window.clear();
            for (int dy = -radius; dy <= radius; ++dy) {
                const int sy = std::clamp(y + dy, 0, h - 1);
                for (int dx = -radius; dx <= radius; ++dx) {
                    const int sx = std::clamp(x + dx, 0, w - 1);
                    const auto* p = img.pixel(sx, sy);
                    window.push_back((std::uint32_t{p[0]} << 16U) | (std::uint32_t{p[1]} << 8U) | p[2]);
                }
            }
            std::sort(window.begin(), window.end());
            std::uint32_t best = window[0];
            std::size_t best_count = 0;
            for (std::size_t i = 0; i < window.size();) {
                std::size_t j = i;
                while (j < window.size() && window[j] == window[i]) ++j;
                if (j - i > best_count) {
                    best_count = j - i;
                    best = window[i];
                }
                i = j;
            }
            auto* q = out.pixel(x, y);
            q[0] = static_cast<std::uint8_t>(best >> 16U);
            q[1] = static_cast<std::uint8_t>(best >> 8U);
            q[2] = static_cast<std::uint8_t>(best);
        }
    }
    return out;
}

RasterImage canny(const RasterImage& img, double threshold_pct) {
    const int w = img.width();
    const int h = img.height();
    const auto at = [w](int x, int y) { return static_cast<std::size_t>(y) * w + x; };

    std::vector<double> luma(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const auto* p = img.pixel(x, y);
            luma[at(x, y)] = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
        }
    }

    // Gaussian blur, sigma 1, radius 3, edge clamped, separable.
    constexpr int kRadius = 3;
    std::array<double, 2 * kRadius + 1> kernel{};
    double ksum = 0.0;
    for (int i = -kRadius; i <= kRadius; ++i) {
        kernel[i + kRadius] = std::exp(-0.5 * i * i);
        ksum += kernel[i + kRadius];
    }
    for (double& k : kernel) k /= ksum;
    std::vector<double> tmp(luma.size());
    std::vector<double> blur(luma.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -kRadius; i <= kRadius; ++i) acc += kernel[i + kRadius] * luma[at(std::clamp(x + i, 0, w - 1), y)];
            tmp[at(x, y)] = acc;
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -kRadius; i <= kRadius; ++i) acc += kernel[i + kRadius] * tmp[at(x, std::clamp(y + i, 0, h - 1))];
            blur[at(x, y)] = acc;
        }
    }

    std::vector<double> gx(luma.size());
    std::vector<double> gy(luma.size());
    std::vector<double> mag(luma.size());
    double max_mag = 0.0;
    const auto b = [&](int x, int y) { return blur[at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1))]; };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double sx = (b(x + 1, y - 1) + 2 * b(x + 1, y) + b(x + 1, y + 1)) -
                              (b(x - 1, y - 1) + 2 * b(x - 1, y) + b(x - 1, y + 1));
            const double sy = (b(x - 1, y + 1) + 2 * b(x, y + 1) + b(x + 1, y + 1)) -
                              (b(x - 1, y - 1) + 2 * b(x, y - 1) + b(x + 1, y - 1));
            gx[at(x, y)] = sx;
            gy[at(x, y)] = sy;
            mag[at(x, y)] = std::hypot(sx, sy);
            max_mag = std::max(max_mag, mag[at(x, y)]);
        }
    }

    // Non-maximum suppression along the gradient direction quantized to 0/45/90/135 degrees.
    std::vector<double> thin(luma.size(), 0.0);
    const auto m = [&](int x, int y) {
        if (x < 0 || y < 0 || x >= w || y >= h) return 0.0;
        return mag[at(x, y)];
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double v = mag[at(x, y)];
            if (v <= 0.0) continue;
            double angle = std::atan2(gy[at(x, y)], gx[at(x, y)]) * 180.0 / 3.14159265358979323846;
            if (angle < 0) angle += 180.0;
            double n1 = 0.0;
            double n2 = 0.0;
            if (angle < 22.5 || angle >= 157.5) {
                n1 = m(x - 1, y), n2 = m(x + 1, y);
            } else if (angle < 67.5) {
                n1 = m(x - 1, y - 1), n2 = m(x + 1, y + 1);
            } else if (angle < 112.5) {
                n1 = m(x, y - 1), n2 = m(x, y + 1);
            } else {
                n1 = m(x + 1, y - 1), n2 = m(x - 1, y + 1);
            }
            if (v >= n1 && v >= n2) thin[at(x, y)] = v;
        }
    }

    const double low = threshold_pct / 100.0 * max_mag;
    const double high = 3.0 * threshold_pct / 100.0 * max_mag;
    std::vector<std::uint8_t> edge(luma.size(), 0);
    std::vector<std::size_t> stack;
    if (max_mag > 0.0) {
        for (std::size_t i = 0; i < thin.size(); ++i) {
            if (thin[i] > 0.0 && thin[i] >= high) {
                edge[i] = 1;
                stack.push_back(i);
            }
        }
        // Hysteresis: grow strong edges through 8-connected weak pixels.
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            const int x = static_cast<int>(i % static_cast<std::size_t>(w));
            const int y = static_cast<int>(i / static_cast<std::size_t>(w));
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int nx = x + dx;
                    const int ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    const auto j = at(nx, ny);
                    if (!edge[j] && thin[j] > 0.0 && thin[j] >= low) {
                        edge[j] = 1;
                        stack.push_back(j);
                    }
                }
            }
        }
    }

    RasterImage out(w, h, {0, 0, 0, 255});
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (edge[at(x, y)]) out.set(x, y, {255, 255, 255, 255});
        }
    }
    return out;
}

}  // namespace

std::string AugmentOp::name() const {
    switch (kind) {
        case Kind::Negate: return "negate";
        case Kind::Canny: return fmt::format("canny{}", value);
        case Kind::Posterize: return fmt::format("posterize{}", value);
        case Kind::Paint: return fmt::format("paint{}", value);
        case Kind::Gamma: return fmt::format("gamma{}", value);
        case Kind::Modulate: return fmt::format("modulate{}", value);
    }
    return "unknown";
}

std::optional<AugmentOp> parse_augment_op(std::string_view token) {
    if (token == "negate") return AugmentOp::negate();
    static const std::array<std::pair<std::string_view, AugmentOp::Kind>, 5> kPrefixed = {{
        {"canny", AugmentOp::Kind::Canny},
        {"posterize", AugmentOp::Kind::Posterize},
        {"paint", AugmentOp::Kind::Paint},
        {"gamma", AugmentOp::Kind::Gamma},
        {"modulate", AugmentOp::Kind::Modulate},
    }};
    for (const auto& [prefix, kind] : kPrefixed) {
        if (token.size() <= prefix.size() || token.substr(0, prefix.size()) != prefix) continue;
        auto rest = token.substr(prefix.size());
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), v);
        if (ec != std::errc() || ptr != rest.data() + rest.size()) return std::nullopt;
        return AugmentOp{kind, v};
    }
    return std::nullopt;
}

void validate(const AugmentOp& op) {
    const double v = op.value;
    switch (op.kind) {
        case AugmentOp::Kind::Negate: return;
        case AugmentOp::Kind::Canny:
            if (!(v > 0.0) || 3.0 * v > 100.0) throw Error(ErrorCode::InvalidParameter, "canny threshold must be in (0, 33.3]");
            return;
        case AugmentOp::Kind::Posterize:
            if (v < 2.0 || v != std::floor(v)) throw Error(ErrorCode::InvalidParameter, "posterize levels must be an integer >= 2");
            return;
        case AugmentOp::Kind::Paint:
            if (v < 1.0 || v != std::floor(v)) throw Error(ErrorCode::InvalidParameter, "paint radius must be an integer >= 1");
            return;
        case AugmentOp::Kind::Gamma:
            if (!(v > 0.0)) throw Error(ErrorCode::InvalidParameter, "gamma must be positive");
            return;
        case AugmentOp::Kind::Modulate:
            if (!(v > 0.0)) throw Error(ErrorCode::InvalidParameter, "modulate brightness must be positive");
            return;
    }
}

RasterImage apply(const AugmentOp& op, const RasterImage& img) {
    validate(op);
    if (img.empty()) throw Error(ErrorCode::InvalidParameter, "cannot augment an empty image");
    switch (op.kind) {
        case AugmentOp::Kind::Negate: return negate(img);
        case AugmentOp::Kind::Canny: return canny(img, op.value);
        case AugmentOp::Kind::Posterize: return posterize(img, static_cast<int>(op.value));
        case AugmentOp::Kind::Paint: return paint(img, static_cast<int>(op.value));
        case AugmentOp::Kind::Gamma: return gamma(img, op.value);
        case AugmentOp::Kind::Modulate: return modulate(img, op.value);
    }
    return img;
}

const std::vector<AugmentOp>& augmentation_bank() {
    static const std::vector<AugmentOp> bank = {
        AugmentOp::negate(),      AugmentOp::canny(10),    AugmentOp::posterize(2),
        AugmentOp::posterize(4),  AugmentOp::paint(1),     AugmentOp::paint(3),
        AugmentOp::gamma(100),    AugmentOp::modulate(140), AugmentOp::modulate(160),
    };
    return bank;
}

std::vector<RasterImage> augment_all(const RasterImage& img) {
    std::vector<RasterImage> out;
    out.reserve(augmentation_bank().size());
    for (const auto& op : augmentation_bank()) out.push_back(apply(op, img));
    return out;
}

}  // namespace gazescreen
