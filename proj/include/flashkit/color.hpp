#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "flashkit/video.hpp"

namespace flashkit {

// CIELAB point. L* in [0,100] for in-gamut sRGB, a*/b* practically within ±128.
struct LabColor {
    double L = 0.0;
    double a = 0.0;
    double b = 0.0;
};

namespace detail {

// sRGB electro-optical transfer, 8-bit channel -> linear light in [0,1].
inline const std::array<double, 256>& srgb_linear_table() {
    static const std::array<double, 256> table = [] {
        std::array<double, 256> t{};
        for (int i = 0; i < 256; ++i) {
            double c = i / 255.0;
            t[i] = c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
        }
        return t;
    }();
    return table;
}

// D65 reference white, 2-degree observer.
constexpr double kXn = 0.95047;
constexpr double kYn = 1.0;
constexpr double kZn = 1.08883;
constexpr double kDelta = 6.0 / 29.0;
constexpr double kDelta3 = kDelta * kDelta * kDelta;

inline double lab_f(double t) {
    return t > kDelta3 ? std::cbrt(t) : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

inline double lab_f_inv(double t) {
    return t > kDelta ? t * t * t : 3.0 * kDelta * kDelta * (t - 4.0 / 29.0);
}

}  // namespace detail

inline LabColor rgb_to_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const auto& lin = detail::srgb_linear_table();
    const double R = lin[r], G = lin[g], B = lin[b];
    const double X = 0.4124564 * R + 0.3575761 * G + 0.1804375 * B;
    const double Y = 0.2126729 * R + 0.7151522 * G + 0.0721750 * B;
    const double Z = 0.0193339 * R + 0.1191920 * G + 0.9503041 * B;
    const double fx = detail::lab_f(X / detail::kXn);
    const double fy = detail::lab_f(Y / detail::kYn);
    const double fz = detail::lab_f(Z / detail::kZn);
    return LabColor{116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

inline LabColor rgb_to_lab(const std::uint8_t* px) { return rgb_to_lab(px[0], px[1], px[2]); }

// Inverse conversion. Out-of-gamut channels clip to [0,255]; lossy for Lab
// points outside the sRGB cube.
inline std::array<std::uint8_t, 3> lab_to_rgb(const LabColor& lab) {
    const double fy = (lab.L + 16.0) / 116.0;
    const double fx = fy + lab.a / 500.0;
    const double fz = fy - lab.b / 200.0;
    const double X = detail::lab_f_inv(fx) * detail::kXn;
    const double Y = detail::lab_f_inv(fy) * detail::kYn;
    const double Z = detail::lab_f_inv(fz) * detail::kZn;
    const double R = 3.2404542 * X - 1.5371385 * Y - 0.4985314 * Z;
    const double G = -0.9692660 * X + 1.8760108 * Y + 0.0415560 * Z;
    const double B = 0.0556434 * X - 0.2040259 * Y + 1.0572252 * Z;
    auto encode = [](double u) -> std::uint8_t {
        u = std::clamp(u, 0.0, 1.0);
        double v = u <= 0.0031308 ? 12.92 * u : 1.055 * std::pow(u, 1.0 / 2.4) - 0.055;
        return static_cast<std::uint8_t>(std::floor(v * 255.0 + 0.5));
    };
    return {encode(R), encode(G), encode(B)};
}

// WCAG relative luminance in [0,1].
inline double relative_luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const auto& lin = detail::srgb_linear_table();
    return 0.2126 * lin[r] + 0.7152 * lin[g] + 0.0722 * lin[b];
}

inline double relative_luminance(const std::uint8_t* px) {
    return relative_luminance(px[0], px[1], px[2]);
}

// Per-frame-step flash amount: |dL| + sqrt(da^2 + db^2), dt fixed at one frame.
// The luminance term is an absolute value so upward and downward flashes
// score equally and cannot cancel against the chroma term.
inline double flash_metric(const LabColor& prev, const LabColor& cur) {
    const double dL = cur.L - prev.L;
    const double da = cur.a - prev.a;
    const double db = cur.b - prev.b;
    return std::abs(dL) + std::sqrt(da * da + db * db);
}

// Arithmetic mean of per-pixel Lab values over the mask (convert, then
// average). A one-entry color memo keeps the scan cheap on flat synthetic
// frames without changing the accumulation order.
inline LabColor region_mean_lab(FrameView f, const RegionMask& mask) {
    if (f.width != mask.width || f.height != mask.height)
        throw std::domain_error("region_mean_lab: mask dimensions do not match frame");
    double sL = 0, sa = 0, sb = 0;
    std::size_t n = 0;
    std::uint32_t cached = 0xFFFFFFFFu;
    LabColor cached_lab;
    const std::uint8_t* p = f.data;
    const std::uint8_t* m = mask.bits.data();
    const std::size_t total = static_cast<std::size_t>(f.width) * f.height;
    for (std::size_t i = 0; i < total; ++i, p += 3) {
        if (!m[i]) continue;
        std::uint32_t key = (std::uint32_t(p[0]) << 16) | (std::uint32_t(p[1]) << 8) | p[2];
        if (key != cached) {
            cached = key;
            cached_lab = rgb_to_lab(p);
        }
        sL += cached_lab.L;
        sa += cached_lab.a;
        sb += cached_lab.b;
        ++n;
    }
    if (n == 0) throw std::domain_error("region_mean_lab: empty mask");
    return LabColor{sL / n, sa / n, sb / n};
}

// Full-frame mean.
inline LabColor frame_mean_lab(FrameView f) {
    double sL = 0, sa = 0, sb = 0;
    std::uint32_t cached = 0xFFFFFFFFu;
    LabColor cached_lab;
    const std::uint8_t* p = f.data;
    const std::size_t total = static_cast<std::size_t>(f.width) * f.height;
    for (std::size_t i = 0; i < total; ++i, p += 3) {
        std::uint32_t key = (std::uint32_t(p[0]) << 16) | (std::uint32_t(p[1]) << 8) | p[2];
        if (key != cached) {
            cached = key;
            cached_lab = rgb_to_lab(p);
        }
        sL += cached_lab.L;
        sa += cached_lab.a;
        sb += cached_lab.b;
    }
    return LabColor{sL / total, sa / total, sb / total};
}

}  // namespace flashkit
