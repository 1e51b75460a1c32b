#pragma once

#include <array>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "flashkit/detector.hpp"
#include "flashkit/oracle.hpp"
#include "flashkit/rng.hpp"
#include "flashkit/util.hpp"
#include "flashkit/video.hpp"

namespace flashkit {

// Corpus constants: ten-second clips at the oracle raster so area semantics
// are exact and resampling never confounds the labels.
constexpr int kCorpusFps = 30;
constexpr int kCorpusSeconds = 10;
constexpr int kCorpusFrames = kCorpusFps * kCorpusSeconds;

using Rgb = std::array<std::uint8_t, 3>;

enum class ShapeKind : std::uint8_t { circle, rectangle };

inline const char* to_string(ShapeKind k) {
    return k == ShapeKind::circle ? "circle" : "rectangle";
}

// One trigger-corpus video. Every field is drawn from `seed` in a fixed
// order (flags included), so a spec is a pure function of its seed and all
// fields are defined even when the corresponding flag is off.
struct TriggerVideoSpec {
    std::uint64_t seed = 0;
    bool background_flashing = false;
    int background_rate = 1;  // complete flashes per second, 1..15
    bool has_shape = false;
    ShapeKind shape_kind = ShapeKind::circle;
    double shape_size = 0.1;  // fraction of frame min-dimension, 0.1..0.9
    bool shape_flashing = false;
    int shape_rate = 1;
    std::array<Rgb, 2> background_colors{};
    std::array<Rgb, 2> shape_colors{};
};

// One white-flash-injection video: solid base color, three single-frame
// white pulses per second at the given overlay opacity.
struct InjectionVideoSpec {
    std::uint64_t seed = 0;
    Rgb base_color{};
    int flash_rate = 3;   // fixed
    int intensity = 50;   // percent, multiple of 10 in [10, 90]
};

// ---------------------------------------------------------------------------
// Deterministic parameter draws

inline TriggerVideoSpec derive_trigger_spec(std::uint64_t corpus_seed, std::uint64_t index) {
    TriggerVideoSpec s;
    s.seed = derive_stream_seed(corpus_seed, index);
    SplitMix64 r(s.seed);
    s.background_flashing = r.next_bool();
    s.background_rate = static_cast<int>(r.next_range(1, 15));
    s.has_shape = r.next_bool();
    s.shape_kind = r.next_range(0, 1) ? ShapeKind::rectangle : ShapeKind::circle;
    s.shape_size = 0.1 + 0.8 * r.next_double();
    s.shape_flashing = r.next_bool();
    s.shape_rate = static_cast<int>(r.next_range(1, 15));
    for (auto& c : s.background_colors) c = {r.next_byte(), r.next_byte(), r.next_byte()};
    for (auto& c : s.shape_colors) c = {r.next_byte(), r.next_byte(), r.next_byte()};
    return s;
}

inline std::vector<Rgb> derive_base_colors(std::uint64_t seed, int n) {
    SplitMix64 r(seed);
    std::vector<Rgb> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back({r.next_byte(), r.next_byte(), r.next_byte()});
    return out;
}

// ---------------------------------------------------------------------------
// Pulse timing
//
// A rate of r means r complete flashes (up+down pairs) per second. Pulse i
// holds the flash color for floor(fps/2r) frames starting one frame after
// floor(i*fps/r); the one-frame phase keeps both edges of the first pulse
// inside the video so the oracle sees every generated flash.

inline bool pulse_state(int frame, int rate, int fps = kCorpusFps,
                        int duration_s = kCorpusSeconds) {
    const int half = std::max(1, fps / (2 * rate));
    const int total = duration_s * rate;
    const int guess = frame * rate / fps;
    for (int i = std::max(0, guess - 1); i <= guess + 1 && i < total; ++i) {
        const int start = i * fps / rate + 1;
        if (frame >= start && frame < start + half) return true;
    }
    return false;
}

namespace detail {

// Row spans of the centered shape, computed once per spec.
inline std::vector<std::pair<int, int>> shape_row_spans(const TriggerVideoSpec& s, int w, int h) {
    std::vector<std::pair<int, int>> spans(h, {0, -1});
    if (!s.has_shape) return spans;
    const double half = s.shape_size * std::min(w, h) / 2.0;
    const double cx = w / 2.0, cy = h / 2.0;
    for (int y = 0; y < h; ++y) {
        const double dy = y + 0.5 - cy;
        double half_width = -1.0;
        if (s.shape_kind == ShapeKind::rectangle) {
            if (std::abs(dy) <= half) half_width = half;
        } else {
            const double rem = half * half - dy * dy;
            if (rem >= 0.0) half_width = std::sqrt(rem);
        }
        if (half_width >= 0.0) {
            int x0 = static_cast<int>(std::ceil(cx - half_width - 0.5));
            int x1 = static_cast<int>(std::floor(cx + half_width - 0.5));
            x0 = std::max(0, x0);
            x1 = std::min(w - 1, x1);
            if (x0 <= x1) spans[y] = {x0, x1};
        }
    }
    return spans;
}

inline Frame compose_frame(int w, int h, Rgb bg, const std::vector<std::pair<int, int>>& spans,
                           bool draw_shape, Rgb shape) {
    Frame f(static_cast<std::size_t>(w) * h * 3);
    for (int y = 0; y < h; ++y) {
        std::uint8_t* row = f.data() + static_cast<std::size_t>(y) * w * 3;
        for (int x = 0; x < w; ++x) {
            row[3 * x] = bg[0];
            row[3 * x + 1] = bg[1];
            row[3 * x + 2] = bg[2];
        }
        if (draw_shape && spans[y].first <= spans[y].second) {
            for (int x = spans[y].first; x <= spans[y].second; ++x) {
                row[3 * x] = shape[0];
                row[3 * x + 1] = shape[1];
                row[3 * x + 2] = shape[2];
            }
        }
    }
    return f;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Generators

inline VideoBuffer gen_trigger_video(const TriggerVideoSpec& s) {
    VideoBuffer v = make_video(kRasterWidth, kRasterHeight, kCorpusFps);
    const auto spans = detail::shape_row_spans(s, v.width, v.height);
    std::array<Frame, 4> templates;  // bg_state * 2 + shape_state
    std::array<bool, 4> built{};
    v.frames.reserve(kCorpusFrames);
    for (int f = 0; f < kCorpusFrames; ++f) {
        const int bg = s.background_flashing && pulse_state(f, s.background_rate) ? 1 : 0;
        const int sh = s.has_shape && s.shape_flashing && pulse_state(f, s.shape_rate) ? 1 : 0;
        const int idx = bg * 2 + sh;
        if (!built[idx]) {
            templates[idx] = detail::compose_frame(v.width, v.height, s.background_colors[bg],
                                                   spans, s.has_shape, s.shape_colors[sh]);
            built[idx] = true;
        }
        v.frames.push_back(templates[idx]);
    }
    return v;
}

// White overlay at `intensity` percent opacity, rounded half-up.
inline std::uint8_t composite_white(std::uint8_t c, int intensity) {
    return static_cast<std::uint8_t>((c * (100 - intensity) + 255 * intensity + 50) / 100);
}

inline VideoBuffer gen_injection_video(const InjectionVideoSpec& s) {
    if (s.intensity < 10 || s.intensity > 90 || s.intensity % 10 != 0)
        throw std::invalid_argument("injection intensity must be a multiple of 10 in [10, 90]");
    if (s.flash_rate != 3) throw std::invalid_argument("injection flash rate is fixed at 3/s");
    VideoBuffer v = make_video(kRasterWidth, kRasterHeight, kCorpusFps);
    const std::vector<std::pair<int, int>> no_shape(v.height, {0, -1});
    Rgb flashed{composite_white(s.base_color[0], s.intensity),
                composite_white(s.base_color[1], s.intensity),
                composite_white(s.base_color[2], s.intensity)};
    const Frame base = detail::compose_frame(v.width, v.height, s.base_color, no_shape, false, {});
    const Frame pulse = detail::compose_frame(v.width, v.height, flashed, no_shape, false, {});
    const int spacing = kCorpusFps / s.flash_rate;
    v.frames.reserve(kCorpusFrames);
    for (int f = 0; f < kCorpusFrames; ++f)
        v.frames.push_back(f % spacing == 1 ? pulse : base);
    return v;
}

// ---------------------------------------------------------------------------
// Corpus rows and manifests

struct TriggerRow {
    std::string path;  // empty when videos were not materialized
    TriggerVideoSpec spec;
    bool oracle_risky = false;
    double f_avg = 0.0;
};

struct InjectionRow {
    std::string path;
    InjectionVideoSpec spec;
};

inline std::string trigger_video_filename(std::uint64_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "trigger_%05llu.fgrv",
                  static_cast<unsigned long long>(index));
    return buf;
}

inline std::string injection_video_filename(int color_index, int intensity) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "inject_%04d_i%02d.fgrv", color_index, intensity);
    return buf;
}

// Generate, label, and featurize n trigger videos. When out_dir is nonempty
// every video is written there as FGRV1 and the row carries its filename.
inline std::vector<TriggerRow> build_trigger_corpus(std::uint64_t seed, int n,
                                                    const std::string& out_dir = {},
                                                    int jobs = 1) {
    if (n < 1) throw std::invalid_argument("corpus size must be >= 1");
    std::vector<TriggerRow> rows(n);
    parallel_for_index(static_cast<std::size_t>(n), jobs, [&](std::size_t i) {
        TriggerRow row;
        row.spec = derive_trigger_spec(seed, i);
        const VideoBuffer v = gen_trigger_video(row.spec);
        row.oracle_risky = classify_risk(v).risky;
        row.f_avg = video_feature(v);
        if (!out_dir.empty()) {
            row.path = trigger_video_filename(i);
            write_video(v, out_dir + "/" + row.path);
        }
        rows[i] = std::move(row);
    });
    return rows;
}

inline std::vector<InjectionRow> build_injection_corpus(std::uint64_t seed, int n_colors,
                                                        const std::vector<int>& intensities,
                                                        const std::string& out_dir = {},
                                                        int jobs = 1) {
    const auto colors = derive_base_colors(seed, n_colors);
    std::vector<InjectionRow> rows(static_cast<std::size_t>(n_colors) * intensities.size());
    parallel_for_index(rows.size(), jobs, [&](std::size_t idx) {
        const int ci = static_cast<int>(idx / intensities.size());
        const int intensity = intensities[idx % intensities.size()];
        InjectionRow row;
        row.spec.seed = derive_stream_seed(seed, ci);
        row.spec.base_color = colors[ci];
        row.spec.intensity = intensity;
        if (!out_dir.empty()) {
            row.path = injection_video_filename(ci, intensity);
            write_video(gen_injection_video(row.spec), out_dir + "/" + row.path);
        }
        rows[idx] = std::move(row);
    });
    return rows;
}

// ---------------------------------------------------------------------------
// Manifest CSV

inline constexpr const char* kTriggerManifestHeader =
    "path,background_flashing,background_rate,has_shape,shape_kind,shape_size,"
    "shape_flashing,shape_rate,oracle_risky,f_avg";

inline void write_trigger_manifest(const std::vector<TriggerRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw io_error("cannot open manifest for writing: " + path);
    out << kTriggerManifestHeader << '\n';
    for (const TriggerRow& r : rows) {
        const TriggerVideoSpec& s = r.spec;
        out << r.path << ',' << (s.background_flashing ? 1 : 0) << ',' << s.background_rate << ','
            << (s.has_shape ? 1 : 0) << ',' << to_string(s.shape_kind) << ','
            << format_double(s.shape_size) << ',' << (s.shape_flashing ? 1 : 0) << ','
            << s.shape_rate << ',' << (r.oracle_risky ? 1 : 0) << ',' << format_double(r.f_avg)
            << '\n';
    }
    if (!out) throw io_error("manifest write failed: " + path);
}

inline std::vector<TriggerRow> read_trigger_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open manifest: " + path);
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line).size() != 10)
        throw format_error("bad manifest header: " + path);
    std::vector<TriggerRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 10) throw format_error("bad manifest row: " + path);
        TriggerRow r;
        r.path = f[0];
        r.spec.background_flashing = f[1] == "1";
        r.spec.background_rate = std::stoi(f[2]);
        r.spec.has_shape = f[3] == "1";
        r.spec.shape_kind = f[4] == "rectangle" ? ShapeKind::rectangle : ShapeKind::circle;
        r.spec.shape_size = parse_double(f[5]);
        r.spec.shape_flashing = f[6] == "1";
        r.spec.shape_rate = std::stoi(f[7]);
        r.oracle_risky = f[8] == "1";
        r.f_avg = parse_double(f[9]);
        rows.push_back(std::move(r));
    }
    return rows;
}

inline constexpr const char* kInjectionManifestHeader = "path,base_r,base_g,base_b,intensity";

inline void write_injection_manifest(const std::vector<InjectionRow>& rows,
                                     const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw io_error("cannot open manifest for writing: " + path);
    out << kInjectionManifestHeader << '\n';
    for (const InjectionRow& r : rows)
        out << r.path << ',' << int(r.spec.base_color[0]) << ',' << int(r.spec.base_color[1])
            << ',' << int(r.spec.base_color[2]) << ',' << r.spec.intensity << '\n';
    if (!out) throw io_error("manifest write failed: " + path);
}

inline std::vector<InjectionRow> read_injection_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open manifest: " + path);
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line).size() != 5)
        throw format_error("bad manifest header: " + path);
    std::vector<InjectionRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 5) throw format_error("bad manifest row: " + path);
        InjectionRow r;
        r.path = f[0];
        r.spec.base_color = {static_cast<std::uint8_t>(std::stoi(f[1])),
                             static_cast<std::uint8_t>(std::stoi(f[2])),
                             static_cast<std::uint8_t>(std::stoi(f[3]))};
        r.spec.intensity = std::stoi(f[4]);
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace flashkit
