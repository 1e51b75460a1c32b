#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "flashkit/detector.hpp"
#include "flashkit/oracle.hpp"
#include "flashkit/synthgen.hpp"
#include "flashkit/util.hpp"

namespace flashkit {

// ---------------------------------------------------------------------------
// Darkening

// Black overlay at k percent opacity: masked channels scale by (100-k)/100,
// rounded half-up. Unmasked pixels are untouched.
inline Frame apply_darkening(FrameView f, const RegionMask& mask, double k) {
    if (!(k >= 0.0 && k <= 100.0)) throw std::domain_error("darkening k must be in [0, 100]");
    Frame out(f.data, f.data + f.byte_size());
    const double scale = (100.0 - k) / 100.0;
    std::array<std::uint8_t, 256> table;
    for (int c = 0; c < 256; ++c)
        table[c] = static_cast<std::uint8_t>(std::floor(c * scale + 0.5));
    const std::size_t n = static_cast<std::size_t>(f.width) * f.height;
    for (std::size_t i = 0; i < n; ++i) {
        if (!mask.bits[i]) continue;
        out[3 * i] = table[out[3 * i]];
        out[3 * i + 1] = table[out[3 * i + 1]];
        out[3 * i + 2] = table[out[3 * i + 2]];
    }
    return out;
}

inline VideoBuffer apply_darkening(const VideoBuffer& v, const RegionMask& mask, double k) {
    VideoBuffer out = make_video(v.width, v.height, v.fps);
    out.frames.reserve(v.frames.size());
    for (int i = 0; i < v.frame_count(); ++i)
        out.frames.push_back(apply_darkening(v.view(i), mask, k));
    return out;
}

// Smallest integer k in [0, 100] whose full-mask darkening makes the oracle
// verdict safe. Probes a 10-step grid upward, then refines by single steps;
// every returned k > 0 was verified against a risky k-1. k=100 blacks the
// video out entirely, so a safe level always exists.
//
// The probe loop darkens only the distinct frames of the analysis raster
// (darkening maps identical frames to identical frames), which keeps the
// search fast on synthetic content without changing any verdict.
inline int find_min_k(const VideoBuffer& v) {
    const bool native = v.width == kRasterWidth && v.height == kRasterHeight;
    VideoBuffer resampled;
    const VideoBuffer& raster = native ? v : (resampled = analysis_raster(v), resampled);
    const auto fc = detail::classify_frames(raster);

    std::vector<Frame> reps;
    reps.reserve(fc.representative.size());
    for (int idx : fc.representative) reps.push_back(raster.frames[idx]);

    std::array<std::optional<bool>, 101> memo;
    auto safe_at = [&](int k) {
        if (memo[k]) return *memo[k];
        std::array<std::uint8_t, 256> table;
        for (int c = 0; c < 256; ++c)
            table[c] = static_cast<std::uint8_t>(std::floor(c * (100.0 - k) / 100.0 + 0.5));
        std::vector<Frame> dark(reps.size());
        std::vector<FrameView> views;
        views.reserve(reps.size());
        for (std::size_t i = 0; i < reps.size(); ++i) {
            dark[i].resize(reps[i].size());
            for (std::size_t b = 0; b < reps[i].size(); ++b) dark[i][b] = table[reps[i][b]];
            views.push_back(FrameView{dark[i].data(), raster.width, raster.height});
        }
        const bool safe = !detail::analyze_classed(views, fc.class_of, raster.fps).risky;
        memo[k] = safe;
        return safe;
    };

    if (safe_at(0)) return 0;
    int coarse = 10;
    while (coarse < 100 && !safe_at(coarse)) coarse += 10;
    int k = coarse;
    while (k > coarse - 10 + 1 && safe_at(k - 1)) --k;
    return k;
}

// ---------------------------------------------------------------------------
// k-level model

struct SweepSample {
    double L = 0, a = 0, b = 0;
    int intensity = 0;
    int min_k = 0;
};

// Linear predictor of the minimum darkening opacity from the base color and
// flash intensity, with the k vs L* correlation the sweep observed.
struct KLevelModel {
    double b0 = 0, bL = 0, ba = 0, bb = 0, bI = 0;
    double pearson_kL = 0;
};

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

// Ordinary least squares on (1, L*, a*, b*, intensity) -> k via the normal
// equations, solved by Gaussian elimination with partial pivoting.
inline KLevelModel fit_k_model(const std::vector<SweepSample>& samples) {
    if (samples.size() < 10) throw fit_error("fit_k_model: need at least 10 samples");
    {
        const double L0 = samples.front().L;
        bool two = false;
        for (const auto& s : samples)
            if (s.L != L0) { two = true; break; }
        if (!two) throw fit_error("fit_k_model: samples must span at least 2 distinct L* values");
    }
    constexpr int D = 5;
    static const char* kColumnNames[D] = {"intercept", "L", "a", "b", "intensity"};
    double ata[D][D] = {};
    double aty[D] = {};
    for (const SweepSample& s : samples) {
        const double row[D] = {1.0, s.L, s.a, s.b, static_cast<double>(s.intensity)};
        for (int i = 0; i < D; ++i) {
            for (int j = 0; j < D; ++j) ata[i][j] += row[i] * row[j];
            aty[i] += row[i] * s.min_k;
        }
    }
    // scale-aware pivot tolerance
    double max_diag = 0;
    for (int i = 0; i < D; ++i) max_diag = std::max(max_diag, std::abs(ata[i][i]));
    const double tol = max_diag * 1e-12;
    for (int c = 0; c < D; ++c) {
        int piv = c;
        for (int r = c + 1; r < D; ++r)
            if (std::abs(ata[r][c]) > std::abs(ata[piv][c])) piv = r;
        if (std::abs(ata[piv][c]) <= tol)
            throw fit_error(std::string("fit_k_model: rank-deficient design, column '") +
                            kColumnNames[c] + "' is collinear");
        if (piv != c) {
            for (int j = 0; j < D; ++j) std::swap(ata[piv][j], ata[c][j]);
            std::swap(aty[piv], aty[c]);
        }
        for (int r = c + 1; r < D; ++r) {
            const double m = ata[r][c] / ata[c][c];
            for (int j = c; j < D; ++j) ata[r][j] -= m * ata[c][j];
            aty[r] -= m * aty[c];
        }
    }
    double beta[D];
    for (int r = D - 1; r >= 0; --r) {
        double acc = aty[r];
        for (int j = r + 1; j < D; ++j) acc -= ata[r][j] * beta[j];
        beta[r] = acc / ata[r][r];
    }
    KLevelModel m;
    m.b0 = beta[0];
    m.bL = beta[1];
    m.ba = beta[2];
    m.bb = beta[3];
    m.bI = beta[4];
    std::vector<double> ks, Ls;
    ks.reserve(samples.size());
    Ls.reserve(samples.size());
    for (const auto& s : samples) {
        ks.push_back(s.min_k);
        Ls.push_back(s.L);
    }
    m.pearson_kL = pearson(ks, Ls);
    return m;
}

// ---------------------------------------------------------------------------
// Mitigation configuration

struct MitigationConfig {
    int assumed_intensity = 70;  // percent; runtime flash intensity assumption
    int smoothing_n = 15;
    double overlay_alpha = 0.6;
    bool darkening_enabled = true;
    bool smoothing_enabled = true;

    void validate() const {
        if (assumed_intensity < 10 || assumed_intensity > 90)
            throw std::invalid_argument("assumed_intensity must be in [10, 90]");
        if (smoothing_n < 1) throw std::invalid_argument("smoothing n must be >= 1");
        if (!(overlay_alpha >= 0.0 && overlay_alpha <= 1.0))
            throw std::invalid_argument("overlay alpha must be in [0, 1]");
    }
};

inline double predict_k(const KLevelModel& m, const LabColor& base, const MitigationConfig& cfg) {
    const double k = m.b0 + m.bL * base.L + m.ba * base.a + m.bb * base.b +
                     m.bI * cfg.assumed_intensity;
    return std::clamp(k, 0.0, 100.0);
}

// ---------------------------------------------------------------------------
// Temporal color smoothing

// Ring buffer of the last n region-mean Lab colors; the overlay is their mean.
struct SmootherState {
    int n = 15;
    double alpha = 0.6;
    std::vector<LabColor> ring;
    int count = 0;
    int head = 0;
    double sL = 0, sa = 0, sb = 0;

    explicit SmootherState(int n_ = 15, double alpha_ = 0.6) : n(n_), alpha(alpha_) {
        if (n < 1) throw std::invalid_argument("smoother n must be >= 1");
        ring.resize(n);
    }

    void push(const LabColor& c) {
        if (count == n) {
            const LabColor& old = ring[head];
            sL -= old.L;
            sa -= old.a;
            sb -= old.b;
        } else {
            ++count;
        }
        ring[head] = c;
        head = (head + 1) % n;
        sL += c.L;
        sa += c.a;
        sb += c.b;
    }

    LabColor mean() const { return LabColor{sL / count, sa / count, sb / count}; }
};

// Push the frame's region mean, then blend the running-average color over the
// masked pixels as a semi-translucent overlay. An empty mask returns the
// frame unchanged without touching the buffer.
inline Frame temporal_smooth(SmootherState& state, FrameView f, const RegionMask& mask) {
    Frame out(f.data, f.data + f.byte_size());
    if (mask.empty()) return out;
    state.push(region_mean_lab(f, mask));
    const std::array<std::uint8_t, 3> overlay = lab_to_rgb(state.mean());
    const double a = state.alpha;
    const std::size_t n = static_cast<std::size_t>(f.width) * f.height;
    for (std::size_t i = 0; i < n; ++i) {
        if (!mask.bits[i]) continue;
        for (int c = 0; c < 3; ++c)
            out[3 * i + c] = static_cast<std::uint8_t>(
                std::floor((1.0 - a) * out[3 * i + c] + a * overlay[c] + 0.5));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Streaming mitigation

struct MitigationOutput {
    VideoBuffer video;
    std::vector<std::vector<Rect>> mask_rects;  // per frame
};

// Per frame: update the trigger array on the incoming stream, interpolate the
// activation mask, smooth then darken inside it. k comes from the k-model
// evaluated at the mask's mean color after smoothing (the stable estimate of
// the color the region oscillates around). Frames outside masks are copied
// bit-identically.
inline MitigationOutput mitigate_stream(const VideoBuffer& v, const DetectorModel& dm,
                                        const KLevelModel& km, const MitigationConfig& cfg,
                                        int grid_w = 50, int grid_h = 50) {
    cfg.validate();
    TriggerArray arr(grid_w, grid_h, v.width, v.height, v.fps, dm.threshold());
    SmootherState smoother(cfg.smoothing_n, cfg.overlay_alpha);
    MitigationOutput out;
    out.video = make_video(v.width, v.height, v.fps);
    out.video.frames.reserve(v.frames.size());
    out.mask_rects.resize(v.frames.size());
    for (int i = 0; i < v.frame_count(); ++i) {
        arr.update(v.view(i));
        const RegionMask mask = interpolate_region(arr.active, grid_w, grid_h, v.width, v.height);
        out.mask_rects[i] = mask.rects;
        if (mask.empty()) {
            out.video.frames.push_back(v.frames[i]);
            continue;
        }
        Frame f;
        if (cfg.smoothing_enabled) {
            f = temporal_smooth(smoother, v.view(i), mask);
        } else {
            const Frame& src = v.frames[i];
            f.assign(src.begin(), src.end());
        }
        if (cfg.darkening_enabled) {
            const FrameView fv{f.data(), v.width, v.height};
            const double k = predict_k(km, region_mean_lab(fv, mask), cfg);
            f = apply_darkening(fv, mask, k);
        }
        out.video.frames.push_back(std::move(f));
    }
    return out;
}

// Percent of the input's flash frames the mitigation removed.
inline double efficacy(const FlashReport& pre, const FlashReport& post) {
    if (pre.flash_frame_indices.empty())
        throw std::domain_error("efficacy undefined: no flash frames before mitigation");
    return 100.0 * (1.0 - static_cast<double>(post.flash_frame_indices.size()) /
                              static_cast<double>(pre.flash_frame_indices.size()));
}

// ---------------------------------------------------------------------------
// Sweep

// Minimum-k samples over an injection corpus: one row per (base color,
// intensity). Videos are read from their manifest path when present, else
// regenerated from the spec (bit-identical either way).
inline std::vector<SweepSample> run_k_sweep(const std::vector<InjectionRow>& rows,
                                            const std::string& video_dir = {}, int jobs = 1) {
    std::vector<SweepSample> samples(rows.size());
    parallel_for_index(rows.size(), jobs, [&](std::size_t i) {
        const InjectionRow& row = rows[i];
        VideoBuffer v = (!row.path.empty() && !video_dir.empty())
                            ? read_video(video_dir + "/" + row.path)
                            : gen_injection_video(row.spec);
        SweepSample s;
        const LabColor lab =
            rgb_to_lab(row.spec.base_color[0], row.spec.base_color[1], row.spec.base_color[2]);
        s.L = lab.L;
        s.a = lab.a;
        s.b = lab.b;
        s.intensity = row.spec.intensity;
        s.min_k = find_min_k(v);
        samples[i] = s;
    });
    return samples;
}

inline constexpr const char* kSweepHeader = "L,a,b,intensity,min_k";

inline void write_sweep_samples(const std::vector<SweepSample>& samples, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw io_error("cannot open samples file for writing: " + path);
    out << kSweepHeader << '\n';
    for (const SweepSample& s : samples)
        out << format_double(s.L) << ',' << format_double(s.a) << ',' << format_double(s.b) << ','
            << s.intensity << ',' << s.min_k << '\n';
    if (!out) throw io_error("samples write failed: " + path);
}

inline std::vector<SweepSample> read_sweep_samples(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open samples file: " + path);
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line).size() != 5)
        throw format_error("bad samples header: " + path);
    std::vector<SweepSample> samples;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 5) throw format_error("bad samples row: " + path);
        SweepSample s;
        s.L = parse_double(f[0]);
        s.a = parse_double(f[1]);
        s.b = parse_double(f[2]);
        s.intensity = std::stoi(f[3]);
        s.min_k = std::stoi(f[4]);
        samples.push_back(s);
    }
    return samples;
}

}  // namespace flashkit
