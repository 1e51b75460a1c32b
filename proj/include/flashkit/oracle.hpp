#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flashkit/color.hpp"
#include "flashkit/video.hpp"

namespace flashkit {

// Analysis raster dimensions. Flash area rules are evaluated on this grid.
constexpr int kRasterWidth = 341;
constexpr int kRasterHeight = 256;

// Per-pixel vote thresholds of the general-flash definition.
constexpr double kLuminanceDelta = 0.10;   // opposing relative-luminance change
constexpr double kDarkerBound = 0.80;      // darker state must sit below this
constexpr double kAreaQuarter = 0.25;      // fraction of the raster that must vote
constexpr double kRedRatio = 0.80;         // R/(R+G+B) for saturated red
constexpr int kRedMinChannel = 128;

enum class TransitionDirection : std::uint8_t { up, down };
enum class FlashKind : std::uint8_t { luminance, red };

inline const char* to_string(TransitionDirection d) {
    return d == TransitionDirection::up ? "up" : "down";
}
inline const char* to_string(FlashKind k) {
    return k == FlashKind::luminance ? "luminance" : "red";
}

// One qualifying frame-to-frame transition. frame_index is the later frame.
struct TransitionEvent {
    int frame_index = 0;
    TransitionDirection direction = TransitionDirection::up;
    double area_fraction = 0.0;
    FlashKind kind = FlashKind::luminance;
};

// A completed flash: two opposing same-kind transitions with none between.
struct Flash {
    int start_frame = 0;
    int end_frame = 0;
    FlashKind kind = FlashKind::luminance;
};

struct FlashReport {
    std::vector<TransitionEvent> events;
    std::vector<Flash> flashes;
    int max_flashes_per_second = 0;
    std::vector<int> flash_frame_indices;  // sorted, frames inside any flash interval
    bool risky = false;
};

// ---------------------------------------------------------------------------

// Nearest-neighbour resample of every frame to the analysis raster.
// Source index = floor(dst_index * src_dim / dst_dim).
inline VideoBuffer analysis_raster(const VideoBuffer& v) {
    if (v.width == kRasterWidth && v.height == kRasterHeight) return v;
    VideoBuffer out = make_video(kRasterWidth, kRasterHeight, v.fps);
    std::vector<int> src_x(kRasterWidth), src_y(kRasterHeight);
    for (int x = 0; x < kRasterWidth; ++x)
        src_x[x] = static_cast<int>(static_cast<std::int64_t>(x) * v.width / kRasterWidth);
    for (int y = 0; y < kRasterHeight; ++y)
        src_y[y] = static_cast<int>(static_cast<std::int64_t>(y) * v.height / kRasterHeight);
    out.frames.reserve(v.frames.size());
    for (const Frame& f : v.frames) {
        Frame g(out.frame_bytes());
        std::uint8_t* dst = g.data();
        for (int y = 0; y < kRasterHeight; ++y) {
            const std::uint8_t* row = f.data() + static_cast<std::size_t>(src_y[y]) * v.width * 3;
            for (int x = 0; x < kRasterWidth; ++x, dst += 3) {
                const std::uint8_t* px = row + static_cast<std::size_t>(src_x[x]) * 3;
                dst[0] = px[0];
                dst[1] = px[1];
                dst[2] = px[2];
            }
        }
        out.frames.push_back(std::move(g));
    }
    return out;
}

namespace detail {

inline bool is_saturated_red(const std::uint8_t* px) {
    const int r = px[0], g = px[1], b = px[2];
    if (r < kRedMinChannel) return false;
    return static_cast<double>(r) >= kRedRatio * (r + g + b);
}

// Per-frame planes the vote pass consumes.
struct FramePlanes {
    std::vector<float> lum;
    std::vector<std::uint8_t> red;
};

inline FramePlanes build_planes(FrameView f) {
    const std::size_t n = static_cast<std::size_t>(f.width) * f.height;
    FramePlanes pl;
    pl.lum.resize(n);
    pl.red.resize(n);
    std::uint32_t cached = 0xFFFFFFFFu;
    float cached_lum = 0;
    std::uint8_t cached_red = 0;
    const std::uint8_t* p = f.data;
    for (std::size_t i = 0; i < n; ++i, p += 3) {
        std::uint32_t key = (std::uint32_t(p[0]) << 16) | (std::uint32_t(p[1]) << 8) | p[2];
        if (key != cached) {
            cached = key;
            cached_lum = static_cast<float>(relative_luminance(p));
            cached_red = is_saturated_red(p) ? 1 : 0;
        }
        pl.lum[i] = cached_lum;
        pl.red[i] = cached_red;
    }
    return pl;
}

struct VoteCounts {
    std::int64_t up = 0, down = 0, red_in = 0, red_out = 0;
};

inline VoteCounts count_votes(const FramePlanes& prev, const FramePlanes& cur) {
    VoteCounts vc;
    const std::size_t n = prev.lum.size();
    for (std::size_t i = 0; i < n; ++i) {
        const float lp = prev.lum[i], lc = cur.lum[i];
        const float lo = lp < lc ? lp : lc;
        if (lo < kDarkerBound) {
            if (lc - lp >= kLuminanceDelta)
                ++vc.up;
            else if (lp - lc >= kLuminanceDelta)
                ++vc.down;
        }
        if (prev.red[i] != cur.red[i]) {
            if (cur.red[i])
                ++vc.red_in;
            else
                ++vc.red_out;
        }
    }
    return vc;
}

// Vote counts -> at most one event per kind. `later_frame` tags the event.
inline void emit_events(const VoteCounts& vc, std::int64_t npix, int later_frame,
                        std::vector<TransitionEvent>& out) {
    const double quarter = kAreaQuarter * static_cast<double>(npix);
    auto pick = [&](std::int64_t up_votes, std::int64_t down_votes, FlashKind kind) {
        const bool up_ok = static_cast<double>(up_votes) >= quarter;
        const bool down_ok = static_cast<double>(down_votes) >= quarter;
        if (!up_ok && !down_ok) return;
        TransitionEvent e;
        e.frame_index = later_frame;
        e.kind = kind;
        if (up_ok && (!down_ok || up_votes >= down_votes)) {
            e.direction = TransitionDirection::up;
            e.area_fraction = static_cast<double>(up_votes) / static_cast<double>(npix);
        } else {
            e.direction = TransitionDirection::down;
            e.area_fraction = static_cast<double>(down_votes) / static_cast<double>(npix);
        }
        out.push_back(e);
    };
    pick(vc.up, vc.down, FlashKind::luminance);
    pick(vc.red_in, vc.red_out, FlashKind::red);
}

// Event stream -> pairing, windowed counting, verdict.
// A flash completes when an event opposes the pending same-kind event; a
// same-direction event replaces the pending one. Completions are counted in
// every closed one-second span (fps+1 consecutive frames), the discrete
// reading of "any one-second period" with both endpoints included.
inline FlashReport build_report(std::vector<TransitionEvent> events, int n_frames, int fps) {
    FlashReport rp;
    rp.events = std::move(events);

    std::optional<TransitionEvent> pending[2];
    for (const TransitionEvent& e : rp.events) {
        auto& slot = pending[static_cast<int>(e.kind)];
        if (slot && slot->direction != e.direction) {
            rp.flashes.push_back(Flash{slot->frame_index, e.frame_index, e.kind});
            slot.reset();
        } else {
            slot = e;
        }
    }

    const int span = fps + 1;
    for (int kind = 0; kind < 2; ++kind) {
        std::vector<int> ends;
        for (const Flash& fl : rp.flashes)
            if (static_cast<int>(fl.kind) == kind) ends.push_back(fl.end_frame);
        if (ends.empty()) continue;
        const int last_start = std::max(0, n_frames - span);
        for (int s = 0; s <= last_start; ++s) {
            auto lo = std::lower_bound(ends.begin(), ends.end(), s);
            auto hi = std::upper_bound(ends.begin(), ends.end(), s + span - 1);
            rp.max_flashes_per_second =
                std::max(rp.max_flashes_per_second, static_cast<int>(hi - lo));
        }
    }
    rp.risky = rp.max_flashes_per_second > 3;

    std::vector<std::uint8_t> in_flash(static_cast<std::size_t>(n_frames), 0);
    for (const Flash& fl : rp.flashes)
        for (int i = fl.start_frame; i <= fl.end_frame && i < n_frames; ++i) in_flash[i] = 1;
    for (int i = 0; i < n_frames; ++i)
        if (in_flash[i]) rp.flash_frame_indices.push_back(i);
    return rp;
}

// Oracle core over a classed frame sequence: planes once per distinct frame,
// votes once per distinct ordered pair of consecutive classes.
inline FlashReport analyze_classed(const std::vector<FrameView>& reps,
                                   const std::vector<int>& class_seq, int fps) {
    const std::int64_t npix =
        static_cast<std::int64_t>(reps[0].width) * reps[0].height;
    std::vector<FramePlanes> planes;
    planes.reserve(reps.size());
    for (FrameView rv : reps) planes.push_back(build_planes(rv));

    std::map<std::pair<int, int>, VoteCounts> vote_memo;
    std::vector<TransitionEvent> events;
    for (std::size_t i = 1; i < class_seq.size(); ++i) {
        const std::pair<int, int> key{class_seq[i - 1], class_seq[i]};
        if (key.first == key.second) continue;
        auto it = vote_memo.find(key);
        if (it == vote_memo.end())
            it = vote_memo.emplace(key, count_votes(planes[key.first], planes[key.second])).first;
        emit_events(it->second, npix, static_cast<int>(i), events);
    }
    return build_report(std::move(events), static_cast<int>(class_seq.size()), fps);
}

constexpr int kMaxDenseClasses = 64;

}  // namespace detail

// Qualifying transitions between two equal-sized frames; at most one
// luminance and one red event. `later_frame_index` becomes the events' frame.
inline std::vector<TransitionEvent> detect_transitions(FrameView prev, FrameView cur,
                                                       int later_frame_index = 1) {
    if (prev.width != cur.width || prev.height != cur.height)
        throw std::domain_error("detect_transitions: frame dimensions differ");
    const auto pp = detail::build_planes(prev);
    const auto pc = detail::build_planes(cur);
    const auto vc = detail::count_votes(pp, pc);
    std::vector<TransitionEvent> out;
    detail::emit_events(vc, static_cast<std::int64_t>(prev.width) * prev.height,
                        later_frame_index, out);
    return out;
}

// Scans consecutive frame pairs on the analysis raster, pairs opposing
// same-kind events into flashes, and flags the buffer risky when any closed
// one-second span holds more than three completions (luminance and red are
// tallied separately; either can trip).
inline FlashReport count_flashes(const VideoBuffer& v) {
    if (v.frame_count() < 2) throw std::domain_error("count_flashes: need at least 2 frames");
    const bool native = v.width == kRasterWidth && v.height == kRasterHeight;
    const VideoBuffer* raster = &v;
    VideoBuffer resampled;
    if (!native) {
        resampled = analysis_raster(v);
        raster = &resampled;
    }

    const auto fc = detail::classify_frames(*raster);
    if (fc.count() <= detail::kMaxDenseClasses) {
        std::vector<FrameView> reps;
        reps.reserve(fc.representative.size());
        for (int idx : fc.representative) reps.push_back(raster->view(idx));
        return detail::analyze_classed(reps, fc.class_of, raster->fps);
    }

    // Streaming path for content with many distinct frames.
    const std::int64_t npix =
        static_cast<std::int64_t>(raster->width) * raster->height;
    std::vector<TransitionEvent> events;
    detail::FramePlanes prev = detail::build_planes(raster->view(0));
    for (int i = 1; i < raster->frame_count(); ++i) {
        detail::FramePlanes cur = detail::build_planes(raster->view(i));
        if (fc.class_of[i] != fc.class_of[i - 1])
            detail::emit_events(detail::count_votes(prev, cur), npix, i, events);
        prev = std::move(cur);
    }
    return detail::build_report(std::move(events), raster->frame_count(), raster->fps);
}

// Ground-truth verdict used as training label and mitigation referee.
inline FlashReport classify_risk(const VideoBuffer& v) { return count_flashes(v); }

}  // namespace flashkit
