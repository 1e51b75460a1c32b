#include <catch2/catch_amalgamated.hpp>

#include "flashkit/json_io.hpp"
#include "flashkit/oracle.hpp"
#include "flashkit/rng.hpp"

using namespace flashkit;

namespace {

Frame solid(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    Frame f(static_cast<std::size_t>(w) * h * 3);
    for (std::size_t i = 0; i < f.size(); i += 3) {
        f[i] = r;
        f[i + 1] = g;
        f[i + 2] = b;
    }
    return f;
}

// states[i] selects color a (0) or b (1) for frame i.
VideoBuffer two_tone_video(const std::vector<int>& states, std::array<std::uint8_t, 3> a,
                           std::array<std::uint8_t, 3> b, int fps = 30) {
    VideoBuffer v = make_video(kRasterWidth, kRasterHeight, fps);
    const Frame fa = solid(v.width, v.height, a[0], a[1], a[2]);
    const Frame fb = solid(v.width, v.height, b[0], b[1], b[2]);
    for (int s : states) v.frames.push_back(s ? fb : fa);
    return v;
}

std::vector<int> alternating(int n, int period) {
    std::vector<int> s(n);
    for (int i = 0; i < n; ++i) s[i] = (i / period) % 2;
    return s;
}

}  // namespace

TEST_CASE("analysis raster is the identity at native size") {
    VideoBuffer v = make_video(kRasterWidth, kRasterHeight, 30);
    Frame f(v.frame_bytes());
    SplitMix64 rng(3);
    for (auto& b : f) b = rng.next_byte();
    v.frames.push_back(f);
    const VideoBuffer out = analysis_raster(v);
    CHECK(out.frames[0] == f);
}

TEST_CASE("exact 2x decimation picks doubled coordinates") {
    VideoBuffer v = make_video(682, 512, 30);
    Frame f(v.frame_bytes());
    for (int y = 0; y < 512; ++y)
        for (int x = 0; x < 682; ++x) {
            std::uint8_t* px = f.data() + 3 * (static_cast<std::size_t>(y) * 682 + x);
            px[0] = static_cast<std::uint8_t>(x & 0xFF);
            px[1] = static_cast<std::uint8_t>(y & 0xFF);
            px[2] = static_cast<std::uint8_t>((x ^ y) & 0xFF);
        }
    v.frames.push_back(std::move(f));
    const VideoBuffer out = analysis_raster(v);
    REQUIRE(out.width == kRasterWidth);
    REQUIRE(out.height == kRasterHeight);
    for (int y = 0; y < kRasterHeight; y += 17)
        for (int x = 0; x < kRasterWidth; x += 13) {
            const std::uint8_t* dst = out.view(0).pixel(x, y);
            const std::uint8_t* src = v.view(0).pixel(2 * x, 2 * y);
            CHECK(dst[0] == src[0]);
            CHECK(dst[1] == src[1]);
            CHECK(dst[2] == src[2]);
        }
}

TEST_CASE("uniform frames stay uniform through resampling") {
    VideoBuffer v = make_video(1024, 768, 30);
    v.frames.push_back(solid(1024, 768, 17, 99, 201));
    const VideoBuffer out = analysis_raster(v);
    CHECK(out.frames[0] == solid(kRasterWidth, kRasterHeight, 17, 99, 201));
}

TEST_CASE("full-frame black to white is an up event with area 1") {
    const Frame black = solid(kRasterWidth, kRasterHeight, 0, 0, 0);
    const Frame white = solid(kRasterWidth, kRasterHeight, 255, 255, 255);
    const FrameView pb{black.data(), kRasterWidth, kRasterHeight};
    const FrameView pw{white.data(), kRasterWidth, kRasterHeight};
    const auto events = detect_transitions(pb, pw, 5);
    REQUIRE(events.size() == 1);
    CHECK(events[0].direction == TransitionDirection::up);
    CHECK(events[0].area_fraction == 1.0);
    CHECK(events[0].kind == FlashKind::luminance);
    CHECK(events[0].frame_index == 5);

    const auto down = detect_transitions(pw, pb);
    REQUIRE(down.size() == 1);
    CHECK(down[0].direction == TransitionDirection::down);
}

TEST_CASE("identical frames produce no event") {
    const Frame gray = solid(kRasterWidth, kRasterHeight, 90, 90, 90);
    const FrameView g{gray.data(), kRasterWidth, kRasterHeight};
    CHECK(detect_transitions(g, g).empty());
}

TEST_CASE("a tenth of the frame flashing stays below the quarter-area rule") {
    Frame a = solid(kRasterWidth, kRasterHeight, 120, 120, 120);
    Frame b = a;
    const int rows = kRasterHeight / 10;
    for (int y = 0; y < rows; ++y)
        for (int x = 0; x < kRasterWidth; ++x) {
            std::uint8_t* px = b.data() + 3 * (static_cast<std::size_t>(y) * kRasterWidth + x);
            px[0] = px[1] = px[2] = 255;
        }
    const FrameView fa{a.data(), kRasterWidth, kRasterHeight};
    const FrameView fb{b.data(), kRasterWidth, kRasterHeight};
    CHECK(detect_transitions(fa, fb).empty());
}

TEST_CASE("mismatched dimensions are a domain error") {
    const Frame a = solid(4, 4, 0, 0, 0);
    const Frame b = solid(8, 8, 0, 0, 0);
    CHECK_THROWS_AS(
        detect_transitions(FrameView{a.data(), 4, 4}, FrameView{b.data(), 8, 8}),
        std::domain_error);
}

TEST_CASE("static video has no flashes and is safe") {
    const VideoBuffer v = two_tone_video(std::vector<int>(300, 0), {30, 60, 90}, {0, 0, 0});
    const FlashReport r = count_flashes(v);
    CHECK(r.events.empty());
    CHECK(r.flashes.empty());
    CHECK(r.max_flashes_per_second == 0);
    CHECK_FALSE(r.risky);
}

TEST_CASE("one-second full strobe: 29 events, 14 flashes, risky") {
    const VideoBuffer v = two_tone_video(alternating(30, 1), {0, 0, 0}, {255, 255, 255});
    const FlashReport r = count_flashes(v);
    CHECK(r.events.size() == 29);
    CHECK(r.flashes.size() == 14);
    CHECK(r.max_flashes_per_second == 14);
    CHECK(r.risky);
    // flash intervals (1,2),(3,4),...,(27,28) cover frames 1..28
    REQUIRE(r.flash_frame_indices.size() == 28);
    CHECK(r.flash_frame_indices.front() == 1);
    CHECK(r.flash_frame_indices.back() == 28);
}

TEST_CASE("one-hertz alternation is safe") {
    const VideoBuffer v = two_tone_video(alternating(300, 15), {0, 0, 0}, {255, 255, 255});
    const FlashReport r = count_flashes(v);
    CHECK_FALSE(r.risky);
    CHECK(r.max_flashes_per_second <= 2);
}

TEST_CASE("three isolated flashes across ten seconds are safe") {
    std::vector<int> states(300, 0);
    states[30] = states[150] = states[270] = 1;
    const VideoBuffer v = two_tone_video(states, {0, 0, 0}, {255, 255, 255});
    const FlashReport r = count_flashes(v);
    CHECK(r.flashes.size() == 3);
    CHECK_FALSE(r.risky);
}

TEST_CASE("three single-frame pulses per second trip the closed one-second window") {
    std::vector<int> states(300, 0);
    for (int f = 0; f < 300; ++f)
        if (f % 10 == 1) states[f] = 1;
    const VideoBuffer v = two_tone_video(states, {0, 0, 0}, {230, 230, 230});
    const FlashReport r = count_flashes(v);
    CHECK(r.flashes.size() == 30);
    CHECK(r.max_flashes_per_second == 4);
    CHECK(r.risky);
}

TEST_CASE("fewer than two frames is a domain error") {
    VideoBuffer v = make_video(kRasterWidth, kRasterHeight, 30);
    v.frames.push_back(solid(kRasterWidth, kRasterHeight, 0, 0, 0));
    CHECK_THROWS_AS(count_flashes(v), std::domain_error);
}

TEST_CASE("amplitude below the luminance threshold yields zero events") {
    // bytes 100 vs 120: relative luminance gap is about 0.06
    const VideoBuffer v = two_tone_video(alternating(300, 1), {100, 100, 100}, {120, 120, 120});
    const FlashReport r = count_flashes(v);
    CHECK(r.events.empty());
    CHECK_FALSE(r.risky);
}

TEST_CASE("all-black video is safe (full darkening end state)") {
    const VideoBuffer v = two_tone_video(std::vector<int>(300, 0), {0, 0, 0}, {0, 0, 0});
    const FlashReport r = count_flashes(v);
    CHECK(r.events.empty());
    CHECK_FALSE(r.risky);
}

TEST_CASE("bright flashing above the dark-image guard is ignored") {
    // both states above 0.80 relative luminance: 235 -> lum 0.82, 255 -> 1.0
    const VideoBuffer v = two_tone_video(alternating(300, 1), {235, 235, 235}, {255, 255, 255});
    CHECK(count_flashes(v).events.empty());
}

TEST_CASE("saturated-red transitions are tallied independently of luminance") {
    // (255,0,0) lum 0.2126 vs (0,128,255) lum 0.227: below the luminance
    // threshold, but the red state flips every two frames.
    const VideoBuffer v = two_tone_video(alternating(300, 2), {255, 0, 0}, {0, 128, 255});
    const FlashReport r = count_flashes(v);
    REQUIRE_FALSE(r.events.empty());
    for (const auto& e : r.events) CHECK(e.kind == FlashKind::red);
    CHECK(r.risky);
}

TEST_CASE("red saturation boundary") {
    CHECK(detail::is_saturated_red(Frame{128, 16, 16}.data()));
    CHECK_FALSE(detail::is_saturated_red(Frame{127, 0, 0}.data()));
    CHECK_FALSE(detail::is_saturated_red(Frame{128, 20, 20}.data()));
    CHECK(detail::is_saturated_red(Frame{255, 30, 30}.data()));
}

TEST_CASE("risky verdict implies nonempty flash frames") {
    const VideoBuffer v = two_tone_video(alternating(300, 1), {0, 0, 0}, {255, 255, 255});
    const FlashReport r = classify_risk(v);
    CHECK(r.risky);
    CHECK_FALSE(r.flash_frame_indices.empty());
}

TEST_CASE("reports are a pure function of the buffer") {
    SplitMix64 rng(11);
    std::vector<int> states(120);
    for (auto& s : states) s = rng.next_bool() ? 1 : 0;
    const VideoBuffer v = two_tone_video(states, {10, 200, 40}, {240, 20, 180});
    const std::string first = to_json(count_flashes(v)).dump();
    for (int run = 0; run < 2; ++run) CHECK(to_json(count_flashes(v)).dump() == first);

    // streaming path (many distinct frames) agrees with itself as well
    VideoBuffer noisy = make_video(kRasterWidth, kRasterHeight, 30);
    SplitMix64 nrng(5);
    for (int i = 0; i < 70; ++i) {
        Frame f(noisy.frame_bytes());
        for (auto& b : f) b = nrng.next_byte();
        noisy.frames.push_back(std::move(f));
    }
    const std::string nfirst = to_json(count_flashes(noisy)).dump();
    CHECK(to_json(count_flashes(noisy)).dump() == nfirst);
}

TEST_CASE("dense and streaming oracle paths agree") {
    std::vector<int> states = alternating(100, 2);
    VideoBuffer dense = two_tone_video(states, {0, 0, 0}, {255, 255, 255});
    VideoBuffer stream = dense;
    // a one-pixel serial number makes every frame unique without adding votes
    for (int i = 0; i < stream.frame_count(); ++i) {
        stream.frames[i][0] = static_cast<std::uint8_t>(i);
        stream.frames[i][1] = static_cast<std::uint8_t>(i >> 8);
    }
    const FlashReport a = count_flashes(dense);
    const FlashReport b = count_flashes(stream);
    CHECK(a.flashes.size() == b.flashes.size());
    CHECK(a.max_flashes_per_second == b.max_flashes_per_second);
    CHECK(a.risky == b.risky);
}
