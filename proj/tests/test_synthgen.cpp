#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "flashkit/oracle.hpp"
#include "flashkit/synthgen.hpp"

using namespace flashkit;
namespace fs = std::filesystem;

namespace {

// Independent count of complete flashes a pulse train can show: pulses whose
// closing transition (frame start+half) still lands inside the video.
int expected_flash_count(int rate, int fps, int frames, int duration_s) {
    const int half = std::max(1, fps / (2 * rate));
    int count = 0;
    for (int i = 0; i < duration_s * rate; ++i) {
        const int start = i * fps / rate + 1;
        if (start + half <= frames - 1) ++count;
    }
    return count;
}

TriggerVideoSpec blank_spec() {
    TriggerVideoSpec s;
    s.background_colors = {Rgb{40, 80, 120}, Rgb{200, 220, 240}};
    s.shape_colors = {Rgb{10, 10, 10}, Rgb{250, 250, 250}};
    return s;
}

fs::path temp_dir(const char* name) {
    fs::path p = fs::temp_directory_path() / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("spec fields are pure functions of the seed") {
    const TriggerVideoSpec a = derive_trigger_spec(42, 7);
    const TriggerVideoSpec b = derive_trigger_spec(42, 7);
    CHECK(a.seed == b.seed);
    CHECK(a.background_flashing == b.background_flashing);
    CHECK(a.background_rate == b.background_rate);
    CHECK(a.shape_size == b.shape_size);
    CHECK(a.background_colors == b.background_colors);
    CHECK(a.shape_colors == b.shape_colors);
    CHECK(derive_trigger_spec(42, 8).seed != a.seed);

    for (std::uint64_t i = 0; i < 50; ++i) {
        const TriggerVideoSpec s = derive_trigger_spec(99, i);
        CHECK(s.background_rate >= 1);
        CHECK(s.background_rate <= 15);
        CHECK(s.shape_rate >= 1);
        CHECK(s.shape_rate <= 15);
        CHECK(s.shape_size >= 0.1);
        CHECK(s.shape_size <= 0.9);
    }
}

TEST_CASE("no flashing flags means every frame is identical") {
    TriggerVideoSpec s = blank_spec();
    s.has_shape = true;
    s.shape_kind = ShapeKind::circle;
    s.shape_size = 0.5;
    const VideoBuffer v = gen_trigger_video(s);
    REQUIRE(v.frame_count() == kCorpusFrames);
    for (int i = 1; i < v.frame_count(); ++i) CHECK(v.frames[i] == v.frames[0]);
}

TEST_CASE("black-white background at 15 per second is oracle risky") {
    TriggerVideoSpec s = blank_spec();
    s.background_flashing = true;
    s.background_rate = 15;
    s.background_colors = {Rgb{0, 0, 0}, Rgb{255, 255, 255}};
    CHECK(classify_risk(gen_trigger_video(s)).risky);
}

TEST_CASE("small flashing shape stays under the area rule") {
    TriggerVideoSpec s = blank_spec();
    s.has_shape = true;
    s.shape_kind = ShapeKind::rectangle;
    s.shape_size = 0.1;
    s.shape_flashing = true;
    s.shape_rate = 15;
    s.shape_colors = {Rgb{0, 0, 0}, Rgb{255, 255, 255}};
    s.background_colors = {Rgb{128, 128, 128}, Rgb{128, 128, 128}};
    const FlashReport r = classify_risk(gen_trigger_video(s));
    CHECK(r.events.empty());
    CHECK_FALSE(r.risky);
}

TEST_CASE("large flashing shape on a static background is risky") {
    TriggerVideoSpec s = blank_spec();
    s.has_shape = true;
    s.shape_kind = ShapeKind::rectangle;
    s.shape_size = 0.9;
    s.shape_flashing = true;
    s.shape_rate = 8;
    s.shape_colors = {Rgb{0, 0, 0}, Rgb{255, 255, 255}};
    s.background_colors = {Rgb{128, 128, 128}, Rgb{128, 128, 128}};
    CHECK(classify_risk(gen_trigger_video(s)).risky);
}

TEST_CASE("flash-rate fidelity: oracle flash count matches the pulse train") {
    for (int rate : {1, 2, 4, 8, 15}) {
        TriggerVideoSpec s = blank_spec();
        s.background_flashing = true;
        s.background_rate = rate;
        s.background_colors = {Rgb{0, 0, 0}, Rgb{255, 255, 255}};
        const FlashReport r = classify_risk(gen_trigger_video(s));
        const int expected = expected_flash_count(rate, kCorpusFps, kCorpusFrames, kCorpusSeconds);
        INFO("rate " << rate);
        CHECK(static_cast<int>(r.flashes.size()) == expected);
        // a 300-frame video has 299 transitions, so rate 15 completes one
        // flash fewer than duration*rate; every other rate here is exact
        if (rate != 15)
            CHECK(expected == kCorpusSeconds * rate);
        else
            CHECK(expected == kCorpusSeconds * rate - 1);
        CHECK(r.risky == (rate >= 3));
    }
}

TEST_CASE("white base injections have no contrast and stay safe") {
    InjectionVideoSpec s;
    s.base_color = {255, 255, 255};
    s.intensity = 50;
    const VideoBuffer v = gen_injection_video(s);
    for (int i = 1; i < v.frame_count(); ++i) CHECK(v.frames[i] == v.frames[0]);
    CHECK_FALSE(classify_risk(v).risky);
}

TEST_CASE("black base at intensity 90 pulses to gray 230 and is risky") {
    InjectionVideoSpec s;
    s.base_color = {0, 0, 0};
    s.intensity = 90;
    const VideoBuffer v = gen_injection_video(s);
    const std::uint8_t* px = v.view(1).pixel(5, 5);
    CHECK(px[0] == 230);
    CHECK(px[1] == 230);
    CHECK(px[2] == 230);
    const FlashReport r = classify_risk(v);
    CHECK(r.flashes.size() == 30);  // 3 complete flashes per second for 10 s
    CHECK(r.risky);
}

TEST_CASE("invalid injection intensity is rejected") {
    InjectionVideoSpec s;
    s.base_color = {0, 0, 0};
    s.intensity = 0;
    CHECK_THROWS_AS(gen_injection_video(s), std::invalid_argument);
    s.intensity = 55;
    CHECK_THROWS_AS(gen_injection_video(s), std::invalid_argument);
    s.intensity = 100;
    CHECK_THROWS_AS(gen_injection_video(s), std::invalid_argument);
}

TEST_CASE("white compositing rounds half-up") {
    CHECK(composite_white(0, 90) == 230);   // 229.5 rounds up
    CHECK(composite_white(0, 10) == 26);    // 25.5 rounds up
    CHECK(composite_white(255, 50) == 255);
    CHECK(composite_white(100, 50) == 178);  // 177.5 rounds up
}

TEST_CASE("corpus generation is deterministic down to the bytes") {
    const fs::path dir_a = temp_dir("flashkit_corpus_a");
    const fs::path dir_b = temp_dir("flashkit_corpus_b");
    const auto rows_a = build_trigger_corpus(7, 2, dir_a.string());
    const auto rows_b = build_trigger_corpus(7, 2, dir_b.string());
    write_trigger_manifest(rows_a, (dir_a / "manifest.csv").string());
    write_trigger_manifest(rows_b, (dir_b / "manifest.csv").string());

    REQUIRE(rows_a.size() == rows_b.size());
    for (std::size_t i = 0; i < rows_a.size(); ++i) {
        CHECK(rows_a[i].oracle_risky == rows_b[i].oracle_risky);
        CHECK(rows_a[i].f_avg == rows_b[i].f_avg);
        const VideoBuffer va = read_video((dir_a / rows_a[i].path).string());
        const VideoBuffer vb = read_video((dir_b / rows_b[i].path).string());
        CHECK(va.frames == vb.frames);
    }
    std::ifstream ma(dir_a / "manifest.csv"), mb(dir_b / "manifest.csv");
    const std::string ta((std::istreambuf_iterator<char>(ma)), std::istreambuf_iterator<char>());
    const std::string tb((std::istreambuf_iterator<char>(mb)), std::istreambuf_iterator<char>());
    CHECK(ta == tb);
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("generated videos round-trip through the container") {
    const TriggerVideoSpec s = derive_trigger_spec(123, 0);
    const VideoBuffer v = gen_trigger_video(s);
    const fs::path p = fs::temp_directory_path() / "flashkit_synth_rt.fgrv";
    write_video(v, p.string());
    const VideoBuffer r = read_video(p.string());
    CHECK(r.frames == v.frames);
    CHECK(r.fps == v.fps);
    fs::remove(p);
}

TEST_CASE("manifest round-trips every column") {
    std::vector<TriggerRow> rows;
    for (std::uint64_t i = 0; i < 5; ++i) {
        TriggerRow r;
        r.path = trigger_video_filename(i);
        r.spec = derive_trigger_spec(55, i);
        r.oracle_risky = i % 2 == 0;
        r.f_avg = 1.25 * static_cast<double>(i) + 0.3333333333333333;
        rows.push_back(r);
    }
    const fs::path p = fs::temp_directory_path() / "flashkit_manifest_rt.csv";
    write_trigger_manifest(rows, p.string());
    const auto back = read_trigger_manifest(p.string());
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].path == rows[i].path);
        CHECK(back[i].spec.background_flashing == rows[i].spec.background_flashing);
        CHECK(back[i].spec.background_rate == rows[i].spec.background_rate);
        CHECK(back[i].spec.has_shape == rows[i].spec.has_shape);
        CHECK(back[i].spec.shape_kind == rows[i].spec.shape_kind);
        CHECK(back[i].spec.shape_size == rows[i].spec.shape_size);
        CHECK(back[i].spec.shape_flashing == rows[i].spec.shape_flashing);
        CHECK(back[i].spec.shape_rate == rows[i].spec.shape_rate);
        CHECK(back[i].oracle_risky == rows[i].oracle_risky);
        CHECK(back[i].f_avg == rows[i].f_avg);
    }
    fs::remove(p);
}

TEST_CASE("injection manifest round-trips") {
    const auto rows = build_injection_corpus(9, 3, {30, 70});
    REQUIRE(rows.size() == 6);
    const fs::path p = fs::temp_directory_path() / "flashkit_inj_manifest.csv";
    write_injection_manifest(rows, p.string());
    const auto back = read_injection_manifest(p.string());
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].spec.base_color == rows[i].spec.base_color);
        CHECK(back[i].spec.intensity == rows[i].spec.intensity);
    }
    fs::remove(p);
}
