// flashkit command line: dataset generation, flash analysis, detector
// training and evaluation, k-sweep, mitigation, and the full reproduction
// pipeline over FGRV1 raw video files.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "flashkit/flashkit.hpp"

namespace fs = std::filesystem;
using namespace flashkit;

namespace {

DetectorModel load_model(const std::string& path) {
    return detector_model_from_json(load_json(path));
}

KLevelModel load_kmodel(const std::string& path) { return k_model_from_json(load_json(path)); }

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty())
        std::cout << j.dump(2) << '\n';
    else
        save_json(j, out_path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flash-risk detection and mitigation toolkit"};
    app.require_subcommand(1);

    std::uint64_t seed = 1;
    int jobs = 1;
    std::string config_path;
    app.add_option("--seed", seed, "master seed for generation subcommands");
    app.add_option("--jobs", jobs, "worker threads for per-video fan-out");
    app.add_option("--config", config_path, "pipeline config JSON");

    // gen-dataset
    auto* gen_dataset = app.add_subcommand("gen-dataset", "generate the labeled trigger corpus");
    int gd_n = 1000;
    std::string gd_out = "out";
    bool gd_no_videos = false;
    gen_dataset->add_option("--n", gd_n, "number of videos");
    gen_dataset->add_option("--out", gd_out, "output directory")->required();
    gen_dataset->add_flag("--no-videos", gd_no_videos,
                          "write only the manifest; videos stay regenerable from the seed");

    // gen-injection
    auto* gen_injection =
        app.add_subcommand("gen-injection", "generate the white-flash injection corpus");
    int gi_colors = 200;
    std::string gi_out = "out";
    bool gi_no_videos = false;
    std::vector<int> gi_intensities = {10, 20, 30, 40, 50, 60, 70, 80, 90};
    gen_injection->add_option("--n-colors", gi_colors, "number of base colors");
    gen_injection->add_option("--intensities", gi_intensities, "overlay opacities (percent)");
    gen_injection->add_option("--out", gi_out, "output directory")->required();
    gen_injection->add_flag("--no-videos", gi_no_videos, "write only the manifest");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "flash-risk report for one video");
    std::string an_video, an_out;
    analyze->add_option("--video", an_video, "FGRV1 input")->required();
    analyze->add_option("--out", an_out, "write report here instead of stdout");

    // train
    auto* train = app.add_subcommand("train", "fit the logistic detector on a manifest");
    std::string tr_manifest, tr_out = "model.json";
    int tr_take = 0;
    train->add_option("--manifest", tr_manifest, "trigger manifest CSV")->required();
    train->add_option("--out", tr_out, "model JSON path");
    train->add_option("--take", tr_take, "use only the first N rows (0 = all)");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a model against a manifest");
    std::string ev_model, ev_manifest, ev_out;
    int ev_skip = 0;
    eval_cmd->add_option("--model", ev_model, "model JSON")->required();
    eval_cmd->add_option("--manifest", ev_manifest, "trigger manifest CSV")->required();
    eval_cmd->add_option("--skip", ev_skip, "skip the first N rows (training split)");
    eval_cmd->add_option("--out", ev_out, "write metrics here instead of stdout");

    // detect
    auto* detect = app.add_subcommand("detect", "per-frame mask rectangles for one video");
    std::string de_model, de_video;
    int de_gw = 50, de_gh = 50;
    detect->add_option("--model", de_model, "model JSON")->required();
    detect->add_option("--video", de_video, "FGRV1 input")->required();
    detect->add_option("--grid-w", de_gw, "trigger array width");
    detect->add_option("--grid-h", de_gh, "trigger array height");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "minimum-k sweep over an injection manifest");
    std::string sw_manifest, sw_out = "samples.csv";
    sweep->add_option("--injection-manifest", sw_manifest, "injection manifest CSV")->required();
    sweep->add_option("--out", sw_out, "samples CSV path");

    // fit-k
    auto* fitk = app.add_subcommand("fit-k", "fit the k-level model from sweep samples");
    std::string fk_samples, fk_out = "kmodel.json";
    fitk->add_option("--samples", fk_samples, "samples CSV")->required();
    fitk->add_option("--out", fk_out, "k-model JSON path");

    // mitigate
    auto* mitigate = app.add_subcommand("mitigate", "filter one video through the full pipeline");
    std::string mi_video, mi_model, mi_kmodel, mi_out = "mitigated.fgrv", mi_masklog;
    int mi_gw = 50, mi_gh = 50;
    mitigate->add_option("--video", mi_video, "FGRV1 input")->required();
    mitigate->add_option("--model", mi_model, "detector model JSON")->required();
    mitigate->add_option("--kmodel", mi_kmodel, "k-level model JSON")->required();
    mitigate->add_option("--out", mi_out, "FGRV1 output path");
    mitigate->add_option("--mask-log", mi_masklog, "JSON-lines mask log path");
    mitigate->add_option("--grid-w", mi_gw, "trigger array width");
    mitigate->add_option("--grid-h", mi_gh, "trigger array height");

    // pipeline
    auto* pipeline = app.add_subcommand("pipeline", "run every stage end to end");
    std::string pl_out_dir;
    pipeline->add_option("--out-dir", pl_out_dir, "override the config output directory");

    // bench
    auto* bench = app.add_subcommand("bench", "sampling-reduction and throughput check");
    int be_frames = 120;
    bench->add_option("--frames", be_frames, "strobe frames to push through both paths");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen_dataset) {
            fs::create_directories(gd_out);
            const std::string vdir = gd_no_videos ? std::string{} : gd_out + "/videos";
            if (!vdir.empty()) fs::create_directories(vdir);
            auto rows = build_trigger_corpus(seed, gd_n, vdir, jobs);
            write_trigger_manifest(rows, gd_out + "/trigger_manifest.csv");
            std::cout << "wrote " << rows.size() << " rows to " << gd_out
                      << "/trigger_manifest.csv\n";
        } else if (*gen_injection) {
            fs::create_directories(gi_out);
            const std::string vdir = gi_no_videos ? std::string{} : gi_out + "/videos";
            if (!vdir.empty()) fs::create_directories(vdir);
            auto rows = build_injection_corpus(seed, gi_colors, gi_intensities, vdir, jobs);
            write_injection_manifest(rows, gi_out + "/injection_manifest.csv");
            std::cout << "wrote " << rows.size() << " rows to " << gi_out
                      << "/injection_manifest.csv\n";
        } else if (*analyze) {
            emit(to_json(classify_risk(read_video(an_video))), an_out);
        } else if (*train) {
            auto rows = read_trigger_manifest(tr_manifest);
            if (tr_take > 0 && tr_take < static_cast<int>(rows.size()))
                rows.resize(tr_take);
            std::vector<double> feats;
            std::vector<bool> labels;
            for (const auto& r : rows) {
                feats.push_back(r.f_avg);
                labels.push_back(r.oracle_risky);
            }
            const TrainResult t = train_logistic(feats, labels);
            if (t.nonpositive_weight_warning)
                std::cerr << "warning: learned weight is not positive (labels inverted?)\n";
            save_json(to_json(t.model), tr_out);
            std::cout << "model written to " << tr_out << " (threshold "
                      << format_double(t.model.threshold()) << ")\n";
        } else if (*eval_cmd) {
            const DetectorModel m = load_model(ev_model);
            auto rows = read_trigger_manifest(ev_manifest);
            std::vector<double> feats;
            std::vector<bool> labels;
            for (std::size_t i = ev_skip; i < rows.size(); ++i) {
                feats.push_back(rows[i].f_avg);
                labels.push_back(rows[i].oracle_risky);
            }
            emit(to_json(evaluate(m, feats, labels)), ev_out);
        } else if (*detect) {
            const DetectorModel m = load_model(de_model);
            const VideoBuffer v = read_video(de_video);
            const ActivationMap map = run_trigger_array(v, m, de_gw, de_gh);
            for (int i = 0; i < static_cast<int>(map.frames.size()); ++i) {
                const RegionMask mask =
                    interpolate_region(map.frames[i], de_gw, de_gh, v.width, v.height);
                json rects = json::array();
                for (const Rect& r : mask.rects) rects.push_back({r.x, r.y, r.w, r.h});
                std::cout << json{{"frame", i}, {"rects", std::move(rects)}}.dump() << '\n';
            }
        } else if (*sweep) {
            auto rows = read_injection_manifest(sw_manifest);
            const std::string vdir = fs::path(sw_manifest).parent_path().string() + "/videos";
            auto samples = run_k_sweep(rows, fs::exists(vdir) ? vdir : std::string{}, jobs);
            write_sweep_samples(samples, sw_out);
            std::cout << "wrote " << samples.size() << " samples to " << sw_out << '\n';
        } else if (*fitk) {
            const KLevelModel km = fit_k_model(read_sweep_samples(fk_samples));
            save_json(to_json(km), fk_out);
            std::cout << "k-model written to " << fk_out << " (pearson_kL "
                      << format_double(km.pearson_kL) << ")\n";
        } else if (*mitigate) {
            const VideoBuffer v = read_video(mi_video);
            const MitigationOutput out = mitigate_stream(v, load_model(mi_model),
                                                         load_kmodel(mi_kmodel), MitigationConfig{},
                                                         mi_gw, mi_gh);
            write_video(out.video, mi_out);
            if (mi_masklog.empty()) mi_masklog = mi_out + ".masks.jsonl";
            std::ofstream log(mi_masklog, std::ios::trunc);
            if (!log) throw io_error("cannot open mask log: " + mi_masklog);
            for (std::size_t i = 0; i < out.mask_rects.size(); ++i) {
                json rects = json::array();
                for (const Rect& r : out.mask_rects[i]) rects.push_back({r.x, r.y, r.w, r.h});
                log << json{{"frame", i}, {"rects", std::move(rects)}}.dump() << '\n';
            }
            std::cout << "mitigated video written to " << mi_out << ", mask log to " << mi_masklog
                      << '\n';
        } else if (*pipeline) {
            PipelineConfig cfg;
            if (!config_path.empty()) cfg = pipeline_config_from_json(load_json(config_path));
            if (app.count("--seed")) cfg.seed = seed;
            if (app.count("--jobs")) cfg.jobs = jobs;
            if (!pl_out_dir.empty()) cfg.out_dir = pl_out_dir;
            std::cout << "resolved config: " << to_json(cfg).dump() << '\n';
            const PipelineSummary s = run_full_pipeline(cfg);
            std::cout << "summary written to " << s.artifacts.at("summary") << '\n'
                      << "accuracy " << format_double(s.eval.accuracy) << ", auc "
                      << format_double(s.eval.auc) << ", pearson_kL "
                      << format_double(s.k_model.pearson_kL) << ", mean efficacy "
                      << format_double(s.mean_efficacy) << "% over " << s.n_efficacy_videos
                      << " videos\n";
        } else if (*bench) {
            TriggerVideoSpec spec;
            spec.seed = 1;
            spec.background_flashing = true;
            spec.background_rate = 15;
            spec.background_colors = {Rgb{0, 0, 0}, Rgb{255, 255, 255}};
            VideoBuffer v = gen_trigger_video(spec);
            v.frames.resize(std::min<std::size_t>(v.frames.size(), be_frames));
            DetectorModel m{1.0, -10.0, 0.0, 1.0};

            auto t0 = std::chrono::steady_clock::now();
            run_trigger_array(v, m, 50, 50);
            const double array_s = std::chrono::duration<double>(
                                       std::chrono::steady_clock::now() - t0).count();

            // baseline: the per-pixel metric stream a full-screen monitor
            // would have to maintain
            t0 = std::chrono::steady_clock::now();
            double sink = 0.0;
            for (int i = 1; i < v.frame_count(); ++i) {
                const FrameView prev = v.view(i - 1), cur = v.view(i);
                const std::size_t n = prev.byte_size() / 3;
                for (std::size_t p = 0; p < n; ++p)
                    sink += flash_metric(rgb_to_lab(prev.data + 3 * p),
                                         rgb_to_lab(cur.data + 3 * p));
            }
            const double dense_s = std::chrono::duration<double>(
                                       std::chrono::steady_clock::now() - t0).count();

            t0 = std::chrono::steady_clock::now();
            const FlashReport rep = count_flashes(v);
            const double oracle_s = std::chrono::duration<double>(
                                        std::chrono::steady_clock::now() - t0).count();
            std::cout << json{{"frames", v.frame_count()},
                              {"trigger_array_fps", v.frame_count() / array_s},
                              {"dense_per_pixel_fps", v.frame_count() / dense_s},
                              {"speedup", dense_s / array_s},
                              {"oracle_fps_memoized", v.frame_count() / oracle_s},
                              {"oracle_risky", rep.risky},
                              {"metric_checksum", sink},
                              {"sampling_reduction_1024x768",
                               sampling_reduction(1024, 768, 50, 50)}}
                             .dump(2)
                      << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
