#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "flashkit/detector.hpp"
#include "flashkit/mitigation.hpp"
#include "flashkit/oracle.hpp"

namespace flashkit {

using json = nlohmann::json;

inline json to_json(const TransitionEvent& e) {
    return json{{"frame_index", e.frame_index},
                {"direction", to_string(e.direction)},
                {"area_fraction", e.area_fraction},
                {"kind", to_string(e.kind)}};
}

inline json to_json(const Flash& f) {
    return json{{"start_frame", f.start_frame},
                {"end_frame", f.end_frame},
                {"kind", to_string(f.kind)}};
}

inline json to_json(const FlashReport& r) {
    json events = json::array();
    for (const auto& e : r.events) events.push_back(to_json(e));
    json flashes = json::array();
    for (const auto& f : r.flashes) flashes.push_back(to_json(f));
    return json{{"events", std::move(events)},
                {"flashes", std::move(flashes)},
                {"max_flashes_per_second", r.max_flashes_per_second},
                {"flash_frame_indices", r.flash_frame_indices},
                {"risky", r.risky}};
}

inline json to_json(const DetectorModel& m) {
    return json{{"w", m.w},
                {"bias", m.bias},
                {"feature_mean", m.feature_mean},
                {"feature_std", m.feature_std}};
}

inline DetectorModel detector_model_from_json(const json& j) {
    DetectorModel m;
    m.w = j.at("w").get<double>();
    m.bias = j.at("bias").get<double>();
    m.feature_mean = j.at("feature_mean").get<double>();
    m.feature_std = j.at("feature_std").get<double>();
    return m;
}

inline json to_json(const EvalMetrics& em) {
    return json{{"tp", em.tp},       {"fp", em.fp},
                {"tn", em.tn},       {"fn", em.fn},
                {"accuracy", em.accuracy}, {"auc", em.auc},
                {"z_score", em.z_score},   {"threshold", em.threshold}};
}

inline json to_json(const KLevelModel& m) {
    return json{{"b0", m.b0}, {"bL", m.bL}, {"ba", m.ba},
                {"bb", m.bb}, {"bI", m.bI}, {"pearson_kL", m.pearson_kL}};
}

inline KLevelModel k_model_from_json(const json& j) {
    KLevelModel m;
    m.b0 = j.at("b0").get<double>();
    m.bL = j.at("bL").get<double>();
    m.ba = j.at("ba").get<double>();
    m.bb = j.at("bb").get<double>();
    m.bI = j.at("bI").get<double>();
    m.pearson_kL = j.at("pearson_kL").get<double>();
    return m;
}

inline void save_json(const json& j, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw io_error("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw io_error("write failed: " + path);
}

inline json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open: " + path);
    json j;
    in >> j;
    return j;
}

}  // namespace flashkit
