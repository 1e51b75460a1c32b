#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "flashkit/color.hpp"
#include "flashkit/errors.hpp"
#include "flashkit/video.hpp"

namespace flashkit {

// ---------------------------------------------------------------------------
// Whole-video feature

// Mean over consecutive frame pairs of the flash metric between full-frame
// mean Lab colors. One scalar per video; the training feature.
inline double video_feature(const VideoBuffer& v) {
    if (v.frame_count() < 2) throw std::domain_error("video_feature: need at least 2 frames");
    const auto fc = detail::classify_frames(v);
    std::vector<LabColor> mean_of_class(fc.count());
    for (int c = 0; c < fc.count(); ++c)
        mean_of_class[c] = frame_mean_lab(v.view(fc.representative[c]));
    double total = 0.0;
    for (int i = 1; i < v.frame_count(); ++i)
        total += flash_metric(mean_of_class[fc.class_of[i - 1]], mean_of_class[fc.class_of[i]]);
    return total / (v.frame_count() - 1);
}

// ---------------------------------------------------------------------------
// Logistic model

// Single-feature logistic classifier over F_avg. w and bias act on the raw
// feature; the standardization used during fitting is kept for reporting.
struct DetectorModel {
    double w = 0.0;
    double bias = 0.0;
    double feature_mean = 0.0;
    double feature_std = 1.0;

    // Decision boundary on the feature axis; meaningful when w > 0.
    double threshold() const { return -bias / w; }
};

struct TrainOptions {
    int epochs = 5000;
    double lr = 0.1;
};

struct TrainResult {
    DetectorModel model;
    bool nonpositive_weight_warning = false;  // labels look inverted
};

// Full-batch gradient descent on the mean logistic loss, zero-initialized,
// feature standardized internally and the weights mapped back to raw units.
// Deterministic: fixed iteration order, no randomness.
inline TrainResult train_logistic(const std::vector<double>& features,
                                  const std::vector<bool>& labels,
                                  const TrainOptions& opt = {}) {
    const std::size_t n = features.size();
    if (n != labels.size()) throw train_error("train_logistic: feature/label size mismatch");
    if (n < 10) throw train_error("train_logistic: need at least 10 samples");
    std::size_t pos = 0;
    for (bool l : labels) pos += l ? 1 : 0;
    if (pos == 0 || pos == n) throw train_error("train_logistic: both classes must be present");

    double mu = 0.0;
    for (double f : features) mu += f;
    mu /= static_cast<double>(n);
    double var = 0.0;
    for (double f : features) var += (f - mu) * (f - mu);
    const double sigma = std::sqrt(var / static_cast<double>(n));
    if (!(sigma > 0.0)) throw train_error("train_logistic: feature is constant");

    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = (features[i] - mu) / sigma;

    double w = 0.0, b = 0.0;
    for (int epoch = 0; epoch < opt.epochs; ++epoch) {
        double gw = 0.0, gb = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double p = 1.0 / (1.0 + std::exp(-(w * x[i] + b)));
            const double d = p - (labels[i] ? 1.0 : 0.0);
            gw += d * x[i];
            gb += d;
        }
        w -= opt.lr * gw / static_cast<double>(n);
        b -= opt.lr * gb / static_cast<double>(n);
    }

    TrainResult r;
    r.model.w = w / sigma;
    r.model.bias = b - w * mu / sigma;
    r.model.feature_mean = mu;
    r.model.feature_std = sigma;
    r.nonpositive_weight_warning = !(r.model.w > 0.0);
    return r;
}

struct Prediction {
    double probability = 0.0;
    bool risky = false;
};

inline Prediction predict(const DetectorModel& m, double feature) {
    const double p = 1.0 / (1.0 + std::exp(-(m.w * feature + m.bias)));
    return Prediction{p, p > 0.5};
}

// ---------------------------------------------------------------------------
// Trigger array

// Sparse uniform grid of sampled pixels; each node runs an independent
// rolling-mean detector against the learned threshold. A node activates the
// moment its mean crosses T and deactivates only after the mean stays at or
// below T for half a second (keeps masks from flickering).
struct TriggerArray {
    int grid_w = 0, grid_h = 0;
    int frame_w = 0, frame_h = 0;
    int window = 30;
    int deactivate_after = 15;
    double threshold = 0.0;

    std::vector<int> px, py;
    std::vector<LabColor> prev_lab;
    std::vector<float> ring;  // node-major, window slots each
    std::vector<double> sum;
    std::vector<int> below;
    std::vector<std::uint8_t> active;
    int metrics_count = 0;  // valid metric values per node (saturates at window)
    int frames_seen = 0;

    TriggerArray(int gw, int gh, int fw, int fh, int fps, double T)
        : grid_w(gw), grid_h(gh), frame_w(fw), frame_h(fh), window(fps),
          deactivate_after(fps / 2), threshold(T) {
        if (gw < 1 || gh < 1 || gw > fw || gh > fh)
            throw std::domain_error("trigger array grid larger than frame");
        const int n = gw * gh;
        px.resize(n);
        py.resize(n);
        for (int j = 0; j < gh; ++j)
            for (int i = 0; i < gw; ++i) {
                px[j * gw + i] = static_cast<int>((i + 0.5) * fw / gw);
                py[j * gw + i] = static_cast<int>((j + 0.5) * fh / gh);
            }
        prev_lab.resize(n);
        ring.assign(static_cast<std::size_t>(n) * window, 0.0f);
        sum.assign(n, 0.0);
        below.assign(n, 0);
        active.assign(n, 0);
    }

    int node_count() const { return grid_w * grid_h; }

    void update(FrameView f) {
        const int n = node_count();
        const bool first = frames_seen == 0;
        const int slot = first ? 0 : (frames_seen - 1) % window;
        for (int k = 0; k < n; ++k) {
            const LabColor lab = rgb_to_lab(f.pixel(px[k], py[k]));
            if (!first) {
                const float m = static_cast<float>(flash_metric(prev_lab[k], lab));
                float* r = ring.data() + static_cast<std::size_t>(k) * window;
                if (metrics_count >= window) sum[k] -= r[slot];
                r[slot] = m;
                sum[k] += m;
                const int filled = std::min(metrics_count + 1, window);
                const double mean = sum[k] / filled;
                if (mean > threshold) {
                    active[k] = 1;
                    below[k] = 0;
                } else if (active[k]) {
                    if (++below[k] >= deactivate_after) {
                        active[k] = 0;
                        below[k] = 0;
                    }
                }
            }
            prev_lab[k] = lab;
        }
        if (!first) metrics_count = std::min(metrics_count + 1, window);
        ++frames_seen;
    }
};

// Per-frame node activation grids.
struct ActivationMap {
    int grid_w = 0, grid_h = 0;
    std::vector<std::vector<std::uint8_t>> frames;
};

inline ActivationMap run_trigger_array(const VideoBuffer& v, const DetectorModel& m,
                                       int grid_w, int grid_h) {
    TriggerArray arr(grid_w, grid_h, v.width, v.height, v.fps, m.threshold());
    ActivationMap map;
    map.grid_w = grid_w;
    map.grid_h = grid_h;
    map.frames.reserve(v.frames.size());
    for (int i = 0; i < v.frame_count(); ++i) {
        arr.update(v.view(i));
        map.frames.push_back(arr.active);
    }
    return map;
}

// Active nodes -> mask: 4-connected components on the grid, each component
// becomes the pixel bounding box of its nodes expanded by half the inter-node
// pitch on every side, clipped to the frame. Mask = union of boxes.
inline RegionMask interpolate_region(const std::vector<std::uint8_t>& grid_slice, int grid_w,
                                     int grid_h, int frame_w, int frame_h) {
    std::vector<Rect> rects;
    std::vector<int> comp(static_cast<std::size_t>(grid_w) * grid_h, -1);
    const double pitch_x = static_cast<double>(frame_w) / grid_w;
    const double pitch_y = static_cast<double>(frame_h) / grid_h;
    std::vector<int> stack;
    int next_comp = 0;
    for (int j = 0; j < grid_h; ++j) {
        for (int i = 0; i < grid_w; ++i) {
            const int idx = j * grid_w + i;
            if (!grid_slice[idx] || comp[idx] >= 0) continue;
            int min_i = i, max_i = i, min_j = j, max_j = j;
            comp[idx] = next_comp;
            stack.assign(1, idx);
            while (!stack.empty()) {
                const int cur = stack.back();
                stack.pop_back();
                const int ci = cur % grid_w, cj = cur / grid_w;
                min_i = std::min(min_i, ci);
                max_i = std::max(max_i, ci);
                min_j = std::min(min_j, cj);
                max_j = std::max(max_j, cj);
                const int nbr[4][2] = {{ci - 1, cj}, {ci + 1, cj}, {ci, cj - 1}, {ci, cj + 1}};
                for (auto& nb : nbr) {
                    if (nb[0] < 0 || nb[0] >= grid_w || nb[1] < 0 || nb[1] >= grid_h) continue;
                    const int nidx = nb[1] * grid_w + nb[0];
                    if (grid_slice[nidx] && comp[nidx] < 0) {
                        comp[nidx] = next_comp;
                        stack.push_back(nidx);
                    }
                }
            }
            ++next_comp;
            const double node_x0 = (min_i + 0.5) * frame_w / grid_w;
            const double node_x1 = (max_i + 0.5) * frame_w / grid_w;
            const double node_y0 = (min_j + 0.5) * frame_h / grid_h;
            const double node_y1 = (max_j + 0.5) * frame_h / grid_h;
            int x0 = static_cast<int>(std::floor(std::floor(node_x0) - pitch_x / 2));
            int x1 = static_cast<int>(std::ceil(std::floor(node_x1) + pitch_x / 2));
            int y0 = static_cast<int>(std::floor(std::floor(node_y0) - pitch_y / 2));
            int y1 = static_cast<int>(std::ceil(std::floor(node_y1) + pitch_y / 2));
            x0 = std::max(0, x0);
            y0 = std::max(0, y0);
            x1 = std::min(frame_w - 1, x1);
            y1 = std::min(frame_h - 1, y1);
            rects.push_back(Rect{x0, y0, x1 - x0 + 1, y1 - y0 + 1});
        }
    }
    return RegionMask::from_rects(frame_w, frame_h, rects);
}

// ---------------------------------------------------------------------------
// Evaluation

struct EvalMetrics {
    long long tp = 0, fp = 0, tn = 0, fn = 0;
    double accuracy = 0.0;
    double auc = 0.0;
    double z_score = 0.0;
    double threshold = 0.0;

    double tpr() const { return tp + fn ? static_cast<double>(tp) / (tp + fn) : 0.0; }
    double tnr() const { return tn + fp ? static_cast<double>(tn) / (tn + fp) : 0.0; }
};

// Rank-statistic (Mann-Whitney) AUC with tie-averaged ranks.
inline double auc_rank(const std::vector<double>& probs, const std::vector<bool>& labels) {
    const std::size_t n = probs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return probs[a] < probs[b]; });
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && probs[order[j]] == probs[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j - 1)) / 2.0 + 1.0;
        for (std::size_t k = i; k < j; ++k) rank[order[k]] = avg;
        i = j;
    }
    double pos_rank_sum = 0.0;
    std::size_t npos = 0;
    for (std::size_t k = 0; k < n; ++k)
        if (labels[k]) {
            pos_rank_sum += rank[k];
            ++npos;
        }
    const std::size_t nneg = n - npos;
    if (npos == 0 || nneg == 0) throw std::domain_error("AUC undefined for single-class set");
    return (pos_rank_sum - static_cast<double>(npos) * (npos + 1) / 2.0) /
           (static_cast<double>(npos) * static_cast<double>(nneg));
}

// Confusion counts at probability 0.5, rank AUC, and the one-proportion
// z-score (accuracy - 0.5) / sqrt(0.25 / N).
inline EvalMetrics evaluate(const DetectorModel& m, const std::vector<double>& features,
                            const std::vector<bool>& labels) {
    if (features.empty() || features.size() != labels.size())
        throw std::domain_error("evaluate: empty or mismatched test set");
    std::vector<double> probs(features.size());
    EvalMetrics em;
    for (std::size_t i = 0; i < features.size(); ++i) {
        probs[i] = predict(m, features[i]).probability;
        const bool pred = probs[i] > 0.5;
        if (pred && labels[i]) ++em.tp;
        else if (pred && !labels[i]) ++em.fp;
        else if (!pred && !labels[i]) ++em.tn;
        else ++em.fn;
    }
    const double n = static_cast<double>(features.size());
    em.accuracy = static_cast<double>(em.tp + em.tn) / n;
    em.auc = auc_rank(probs, labels);
    em.z_score = (em.accuracy - 0.5) / std::sqrt(0.25 / n);
    em.threshold = m.threshold();
    return em;
}

// Fraction of pixels the trigger array does not have to monitor.
inline double sampling_reduction(int frame_w, int frame_h, int grid_w, int grid_h) {
    if (grid_w > frame_w || grid_h > frame_h)
        throw std::domain_error("sampling_reduction: grid larger than frame");
    const double total = static_cast<double>(frame_w) * frame_h;
    return (total - static_cast<double>(grid_w) * grid_h) / total;
}

}  // namespace flashkit
